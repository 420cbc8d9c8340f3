"""Select the compiled kernels when available, else the pure-Python ones.

Set ``STC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _purepy

BACKEND = "python"
word_punct_count = _purepy.word_punct_count
greedy_pack = _purepy.greedy_pack
token_starts = _purepy.token_starts

if os.environ.get("STC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _speedups
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        word_punct_count = _speedups.word_punct_count
        greedy_pack = _speedups.greedy_pack
        token_starts = _speedups.token_starts
