"""Token counting shared by every chunking strategy and every budget check.

Two schemes are built in:

``word_punct``
    Each maximal run of Unicode alphanumerics is one token and every other
    non-whitespace character is one token on its own.
``chars_div_4``
    ``ceil(len(text) / 4)`` over code points.

Both schemes are *additive*: the count of a concatenation can be derived from
per-part integer weights, which lets the chunkers check budgets on joined text
in O(1) per step instead of recounting. Custom counters that are not additive
only need to implement :meth:`TokenCounter.count`.
"""

from __future__ import annotations

import math

from . import _kernels

SCHEMES = ("word_punct", "chars_div_4")

_ALIASES = {
    "word_punct": "word_punct",
    "word-punct": "word_punct",
    "chars_div_4": "chars_div_4",
    "chars4": "chars_div_4",
    "chars-div-4": "chars_div_4",
}


class TokenCounter:
    """Interface for token counters.

    Additive counters set ``additive = True`` and implement :meth:`weight` and
    :meth:`joiner_weight` such that for parts joined by ``joiner``::

        count(joiner.join(parts)) == from_weight(sum(weight(p)) + (n - 1) * joiner_weight(joiner))
    """

    scheme = "custom"
    additive = False
    divisor = 1

    def count(self, text: str) -> int:
        raise NotImplementedError

    def weight(self, text: str) -> int:
        raise NotImplementedError

    def joiner_weight(self, joiner: str) -> int | None:
        """Weight contributed by one occurrence of ``joiner``, or None if joining is not additive."""
        return None

    def from_weight(self, weight: int) -> int:
        return -(-weight // self.divisor)

    def prefix_weights(self, text: str, cuts: list[int]) -> list[int]:
        """Weight of ``text[:c]`` for each cut, given cuts that fall on token starts."""
        return [self.weight(text[:c]) for c in cuts]

    def __call__(self, text: str) -> int:
        return self.count(text)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))


class WordPunctCounter(TokenCounter):
    scheme = "word_punct"
    additive = True
    divisor = 1

    def count(self, text: str) -> int:
        return _kernels.word_punct_count(text)

    weight = count

    def prefix_weights(self, text: str, cuts: list[int]) -> list[int]:
        # text[:c] for the i-th token start c holds exactly i tokens
        return list(range(len(cuts)))

    def joiner_weight(self, joiner: str) -> int | None:
        # whitespace ends any alnum run, so neighbours never fuse across it
        if joiner and joiner.isspace():
            return 0
        return None


class CharsDiv4Counter(TokenCounter):
    scheme = "chars_div_4"
    additive = True
    divisor = 4

    def count(self, text: str) -> int:
        return math.ceil(len(text) / 4)

    def weight(self, text: str) -> int:
        return len(text)

    def joiner_weight(self, joiner: str) -> int | None:
        return len(joiner)

    def prefix_weights(self, text: str, cuts: list[int]) -> list[int]:
        return list(cuts)


def get_counter(scheme: str = "word_punct") -> TokenCounter:
    try:
        name = _ALIASES[scheme]
    except KeyError:
        raise ValueError(f"unknown token scheme {scheme!r}; expected one of {sorted(_ALIASES)}") from None
    if name == "word_punct":
        return WordPunctCounter()
    return CharsDiv4Counter()


def count_tokens(counter: TokenCounter, text: str) -> int:
    return counter.count(text)
