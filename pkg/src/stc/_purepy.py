"""Pure-Python versions of the hot kernels.

These are the reference implementations; ``_speedups.pyx`` must agree with them
on every input.
"""

import re

# \w is Unicode alnum plus "_", \s is Unicode whitespace. Runs of alnum are one
# token each, every other non-space character (underscore included) is one token.
_TOKEN_RE = re.compile(r"[^\W_]+|[^\w\s]|_")


def word_punct_count(text: str) -> int:
    return len(_TOKEN_RE.findall(text))


def greedy_pack(weights, joiner_weight: int, divisor: int, budget: int) -> list[int]:
    """Return the start index of every batch produced by greedy contiguous packing.

    A batch of items ``i..j`` costs ``ceil((sum(w[i..j]) + (j - i) * joiner_weight) / divisor)``.
    A batch closes as soon as appending the next item would push its cost above
    ``budget``; an item that is over budget on its own still forms a batch.
    """
    starts = []
    acc = -1  # weight of the open batch, -1 when no batch is open
    limit = budget * divisor  # cost <= budget  <=>  weight <= budget * divisor
    for i, w in enumerate(weights):
        if acc < 0:
            starts.append(i)
            acc = w
            continue
        cand = acc + joiner_weight + w
        if cand > limit:
            starts.append(i)
            acc = w
        else:
            acc = cand
    return starts


def token_starts(text: str) -> list[int]:
    """Start offset of every token, using the same token rule as :func:`word_punct_count`."""
    return [m.start() for m in _TOKEN_RE.finditer(text)]
