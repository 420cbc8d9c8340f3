"""Structure-aware tabular chunking.

Rows of the Row Tree become leaves; rows over budget are split at key-value
boundaries (and, for a single pair that alone is over budget, at token
boundaries inside its value); leaves are then packed greedily, in order,
within their sheet. Chunks never overlap and never cross sheets.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from . import _kernels
from .chunk import Chunk, Fragment
from .ingestion import TabularDocument
from .metrics import ChunkReport, report
from .rowtree import RowGroup, RowNode, RowTree, build_row_tree, default_threads, flatten, row_marker
from .tokens import TokenCounter, get_counter

LEAF_JOINER = "\n\n"
LINE_JOINER = "\n"
CONT_SUFFIX = " (cont.)"

@dataclass(frozen=True)
class Budget:
    max_tokens: int = 512

    def __post_init__(self):
        if not isinstance(self.max_tokens, int) or self.max_tokens < 1:
            raise ValueError(f"budget must be a positive integer, got {self.max_tokens!r}")


def _limit(budget) -> int:
    return budget.max_tokens if isinstance(budget, Budget) else Budget(budget).max_tokens


@dataclass(frozen=True)
class LeafUnit:
    sheet_name: str
    row_index: int
    text: str
    token_count: int
    weight: int
    part: tuple[int, int] | None = None
    oversized: bool = False


def _leaf_from_row(row: RowNode) -> LeafUnit:
    return LeafUnit(row.sheet_name, row.row_index, row.rendered, row.token_count, row.weight)


def segment_cuts(value: str) -> list[int]:
    """Offsets cutting ``value`` into pieces of exactly one token each (plus surrounding spaces).

    The first piece keeps any leading whitespace; the last cut is ``len(value)``.
    """
    starts = _kernels.token_starts(value)
    if not starts:
        return [0, len(value)]
    return [0, *starts[1:], len(value)]


class _Meter:
    """Cost of ``head + joiner + line + joiner + line ...`` as lines are considered.

    Uses integer weights for additive counters and falls back to counting the
    assembled text otherwise.
    """

    def __init__(self, counter: TokenCounter, head: str, joiner: str = LINE_JOINER):
        self.counter = counter
        self.head = head
        self.joiner = joiner
        self.jw = counter.joiner_weight(joiner) if counter.additive else None
        self.fast = self.jw is not None
        self.head_w = counter.weight(head) if self.fast else 0

    def weight(self, text: str) -> int:
        return self.counter.weight(text) if self.fast else 0

    def cost(self, lines: Sequence[str], line_weight: int) -> int:
        """Tokens of the block ``head`` + ``lines``; ``line_weight`` is their summed weight."""
        if self.fast:
            return self.counter.from_weight(self.head_w + line_weight + len(lines) * self.jw)
        return self.counter.count(self.joiner.join([self.head, *lines]))


def _hard_split(key: str, value: str, limit: int, meter: _Meter) -> list[tuple[str, int, bool]]:
    """Split one key-value line into continuation lines that each fit with the marker.

    Returns ``(line, weight, oversized)`` triples. When the key plus a single
    token cannot fit, the rest of the value is emitted as one oversized line.
    """
    key = flatten(key)
    value = flatten(value)
    cuts = segment_cuts(value)
    n = len(cuts) - 1
    out = []
    i = 0
    if meter.fast:
        cum = meter.counter.prefix_weights(value, cuts)
    while i < n:
        prefix = f"{key}: " if i == 0 else f"{key}{CONT_SUFFIX}: "
        if meter.fast:
            pw = meter.weight(prefix)
            room = limit * meter.counter.divisor - meter.head_w - meter.jw - pw
            # largest j with cum[j] - cum[i] <= room
            j = bisect_right(cum, cum[i] + room, i, n + 1) - 1
            if j <= i:
                out.append((prefix + value[cuts[i]:], pw + cum[n] - cum[i], True))
                break
            out.append((prefix + value[cuts[i]:cuts[j]], pw + cum[j] - cum[i], False))
        else:
            j = i
            while j < n and meter.cost([prefix + value[cuts[i]:cuts[j + 1]]], 0) <= limit:
                j += 1
            if j == i:
                out.append((prefix + value[cuts[i]:], 0, True))
                break
            out.append((prefix + value[cuts[i]:cuts[j]], 0, False))
        i = j
    return out


def _plan_fragments(row: RowNode, limit: int, meter: _Meter) -> list[tuple[list[str], int, bool]]:
    """Group the row's lines into fragments: ``(lines, summed line weight, oversized)``."""
    frags: list[tuple[list[str], int, bool]] = []
    cur: list[str] = []
    cur_w = 0
    for key, value in row.pairs:
        line = f"{flatten(key)}: {flatten(value)}"
        lw = meter.weight(line)
        if cur and meter.cost(cur + [line], cur_w + lw) <= limit:
            cur.append(line)
            cur_w += lw
            continue
        if meter.cost([line], lw) <= limit:
            if cur:
                frags.append((cur, cur_w, False))
            cur, cur_w = [line], lw
            continue
        if cur:
            frags.append((cur, cur_w, False))
        pieces = _hard_split(key, value, limit, meter)
        for line, w, oversized in pieces[:-1]:
            frags.append(([line], w, oversized))
        line, w, oversized = pieces[-1]
        if oversized:
            frags.append(([line], w, True))
            cur, cur_w = [], 0
        else:
            cur, cur_w = [line], w
    if cur:
        frags.append((cur, cur_w, False))
    return frags


def emergency_split(row: RowNode, budget, counter: TokenCounter) -> list[LeafUnit]:
    """Split an over-budget row at key-value boundaries into ``[row i @ s | part k/N]`` fragments."""
    limit = _limit(budget)
    if not row.pairs:
        return [LeafUnit(row.sheet_name, row.row_index, row.rendered, row.token_count, row.weight,
                         oversized=row.token_count > limit)]
    digits = 1
    while True:
        # plan against the widest marker with this many digits so real markers never cost more
        widest = int("9" * digits)
        meter = _Meter(counter, row_marker(row.sheet_name, row.row_index, (widest, widest)))
        plan = _plan_fragments(row, limit, meter)
        if len(str(len(plan))) <= digits:
            break
        digits = len(str(len(plan)))
    total = len(plan)
    leaves = []
    for k, (lines, line_w, oversized) in enumerate(plan, 1):
        marker = row_marker(row.sheet_name, row.row_index, (k, total))
        text = LINE_JOINER.join([marker, *lines])
        if meter.fast:
            weight = meter.weight(marker) + line_w + len(lines) * meter.jw
            tokens = counter.from_weight(weight)
        else:
            tokens = counter.count(text)
            weight = counter.weight(text) if counter.additive else tokens
        leaves.append(LeafUnit(row.sheet_name, row.row_index, text, tokens, weight, (k, total),
                               oversized or tokens > limit))
    return leaves


def split_group(group: RowGroup, budget, counter: TokenCounter) -> list[LeafUnit]:
    limit = _limit(budget)
    leaves: list[LeafUnit] = []
    for row in group.rows:
        if row.token_count <= limit:
            leaves.append(_leaf_from_row(row))
        else:
            leaves.extend(emergency_split(row, limit, counter))
    return leaves


def split_leaves(tree: RowTree, budget, counter: TokenCounter) -> list[list[LeafUnit]]:
    """Leaves per group, in order: rows that fit stay whole, larger rows are emergency-split."""
    return [split_group(g, budget, counter) for g in tree.groups]


def _merge_group(
    leaves: Sequence[LeafUnit], limit: int, counter: TokenCounter, source_id: str, sheet: str
) -> list[Chunk]:
    jw = counter.joiner_weight(LEAF_JOINER) if counter.additive else None
    batches: list[tuple[int, int, int]] = []  # (start, stop, tokens)
    if jw is not None:
        starts = _kernels.greedy_pack([l.weight for l in leaves], jw, counter.divisor, limit)
        bounds = starts[1:] + [len(leaves)]
        for a, b in zip(starts, bounds):
            w = sum(l.weight for l in leaves[a:b]) + (b - a - 1) * jw
            batches.append((a, b, counter.from_weight(w)))
    else:
        a = 0
        while a < len(leaves):
            b = a + 1
            tokens = leaves[a].token_count
            while b < len(leaves):
                t = counter.count(LEAF_JOINER.join(l.text for l in leaves[a : b + 1]))
                if t > limit:
                    break
                tokens = t
                b += 1
            batches.append((a, b, tokens))
            a = b

    chunks = []
    for a, b, tokens in batches:
        part = leaves[a:b]
        frags = tuple(Fragment(l.row_index, *l.part) for l in part if l.part is not None)
        chunks.append(
            Chunk(
                chunk_index=-1,
                strategy="stc",
                source_id=source_id,
                sheet=sheet,
                row_first=part[0].row_index,
                row_last=part[-1].row_index,
                fragment=frags or None,
                tokens=tokens,
                oversized=any(l.oversized for l in part),
                text=LEAF_JOINER.join(l.text for l in part),
            )
        )
    return chunks


def _reindex(chunks: list[Chunk]) -> list[Chunk]:
    return [replace(c, chunk_index=i) for i, c in enumerate(chunks)]


def greedy_merge(
    leaves_per_group: Sequence[Sequence[LeafUnit]],
    budget,
    counter: TokenCounter,
    source_id: str = "",
    sheets: Sequence[str] | None = None,
) -> list[Chunk]:
    """Pack each group's leaves in order; a chunk closes when the next leaf would exceed the budget."""
    limit = _limit(budget)
    out: list[Chunk] = []
    for gi, leaves in enumerate(leaves_per_group):
        if not leaves:
            continue
        sheet = sheets[gi] if sheets is not None else leaves[0].sheet_name
        out.extend(_merge_group(leaves, limit, counter, source_id, sheet))
    return _reindex(out)


def chunk_tree(tree: RowTree, budget, counter: TokenCounter, threads: int | None = None) -> list[Chunk]:
    limit = _limit(budget)
    threads = threads or default_threads()

    def one(group: RowGroup) -> list[Chunk]:
        leaves = split_group(group, limit, counter)
        if not leaves:
            return []
        return _merge_group(leaves, limit, counter, tree.source_id, group.sheet_name)

    if threads > 1 and len(tree.groups) > 1:
        with ThreadPoolExecutor(threads) as pool:
            per_group = list(pool.map(one, tree.groups))
    else:
        per_group = [one(g) for g in tree.groups]
    return _reindex([c for chunks in per_group for c in chunks])


def chunk_document(
    doc: TabularDocument, budget=512, counter: TokenCounter | None = None, threads: int | None = None
) -> tuple[list[Chunk], ChunkReport]:
    """Row Tree -> leaves -> greedy merge, timed end to end."""
    counter = counter or get_counter()
    limit = _limit(budget)
    t0 = time.perf_counter()
    tree = build_row_tree(doc, counter, threads)
    chunks = chunk_tree(tree, limit, counter, threads)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return chunks, report(chunks, limit, elapsed_ms, strategy="stc", token_scheme=counter.scheme,
                          source_id=doc.source_id)
