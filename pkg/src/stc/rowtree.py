"""Row Tree construction and the key-value block grammar.

A row renders as::

    [row 3 @ Sheet1]
    name: Alice
    age: 30

Empty cells are skipped, newlines inside keys and values become single spaces,
and lines are joined by ``\\n`` with no trailing newline. Emergency-split
fragments carry ``| part k/N`` inside the marker.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .ingestion import Sheet, TabularDocument
from .tokens import TokenCounter

_MARKER = re.compile(r"^\[row (\d+) @ (.*?)(?: \| part (\d+)/(\d+))?\]$")


class KvPair(NamedTuple):
    key: str
    value: str


@dataclass(frozen=True)
class RowNode:
    sheet_name: str
    row_index: int
    pairs: tuple[KvPair, ...]
    rendered: str
    token_count: int
    weight: int  # additive weight of ``rendered`` under the run's counter


@dataclass(frozen=True)
class RowGroup:
    source_id: str
    sheet_name: str
    rows: tuple[RowNode, ...]

    @property
    def parent_key(self) -> tuple[str, str]:
        return (self.source_id, self.sheet_name)


@dataclass(frozen=True)
class RowTree:
    source_id: str
    groups: tuple[RowGroup, ...]

    def __iter__(self):
        return iter(self.groups)

    @property
    def n_rows(self) -> int:
        return sum(len(g.rows) for g in self.groups)


def flatten(text: str) -> str:
    if "\r" in text:
        text = text.replace("\r\n", " ").replace("\r", " ")
    return text.replace("\n", " ")


def is_empty_cell(value: str) -> bool:
    return value.strip() == ""


def row_marker(sheet_name: str, row_index: int, part: tuple[int, int] | None = None) -> str:
    if part is None:
        return f"[row {row_index} @ {flatten(sheet_name)}]"
    return f"[row {row_index} @ {flatten(sheet_name)} | part {part[0]}/{part[1]}]"


def kv_line(key: str, value: str) -> str:
    return f"{flatten(key)}: {flatten(value)}"


def render_kv_block(sheet_name: str, row_index: int, pairs: Sequence[tuple[str, str]]) -> str:
    lines = [row_marker(sheet_name, row_index)]
    lines.extend(kv_line(k, v) for k, v in pairs)
    return "\n".join(lines)


def row_pairs(headers: Sequence[str], row: Sequence[str]) -> tuple[KvPair, ...]:
    return tuple(KvPair(h, v) for h, v in zip(headers, row) if not is_empty_cell(v))


def make_row_node(sheet_name: str, row_index: int, pairs: tuple[KvPair, ...], counter: TokenCounter) -> RowNode:
    rendered = render_kv_block(sheet_name, row_index, pairs)
    tokens = counter.count(rendered)
    weight = counter.weight(rendered) if counter.additive else tokens
    return RowNode(sheet_name, row_index, pairs, rendered, tokens, weight)


def _build_group(source_id: str, sheet: Sheet, counter: TokenCounter) -> RowGroup:
    headers = sheet.headers
    name = sheet.name
    if counter.additive:
        # inlined make_row_node: this loop runs once per input row
        count, weight = counter.count, counter.weight
        same = count == weight
        nodes = []
        for i, row in enumerate(sheet.rows):
            pairs = row_pairs(headers, row)
            rendered = render_kv_block(name, i, pairs)
            t = count(rendered)
            nodes.append(RowNode(name, i, pairs, rendered, t, t if same else weight(rendered)))
    else:
        nodes = [make_row_node(name, i, row_pairs(headers, row), counter) for i, row in enumerate(sheet.rows)]
    return RowGroup(source_id, name, tuple(nodes))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("STC_THREADS", "1")))
    except ValueError:
        return 1


def build_row_tree(doc: TabularDocument, counter: TokenCounter, threads: int | None = None) -> RowTree:
    """One group per sheet, one node per row, rows in source order."""
    threads = threads or default_threads()
    if threads > 1 and len(doc.sheets) > 1:
        with ThreadPoolExecutor(threads) as pool:
            groups = list(pool.map(lambda s: _build_group(doc.source_id, s, counter), doc.sheets))
    else:
        groups = [_build_group(doc.source_id, s, counter) for s in doc.sheets]
    return RowTree(doc.source_id, tuple(groups))


@dataclass(frozen=True)
class ParsedBlock:
    sheet_name: str
    row_index: int
    part: tuple[int, int] | None
    pairs: tuple[KvPair, ...]


def parse_kv_block(block: str) -> ParsedBlock:
    """Inverse of :func:`render_kv_block` (keys must not contain ``": "``)."""
    first, *lines = block.split("\n")
    m = _MARKER.match(first)
    if not m:
        raise ValueError(f"not a row marker: {first!r}")
    part = (int(m.group(3)), int(m.group(4))) if m.group(3) else None
    pairs = []
    for line in lines:
        key, sep, value = line.partition(": ")
        if not sep:
            raise ValueError(f"not a key-value line: {line!r}")
        pairs.append(KvPair(key, value))
    return ParsedBlock(m.group(2), int(m.group(1)), part, tuple(pairs))
