"""Comparison chunkers: recursive separator splitting with a sliding token window.

``recursive``
    raw CSV-style linearization of the document, then :func:`recursive_split`.
``kv_recursive``
    the same splitter over the rows rendered as key-value blocks.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field, replace

from .chunk import Chunk
from .ingestion import TabularDocument
from .metrics import ChunkReport, report
from .rowtree import render_kv_block, row_pairs
from .tokens import TokenCounter, get_counter

SHEET_SEPARATOR = "\n\n# sheet: {name}\n"


@dataclass(frozen=True)
class RecursiveSplitConfig:
    chunk_size_tokens: int = 512
    overlap_tokens: int = 100
    separators: tuple[str, ...] = field(default=("\n\n", "\n", " ", ""))
    strip_whitespace: bool = True

    def __post_init__(self):
        if self.chunk_size_tokens < 1:
            raise ValueError("chunk_size_tokens must be >= 1")
        if not 0 <= self.overlap_tokens < self.chunk_size_tokens:
            raise ValueError(
                f"overlap ({self.overlap_tokens}) must be >= 0 and below chunk size ({self.chunk_size_tokens})"
            )


def _csv_cell(value: str) -> str:
    if any(c in value for c in ',"\n\r'):
        return '"' + value.replace('"', '""') + '"'
    return value


def linearize_raw(doc: TabularDocument) -> str:
    parts = []
    for sheet in doc.sheets:
        if not sheet.rows:
            continue
        lines = [",".join(_csv_cell(h) for h in sheet.headers)]
        lines.extend(",".join(_csv_cell(v) for v in row) for row in sheet.rows)
        body = "\n".join(lines)
        parts.append(body if not parts else SHEET_SEPARATOR.format(name=sheet.name) + body)
    return "".join(parts)


def linearize_kv(doc: TabularDocument) -> str:
    blocks = [
        render_kv_block(sheet.name, i, row_pairs(sheet.headers, row))
        for sheet in doc.sheets
        for i, row in enumerate(sheet.rows)
    ]
    return "\n\n".join(blocks)


class _Splitter:
    """One pass of recursive splitting over ``text``; pieces are ``(start, stop, tokens)``."""

    def __init__(self, text: str, config: RecursiveSplitConfig, counter: TokenCounter):
        self.text = text
        self.cfg = config
        self.count = counter.count
        self.spans: list[tuple[int, int]] = []

    def run(self) -> list[tuple[int, int]]:
        if self.text:
            self._split(0, len(self.text), self.cfg.separators)
        return self.spans

    def _pieces(self, start: int, stop: int, sep: str) -> list[tuple[int, int]]:
        if sep == "":
            return [(i, i + 1) for i in range(start, stop)]
        out = []
        text = self.text
        pos = text.find(sep, start, stop)
        if pos == -1:
            return [(start, stop)]
        if pos > start:
            out.append((start, pos))
        while True:
            nxt = text.find(sep, pos + len(sep), stop)
            if nxt == -1:
                out.append((pos, stop))
                return out
            out.append((pos, nxt))
            pos = nxt

    def _split(self, start: int, stop: int, separators) -> None:
        text = self.text
        sep, rest = separators[-1], ()
        for i, s in enumerate(separators):
            if s == "":
                sep = s
                break
            if text.find(s, start, stop) != -1:
                sep, rest = s, separators[i + 1 :]
                break
        size = self.cfg.chunk_size_tokens
        good: list[tuple[int, int, int]] = []
        for a, b in self._pieces(start, stop, sep):
            n = self.count(text[a:b])
            if n < size:
                good.append((a, b, n))
                continue
            if good:
                self._merge(good)
                good = []
            if rest:
                self._split(a, b, rest)
            else:
                self._emit(a, b)
        if good:
            self._merge(good)

    def _tail(self, a: int, b: int, room: int) -> tuple[int, int, int] | None:
        """Longest suffix of ``text[a:b]`` starting at whitespace with at most ``room`` tokens."""
        if room <= 0:
            return None
        text = self.text
        cuts = [i for i in range(a, b) if text[i].isspace()]
        # suffix token counts shrink as the cut moves right; find the leftmost cut that fits
        lo, hi = 0, len(cuts)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.count(text[cuts[mid]:b]) <= room:
                hi = mid
            else:
                lo = mid + 1
        if lo == len(cuts):
            return None
        n = self.count(text[cuts[lo]:b])
        return (cuts[lo], b, n) if n > 0 else None

    def _merge(self, pieces: list[tuple[int, int, int]]) -> None:
        size, overlap = self.cfg.chunk_size_tokens, self.cfg.overlap_tokens
        cur: deque[tuple[int, int, int]] = deque()
        total = 0
        for a, b, n in pieces:
            if total + n > size:
                if cur:
                    self._emit(cur[0][0], cur[-1][1])
                    last = cur[-1]
                    while total > overlap or (total + n > size and total > 0):
                        total -= cur.popleft()[2]
                    if not cur and overlap > 0:
                        # the last piece alone is wider than the window: carry its token tail instead
                        tail = self._tail(last[0], last[1], min(overlap, size - n))
                        if tail is not None:
                            cur.append(tail)
                            total = tail[2]
            cur.append((a, b, n))
            total += n
        if cur:
            self._emit(cur[0][0], cur[-1][1])

    def _emit(self, a: int, b: int) -> None:
        self.spans.append((a, b))


def recursive_split(
    text: str,
    config: RecursiveSplitConfig | None = None,
    counter: TokenCounter | None = None,
    strategy: str = "recursive",
    source_id: str = "",
) -> list[Chunk]:
    config = config or RecursiveSplitConfig()
    counter = counter or get_counter()
    chunks = []
    for a, b in _Splitter(text, config, counter).run():
        piece = text[a:b]
        if config.strip_whitespace:
            stripped = piece.strip()
            a += len(piece) - len(piece.lstrip())
            piece = stripped
        if not piece:
            continue
        chunks.append(
            Chunk(
                chunk_index=len(chunks),
                strategy=strategy,
                source_id=source_id,
                sheet=None,
                row_first=None,
                row_last=None,
                fragment=None,
                tokens=counter.count(piece),
                oversized=False,
                text=piece,
                start=a,
            )
        )
    return chunks


def run_baseline(
    doc: TabularDocument,
    strategy: str = "recursive",
    config: RecursiveSplitConfig | None = None,
    counter: TokenCounter | None = None,
) -> tuple[list[Chunk], ChunkReport]:
    strategy = strategy.replace("-", "_")
    config = config or RecursiveSplitConfig()
    counter = counter or get_counter()
    t0 = time.perf_counter()
    if strategy == "recursive":
        text = linearize_raw(doc)
    elif strategy == "kv_recursive":
        text = linearize_kv(doc)
    else:
        raise ValueError(f"unknown baseline strategy {strategy!r}")
    chunks = recursive_split(text, config, counter, strategy=strategy, source_id=doc.source_id)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    # baselines may legitimately exceed the nominal budget; flag it like STC does
    chunks = [replace(c, oversized=True) if c.tokens > config.chunk_size_tokens else c for c in chunks]
    return chunks, report(chunks, config.chunk_size_tokens, elapsed_ms, strategy=strategy,
                          token_scheme=counter.scheme, source_id=doc.source_id)
