"""Chunk statistics for one strategy run and side-by-side comparison of runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import MismatchedRunError


@dataclass(frozen=True)
class ChunkReport:
    strategy: str
    chunk_count: int
    avg_tokens: float | None
    min_tokens: int | None
    max_tokens: int | None
    utilization: float | None
    elapsed_ms: float
    budget: int
    token_scheme: str
    source_id: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ChunkReport":
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__})


def report(
    chunks,
    budget: int,
    elapsed_ms: float = 0.0,
    strategy: str | None = None,
    token_scheme: str = "word_punct",
    source_id: str | None = None,
) -> ChunkReport:
    counts = [c.tokens for c in chunks]
    if strategy is None:
        strategy = chunks[0].strategy if chunks else "unknown"
    if source_id is None:
        source_id = chunks[0].source_id if chunks else ""
    if not counts:
        return ChunkReport(strategy, 0, None, None, None, None, elapsed_ms, budget, token_scheme, source_id)
    avg = sum(counts) / len(counts)
    return ChunkReport(
        strategy=strategy,
        chunk_count=len(counts),
        avg_tokens=avg,
        min_tokens=min(counts),
        max_tokens=max(counts),
        utilization=avg / budget,
        elapsed_ms=elapsed_ms,
        budget=budget,
        token_scheme=token_scheme,
        source_id=source_id,
    )


@dataclass(frozen=True)
class PairDelta:
    """``subject`` measured against ``reference``."""

    subject: str
    reference: str
    chunk_delta: int
    reduction: float | None  # 1 - count_subject / count_reference
    utilization_delta: float | None
    speedup: float | None  # elapsed_reference / elapsed_subject


@dataclass(frozen=True)
class ComparisonTable:
    reports: tuple[ChunkReport, ...]
    deltas: tuple[PairDelta, ...] = field(default=())

    def delta(self, subject: str, reference: str) -> PairDelta:
        for d in self.deltas:
            if d.subject == subject and d.reference == reference:
                return d
        raise KeyError((subject, reference))

    def to_dict(self) -> dict:
        return {"reports": [r.to_dict() for r in self.reports], "deltas": [asdict(d) for d in self.deltas]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self) -> str:
        return format_table(self.reports) + "\n\n" + format_deltas(self.deltas)


def _delta(a: ChunkReport, b: ChunkReport) -> PairDelta:
    reduction = 1 - a.chunk_count / b.chunk_count if b.chunk_count else None
    util = None
    if a.utilization is not None and b.utilization is not None:
        util = a.utilization - b.utilization
    speed = b.elapsed_ms / a.elapsed_ms if a.elapsed_ms > 0 else None
    return PairDelta(a.strategy, b.strategy, a.chunk_count - b.chunk_count, reduction, util, speed)


def compare(reports: Sequence[ChunkReport]) -> ComparisonTable:
    """Deltas for every ordered pair of runs; all runs must share corpus and token scheme."""
    if len(reports) < 2:
        raise ValueError("compare needs at least two reports")
    first = reports[0]
    for r in reports[1:]:
        if r.source_id != first.source_id:
            raise MismatchedRunError(f"different corpora: {first.source_id!r} vs {r.source_id!r}")
        if r.token_scheme != first.token_scheme:
            raise MismatchedRunError(f"different token schemes: {first.token_scheme} vs {r.token_scheme}")
    deltas = tuple(_delta(a, b) for a in reports for b in reports if a is not b)
    return ComparisonTable(tuple(reports), deltas)


def _fmt(v, spec: str) -> str:
    return "-" if v is None else format(v, spec)


def format_table(reports: Sequence[ChunkReport]) -> str:
    header = f"{'strategy':<14}{'chunks':>10}{'avg':>9}{'min':>7}{'max':>7}{'util':>8}{'ms':>12}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.strategy:<14}{r.chunk_count:>10,}{_fmt(r.avg_tokens, '.1f'):>9}"
            f"{_fmt(r.min_tokens, 'd'):>7}{_fmt(r.max_tokens, 'd'):>7}"
            f"{_fmt(r.utilization, '.3f'):>8}{r.elapsed_ms:>12,.1f}"
        )
    if reports:
        lines.append(f"budget={reports[0].budget} tokens, scheme={reports[0].token_scheme}")
    return "\n".join(lines)


def format_deltas(deltas: Sequence[PairDelta]) -> str:
    lines = [f"{'subject':<14}{'vs':<14}{'reduction':>11}{'util +/-':>10}{'speedup':>9}"]
    for d in deltas:
        red = "-" if d.reduction is None else f"{d.reduction:.1%}"
        lines.append(
            f"{d.subject:<14}{d.reference:<14}{red:>11}{_fmt(d.utilization_delta, '+.3f'):>10}"
            f"{_fmt(d.speedup, '.2f'):>9}"
        )
    return "\n".join(lines)
