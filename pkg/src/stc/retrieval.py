"""BM25-only retrieval benchmark over chunk manifests.

Queries are sampled MAUD records (question + " " + contract name). A chunk is
relevant to a query when its normalized text contains both the normalized
contract name and the normalized question label. Hits are binary per query,
so Recall@k is the fraction of queries with a relevant chunk in the top k.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .chunk import Chunk
from .errors import EmptyCorpusError, SampleSizeError
from .ingestion import MaudRecord

_TERM = re.compile(r"[^\W_]+")

DEFAULT_KS = (1, 3, 5)


def analyze(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter or digit."""
    return _TERM.findall(text.lower())


def normalize(text: str) -> str:
    return " ".join(text.lower().split())


class Bm25Index:
    """Okapi BM25 over chunk texts; immutable once built."""

    def __init__(
        self,
        chunks: Sequence[Chunk],
        k1: float = 1.2,
        b: float = 0.75,
        analyzer: Callable[[str], list[str]] = analyze,
    ):
        if not chunks:
            raise EmptyCorpusError("cannot index an empty chunk list")
        self.k1 = k1
        self.b = b
        self.analyzer = analyzer
        self.chunk_ids = np.array([c.chunk_index for c in chunks], dtype=np.int64)
        self.texts = [c.text for c in chunks]
        self._norm: list[str | None] = [None] * len(chunks)
        self.N = len(chunks)

        tfs = [Counter(analyzer(c.text)) for c in chunks]
        self.doc_lengths = np.array([sum(tf.values()) for tf in tfs], dtype=np.float64)
        self.avg_doc_length = float(self.doc_lengths.mean())
        avgdl = self.avg_doc_length if self.avg_doc_length > 0 else 1.0
        norm = k1 * (1.0 - b + b * self.doc_lengths / avgdl)

        docs_by_term: dict[str, list[int]] = {}
        freqs_by_term: dict[str, list[int]] = {}
        for doc, tf in enumerate(tfs):
            for term, f in tf.items():
                docs_by_term.setdefault(term, []).append(doc)
                freqs_by_term.setdefault(term, []).append(f)
        self.postings: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        self._weights: dict[str, np.ndarray] = {}
        for term, docs in docs_by_term.items():
            d = np.array(docs, dtype=np.int64)
            f = np.array(freqs_by_term[term], dtype=np.float64)
            self.postings[term] = (d, f)
            self._weights[term] = f * (k1 + 1.0) / (f + norm[d])

    def df(self, term: str) -> int:
        p = self.postings.get(term)
        return 0 if p is None else len(p[0])

    def idf(self, term: str) -> float:
        df = self.df(term)
        return math.log((self.N - df + 0.5) / (df + 0.5) + 1.0)

    def scores(self, query: str) -> np.ndarray:
        """BM25 score of every indexed chunk, in index order."""
        out = np.zeros(self.N, dtype=np.float64)
        for term in self.analyzer(query):
            w = self._weights.get(term)
            if w is None:
                continue
            out[self.postings[term][0]] += self.idf(term) * w
        return out

    def search(self, query: str, k: int) -> list[tuple[int, float]]:
        """Top ``k`` as ``(chunk_id, score)``: score descending, then chunk id ascending."""
        s = self.scores(query)
        k = min(k, self.N)
        if k <= 0:
            return []
        if k < self.N:
            kth = np.partition(s, self.N - k)[self.N - k]
            cand = np.nonzero(s >= kth)[0]
        else:
            cand = np.arange(self.N)
        order = np.lexsort((self.chunk_ids[cand], -s[cand]))[:k]
        return [(int(self.chunk_ids[cand[i]]), float(s[cand[i]])) for i in order]

    def normalized_text(self, pos: int) -> str:
        t = self._norm[pos]
        if t is None:
            t = self._norm[pos] = normalize(self.texts[pos])
        return t

    def text_by_id(self) -> dict[int, str]:
        return {int(cid): t for cid, t in zip(self.chunk_ids, self.texts)}


def build_index(chunks: Sequence[Chunk], k1: float = 1.2, b: float = 0.75, analyzer=analyze) -> Bm25Index:
    return Bm25Index(chunks, k1=k1, b=b, analyzer=analyzer)


# --- sampling -----------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class XorShift64Star:
    """xorshift64* (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D), seeded via splitmix64."""

    def __init__(self, seed: int):
        self.state = splitmix64(seed & _MASK64) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


@dataclass(frozen=True)
class Query:
    query_id: int
    text: str
    contract_name: str
    question_label: str
    row_index: int = -1


def make_query(query_id: int, record: MaudRecord) -> Query:
    return Query(
        query_id=query_id,
        text=f"{record.question} {record.contract_name}",
        contract_name=record.contract_name,
        question_label=record.question_label,
        row_index=record.row_index,
    )


def sample_queries(records: Sequence[MaudRecord], n: int, seed: int) -> list[Query]:
    """Sample ``n`` records without replacement (partial Fisher-Yates driven by xorshift64*)."""
    if n < 0:
        raise SampleSizeError("n must be non-negative")
    if n > len(records):
        raise SampleSizeError(f"cannot sample {n} queries from {len(records)} records")
    rng = XorShift64Star(seed)
    idx = list(range(len(records)))
    for i in range(n):
        j = i + rng.below(len(idx) - i)
        idx[i], idx[j] = idx[j], idx[i]
    return [make_query(q, records[idx[q]]) for q in range(n)]


# --- relevance and metrics ----------------------------------------------------


def is_relevant(chunk_text: str, query: Query, normalized: bool = False) -> bool:
    text = chunk_text if normalized else normalize(chunk_text)
    return normalize(query.contract_name) in text and normalize(query.question_label) in text


@dataclass(frozen=True)
class QueryTrace:
    query_id: int
    rank_of_first_hit: int | None
    top1_chunk_id: int | None


@dataclass
class EvalResult:
    recall_at: dict[int, float]
    mrr: float
    n_queries: int
    cutoff: int
    seed: int | None = None
    strategy: str = ""
    k1: float | None = None
    b: float | None = None
    traces: list[QueryTrace] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n_queries": self.n_queries,
            "seed": self.seed,
            "cutoff": self.cutoff,
            "recall": {str(k): v for k, v in sorted(self.recall_at.items())},
            "mrr": self.mrr,
            "k1": self.k1,
            "b": self.b,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def trace_tsv(self) -> str:
        lines = ["query_id\trank_of_first_hit\ttop1_chunk_id"]
        for t in self.traces:
            rank = "" if t.rank_of_first_hit is None else str(t.rank_of_first_hit)
            top = "" if t.top1_chunk_id is None else str(t.top1_chunk_id)
            lines.append(f"{t.query_id}\t{rank}\t{top}")
        return "\n".join(lines) + "\n"


def sanity_violations(result: EvalResult) -> list[str]:
    ks = sorted(result.recall_at)
    bad = []
    eps = 1e-12
    for a, b in zip(ks, ks[1:]):
        if result.recall_at[a] > result.recall_at[b] + eps:
            bad.append(f"R@{a} > R@{b}")
    if 1 in result.recall_at and result.recall_at[1] > result.mrr + eps:
        bad.append("R@1 > MRR")
    if result.recall_at.get(result.cutoff) is not None and result.mrr > result.recall_at[result.cutoff] + eps:
        bad.append("MRR > R@cutoff")
    return bad


def evaluate_rankings(
    rankings: Mapping[int, Sequence[int]] | Sequence[Sequence[int]],
    chunk_texts: Mapping[int, str],
    queries: Sequence[Query],
    cutoff: int = 10,
    ks: Iterable[int] = DEFAULT_KS,
) -> EvalResult:
    """Score externally produced ranked lists (chunk ids per query id)."""
    ks = tuple(sorted(set(ks)))
    if cutoff < max(ks):
        raise ValueError(f"cutoff {cutoff} is below the largest k ({max(ks)})")
    norm_cache: dict[int, str] = {}
    first_hits: list[int | None] = []
    traces = []
    for q in queries:
        ranked = list(rankings[q.query_id])[:cutoff]
        hit = None
        for rank, cid in enumerate(ranked, 1):
            t = norm_cache.get(cid)
            if t is None:
                t = norm_cache[cid] = normalize(chunk_texts[cid])
            if is_relevant(t, q, normalized=True):
                hit = rank
                break
        first_hits.append(hit)
        traces.append(QueryTrace(q.query_id, hit, ranked[0] if ranked else None))
    return _aggregate(first_hits, cutoff, ks, traces)


def _aggregate(first_hits, cutoff, ks, traces) -> EvalResult:
    n = len(first_hits)
    all_ks = tuple(sorted(set(ks) | {cutoff}))
    if n == 0:
        return EvalResult({k: 0.0 for k in all_ks}, 0.0, 0, cutoff, traces=traces)
    recall = {k: sum(1 for h in first_hits if h is not None and h <= k) / n for k in all_ks}
    mrr = sum(1.0 / h for h in first_hits if h is not None) / n
    return EvalResult(recall, mrr, n, cutoff, traces=traces)


def evaluate(
    index: Bm25Index,
    queries: Sequence[Query],
    cutoff: int = 10,
    ks: Iterable[int] = DEFAULT_KS,
    seed: int | None = None,
    strategy: str = "",
) -> EvalResult:
    ks = tuple(sorted(set(ks)))
    if cutoff < max(ks):
        raise ValueError(f"cutoff {cutoff} is below the largest k ({max(ks)})")
    pos_of = {int(cid): i for i, cid in enumerate(index.chunk_ids)}
    first_hits = []
    traces = []
    for q in queries:
        ranked = index.search(q.text, cutoff)
        hit = None
        for rank, (cid, _) in enumerate(ranked, 1):
            if is_relevant(index.normalized_text(pos_of[cid]), q, normalized=True):
                hit = rank
                break
        first_hits.append(hit)
        traces.append(QueryTrace(q.query_id, hit, ranked[0][0] if ranked else None))
    result = _aggregate(first_hits, cutoff, ks, traces)
    result.seed, result.strategy, result.k1, result.b = seed, strategy, index.k1, index.b
    bad = sanity_violations(result)
    if bad:
        raise AssertionError(f"metric invariants violated: {bad}")
    return result
