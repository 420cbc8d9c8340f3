"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--rows 10000] [--repeats 5]

Kernel timings call both modules directly. The end-to-end timing runs
``chunk_document`` in a subprocess per backend, since the backend is fixed at
import time (``STC_PURE_PYTHON=1`` forces the fallback).
"""

import argparse
import json
import os
import random
import statistics
import subprocess
import sys
import timeit

from stc import _purepy
from stc.synth import maud_like_document

try:
    from stc import _speedups
except ImportError:
    _speedups = None

E2E = """
import json, statistics, sys
from stc import BACKEND, chunk_document
from stc.synth import maud_like_document
doc, _ = maud_like_document(int(sys.argv[1]), seed=3)
times = [chunk_document(doc, 512)[1].elapsed_ms for _ in range(int(sys.argv[2]))]
print(json.dumps({"backend": BACKEND, "median_ms": statistics.median(times)}))
"""


def best_of(fn, repeats):
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def kernel_rows(texts, repeats):
    rng = random.Random(0)
    weights = [rng.randint(1, 700) for _ in range(200_000)]
    cases = [
        ("word_punct_count", lambda m: [m.word_punct_count(t) for t in texts]),
        ("token_starts", lambda m: [m.token_starts(t) for t in texts]),
        ("greedy_pack", lambda m: m.greedy_pack(weights, 0, 1, 512)),
    ]
    rows = []
    for name, call in cases:
        py = best_of(lambda: call(_purepy), repeats)
        cy = best_of(lambda: call(_speedups), repeats) if _speedups else None
        rows.append((name, py, cy))
    return rows


def end_to_end(rows, repeats):
    out = {}
    for pure in ("1", "0"):
        env = {**os.environ, "STC_PURE_PYTHON": pure}
        res = subprocess.run([sys.executable, "-c", E2E, str(rows), str(repeats)], env=env, check=True,
                             capture_output=True, text=True)
        r = json.loads(res.stdout)
        out[r["backend"]] = r["median_ms"] / 1000.0
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=10_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    doc, _ = maud_like_document(2_000, seed=3)
    texts = [v for row in doc.sheets[0].rows for v in row]
    print(f"kernels over {len(texts):,} cells, best of {args.repeats}")
    print(f"{'kernel':<20}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for name, py, cy in kernel_rows(texts, args.repeats):
        if cy is None:
            print(f"{name:<20}{py:>10.3f}{'n/a':>10}{'n/a':>9}")
        else:
            print(f"{name:<20}{py:>10.3f}{cy:>10.3f}{py / cy:>8.1f}x")

    e2e = end_to_end(args.rows, args.repeats)
    print(f"\nchunk_document on {args.rows:,} MAUD-shaped rows, median of {args.repeats}")
    for backend, s in e2e.items():
        print(f"  {backend:<8}{s:>8.3f} s")
    if len(e2e) == 2:
        print(f"  speedup {e2e['python'] / e2e['cython']:.2f}x")


if __name__ == "__main__":
    main()
