import random

import pytest

from stc import TabularDocument
from stc.synth import random_table


@pytest.fixture
def rng():
    return random.Random(1234)


def random_document(rng: random.Random, max_sheets: int = 3, max_rows: int = 12, max_cols: int = 6,
                    max_words: int = 30) -> TabularDocument:
    sheets = tuple(
        random_table(rng, rng.randint(0, max_rows), rng.randint(1, max_cols), max_words=max_words, name=f"S{k}")
        for k in range(rng.randint(1, max_sheets))
    )
    return TabularDocument("fuzz", sheets)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
