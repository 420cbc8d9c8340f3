import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from stc import (
    Budget,
    LeafUnit,
    TabularDocument,
    build_row_tree,
    chunk_document,
    emergency_split,
    get_counter,
    greedy_merge,
    split_leaves,
)
from stc.chunk import manifest_text
from stc.chunker import CONT_SUFFIX, LEAF_JOINER
from stc.ingestion import make_sheet
from stc.rowtree import KvPair, flatten, is_empty_cell, make_row_node, parse_kv_block, row_marker
from stc.synth import random_table
from stc.tokens import TokenCounter

from conftest import random_document

WP = get_counter("word_punct")


def words(n, stem="w"):
    return " ".join(f"{stem}{i}" for i in range(n))


def line_cost(key, value, counter=WP):
    return counter.count(f"{key}: {value}")


def row_of(pairs, sheet="S", index=0, counter=WP):
    return make_row_node(sheet, index, tuple(KvPair(k, v) for k, v in pairs), counter)


def prefix_sum_fragments(costs, marker_cost, budget):
    """Reference grouping: accumulate line costs after the marker, close before overflow."""
    groups, cur, total = [], [], marker_cost
    for i, c in enumerate(costs):
        if cur and total + c > budget:
            groups.append(cur)
            cur, total = [], marker_cost
        cur.append(i)
        total += c
    groups.append(cur)
    return groups


def fragment_pairs(leaf):
    return [tuple(p) for p in parse_kv_block(leaf.text).pairs]


# --- emergency split ------------------------------------------------------------


def test_three_pairs_of_200():
    pairs = [(f"k{i}", words(198)) for i in range(3)]
    assert [line_cost(k, v) for k, v in pairs] == [200, 200, 200]
    row = row_of(pairs)
    m = WP.count(row_marker("S", 0, (1, 2)))
    assert 400 + m <= 512 < 600 + m
    leaves = emergency_split(row, 512, WP)
    assert [fragment_pairs(l) for l in leaves] == [pairs[:2], pairs[2:]]
    assert [l.part for l in leaves] == [(1, 2), (2, 2)]
    assert leaves[0].text.startswith("[row 0 @ S | part 1/2]\n")
    assert prefix_sum_fragments([200] * 3, m, 512) == [[0, 1], [2]]


def test_many_small_pairs_matches_prefix_sum_oracle():
    rng = random.Random(5)
    budget = 128
    pairs = [(f"f{i}", words(rng.randint(1, 20), stem="v")) for i in range(60)]
    row = row_of(pairs)
    assert row.token_count > 3 * budget
    leaves = emergency_split(row, budget, WP)
    assert len(leaves) >= 3
    assert all(l.token_count <= budget and not l.oversized for l in leaves)
    m = WP.count(row_marker("S", 0, (1, len(leaves))))
    oracle = prefix_sum_fragments([line_cost(k, v) for k, v in pairs], m, budget)
    assert [fragment_pairs(l) for l in leaves] == [[pairs[i] for i in g] for g in oracle]


def test_budget_one_two_pairs():
    row = row_of([("a", "1"), ("b", "2")])
    leaves = emergency_split(row, 1, WP)
    # the marker alone exceeds B=1, so each pair lands in its own flagged fragment
    assert [fragment_pairs(l) for l in leaves] == [[("a", "1")], [("b", "2")]]
    assert all(l.oversized for l in leaves)
    assert [l.part for l in leaves] == [(1, 2), (2, 2)]


def test_giant_pair_hard_split_against_word_accumulation():
    budget = 60
    value = words(500)
    row = row_of([("body", value), ("tail", "x")])
    leaves = emergency_split(row, budget, WP)
    assert all(l.token_count <= budget and not l.oversized for l in leaves)
    # oracle: accumulate whole words while the rendered fragment stays within budget
    total = len(leaves)
    pieces, rest, k = [], value.split(" "), 1
    while rest:
        key = "body" if not pieces else "body" + CONT_SUFFIX
        head = row_marker("S", 0, (k, total)) + f"\n{key}: "
        n = 0
        while n < len(rest) and WP.count(head + " ".join(rest[: n + 1])) <= budget:
            n += 1
        pieces.append((key, rest[:n]))
        rest = rest[n:]
        k += 1
    got = [p for l in leaves for p in fragment_pairs(l)]
    assert [k for k, _ in got[:-1]] == [k for k, _ in pieces]
    assert [v.split() for _, v in got[:-1]] == [ws for _, ws in pieces]
    assert got[-1] == ("tail", "x")
    assert "".join(v for _, v in got[:-1]) == value


def test_key_too_long_for_budget_is_flagged_not_dropped():
    key = " ".join(["k"] * 30)
    row = row_of([(key, "v1 v2 v3")])
    leaves = emergency_split(row, 20, WP)
    assert len(leaves) == 1 and leaves[0].oversized
    assert fragment_pairs(leaves[0]) == [(key, "v1 v2 v3")]


def test_not_invoked_for_small_rows():
    tree = build_row_tree(TabularDocument("d", (make_sheet("S", ["a", "b"], [["1", "2"]] * 4),)), WP)
    (leaves,) = split_leaves(tree, Budget(512), WP)
    assert [l.text for l in leaves] == [r.rendered for r in tree.groups[0].rows]
    assert all(l.part is None for l in leaves)


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(0)
    with pytest.raises(ValueError):
        chunk_document(TabularDocument("d", (make_sheet("S", ["a"], [["1"]]),)), budget=0)


# --- greedy merge ---------------------------------------------------------------


def leaf(cost, i=0, sheet="S"):
    text = words(cost)
    return LeafUnit(sheet, i, text, WP.count(text), WP.weight(text))


def test_merge_three_hundreds():
    (chunk,) = greedy_merge([[leaf(100, i) for i in range(3)]], 512, WP)
    assert chunk.tokens == WP.count(chunk.text) == 300
    assert chunk.text.count(LEAF_JOINER) == 2


def test_merge_four_hundreds():
    chunks = greedy_merge([[leaf(400, 0), leaf(400, 1)]], 512, WP)
    assert [c.tokens for c in chunks] == [400, 400]


def test_no_cross_group_merge():
    chunks = greedy_merge([[leaf(5, 0, "A")], [leaf(5, 0, "B")]], 512, WP)
    assert [c.sheet for c in chunks] == ["A", "B"]
    assert [c.chunk_index for c in chunks] == [0, 1]


def partition_minimum(texts, budget, counter):
    n = len(texts)
    best = n
    for mask in range(1 << (n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        segs = [LEAF_JOINER.join(texts[a:b]) for a, b in zip(cuts, cuts[1:])]
        if all(counter.count(s) <= budget for s in segs):
            best = min(best, len(segs))
    return best


@pytest.mark.parametrize("scheme", ["word_punct", "chars_div_4"])
def test_greedy_minimal_against_exhaustive(scheme):
    counter = get_counter(scheme)
    rng = random.Random(99)
    for _ in range(150):
        n = rng.randint(1, 10)
        budget = rng.randint(20, 120)
        texts = [words(rng.randint(1, budget // 2)) for _ in range(n)]
        texts = [t for t in texts if counter.count(t) <= budget] or [words(1)]
        leaves = [LeafUnit("S", i, t, counter.count(t), counter.weight(t)) for i, t in enumerate(texts)]
        chunks = greedy_merge([leaves], budget, counter)
        assert len(chunks) == partition_minimum(texts, budget, counter)


# --- end to end -----------------------------------------------------------------


def test_empty_sheet():
    doc = TabularDocument("e", (make_sheet("S", ["a"], []),))
    chunks, rep = chunk_document(doc)
    assert chunks == [] and rep.chunk_count == 0 and rep.avg_tokens is None


def test_large_budget_one_chunk_per_group(rng):
    doc = TabularDocument("t", (random_table(rng, 10, 3, name="A"), random_table(rng, 10, 3, name="B")))
    chunks, _ = chunk_document(doc, budget=100_000)
    assert [(c.sheet, c.row_first, c.row_last) for c in chunks] == [("A", 0, 9), ("B", 0, 9)]


def test_row_spans_disjoint_and_consecutive(rng):
    for _ in range(50):
        doc = random_document(rng)
        chunks, _ = chunk_document(doc, budget=rng.randint(8, 200))
        for sheet in doc.sheets:
            mine = [c for c in chunks if c.sheet == sheet.name]
            units = []
            for c in mine:
                blocks = [parse_kv_block(b) for b in c.text.split(LEAF_JOINER)]
                units.extend((b.row_index, b.part[0] if b.part else 1) for b in blocks)
            rows_with_pairs = sorted({r for r, _ in units})
            assert rows_with_pairs == list(range(sheet.n_rows))
            assert units == sorted(units) and len(set(units)) == len(units)


def reassemble(chunks, sheet):
    """Pairs recovered from chunk texts, folding continuation pieces back into their value."""
    pairs = []
    for c in chunks:
        if c.sheet != sheet:
            continue
        for block in c.text.split(LEAF_JOINER):
            parsed = parse_kv_block(block)
            for j, (k, v) in enumerate(parsed.pairs):
                cont = parsed.part and parsed.part[0] > 1 and j == 0 and pairs and k == pairs[-1][0] + CONT_SUFFIX
                if cont:
                    pairs[-1] = (pairs[-1][0], pairs[-1][1] + v)
                else:
                    pairs.append((k, v))
    return pairs


def source_pairs(sheet):
    return [
        (flatten(h), flatten(v))
        for row in sheet.rows
        for h, v in zip(sheet.headers, row)
        if not is_empty_cell(v)
    ]


@pytest.mark.parametrize("scheme", ["word_punct", "chars_div_4"])
def test_lossless_and_within_budget(scheme, rng):
    counter = get_counter(scheme)
    for _ in range(80):
        doc = random_document(rng, max_words=60)
        budget = rng.randint(8, 300)
        chunks, _ = chunk_document(doc, budget, counter)
        for c in chunks:
            assert c.tokens == counter.count(c.text)
            assert c.oversized or c.tokens <= budget
        for sheet in doc.sheets:
            assert reassemble(chunks, sheet.name) == source_pairs(sheet)


class WhitespaceCounter(TokenCounter):
    """Non-additive counter: exercises the path that measures assembled text."""

    scheme = "whitespace"

    def count(self, text):
        return len(text.split())


def test_generic_counter_path(rng):
    counter = WhitespaceCounter()
    for _ in range(30):
        doc = random_document(rng, max_words=50)
        budget = rng.randint(8, 120)
        chunks, _ = chunk_document(doc, budget, counter)
        for c in chunks:
            assert c.tokens == counter.count(c.text)
            assert c.oversized or c.tokens <= budget
        for sheet in doc.sheets:
            assert reassemble(chunks, sheet.name) == source_pairs(sheet)


@given(st.integers(0, 2**32), st.integers(8, 1024))
@settings(max_examples=100, deadline=None)
def test_budget_property(seed, budget):
    doc = random_document(random.Random(seed), max_words=80)
    chunks, rep = chunk_document(doc, budget)
    assert all(c.oversized or c.tokens <= budget for c in chunks)
    if chunks and not any(c.oversized for c in chunks):
        assert rep.max_tokens <= budget


def test_deterministic_across_threads(rng):
    doc = TabularDocument("t", tuple(random_table(rng, 40, 5, name=f"S{i}") for i in range(6)))
    runs = [manifest_text(chunk_document(doc, 64, threads=t)[0]) for t in (1, 1, 3, 8)]
    assert len(set(runs)) == 1


def test_report_fields():
    doc = TabularDocument("r", (make_sheet("S", ["a"], [["x y z"]] * 3),))
    chunks, rep = chunk_document(doc, 512)
    assert rep.strategy == "stc" and rep.budget == 512 and rep.token_scheme == "word_punct"
    assert rep.chunk_count == len(chunks) == 1
    assert rep.elapsed_ms >= 0
