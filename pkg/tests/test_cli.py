import json

import pytest

from stc.cli import main, meta_path
from stc.synth import maud_like, records_to_csv


@pytest.fixture
def table(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text('a,b\n1,2\n"x,y",3\n')
    return p


@pytest.fixture
def maud(tmp_path):
    p = tmp_path / "maud.csv"
    p.write_text(records_to_csv(maud_like(120, seed=4)))
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_chunk_happy_path(capsys, table):
    code, out, _ = run(capsys, "chunk", "--input", table, "--strategy", "stc")
    assert code == 0
    manifest = table.with_name("t.csv.stc.jsonl")
    lines = manifest.read_text().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["strategy"] == "stc"
    meta = json.loads(meta_path(manifest).read_text())
    assert meta["token_scheme"] == "word_punct" and meta["chunk_count"] == 1 and meta["budget"] == 512
    assert "stc" in out


def test_chunk_json_format(capsys, table, tmp_path):
    code, out, _ = run(capsys, "chunk", "--input", table, "--format", "json", "--token-scheme", "chars4",
                       "--output", tmp_path / "o.jsonl")
    assert code == 0 and json.loads(out)["token_scheme"] == "chars_div_4"


def test_missing_file(capsys, tmp_path):
    missing = tmp_path / "nope.csv"
    code, _, err = run(capsys, "chunk", "--input", missing)
    assert code == 2 and "nope.csv" in err


def test_overlap_not_below_budget(capsys, table):
    code, _, err = run(capsys, "chunk", "--input", table, "--strategy", "recursive", "--overlap", 600, "--budget", 512)
    assert code == 64 and "overlap" in err


@pytest.mark.parametrize("argv", [["chunk"], ["chunk", "--input", "x", "--strategy", "nope"], ["frobnicate"]])
def test_bad_flags(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 64


def test_parse_error_one_line(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text('a,b\n"x"y,1\n')
    code, _, err = run(capsys, "chunk", "--input", p)
    assert code == 65 and err.count("\n") == 1 and "line 2" in err


def test_stats_compare(capsys, table):
    code, out, _ = run(capsys, "stats", "--input", table, "--format", "json")
    data = json.loads(out)
    assert code == 0 and [r["strategy"] for r in data["reports"]] == ["stc", "recursive", "kv_recursive"]


def test_stats_from_manifests(capsys, table, tmp_path):
    for s in ("stc", "recursive"):
        assert main(["chunk", "--input", str(table), "--strategy", s, "--output", str(tmp_path / f"{s}.jsonl")]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "stats", "--manifest", tmp_path / "stc.jsonl", "--manifest", tmp_path / "recursive.jsonl")
    assert code == 0 and "reduction" in out


def test_bench_single_run_flagged_noisy(capsys):
    code, out, _ = run(capsys, "bench", "--synthetic-rows", 20, "--repeats", 1, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["noisy"] is True and set(data["results"]) == {"stc", "recursive", "kv-recursive"}


def test_eval_round_trip(capsys, maud, tmp_path):
    results = {}
    for s in ("stc", "recursive"):
        m = tmp_path / f"{s}.jsonl"
        assert main(["chunk", "--input", str(maud), "--strategy", s, "--output", str(m)]) == 0
        out = tmp_path / f"{s}.eval.json"
        trace = tmp_path / f"{s}.tsv"
        assert main(["eval", "--manifest", str(m), "--maud", str(maud), "--n", "40", "--seed", "11",
                     "--output", str(out), "--trace", str(trace)]) == 0
        results[s] = json.loads(out.read_text())
        assert len(trace.read_text().splitlines()) == 41
    capsys.readouterr()
    for r in results.values():
        rec = r["recall"]
        assert rec["1"] <= rec["3"] <= rec["5"] <= rec["10"] and rec["1"] <= r["mrr"] <= rec["10"]
        assert r["seed"] == 11 and r["n_queries"] == 40
    assert set(results["stc"]) == set(results["recursive"])


def test_eval_deterministic(capsys, maud, tmp_path):
    m = tmp_path / "m.jsonl"
    main(["chunk", "--input", str(maud), "--output", str(m)])
    capsys.readouterr()
    outs = [run(capsys, "eval", "--manifest", m, "--maud", maud, "--n", 30, "--seed", 2)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_eval_n_too_large(capsys, maud, tmp_path):
    m = tmp_path / "m.jsonl"
    main(["chunk", "--input", str(maud), "--output", str(m)])
    code, _, _ = run(capsys, "eval", "--manifest", m, "--maud", maud, "--n", 10_000)
    assert code == 64


def test_eval_manifest_schema_mismatch(capsys, maud, tmp_path):
    m = tmp_path / "bad.jsonl"
    m.write_text('{"id": 1, "body": "x"}\n')
    code, _, err = run(capsys, "eval", "--manifest", m, "--maud", maud)
    assert code == 65 and "SchemaError" in err


def test_eval_external_rankings(capsys, maud, tmp_path):
    m = tmp_path / "m.jsonl"
    main(["chunk", "--input", str(maud), "--output", str(m)])
    ranked = tmp_path / "r.jsonl"
    ranked.write_text("\n".join(json.dumps({"query_id": i, "chunk_ids": [0, 1, 2]}) for i in range(5)) + "\n")
    capsys.readouterr()
    code, out, _ = run(capsys, "eval", "--manifest", m, "--maud", maud, "--n", 5, "--ranked", ranked)
    assert code == 0 and json.loads(out)["n_queries"] == 5


def test_synth_maud(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "synth-maud", "--rows", 30, "--output", out)
    assert code == 0 and out.read_text().startswith("text,")
