import json

import pytest

from stc import SchemaError, read_manifest, write_manifest
from stc.chunk import MANIFEST_FIELDS, Chunk, Fragment


def test_field_names_and_order():
    c = Chunk(0, "stc", "src", "S", 1, 2, None, 10, False, "x")
    assert list(json.loads(c.to_json())) == list(MANIFEST_FIELDS)
    assert MANIFEST_FIELDS == ("chunk_index", "strategy", "source_id", "sheet", "row_first", "row_last",
                               "fragment", "tokens", "oversized", "text")


def test_round_trip(tmp_path):
    chunks = [
        Chunk(0, "stc", "src", "S", 0, 3, None, 10, False, "a\nb"),
        Chunk(1, "stc", "src", "S", 4, 4, (Fragment(4, 1, 2),), 12, False, "ünï"),
        Chunk(2, "recursive", "src", None, None, None, None, 600, True, "q"),
    ]
    p = tmp_path / "m.jsonl"
    write_manifest(chunks, p)
    assert read_manifest(p) == chunks
    assert b"\r\n" not in p.read_bytes()


@pytest.mark.parametrize("line", ['{"chunk_index": 0}', "[1,2]", "not json"])
def test_schema_mismatch(tmp_path, line):
    p = tmp_path / "bad.jsonl"
    p.write_text(line + "\n")
    with pytest.raises(SchemaError):
        read_manifest(p)
