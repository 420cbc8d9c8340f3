"""The chunk record and its JSONL manifest form."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import SchemaError

STRATEGIES = ("stc", "recursive", "kv_recursive")

MANIFEST_FIELDS = (
    "chunk_index",
    "strategy",
    "source_id",
    "sheet",
    "row_first",
    "row_last",
    "fragment",
    "tokens",
    "oversized",
    "text",
)


class Fragment(NamedTuple):
    """One emergency-split piece of a row: part ``part`` of ``total``."""

    row: int
    part: int
    total: int


@dataclass(frozen=True)
class Chunk:
    chunk_index: int
    strategy: str
    source_id: str
    sheet: str | None
    row_first: int | None
    row_last: int | None
    fragment: tuple[Fragment, ...] | None
    tokens: int
    oversized: bool
    text: str
    # character offset in the linearized text (baselines only, not serialized)
    start: int | None = None

    @property
    def token_count(self) -> int:
        return self.tokens

    def to_json(self) -> str:
        obj = {
            "chunk_index": self.chunk_index,
            "strategy": self.strategy,
            "source_id": self.source_id,
            "sheet": self.sheet,
            "row_first": self.row_first,
            "row_last": self.row_last,
            "fragment": None
            if self.fragment is None
            else [{"row": f.row, "part": f.part, "total": f.total} for f in self.fragment],
            "tokens": self.tokens,
            "oversized": self.oversized,
            "text": self.text,
        }
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_obj(cls, obj: dict) -> "Chunk":
        missing = [f for f in MANIFEST_FIELDS if f not in obj]
        if missing:
            raise SchemaError(f"manifest record missing field(s): {', '.join(missing)}", fields=missing)
        if not isinstance(obj["text"], str) or not isinstance(obj["chunk_index"], int):
            raise SchemaError("manifest record has wrongly typed text/chunk_index", fields=["text"])
        frag = obj["fragment"]
        if frag is not None:
            try:
                frag = tuple(Fragment(f["row"], f["part"], f["total"]) for f in frag)
            except (TypeError, KeyError):
                raise SchemaError("malformed fragment annotation", fields=["fragment"]) from None
        return cls(
            chunk_index=obj["chunk_index"],
            strategy=obj["strategy"],
            source_id=obj["source_id"],
            sheet=obj["sheet"],
            row_first=obj["row_first"],
            row_last=obj["row_last"],
            fragment=frag,
            tokens=obj["tokens"],
            oversized=bool(obj["oversized"]),
            text=obj["text"],
        )


def manifest_text(chunks: Iterable[Chunk]) -> str:
    return "".join(c.to_json() + "\n" for c in chunks)


def write_manifest(chunks: Iterable[Chunk], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for c in chunks:
            f.write(c.to_json())
            f.write("\n")


def read_manifest(path) -> list[Chunk]:
    chunks = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"{Path(path).name}:{lineno}: invalid JSON ({e.msg})") from None
            if not isinstance(obj, dict):
                raise SchemaError(f"{Path(path).name}:{lineno}: expected an object")
            chunks.append(Chunk.from_obj(obj))
    return chunks
