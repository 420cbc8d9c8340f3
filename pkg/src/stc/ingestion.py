"""Parse tabular inputs into :class:`TabularDocument`.

Supported inputs are RFC 4180 CSV (one sheet named ``default``) and a small
JSON workbook format for multi-sheet data::

    {"sheets": [{"name": "S1", "headers": ["a", "b"], "rows": [["1", "2"]]}]}
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .errors import DuplicateSheetError, EmptyInputError, ParseError, RowWidthError, SchemaError

log = logging.getLogger(__name__)

Source = Union[str, bytes, os.PathLike, IO]

DEFAULT_SHEET = "default"

# Row counts of the public MAUD splits.
MAUD_SPLIT_ROWS = {"train": 25_827, "val": 6_753, "test": 6_651}


@dataclass(frozen=True)
class Sheet:
    name: str
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...] = ()

    @property
    def n_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class TabularDocument:
    source_id: str
    sheets: tuple[Sheet, ...]

    @property
    def n_rows(self) -> int:
        return sum(s.n_rows for s in self.sheets)

    def sheet(self, name: str) -> Sheet:
        for s in self.sheets:
            if s.name == name:
                return s
        raise KeyError(name)


def normalize_headers(headers: Sequence[str]) -> tuple[str, ...]:
    """Trim header names, name blank ones ``col_<i>`` and suffix duplicates ``_2``, ``_3``...

    A suffixed name never collides with a header that appears verbatim elsewhere
    in the row.
    """
    trimmed = [h.strip() or f"col_{i + 1}" for i, h in enumerate(headers)]
    taken = set(trimmed)
    seen: set[str] = set()
    out = []
    for h in trimmed:
        if h not in seen:
            seen.add(h)
            out.append(h)
            continue
        k = 2
        while f"{h}_{k}" in taken:
            k += 1
        name = f"{h}_{k}"
        taken.add(name)
        seen.add(name)
        out.append(name)
    return tuple(out)


def make_sheet(name: str, headers: Sequence[str], rows: Iterable[Sequence[str]]) -> Sheet:
    """Build a sheet, padding short rows and rejecting rows wider than the header."""
    headers = normalize_headers(headers)
    width = len(headers)
    fixed = []
    for i, row in enumerate(rows):
        if len(row) > width:
            raise RowWidthError(i, len(row), width, sheet=name)
        row = tuple(row)
        if len(row) < width:
            row = row + ("",) * (width - len(row))
        fixed.append(row)
    return Sheet(name, headers, tuple(fixed))


def _read_source(source: Source) -> tuple[bytes, str]:
    """Raw bytes plus a default source id (the file's base name, so ids do not depend on the cwd)."""
    if isinstance(source, bytes):
        return source, "<bytes>"
    if hasattr(source, "read"):
        data = source.read()
        return (data.encode("utf-8") if isinstance(data, str) else data), getattr(source, "name", "<stream>")
    path = Path(source)
    return path.read_bytes(), path.name


def _decode(data: bytes) -> str:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise ParseError(f"invalid UTF-8 at byte {e.start}", line=line) from None
    return text.removeprefix("\ufeff")


def parse_csv(
    source: Source,
    delimiter: str = ",",
    has_header: bool = True,
    source_id: str | None = None,
) -> TabularDocument:
    data, origin = _read_source(source)
    text = _decode(data)
    reader = csv.reader(
        io.StringIO(text, newline=""),
        delimiter=delimiter,
        quotechar='"',
        doublequote=True,
        strict=True,
    )
    records = []
    try:
        for rec in reader:
            if rec:  # blank physical lines carry no record
                records.append(rec)
    except csv.Error as e:
        raise ParseError(str(e), line=reader.line_num) from None
    if not records:
        raise EmptyInputError(f"{origin}: no records")
    if has_header:
        headers, body = records[0], records[1:]
    else:
        headers, body = [f"col_{i + 1}" for i in range(len(records[0]))], records
    sheet = make_sheet(DEFAULT_SHEET, headers, body)
    return TabularDocument(source_id or origin, (sheet,))


def _schema(cond: bool, where: str, what: str) -> None:
    if not cond:
        raise SchemaError(f"{where}: {what}", fields=[where])


def _is_str_list(x) -> bool:
    return isinstance(x, list) and all(isinstance(v, str) for v in x)


def workbook_from_obj(obj, source_id: str = "<workbook>") -> TabularDocument:
    _schema(isinstance(obj, dict), "$", "expected an object")
    _schema("sheets" in obj, "sheets", "missing")
    extra = set(obj) - {"sheets"}
    _schema(not extra, sorted(extra)[0] if extra else "$", "unexpected field")
    sheets_obj = obj["sheets"]
    _schema(isinstance(sheets_obj, list), "sheets", "expected an array")
    if not sheets_obj:
        raise EmptyInputError(f"{source_id}: workbook has no sheets")
    sheets = []
    names: set[str] = set()
    for i, s in enumerate(sheets_obj):
        where = f"sheets[{i}]"
        _schema(isinstance(s, dict), where, "expected an object")
        for key in ("name", "headers", "rows"):
            _schema(key in s, f"{where}.{key}", "missing")
        extra = set(s) - {"name", "headers", "rows"}
        _schema(not extra, f"{where}.{sorted(extra)[0]}" if extra else where, "unexpected field")
        _schema(isinstance(s["name"], str) and s["name"] != "", f"{where}.name", "expected a non-empty string")
        _schema(_is_str_list(s["headers"]) and len(s["headers"]) > 0, f"{where}.headers",
                "expected a non-empty array of strings")
        _schema(isinstance(s["rows"], list), f"{where}.rows", "expected an array")
        for j, row in enumerate(s["rows"]):
            _schema(_is_str_list(row), f"{where}.rows[{j}]", "expected an array of strings")
        if s["name"] in names:
            raise DuplicateSheetError(s["name"])
        names.add(s["name"])
        sheets.append(make_sheet(s["name"], s["headers"], s["rows"]))
    return TabularDocument(source_id, tuple(sheets))


def parse_workbook_json(source: Source, source_id: str | None = None) -> TabularDocument:
    data, origin = _read_source(source)
    text = _decode(data)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno) from None
    return workbook_from_obj(obj, source_id or origin)


def serialize_workbook_json(doc: TabularDocument) -> str:
    obj = {
        "sheets": [
            {"name": s.name, "headers": list(s.headers), "rows": [list(r) for r in s.rows]}
            for s in doc.sheets
        ]
    }
    return json.dumps(obj, ensure_ascii=False)


def load_document(path: Source, **csv_options) -> TabularDocument:
    """Dispatch on file extension: ``.json`` is a workbook, anything else CSV."""
    if str(path).lower().endswith(".json"):
        return parse_workbook_json(path)
    return parse_csv(path, **csv_options)


# --- MAUD ---------------------------------------------------------------------


@dataclass(frozen=True)
class MaudColumns:
    text: str = "text"
    question: str = "question"
    answer: str = "answer"
    contract_name: str = "contract_name"
    deal_point_category: str = "deal_point_category"
    deal_point_type: str = "deal_point_type"
    # Column holding the relevance label; the question text itself when None.
    question_label: str | None = None

    def required(self) -> list[str]:
        cols = [self.text, self.question, self.answer, self.contract_name]
        if self.question_label:
            cols.append(self.question_label)
        return cols


@dataclass(frozen=True)
class MaudRecord:
    row_index: int
    text: str
    question: str
    answer: str
    contract_name: str
    deal_point_category: str = ""
    deal_point_type: str = ""
    question_label: str = field(default="")

    def __post_init__(self):
        if not self.question_label:
            object.__setattr__(self, "question_label", self.question)


MAUD_SPLITS = ("train", "val", "test")


def maud_records(doc: TabularDocument, columns: MaudColumns | None = None) -> list[MaudRecord]:
    columns = columns or MaudColumns()
    sheet = doc.sheets[0]
    index = {h: i for i, h in enumerate(sheet.headers)}
    missing = [c for c in columns.required() if c not in index]
    if missing:
        raise SchemaError(f"missing MAUD column(s): {', '.join(missing)}", fields=missing)

    def get(row, col):
        i = index.get(col) if col else None
        return row[i] if i is not None else ""

    return [
        MaudRecord(
            row_index=r,
            text=row[index[columns.text]],
            question=row[index[columns.question]],
            answer=row[index[columns.answer]],
            contract_name=row[index[columns.contract_name]],
            deal_point_category=get(row, columns.deal_point_category),
            deal_point_type=get(row, columns.deal_point_type),
            question_label=get(row, columns.question_label),
        )
        for r, row in enumerate(sheet.rows)
    ]


def load_maud(
    path: Source, split: str = "train", columns: MaudColumns | None = None
) -> tuple[TabularDocument, list[MaudRecord]]:
    if split == "validation":
        split = "val"
    if split not in MAUD_SPLITS:
        raise ValueError(f"unknown MAUD split {split!r}")
    doc = parse_csv(path)
    records = maud_records(doc, columns)
    expected = MAUD_SPLIT_ROWS[split]
    if len(records) != expected:
        log.info("MAUD %s split has %d rows (public release: %d)", split, len(records), expected)
    return doc, records
