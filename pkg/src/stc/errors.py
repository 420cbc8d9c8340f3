"""Exception hierarchy shared by the ingestion, chunking and evaluation layers."""


class StcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(StcError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInputError(StcError):
    pass


class RowWidthError(StcError):
    def __init__(self, row_index: int, width: int, expected: int, sheet: str = "default"):
        self.row_index = row_index
        self.width = width
        self.expected = expected
        super().__init__(
            f"sheet {sheet!r} row {row_index}: {width} cells, header has {expected}"
        )


class SchemaError(StcError):
    def __init__(self, message: str, fields: list[str] | None = None):
        self.fields = list(fields or [])
        super().__init__(message)


class DuplicateSheetError(StcError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate sheet name {name!r}")


class MismatchedRunError(StcError):
    pass


class EmptyCorpusError(StcError):
    pass


class SampleSizeError(StcError):
    pass
