"""Structure-aware chunking of tabular documents for retrieval pipelines."""

from ._kernels import BACKEND
from .baselines import RecursiveSplitConfig, linearize_kv, linearize_raw, recursive_split, run_baseline
from .chunk import Chunk, Fragment, read_manifest, write_manifest
from .chunker import Budget, LeafUnit, chunk_document, emergency_split, greedy_merge, split_leaves
from .errors import (
    DuplicateSheetError,
    EmptyCorpusError,
    EmptyInputError,
    MismatchedRunError,
    ParseError,
    RowWidthError,
    SampleSizeError,
    SchemaError,
    StcError,
)
from .ingestion import (
    MaudColumns,
    MaudRecord,
    Sheet,
    TabularDocument,
    load_maud,
    parse_csv,
    parse_workbook_json,
    serialize_workbook_json,
)
from .metrics import ChunkReport, compare, report
from .retrieval import Bm25Index, EvalResult, Query, build_index, evaluate, is_relevant, sample_queries
from .rowtree import KvPair, RowNode, RowTree, build_row_tree, render_kv_block
from .tokens import CharsDiv4Counter, TokenCounter, WordPunctCounter, count_tokens, get_counter

__version__ = "0.1.0"
