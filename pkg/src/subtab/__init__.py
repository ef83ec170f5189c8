"""Iterative windowed subtable selection for table question answering.

The package divides a table into small overlapping windows, asks a selector
(a deterministic condition oracle or a remote language model) for the
relevant cells of each window, merges the per-window selections by set
union, and repeats on the shrunken table until nothing changes. It also
generates selector training pairs, balances their target-size distribution,
and scores selections against gold cell sets.
"""

from .errors import (
    CorpusFormatError,
    EmptyTableError,
    InvalidSelectionError,
    SelectorUnavailableError,
    SubtabError,
)
from .table import CellSelection, Question, Table, Window, materialize, table_equals
from .windowing import WindowConfig, divide_table
from .representation import (
    PromptTemplate,
    decode_coordinate,
    decode_index,
    decode_table,
    default_template,
    encode_coordinate,
    encode_index,
    encode_table,
    render_prompt,
    serialize_window,
)
from .selectors import (
    Annotation,
    Condition,
    ConditionOp,
    OracleSelector,
    RemoteSelector,
    RemoteSelectorConfig,
    condition_satisfied,
    oracle_select,
    remote_select,
    values_equal,
)
from .pipeline import PipelineConfig, PipelineTrace, select_subtable
from .datagen import (
    BucketSpec,
    TrainingPair,
    augment_same_value,
    balance_pairs,
    generate_pairs,
    synthesize_bucket_corpus,
)
from .evaluation import (
    GoldTable,
    RecordResult,
    Report,
    SelectionScore,
    corpus_report,
    exact_match,
    gold_table,
    score_selection,
)
from .corpus import CorpusExample, load_corpus

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "BucketSpec",
    "CellSelection",
    "Condition",
    "ConditionOp",
    "CorpusExample",
    "CorpusFormatError",
    "EmptyTableError",
    "GoldTable",
    "InvalidSelectionError",
    "OracleSelector",
    "PipelineConfig",
    "PipelineTrace",
    "PromptTemplate",
    "Question",
    "RecordResult",
    "RemoteSelector",
    "RemoteSelectorConfig",
    "Report",
    "SelectionScore",
    "SelectorUnavailableError",
    "SubtabError",
    "Table",
    "TrainingPair",
    "Window",
    "WindowConfig",
    "augment_same_value",
    "balance_pairs",
    "condition_satisfied",
    "corpus_report",
    "decode_coordinate",
    "decode_index",
    "decode_table",
    "default_template",
    "divide_table",
    "encode_coordinate",
    "encode_index",
    "encode_table",
    "exact_match",
    "generate_pairs",
    "gold_table",
    "load_corpus",
    "materialize",
    "oracle_select",
    "remote_select",
    "render_prompt",
    "score_selection",
    "select_subtable",
    "serialize_window",
    "synthesize_bucket_corpus",
    "table_equals",
    "values_equal",
]
