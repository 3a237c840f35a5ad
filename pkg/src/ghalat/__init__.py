"""Arabic corpus cleaning, synthetic spelling-error injection, and
character/word error-rate scoring."""

__version__ = "0.1.0"

from .filtering import (
    CleanLine,
    DropReport,
    FilterConfig,
    Lexicon,
    Reason,
    Verdict,
    build_lexicon,
    check_line,
    filter_corpus,
)
from .inject import (
    CorruptionConfig,
    Fixed,
    InjectionReport,
    Mixed,
    OpKind,
    OpRecord,
    SentencePair,
    Varied,
    corrupt_corpus,
    corrupt_line,
    op_cost,
    op_count,
)
from .keyboard import DEFAULT_NEIGHBORS, build_adjacency
from .metrics import (
    EditCounts,
    EmptyCorpus,
    EmptyReference,
    Granularity,
    RateReport,
    ReductionReport,
    corpus_rates,
    edit_counts,
    err,
    rate,
)
from .normalize import (
    ARABIC_LETTERS,
    DEFAULT_VALID_CHARS,
    CandidateLine,
    NormalizerConfig,
    RawArticle,
    normalize_line,
    normalize_stream,
    segment_article,
)
from .pipeline import (
    DataError,
    InsufficientCorpus,
    Manifest,
    SplitSpec,
    split_corpus,
)

__all__ = [
    "ARABIC_LETTERS",
    "DEFAULT_NEIGHBORS",
    "DEFAULT_VALID_CHARS",
    "CandidateLine",
    "CleanLine",
    "CorruptionConfig",
    "DataError",
    "DropReport",
    "EditCounts",
    "EmptyCorpus",
    "EmptyReference",
    "FilterConfig",
    "Fixed",
    "Granularity",
    "InjectionReport",
    "InsufficientCorpus",
    "Lexicon",
    "Manifest",
    "Mixed",
    "NormalizerConfig",
    "OpKind",
    "OpRecord",
    "RateReport",
    "RawArticle",
    "Reason",
    "ReductionReport",
    "SentencePair",
    "SplitSpec",
    "Varied",
    "Verdict",
    "build_adjacency",
    "build_lexicon",
    "check_line",
    "corpus_rates",
    "corrupt_corpus",
    "corrupt_line",
    "edit_counts",
    "err",
    "filter_corpus",
    "normalize_line",
    "normalize_stream",
    "op_cost",
    "op_count",
    "rate",
    "segment_article",
    "split_corpus",
]
