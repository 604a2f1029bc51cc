"""Code-switching data augmentation for joint intent/slot corpora.

Core flow: read a BIO-tagged dataset, split each utterance into slot-aligned
chunks, translate randomly chosen chunks into randomly chosen languages,
re-emit labels over the translations, and write the enlarged dataset back
out.  Everything is seeded and reproducible; translation backends are
pluggable (lexicon directories, HTTP services, disk caches).
"""

from csaug.align import AlignedChunk, align_label, emit_bio
from csaug.augment import (
    AUGMENTED_LANGUAGE,
    LEVELS,
    AugmentationConfig,
    CodeSwitchedUtterance,
    augment_dataset,
    code_switch_utterance,
    derive_rng,
    effective_language_set,
    plan_languages,
)
from csaug.chunker import Chunk, reassemble, slot_chunks
from csaug.corpus import (
    FORMATS,
    Dataset,
    DatasetStats,
    Utterance,
    compute_stats,
    check_bio_transitions,
    dataset_from_utterances,
    format_dataset,
    parse_dataset,
    read_dataset,
    repair_bio,
    write_dataset,
)
from csaug.errors import (
    AugmentationError,
    ConfigurationError,
    CsaugError,
    DivergenceDetected,
    DuplicateLexiconEntry,
    EmptyBatch,
    EmptyTranslation,
    IllegalBIOTransition,
    IoFailure,
    MalformedRecord,
    ModelFormatError,
    NonContiguousChunks,
    ProviderUnavailable,
    RateLimited,
    UnknownFamily,
    UnknownFormat,
    UnknownLabelInventory,
    UnsupportedLanguage,
)
from csaug.families import FAMILIES, SCRIPTIO_CONTINUA, family_members, family_rows
from csaug.metrics import PRF, bio_spans, span_prf, token_prf
from csaug.translate import (
    CachingProvider,
    HttpProvider,
    LexiconProvider,
    TranslationCache,
    TranslationProvider,
    TranslationRequest,
    TranslationResult,
    parse_provider,
    tokenize_translation,
)

__version__ = "0.1.0"

__all__ = [
    "AUGMENTED_LANGUAGE",
    "AlignedChunk",
    "AugmentationConfig",
    "AugmentationError",
    "CachingProvider",
    "Chunk",
    "CodeSwitchedUtterance",
    "ConfigurationError",
    "CsaugError",
    "Dataset",
    "DatasetStats",
    "DivergenceDetected",
    "DuplicateLexiconEntry",
    "EmptyBatch",
    "EmptyTranslation",
    "FAMILIES",
    "FORMATS",
    "HttpProvider",
    "IllegalBIOTransition",
    "IoFailure",
    "LEVELS",
    "LexiconProvider",
    "MalformedRecord",
    "ModelFormatError",
    "NonContiguousChunks",
    "PRF",
    "ProviderUnavailable",
    "RateLimited",
    "SCRIPTIO_CONTINUA",
    "TranslationCache",
    "TranslationProvider",
    "TranslationRequest",
    "TranslationResult",
    "UnknownFamily",
    "UnknownFormat",
    "UnknownLabelInventory",
    "UnsupportedLanguage",
    "Utterance",
    "align_label",
    "augment_dataset",
    "bio_spans",
    "check_bio_transitions",
    "code_switch_utterance",
    "compute_stats",
    "dataset_from_utterances",
    "derive_rng",
    "effective_language_set",
    "emit_bio",
    "family_members",
    "family_rows",
    "format_dataset",
    "parse_dataset",
    "parse_provider",
    "plan_languages",
    "read_dataset",
    "reassemble",
    "repair_bio",
    "slot_chunks",
    "span_prf",
    "token_prf",
    "tokenize_translation",
    "write_dataset",
    "__version__",
]
