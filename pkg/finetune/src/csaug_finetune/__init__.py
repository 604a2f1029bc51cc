"""Joint intent/slot BERT fine-tuning harness for multiatis-tsv corpora."""

from csaug_finetune.config import MODES, SELECTIONS, FinetuneConfig
from csaug_finetune.data import (
    IGNORE_INDEX,
    EncodedDataset,
    Example,
    LabelInventory,
    build_inventory,
    collate,
    parse_examples,
    read_examples,
)
from csaug_finetune.errors import (
    ConfigurationError,
    DataFormatError,
    FinetuneError,
    ResourceError,
)
from csaug_finetune.metrics import bio_spans, intent_accuracy, span_f1
from csaug_finetune.modeling import (
    JointBertModel,
    freeze_layers,
    joint_loss,
    load_backbone,
    load_checkpoint,
    load_tokenizer,
    parameter_counts,
    save_checkpoint,
)
from csaug_finetune.train import (
    FinetuneResult,
    evaluate,
    evaluate_checkpoint,
    finetune,
)

__version__ = "0.1.0"

__all__ = [
    "MODES",
    "SELECTIONS",
    "FinetuneConfig",
    "IGNORE_INDEX",
    "EncodedDataset",
    "Example",
    "LabelInventory",
    "build_inventory",
    "collate",
    "parse_examples",
    "read_examples",
    "ConfigurationError",
    "DataFormatError",
    "FinetuneError",
    "ResourceError",
    "bio_spans",
    "intent_accuracy",
    "span_f1",
    "JointBertModel",
    "freeze_layers",
    "joint_loss",
    "load_backbone",
    "load_checkpoint",
    "load_tokenizer",
    "parameter_counts",
    "save_checkpoint",
    "FinetuneResult",
    "evaluate",
    "evaluate_checkpoint",
    "finetune",
    "__version__",
]
