"""Run configuration for joint intent/slot fine-tuning.

The defaults encode the standard recipe: multilingual uncased BERT,
at most 25 epochs with early-stopping patience 5, batch size 32, Adam
at 5e-5, the first 8 transformer layers frozen, and joint task weights
alpha=1.0 / beta=0.6.  ``mode`` names the data recipe the training file
was produced with; the harness trains on whatever files it is given.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from csaug_finetune.errors import ConfigurationError

MODES = ("english-only", "ccs", "translate-train", "translate-train+ccs")
SELECTIONS = ("intent", "slot")


@dataclass(frozen=True)
class FinetuneConfig:
    base_model: str = "bert-base-multilingual-uncased"
    mode: str = "english-only"
    max_epochs: int = 25
    patience: int = 5
    batch_size: int = 32
    learning_rate: float = 5e-5
    frozen_layers: int = 8
    alpha: float = 1.0
    beta: float = 0.6
    selection: str = "intent"
    max_length: int = 128
    seed: int = 1
    num_workers: int = 0

    def __post_init__(self):
        if not self.base_model:
            raise ConfigurationError("base_model must be a model id or directory")
        if self.mode not in MODES:
            raise ConfigurationError(
                f"mode must be one of {', '.join(MODES)}, got {self.mode!r}"
            )
        if self.max_epochs < 1:
            raise ConfigurationError("max_epochs must be >= 1")
        if self.patience < 1:
            raise ConfigurationError("patience must be >= 1")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be > 0")
        if not 0 <= self.frozen_layers <= 12:
            raise ConfigurationError(
                f"frozen_layers must be in [0, 12], got {self.frozen_layers}"
            )
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta == 0:
            raise ConfigurationError("alpha and beta must be >= 0 and not both zero")
        if self.selection not in SELECTIONS:
            raise ConfigurationError(
                f"selection must be one of {', '.join(SELECTIONS)}, got {self.selection!r}"
            )
        if self.max_length < 8:
            raise ConfigurationError("max_length must be >= 8")
        if self.seed < 0:
            raise ConfigurationError("seed must be >= 0")
        if self.num_workers < 0:
            raise ConfigurationError("num_workers must be >= 0")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
