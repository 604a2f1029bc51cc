"""Deterministic toy joint model for intent classification and slot filling.

Small enough to train in seconds on a laptop, rich enough to exhibit
cross-lingual transfer on synthetic corpora whose languages share
morphology by design.
"""

from csaug.toy.features import FeatureExtractor, fnv1a64
from csaug.toy.model import (
    EvalResult,
    JointTrainingConfig,
    ToyJointModel,
    TrainResult,
    evaluate,
    joint_gradients,
    joint_loss,
    load_model,
    predict,
    save_model,
    train,
)
from csaug.toy.synthetic import SyntheticCorpus, SyntheticCorpusSpec, generate_synthetic
from csaug.toy.transfer import TransferResult, run_transfer_experiment

__all__ = [
    "EvalResult",
    "FeatureExtractor",
    "JointTrainingConfig",
    "SyntheticCorpus",
    "SyntheticCorpusSpec",
    "ToyJointModel",
    "TrainResult",
    "TransferResult",
    "evaluate",
    "fnv1a64",
    "generate_synthetic",
    "joint_gradients",
    "joint_loss",
    "load_model",
    "predict",
    "run_transfer_experiment",
    "save_model",
    "train",
]
