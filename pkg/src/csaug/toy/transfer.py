"""Zero-shot transfer experiment on synthetic corpora.

Trains two toy models on the same source-language data, one as-is and one
augmented with code-switching whose language pool excludes the target
language, then evaluates both on the held-out target-language test split.
The target's sibling language stays in the pool, so augmentation can help
only through cross-lingual generalization, never through target exposure.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass
from pathlib import Path

from csaug.augment import AugmentationConfig, augment_dataset
from csaug.toy.model import (
    EvalResult,
    JointTrainingConfig,
    ToyJointModel,
    evaluate,
    train,
)
from csaug.toy.synthetic import SyntheticCorpus, SyntheticCorpusSpec, generate_synthetic
from csaug.translate import LexiconProvider


@dataclass(frozen=True)
class TransferResult:
    seed: int
    source_lang: str
    target_lang: str
    baseline: EvalResult
    code_switched: EvalResult

    @property
    def intent_margin(self) -> float:
        return self.code_switched.intent_accuracy - self.baseline.intent_accuracy

    @property
    def slot_f1_margin(self) -> float:
        return self.code_switched.slot_f1 - self.baseline.slot_f1


def run_transfer_experiment(
    seed: int,
    train_size: int = 200,
    k: int = 5,
    dim: int = 2048,
    training: JointTrainingConfig | None = None,
    lexicon_dir: str | Path | None = None,
    corpus: SyntheticCorpus | None = None,
) -> TransferResult:
    """One baseline-vs-augmented comparison; the seed drives corpus,
    augmentation sampling, and training shuffles alike."""
    if corpus is None:
        corpus = generate_synthetic(
            SyntheticCorpusSpec(seed=seed, train_size=train_size)
        )
    source = corpus.languages[0]
    # Second family's last member: unseen in training either way, but its
    # sibling is in the augmentation pool.
    target = corpus.families[sorted(corpus.families)[1]][-1]
    if training is None:
        training = JointTrainingConfig(lr=8.0, epochs=40, batch_size=32, seed=seed)

    train_src = corpus.dataset(source, "train")
    test_tgt = corpus.dataset(target, "test")

    baseline_model = ToyJointModel.for_dataset(train_src, dim=dim)
    train(baseline_model, train_src, training)
    baseline_eval = evaluate(baseline_model, test_tgt)

    with tempfile.TemporaryDirectory() as tmp:
        if lexicon_dir is None:
            lexicon_dir = tmp
            corpus.write_lexicons(lexicon_dir)
        provider = LexiconProvider(lexicon_dir)
        aug_cfg = AugmentationConfig(
            k=k,
            excluded_languages=frozenset({target}),
            include_original=True,
            seed=seed,
        )
        augmented = augment_dataset(train_src, aug_cfg, provider)

    cs_model = ToyJointModel.for_dataset(augmented, dim=dim)
    train(cs_model, augmented, training)
    cs_eval = evaluate(cs_model, test_tgt)

    return TransferResult(
        seed=seed,
        source_lang=source,
        target_lang=target,
        baseline=baseline_eval,
        code_switched=cs_eval,
    )
