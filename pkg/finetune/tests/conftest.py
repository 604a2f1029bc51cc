"""Shared fixtures: a small ATIS-flavored corpus and a tiny offline backbone.

The backbone is a randomly initialized 12-layer BERT (hidden size 32)
with a wordpiece vocabulary trained on the fixture corpus, saved once
per session with save_pretrained.  Twelve layers keep the whole 0..12
freezing range exercisable; nothing is downloaded.
"""

from __future__ import annotations

import random

import pytest
import torch
from tokenizers.implementations import BertWordPieceTokenizer
from transformers import BertConfig, BertModel, BertTokenizerFast
from transformers.utils import logging as hf_logging

from csaug_finetune import FinetuneConfig, parse_examples

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

CITIES = [
    "boston", "denver", "atlanta", "philadelphia", "baltimore",
    "milwaukee", "pittsburgh", "charlotte", "oakland", "indianapolis",
]
AIRLINES = ["united", "delta", "continental", "northwest"]
DAYS = ["monday", "tuesday", "wednesday", "thursday", "friday"]


def _flight(rng):
    a, b = rng.sample(CITIES, 2)
    tokens = ["show", "me", "flights", "from", a, "to", b]
    labels = ["O", "O", "O", "O", "B-fromloc", "O", "B-toloc"]
    if rng.random() < 0.5:
        tokens += ["on", rng.choice(DAYS)]
        labels += ["O", "B-depart_date"]
    return tokens, labels, "atis_flight"


def _airfare(rng):
    a, b = rng.sample(CITIES, 2)
    tokens = ["what", "is", "the", "cheapest", "fare", "from", a, "to", b]
    labels = ["O", "O", "O", "B-cost_relative", "O", "O", "B-fromloc", "O", "B-toloc"]
    return tokens, labels, "atis_airfare"


def _airline(rng):
    tokens = ["which", rng.choice(AIRLINES), "flights", "leave", rng.choice(CITIES)]
    labels = ["O", "B-airline", "O", "O", "B-fromloc"]
    return tokens, labels, "atis_airline"


def make_corpus_tsv(count: int, seed: int = 7, id_prefix: str = "t") -> str:
    """Deterministic multiatis-tsv text with three intents and five slot types."""
    rng = random.Random(seed)
    makers = [_flight, _airfare, _airline]
    rows = ["id\tutterance\tslot_labels\tintent"]
    for i in range(count):
        tokens, labels, intent = makers[i % 3](rng)
        rows.append(f"{id_prefix}{i:03d}\t{' '.join(tokens)}\t{' '.join(labels)}\t{intent}")
    return "\n".join(rows) + "\n"


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    (d / "train.tsv").write_text(make_corpus_tsv(50, seed=7, id_prefix="t"), encoding="utf-8")
    (d / "dev.tsv").write_text(make_corpus_tsv(12, seed=11, id_prefix="d"), encoding="utf-8")
    return d


@pytest.fixture(scope="session")
def train_file(corpus_dir):
    return corpus_dir / "train.tsv"


@pytest.fixture(scope="session")
def dev_file(corpus_dir):
    return corpus_dir / "dev.tsv"


@pytest.fixture(scope="session")
def train_examples(train_file):
    return parse_examples(train_file.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def dev_examples(dev_file):
    return parse_examples(dev_file.read_text(encoding="utf-8"))


def save_tiny_backbone(directory, texts, layers: int = 12, seed: int = 0) -> None:
    """Train a wordpiece vocab on ``texts`` and save a random-init backbone."""
    wp = BertWordPieceTokenizer(lowercase=True)
    wp.train_from_iterator(
        texts,
        vocab_size=160,
        min_frequency=1,
        special_tokens=["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"],
        show_progress=False,
    )
    wp.save_model(str(directory))
    # the vocab path is positional: transformers 5.x renamed the keyword
    tokenizer = BertTokenizerFast(str(directory / "vocab.txt"), do_lower_case=True)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=32,
        num_hidden_layers=layers,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=160,
    )
    torch.manual_seed(seed)
    BertModel(config, add_pooling_layer=False).save_pretrained(directory)
    tokenizer.save_pretrained(directory)


@pytest.fixture(scope="session")
def backbone_dir(tmp_path_factory, train_examples):
    d = tmp_path_factory.mktemp("backbone")
    save_tiny_backbone(d, [" ".join(ex.tokens) for ex in train_examples])
    return d


@pytest.fixture(scope="session")
def shallow_backbone_dir(tmp_path_factory, train_examples):
    """A 4-layer variant, for freeze-depth mismatch checks."""
    d = tmp_path_factory.mktemp("backbone4")
    save_tiny_backbone(d, [" ".join(ex.tokens) for ex in train_examples], layers=4)
    return d


@pytest.fixture
def make_cfg(backbone_dir):
    """FinetuneConfig factory with fast-test defaults on the tiny backbone."""

    def factory(**overrides):
        base = dict(
            base_model=str(backbone_dir),
            max_epochs=2,
            patience=5,
            batch_size=32,
            learning_rate=5e-3,
            frozen_layers=2,
            seed=1,
        )
        base.update(overrides)
        return FinetuneConfig(**base)

    return factory


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process: run_cli(args) -> (exit_code, stdout, stderr)."""
    from csaug_finetune.cli import main

    def invoke(argv):
        code = main(argv)
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return invoke
