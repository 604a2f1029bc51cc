"""multiatis-tsv reading and subword encoding.

The input format is the four-column TSV exchanged with the augmentation
tooling: ``id<TAB>utterance<TAB>slot_labels<TAB>intent`` with
space-separated tokens and one BIO label per token.

Encoding follows the first-subword convention: each word contributes its
label on its first wordpiece, every other wordpiece (and [CLS]/[SEP]/
padding) carries IGNORE_INDEX and is excluded from the loss.  Sequences
are truncated to ``max_length`` subwords; labels of words that fall
beyond the truncation point are excluded from metrics as well, and the
encoder warns once per dataset about how many were dropped.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch
from torch.utils.data import Dataset as TorchDataset

from csaug_finetune.errors import DataFormatError, ResourceError

TSV_HEADER = "id\tutterance\tslot_labels\tintent"
IGNORE_INDEX = -100


@dataclass(frozen=True)
class Example:
    id: str
    tokens: tuple[str, ...]
    labels: tuple[str, ...]
    intent: str


def parse_examples(text: str) -> list[Example]:
    """Parse multiatis-tsv text into examples, validating shape per line."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != TSV_HEADER:
        raise DataFormatError(f"missing or bad header line, expected {TSV_HEADER!r}")
    examples = []
    for ln, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != 4:
            raise DataFormatError(f"line {ln}: expected 4 columns, got {len(cols)}")
        uid, utt_col, slot_col, intent = cols
        tokens = utt_col.split(" ")
        labels = slot_col.split(" ")
        if any(t == "" for t in tokens) or any(l == "" for l in labels):
            raise DataFormatError(f"line {ln}: empty token or label (double space?)")
        if len(tokens) != len(labels):
            raise DataFormatError(
                f"line {ln}: {len(labels)} labels for {len(tokens)} tokens"
            )
        examples.append(Example(uid, tuple(tokens), tuple(labels), intent))
    return examples


def read_examples(path: str | Path) -> list[Example]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot read dataset {path}: {exc}") from exc
    try:
        return parse_examples(text)
    except DataFormatError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class LabelInventory:
    """Sorted intent and slot-tag vocabularies drawn from the training set."""

    intents: tuple[str, ...]
    slots: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "_intent_ids", {s: i for i, s in enumerate(self.intents)})
        object.__setattr__(self, "_slot_ids", {s: i for i, s in enumerate(self.slots)})

    def intent_id(self, name: str) -> int:
        """Index of an intent, or IGNORE_INDEX when the training set never saw it."""
        return self._intent_ids.get(name, IGNORE_INDEX)

    def slot_id(self, name: str) -> int:
        return self._slot_ids.get(name, IGNORE_INDEX)


def build_inventory(examples: Sequence[Example]) -> LabelInventory:
    if not examples:
        raise DataFormatError("cannot build a label inventory from an empty dataset")
    intents = sorted({ex.intent for ex in examples})
    slots = sorted({l for ex in examples for l in ex.labels} | {"O"})
    return LabelInventory(tuple(intents), tuple(slots))


@dataclass(frozen=True)
class EncodedExample:
    input_ids: tuple[int, ...]
    slot_ids: tuple[int, ...]          # per subword; IGNORE_INDEX off first-subwords
    intent_id: int
    first_subword_positions: tuple[int, ...]  # one entry per kept word, in order
    kept_labels: tuple[str, ...]       # gold labels for the kept words
    intent: str


class EncodedDataset(TorchDataset):
    """Token-level examples ready for batching.

    Items are dicts of 1-D tensors plus the example index, so evaluation
    can map predictions back to gold strings and word boundaries.
    """

    def __init__(self, examples, tokenizer, inventory, max_length: int = 128):
        self.inventory = inventory
        self.encoded: list[EncodedExample] = []
        if not examples:
            raise DataFormatError("cannot encode an empty dataset")
        batch = tokenizer(
            [list(ex.tokens) for ex in examples],
            is_split_into_words=True,
            truncation=True,
            max_length=max_length,
        )
        dropped = 0
        for i, ex in enumerate(examples):
            word_ids = batch.word_ids(i)
            input_ids = batch["input_ids"][i]
            slot_ids = [IGNORE_INDEX] * len(input_ids)
            first_positions: list[int] = []
            prev = None
            for pos, wid in enumerate(word_ids):
                if wid is None or wid == prev:
                    continue
                slot_ids[pos] = inventory.slot_id(ex.labels[wid])
                first_positions.append(pos)
                prev = wid
            kept = len(first_positions)
            dropped += len(ex.tokens) - kept
            self.encoded.append(
                EncodedExample(
                    input_ids=tuple(input_ids),
                    slot_ids=tuple(slot_ids),
                    intent_id=inventory.intent_id(ex.intent),
                    first_subword_positions=tuple(first_positions),
                    kept_labels=ex.labels[:kept],
                    intent=ex.intent,
                )
            )
        if dropped:
            warnings.warn(
                f"truncation at {max_length} subwords dropped {dropped} token "
                "label(s); they are excluded from the loss and from metrics",
                stacklevel=2,
            )

    def __len__(self) -> int:
        return len(self.encoded)

    def __getitem__(self, idx: int) -> dict:
        enc = self.encoded[idx]
        return {
            "index": idx,
            "input_ids": torch.tensor(enc.input_ids, dtype=torch.long),
            "slot_ids": torch.tensor(enc.slot_ids, dtype=torch.long),
            "intent_id": enc.intent_id,
        }


def collate(items: list[dict]) -> dict:
    """Pad a batch to its longest sequence (0 for inputs, IGNORE_INDEX for labels)."""
    width = max(len(it["input_ids"]) for it in items)
    input_ids = torch.zeros(len(items), width, dtype=torch.long)
    attention_mask = torch.zeros(len(items), width, dtype=torch.long)
    slot_ids = torch.full((len(items), width), IGNORE_INDEX, dtype=torch.long)
    for row, it in enumerate(items):
        n = len(it["input_ids"])
        input_ids[row, :n] = it["input_ids"]
        attention_mask[row, :n] = 1
        slot_ids[row, :n] = it["slot_ids"]
    return {
        "index": torch.tensor([it["index"] for it in items], dtype=torch.long),
        "input_ids": input_ids,
        "attention_mask": attention_mask,
        "slot_ids": slot_ids,
        "intent_ids": torch.tensor([it["intent_id"] for it in items], dtype=torch.long),
    }
