"""Data model and file I/O for BIO-tagged intent/slot datasets.

Two on-disk formats are supported:

* ``multiatis-tsv`` — UTF-8, tab-separated, header line
  ``id<TAB>utterance<TAB>slot_labels<TAB>intent``; tokens and labels are
  single-space-separated within their columns.
* ``conll`` — one ``token<TAB>label`` line per token, blank line between
  utterances, with ``# id = <x>`` and ``# intent = <x>`` comment lines
  carrying the per-utterance metadata.  Files lacking ``# id`` lines get
  positional ids on read.

Values are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import IllegalBIOTransition, IoFailure, MalformedRecord, UnknownFormat

FORMATS = ("multiatis-tsv", "conll")
SPLITS = ("train", "dev", "test")

TSV_HEADER = "id\tutterance\tslot_labels\tintent"

_LABEL_RE = re.compile(r"^(O|[BI]-\S+)$")
_LANG_RE = re.compile(r"^[a-z0-9]+(-[a-z0-9]+)*$")
_WS_RE = re.compile(r"\s")


def is_valid_label(label: str) -> bool:
    """True if `label` matches ``O | B-<type> | I-<type>`` with a non-empty type."""
    return bool(_LABEL_RE.match(label))


def label_type(label: str) -> str | None:
    """Slot type of a label, or None for O."""
    return None if label == "O" else label[2:]


def check_bio_transitions(labels: Sequence[str]) -> None:
    """Raise IllegalBIOTransition unless every I-x follows a B-x/I-x of the same type."""
    prev = "O"
    for pos, label in enumerate(labels):
        if label.startswith("I-"):
            if not (prev == "B-" + label[2:] or prev == label):
                raise IllegalBIOTransition(
                    f"position {pos}: {label!r} after {prev!r}"
                )
        prev = label


def repair_bio(labels: Sequence[str]) -> list[str]:
    """Rewrite each illegal I-x (no preceding B-x/I-x of type x) to B-x.

    Never changes the token count or the type portion of any label.
    """
    out: list[str] = []
    prev = "O"
    for label in labels:
        if label.startswith("I-") and not (prev == "B-" + label[2:] or prev == label):
            label = "B-" + label[2:]
        out.append(label)
        prev = label
    return out


@dataclass(frozen=True)
class Utterance:
    """One sentence with its tokens, BIO slot labels, and intent class."""

    id: str
    tokens: tuple[str, ...]
    slot_labels: tuple[str, ...]
    intent: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "slot_labels", tuple(self.slot_labels))
        if not self.id or _WS_RE.search(self.id):
            raise MalformedRecord(f"bad utterance id {self.id!r}")
        if not self.tokens:
            raise MalformedRecord(f"utterance {self.id!r}: no tokens")
        for t in self.tokens:
            if not t or _WS_RE.search(t):
                raise MalformedRecord(
                    f"utterance {self.id!r}: empty or whitespace-bearing token {t!r}"
                )
        if len(self.slot_labels) != len(self.tokens):
            raise MalformedRecord(
                f"utterance {self.id!r}: {len(self.slot_labels)} labels "
                f"for {len(self.tokens)} tokens"
            )
        for lab in self.slot_labels:
            if not is_valid_label(lab):
                raise MalformedRecord(f"utterance {self.id!r}: bad label {lab!r}")
        if not self.intent or "\t" in self.intent or "\n" in self.intent:
            raise MalformedRecord(f"utterance {self.id!r}: bad intent {self.intent!r}")


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of utterances in one language and split."""

    utterances: tuple[Utterance, ...]
    language: str
    split: str

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        if not _LANG_RE.match(self.language):
            raise MalformedRecord(f"bad language tag {self.language!r}")
        if self.split not in SPLITS:
            raise MalformedRecord(f"bad split {self.split!r}, expected one of {SPLITS}")
        seen: set[str] = set()
        for u in self.utterances:
            if u.id in seen:
                raise MalformedRecord(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)


@dataclass(frozen=True)
class DatasetStats:
    """Corpus-level counts; slot inventory is reported both ways.

    slot_type_count collapses B-x/I-x to one type x; slot_tag_count counts
    B-x and I-x separately.  O is a non-slot marker and appears in neither.
    """

    utterance_count: int
    token_count: int
    intent_count: int
    slot_type_count: int
    slot_tag_count: int


def compute_stats(ds: Dataset) -> DatasetStats:
    tokens = 0
    intents: set[str] = set()
    types: set[str] = set()
    tags: set[str] = set()
    for u in ds:
        tokens += len(u.tokens)
        intents.add(u.intent)
        for lab in u.slot_labels:
            if lab != "O":
                types.add(lab[2:])
                tags.add(lab)
    return DatasetStats(
        utterance_count=len(ds),
        token_count=tokens,
        intent_count=len(intents),
        slot_type_count=len(types),
        slot_tag_count=len(tags),
    )


def _finish_labels(uid: str, labels: list[str], repair: bool) -> list[str]:
    if repair:
        return repair_bio(labels)
    try:
        check_bio_transitions(labels)
    except IllegalBIOTransition as exc:
        raise IllegalBIOTransition(f"utterance {uid!r}: {exc}") from None
    return labels


def _parse_tsv(text: str, repair: bool) -> list[Utterance]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != TSV_HEADER:
        raise MalformedRecord(
            f"missing or bad header line, expected {TSV_HEADER!r}"
        )
    utts = []
    for ln, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != 4:
            raise MalformedRecord(f"line {ln}: expected 4 columns, got {len(cols)}")
        uid, utt_col, slot_col, intent = cols
        tokens = utt_col.split(" ")
        labels = slot_col.split(" ")
        if any(t == "" for t in tokens) or any(l == "" for l in labels):
            raise MalformedRecord(f"line {ln}: empty token or label (double space?)")
        if len(tokens) != len(labels):
            raise MalformedRecord(
                f"line {ln}: {len(labels)} labels for {len(tokens)} tokens"
            )
        try:
            utts.append(
                Utterance(uid, tuple(tokens), tuple(_finish_labels(uid, labels, repair)), intent)
            )
        except MalformedRecord as exc:
            raise MalformedRecord(f"line {ln}: {exc}") from None
    return utts


def _parse_conll(text: str, repair: bool) -> list[Utterance]:
    utts: list[Utterance] = []
    cur_id: str | None = None
    cur_intent: str | None = None
    tokens: list[str] = []
    labels: list[str] = []

    def flush(ln: int):
        nonlocal cur_id, cur_intent, tokens, labels
        if not tokens and cur_id is None and cur_intent is None:
            return
        if not tokens:
            raise MalformedRecord(f"line {ln}: utterance block without tokens")
        if cur_intent is None:
            raise MalformedRecord(f"line {ln}: utterance block without '# intent =' line")
        uid = cur_id if cur_id is not None else str(len(utts))
        utts.append(
            Utterance(uid, tuple(tokens), tuple(_finish_labels(uid, labels, repair)), cur_intent)
        )
        cur_id, cur_intent, tokens, labels = None, None, [], []

    for ln, line in enumerate(text.split("\n"), start=1):
        if line == "":
            flush(ln)
            continue
        if line.startswith("#"):
            m = re.match(r"^#\s*(id|intent)\s*=\s*(.*)$", line)
            if m:
                if m.group(1) == "id":
                    cur_id = m.group(2).strip()
                else:
                    cur_intent = m.group(2).strip()
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedRecord(f"line {ln}: expected 'token<TAB>label', got {line!r}")
        tokens.append(cols[0])
        labels.append(cols[1])
    flush(ln + 1 if text else 1)
    return utts


def parse_dataset(
    text: str,
    format: str = "multiatis-tsv",
    repair: bool = False,
    language: str = "en",
    split: str = "train",
) -> Dataset:
    """Parse dataset text into a validated Dataset.

    With repair=True an illegal I-x label (no preceding B-x/I-x of type x)
    is rewritten to B-x; with repair=False such input raises
    IllegalBIOTransition.  No partially-valid Dataset is ever returned.
    """
    if format not in FORMATS:
        raise UnknownFormat(f"unknown format {format!r}, expected one of {FORMATS}")
    if format == "multiatis-tsv":
        utts = _parse_tsv(text, repair)
    else:
        utts = _parse_conll(text, repair)
    return Dataset(tuple(utts), language=language, split=split)


def read_dataset(
    path: str | Path,
    format: str = "multiatis-tsv",
    repair: bool = False,
    language: str = "en",
    split: str = "train",
) -> Dataset:
    """parse_dataset over a UTF-8 file."""
    if format not in FORMATS:
        raise UnknownFormat(f"unknown format {format!r}, expected one of {FORMATS}")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedRecord(f"{path} is not UTF-8: {exc}") from exc
    return parse_dataset(text, format, repair=repair, language=language, split=split)


def format_dataset(ds: Dataset, format: str = "multiatis-tsv") -> str:
    """Serialize a Dataset to its canonical text form (single trailing newline)."""
    if format not in FORMATS:
        raise UnknownFormat(f"unknown format {format!r}, expected one of {FORMATS}")
    if format == "multiatis-tsv":
        lines = [TSV_HEADER]
        for u in ds:
            lines.append(
                f"{u.id}\t{' '.join(u.tokens)}\t{' '.join(u.slot_labels)}\t{u.intent}"
            )
        return "\n".join(lines) + "\n"
    blocks = []
    for u in ds:
        rows = [f"# id = {u.id}", f"# intent = {u.intent}"]
        rows.extend(f"{t}\t{l}" for t, l in zip(u.tokens, u.slot_labels))
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def write_dataset(ds: Dataset, path: str | Path, format: str = "multiatis-tsv") -> None:
    """Write a Dataset; re-reading the written file yields an equal Dataset."""
    text = format_dataset(ds, format)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def dataset_from_utterances(
    utterances: Iterable[Utterance], language: str = "en", split: str = "train"
) -> Dataset:
    return Dataset(tuple(utterances), language=language, split=split)
