"""Chunk decomposition of an utterance from its BIO labels.

Each B-x (I-x)* group is one chunk carrying slot type x; each maximal run
of O labels is one chunk with no slot type.  Chunks tile the utterance
exactly and carry their source span so downstream stages can report
provenance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Utterance, check_bio_transitions
from .errors import NonContiguousChunks


@dataclass(frozen=True)
class Chunk:
    """A maximal contiguous token span sharing one slot identity (or an O-run)."""

    tokens: tuple[str, ...]
    slot_type: str | None  # None for O-runs
    start: int  # token index, inclusive
    end: int  # token index, exclusive

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.end <= self.start or len(self.tokens) != self.end - self.start:
            raise ValueError(
                f"chunk span {self.start}..{self.end} does not match "
                f"{len(self.tokens)} tokens"
            )

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def slot_chunks(u: Utterance) -> list[Chunk]:
    """Split an utterance into ordered, non-overlapping chunks covering all tokens.

    Raises IllegalBIOTransition when the labels contain an I-x that does not
    continue a B-x/I-x group.
    """
    check_bio_transitions(u.slot_labels)
    chunks: list[Chunk] = []
    start = 0
    cur_type: str | None = None
    for i, label in enumerate(u.slot_labels):
        if i == 0:
            cur_type = None if label == "O" else label[2:]
            continue
        # a new chunk starts at i unless the label continues the current run
        continues = (label == "O" and cur_type is None) or (
            label.startswith("I-") and cur_type == label[2:]
        )
        if not continues:
            chunks.append(Chunk(u.tokens[start:i], cur_type, start, i))
            start = i
            cur_type = None if label == "O" else label[2:]
    chunks.append(Chunk(u.tokens[start:], cur_type, start, len(u.tokens)))
    return chunks


def reassemble(chunks: list[Chunk]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Inverse of slot_chunks: rebuild (tokens, slot_labels) from ordered chunks.

    The chunks must tile [0, N) contiguously and in order.
    """
    if not chunks:
        raise NonContiguousChunks("no chunks to reassemble")
    tokens: list[str] = []
    labels: list[str] = []
    pos = 0
    for c in chunks:
        if c.start != pos:
            raise NonContiguousChunks(f"chunk starts at {c.start}, expected {pos}")
        tokens.extend(c.tokens)
        if c.slot_type is None:
            labels.extend(["O"] * len(c.tokens))
        else:
            labels.append("B-" + c.slot_type)
            labels.extend(["I-" + c.slot_type] * (len(c.tokens) - 1))
        pos = c.end
    return tuple(tokens), tuple(labels)
