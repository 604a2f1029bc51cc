"""Direct label alignment: re-emit BIO tags over a translated chunk.

Alignment depends only on the source chunk's slot type and the translated
token count, never on surface forms.  The strategy seam is the single
function below; order-aware aligners could be added behind the same
signature.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chunker import Chunk
from .errors import EmptyTranslation
from .translate import TranslationResult


@dataclass(frozen=True)
class AlignedChunk:
    """A translated chunk with recreated BIO labels and provenance span."""

    tokens: tuple[str, ...]
    slot_labels: tuple[str, ...]
    source_span: tuple[int, int]
    language: str

    def __post_init__(self):
        if len(self.tokens) != len(self.slot_labels):
            raise ValueError("tokens and slot_labels length mismatch")


def emit_bio(slot_type: str | None, n: int, continuation: bool = False) -> tuple[str, ...]:
    """Labels for an n-token translated span of the given slot type.

    continuation=True emits I-x for every token (used when the source span
    was the continuation of a larger slot, as in word-level switching).
    """
    if n <= 0:
        raise EmptyTranslation("cannot label an empty translation")
    if slot_type is None:
        return ("O",) * n
    if continuation:
        return ("I-" + slot_type,) * n
    return ("B-" + slot_type,) + ("I-" + slot_type,) * (n - 1)


def align_label(
    c: Chunk, t: TranslationResult, lang: str, continuation: bool = False
) -> AlignedChunk:
    """Recreate the chunk's labels over the translated tokens."""
    if not t.tokens:
        raise EmptyTranslation(
            f"empty translation for chunk {c.start}..{c.end} ({c.text!r})"
        )
    return AlignedChunk(
        tokens=tuple(t.tokens),
        slot_labels=emit_bio(c.slot_type, len(t.tokens), continuation),
        source_span=(c.start, c.end),
        language=lang,
    )
