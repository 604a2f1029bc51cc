"""Label re-emission over translated chunks."""

import pytest
from hypothesis import given, strategies as st

from csaug.align import AlignedChunk, align_label, emit_bio
from csaug.chunker import Chunk, slot_chunks
from csaug.corpus import Utterance, check_bio_transitions, repair_bio
from csaug.errors import EmptyTranslation
from csaug.translate import TranslationResult


def test_emit_bio_slot_spans():
    assert emit_bio("city", 1) == ("B-city",)
    assert emit_bio("city", 3) == ("B-city", "I-city", "I-city")
    assert emit_bio(None, 2) == ("O", "O")
    assert emit_bio("city", 2, continuation=True) == ("I-city", "I-city")


def test_emit_bio_rejects_empty():
    with pytest.raises(EmptyTranslation):
        emit_bio("city", 0)
    with pytest.raises(EmptyTranslation):
        emit_bio(None, -1)


def test_align_label_carries_span_and_language():
    c = Chunk(tokens=("new", "york"), slot_type="city", start=2, end=4)
    t = TranslationResult("纽约", ("纽约",), "lexicon")
    a = align_label(c, t, "zh-cn")
    assert a.tokens == ("纽约",)
    assert a.slot_labels == ("B-city",)
    assert a.source_span == (2, 4)
    assert a.language == "zh-cn"


def test_align_label_widens_span():
    c = Chunk(tokens=("monday",), slot_type="date", start=5, end=6)
    t = TranslationResult("am montag", ("am", "montag"), "lexicon")
    a = align_label(c, t, "de")
    assert a.tokens == ("am", "montag")
    assert a.slot_labels == ("B-date", "I-date")


def test_aligned_chunk_length_mismatch():
    with pytest.raises(ValueError):
        AlignedChunk(("a", "b"), ("O",), (0, 2), "de")


slot_types = st.sampled_from(["city", "date", "airline"])
lengths = st.integers(min_value=1, max_value=8)


@given(
    st.lists(st.tuples(st.one_of(st.none(), slot_types), lengths), min_size=1, max_size=8)
)
def test_reemitted_labels_always_form_valid_bio(plan):
    """Concatenating emitted chunk labels yields a sequence that validates
    and that the repair pass leaves untouched."""
    labels: list[str] = []
    for slot_type, n in plan:
        labels.extend(emit_bio(slot_type, n))
    check_bio_transitions(labels)
    assert repair_bio(labels) == labels


@given(
    st.lists(st.tuples(st.one_of(st.none(), slot_types), lengths), min_size=1, max_size=8),
    st.lists(lengths, min_size=8, max_size=8),
)
def test_alignment_preserves_chunk_type_sequence(plan, new_lengths):
    """Re-chunking the emitted labels recovers the source slot-type sequence
    (adjacent O chunks merge, so compare after collapsing O runs)."""
    labels: list[str] = []
    source_types: list[str | None] = []
    for i, (slot_type, _) in enumerate(plan):
        n = new_lengths[i % len(new_lengths)]
        labels.extend(emit_bio(slot_type, n))
        source_types.append(slot_type)

    u = Utterance(
        id="p",
        tokens=tuple(f"w{i}" for i in range(len(labels))),
        slot_labels=tuple(labels),
        intent="probe",
    )
    chunks = slot_chunks(u)

    def collapse(types):
        out = []
        for t in types:
            if t is None and out and out[-1] is None:
                continue
            out.append(t)
        return out

    assert [c.slot_type for c in chunks] == collapse(source_types)
