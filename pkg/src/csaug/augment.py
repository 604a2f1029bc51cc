"""Code-switching augmentation pipeline: chunk, word, and sentence level.

Each output sentence is built by decomposing the source utterance into
chunks, assigning each chunk a language drawn uniformly from the effective
language pool, translating, and re-emitting the labels.  The effective pool
is (family members | allowed languages | provider languages) minus the
excluded set; excluded languages never enter any sampling decision.  When a
chunk draws the corpus' own source language it passes through untranslated,
so some chunks stay in the original language.

Randomness is derived per (seed, utterance index, repetition index), which
makes results identical for any worker count.
"""

from __future__ import annotations

import hashlib
import json
import random
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .align import AlignedChunk, align_label, emit_bio
from .chunker import Chunk, slot_chunks
from .corpus import Dataset, Utterance
from .errors import (
    AugmentationError,
    ConfigurationError,
    CsaugError,
    ProviderUnavailable,
    RateLimited,
    UnsupportedLanguage,
)
from .families import family_members
from .translate import TranslationProvider, TranslationRequest

LEVELS = ("chunk", "word", "sentence")

AUGMENTED_LANGUAGE = "mul"  # ISO 639 tag for multiple-language content


@dataclass(frozen=True)
class AugmentationConfig:
    level: str = "chunk"
    k: int = 5
    allowed_languages: frozenset[str] = frozenset()
    excluded_languages: frozenset[str] = frozenset()
    family: str | None = None
    include_original: bool = True
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "allowed_languages", frozenset(self.allowed_languages))
        object.__setattr__(self, "excluded_languages", frozenset(self.excluded_languages))
        if self.level not in LEVELS:
            raise ConfigurationError(f"bad level {self.level!r}, expected one of {LEVELS}")
        if self.k < 1:
            raise ConfigurationError(f"k must be positive, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class CodeSwitchedUtterance(Utterance):
    """An augmented copy; intent is inherited unchanged from the source."""

    chunk_languages: tuple[str, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "chunk_languages", tuple(self.chunk_languages))


def effective_language_set(
    cfg: AugmentationConfig,
    provider: TranslationProvider,
    source_lang: str,
) -> tuple[str, ...]:
    """Resolve the sampling pool, sorted for deterministic draws.

    The pool starts from the family preset if set, else the configured
    allowed languages, else everything the provider supports; the excluded
    set is then removed.  The source language may stay in the pool (those
    draws pass chunks through untranslated); every other member must be
    supported by the provider.
    """
    if cfg.family is not None:
        base = family_members(cfg.family)
    elif cfg.allowed_languages:
        base = set(cfg.allowed_languages)
    else:
        base = set(provider.supported_languages())
    pool = sorted(base - set(cfg.excluded_languages))
    if not pool:
        raise ConfigurationError(
            "effective language set is empty after exclusions"
        )
    needed = set(pool) - {source_lang}
    unsupported = needed - provider.supported_languages()
    if unsupported:
        raise UnsupportedLanguage(
            f"provider does not support: {', '.join(sorted(unsupported))}"
        )
    return tuple(pool)


def derive_rng(seed: int, utt_index: int, rep_index: int) -> random.Random:
    """Independent RNG stream per (seed, utterance, repetition)."""
    digest = hashlib.sha256(
        struct.pack("<QQQ", seed, utt_index, rep_index)
    ).digest()
    return random.Random(int.from_bytes(digest[:16], "little"))


def _switch_units(u: Utterance, level: str) -> list[tuple[Chunk, bool]]:
    """Translation units for a level: (chunk, is-continuation-of-slot)."""
    chunks = slot_chunks(u)
    if level == "word":
        units: list[tuple[Chunk, bool]] = []
        for c in chunks:
            for off, tok in enumerate(c.tokens):
                pos = c.start + off
                units.append(
                    (Chunk((tok,), c.slot_type, pos, pos + 1),
                     off > 0 and c.slot_type is not None)
                )
        return units
    return [(c, False) for c in chunks]


def _sample_languages(
    n_units: int, level: str, pool: tuple[str, ...], rng: random.Random
) -> list[str]:
    if level == "sentence":
        return [pool[rng.randrange(len(pool))]] * n_units
    return [pool[rng.randrange(len(pool))] for _ in range(n_units)]


def code_switch_utterance(
    u: Utterance,
    cfg: AugmentationConfig,
    provider: TranslationProvider,
    rng: random.Random,
    source_lang: str = "en",
    rep: int = 1,
    pool: tuple[str, ...] | None = None,
) -> tuple[CodeSwitchedUtterance, list[dict]]:
    """Produce one code-switched copy of an utterance plus its audit records.

    Returns (utterance, chunk_audits); each audit dict records the chunk
    span, slot type, chosen language, translation provenance, and text
    before/after.
    """
    if pool is None:
        pool = effective_language_set(cfg, provider, source_lang)
    units = _switch_units(u, cfg.level)
    langs = _sample_languages(len(units), cfg.level, pool, rng)
    aligned: list[AlignedChunk] = []
    audits: list[dict] = []
    for (chunk, cont), lang in zip(units, langs):
        if lang == source_lang:
            out = AlignedChunk(
                chunk.tokens,
                emit_bio(chunk.slot_type, len(chunk.tokens), cont),
                (chunk.start, chunk.end),
                lang,
            )
            provenance = "source"
        else:
            result = provider.translate(
                TranslationRequest(chunk.text, source_lang, lang)
            )
            out = align_label(chunk, result, lang, cont)
            provenance = result.provenance
        aligned.append(out)
        audits.append(
            {
                "span": [chunk.start, chunk.end],
                "slot_type": chunk.slot_type,
                "language": lang,
                "provenance": provenance,
                "source_text": chunk.text,
                "text": " ".join(out.tokens),
            }
        )
    tokens: list[str] = []
    labels: list[str] = []
    for a in aligned:
        tokens.extend(a.tokens)
        labels.extend(a.slot_labels)
    cs = CodeSwitchedUtterance(
        id=f"{u.id}#cs{rep}",
        tokens=tuple(tokens),
        slot_labels=tuple(labels),
        intent=u.intent,
        chunk_languages=tuple(langs),
    )
    return cs, audits


def plan_languages(
    ds: Dataset, cfg: AugmentationConfig, provider: TranslationProvider
) -> list[dict]:
    """Dry-run: sample chunking and languages without any translate calls.

    Draws come from the same derived RNG streams as a real run, so the plan
    matches what augment_dataset would do.
    """
    pool = effective_language_set(cfg, provider, ds.language)
    plan = []
    for i, u in enumerate(ds):
        units = _switch_units(u, cfg.level)
        for j in range(1, cfg.k + 1):
            rng = derive_rng(cfg.seed, i, j)
            langs = _sample_languages(len(units), cfg.level, pool, rng)
            plan.append(
                {
                    "id": f"{u.id}#cs{j}",
                    "spans": [[c.start, c.end] for c, _ in units],
                    "languages": langs,
                }
            )
    return plan


def augment_dataset(
    ds: Dataset,
    cfg: AugmentationConfig,
    provider: TranslationProvider,
    workers: int = 1,
    audit_path: str | Path | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> Dataset:
    """Run the augmentation over a whole dataset.

    Output holds k copies per source utterance (plus the originals first
    when include_original is set), grouped per source utterance and ordered
    deterministically.  Any per-utterance failure aborts the run; failures
    are aggregated and reported with utterance ids.
    """
    pool = effective_language_set(cfg, provider, ds.language)
    results: list[list[tuple[CodeSwitchedUtterance, list[dict]]] | None]
    results = [None] * len(ds)
    failures: list[tuple[str, str]] = []
    provider_failed = False

    def job(i: int) -> None:
        nonlocal provider_failed
        u = ds.utterances[i]
        out = []
        try:
            for j in range(1, cfg.k + 1):
                rng = derive_rng(cfg.seed, i, j)
                out.append(
                    code_switch_utterance(
                        u, cfg, provider, rng, ds.language, rep=j, pool=pool
                    )
                )
        except CsaugError as exc:
            failures.append((u.id, str(exc)))
            if isinstance(exc, (ProviderUnavailable, RateLimited, UnsupportedLanguage)):
                provider_failed = True
            return
        results[i] = out
        if progress is not None:
            progress(i, len(ds))

    if workers <= 1:
        for i in range(len(ds)):
            job(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(job, range(len(ds))))

    if failures:
        raise AugmentationError(sorted(failures), provider_failure=provider_failed)

    out_utts: list[Utterance] = []
    audit_records: list[dict] = []
    if cfg.include_original:
        for u in ds:
            out_utts.append(u)
            if audit_path is not None:
                audit_records.append(
                    {"id": u.id, "source_id": u.id, "kind": "original"}
                )
    for i, per_utt in enumerate(results):
        assert per_utt is not None
        for j, (cs, audits) in enumerate(per_utt, start=1):
            out_utts.append(cs)
            if audit_path is not None:
                audit_records.append(
                    {
                        "id": cs.id,
                        "source_id": ds.utterances[i].id,
                        "kind": "code-switched",
                        "repetition": j,
                        "level": cfg.level,
                        "chunks": audits,
                    }
                )

    if audit_path is not None:
        with Path(audit_path).open("w", encoding="utf-8") as f:
            for rec in audit_records:
                f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")

    return Dataset(tuple(out_utts), language=AUGMENTED_LANGUAGE, split=ds.split)
