"""Synthetic multilingual corpora with controllable cross-lingual overlap.

Languages are arranged in families.  Every vocabulary item is a concept
realized per language as root + language suffix, where roots are drawn
hierarchically: each concept has a global root; a family adopts it with
probability ``shared_root_across`` (else draws its own); a language adopts
its family root with probability ``shared_root_within`` (else draws its
own).  Sibling languages therefore share most stems while unrelated
languages share almost none, mimicking cognate structure.

All roots are distinct strings of fixed length, so surface forms within a
language never collide and the derived bilingual lexicons are exact: every
word of every utterance resolves in every language pair.  Utterances are
parallel across languages (same template, same slot value choices), which
makes per-language datasets directly comparable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from csaug.corpus import Dataset, Utterance, write_dataset

CONSONANTS = "bdfgklmnprst"
VOWELS = "aeiou"
SYLLABLES = tuple(c + v for c in CONSONANTS for v in VOWELS)

INTENT_NAMES = (
    "find_route",
    "fare_quote",
    "schedule_info",
    "cancel_trip",
    "seat_request",
    "baggage_rule",
)
SLOT_NAMES = ("origin", "destination", "daytime", "carrier", "seatclass")


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    families: int = 3
    languages_per_family: int = 2
    shared_root_within: float = 0.8
    shared_root_across: float = 0.1
    templates: int = 6
    slot_types: int = 5
    values_per_type: int = 10
    train_size: int = 200
    dev_size: int = 40
    test_size: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if not (1 <= self.families <= 20 and 1 <= self.languages_per_family <= 20):
            raise ValueError("families and languages_per_family must be in 1..20")
        if self.families * self.languages_per_family > len(SYLLABLES):
            raise ValueError("too many languages: each needs a distinct suffix")
        if self.templates < 1 or self.slot_types < 1 or self.values_per_type < 1:
            raise ValueError("templates, slot_types, values_per_type must be >= 1")
        if min(self.train_size, self.dev_size, self.test_size) < 1:
            raise ValueError("split sizes must be >= 1")
        for p in (self.shared_root_within, self.shared_root_across):
            if not 0.0 <= p <= 1.0:
                raise ValueError("sharing probabilities must be in [0, 1]")


@dataclass(frozen=True)
class SyntheticCorpus:
    spec: SyntheticCorpusSpec
    languages: tuple[str, ...]
    families: dict[str, tuple[str, ...]]
    datasets: dict[tuple[str, str], Dataset] = field(repr=False)
    lexicons: dict[tuple[str, str], tuple[tuple[str, str], ...]] = field(repr=False)

    def dataset(self, language: str, split: str) -> Dataset:
        return self.datasets[(language, split)]

    def write_lexicons(self, directory: str | Path) -> None:
        """One ``<src>-<tgt>.tsv`` file per ordered language pair."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for (src, tgt), entries in sorted(self.lexicons.items()):
            lines = "".join(f"{a}\t{b}\n" for a, b in entries)
            (directory / f"{src}-{tgt}.tsv").write_text(lines, encoding="utf-8")

    def write_datasets(
        self, directory: str | Path, format: str = "multiatis-tsv"
    ) -> None:
        """One ``<language>_<split>.tsv`` file per dataset."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for (lang, split), ds in sorted(self.datasets.items()):
            write_dataset(ds, directory / f"{lang}_{split}.tsv", format)


def _fresh_root(rng: random.Random, used: set[str]) -> str:
    while True:
        root = "".join(rng.choice(SYLLABLES) for _ in range(3))
        if root not in used:
            used.add(root)
            return root


def _name(base: tuple[str, ...], prefix: str, i: int) -> str:
    return base[i] if i < len(base) else f"{prefix}{i}"


@dataclass(frozen=True)
class _Template:
    intent: str
    # items: ("f", concept index) for O-labeled fillers,
    #        ("s", slot type name) for slot value placeholders
    pattern: tuple[tuple[str, object], ...]


def generate_synthetic(spec: SyntheticCorpusSpec) -> SyntheticCorpus:
    """Build parallel datasets and exact pairwise lexicons from a corpus spec."""
    languages: list[str] = []
    families: dict[str, tuple[str, ...]] = {}
    fam_of: dict[str, str] = {}
    for fi in range(spec.families):
        fam_name = f"fam-{chr(97 + fi)}"
        members = tuple(
            chr(97 + fi) + chr(97 + li) for li in range(spec.languages_per_family)
        )
        families[fam_name] = members
        for lang in members:
            languages.append(lang)
            fam_of[lang] = fam_name
    suffix = {lang: SYLLABLES[i] for i, lang in enumerate(languages)}

    rng_roots = random.Random(f"{spec.seed}:roots")
    used: set[str] = set()
    concepts: list[dict[str, str]] = []  # index -> {lang: form}

    def new_concept() -> int:
        global_root = _fresh_root(rng_roots, used)
        fam_root: dict[str, str] = {}
        for fam in families:
            if rng_roots.random() < spec.shared_root_across:
                fam_root[fam] = global_root
            else:
                fam_root[fam] = _fresh_root(rng_roots, used)
        forms: dict[str, str] = {}
        for lang in languages:
            if rng_roots.random() < spec.shared_root_within:
                root = fam_root[fam_of[lang]]
            else:
                root = _fresh_root(rng_roots, used)
            forms[lang] = root + suffix[lang]
        concepts.append(forms)
        return len(concepts) - 1

    shared_fillers = [new_concept() for _ in range(3)]
    slot_types = [_name(SLOT_NAMES, "slot", i) for i in range(spec.slot_types)]

    # Slot values: 1 or 2 concepts each (2-concept values exercise I- labels).
    rng_values = random.Random(f"{spec.seed}:values")
    values: dict[str, list[tuple[int, ...]]] = {}
    for st in slot_types:
        pool = []
        for _ in range(spec.values_per_type):
            width = 2 if rng_values.random() < 0.4 else 1
            pool.append(tuple(new_concept() for _ in range(width)))
        values[st] = pool

    templates: list[_Template] = []
    for t in range(spec.templates):
        intent = _name(INTENT_NAMES, "intent", t)
        n_slots = min(1 + (t % 3), spec.slot_types)
        slots = [slot_types[(t + j) % spec.slot_types] for j in range(n_slots)]
        privs = [new_concept() for _ in range(2 + (t % 2))]
        pattern: list[tuple[str, object]] = [("f", privs[0])]
        pattern.append(("s", slots[0]))
        pattern.append(("f", shared_fillers[t % 3]))
        for j, st in enumerate(slots[1:], start=1):
            if j < len(privs):
                pattern.append(("f", privs[j]))
            pattern.append(("s", st))
        if len(privs) > len(slots):
            pattern.extend(("f", p) for p in privs[len(slots) :])
        if t % 2 == 0:
            pattern.append(("f", shared_fillers[(t + 1) % 3]))
        templates.append(_Template(intent, tuple(pattern)))

    datasets: dict[tuple[str, str], Dataset] = {}
    for split, size in (
        ("train", spec.train_size),
        ("dev", spec.dev_size),
        ("test", spec.test_size),
    ):
        rng_split = random.Random(f"{spec.seed}:{split}")
        abstract: list[tuple[_Template, list[tuple[int, ...]]]] = []
        for idx in range(size):
            tpl = templates[idx % len(templates)]
            picks = [
                values[item[1]][rng_split.randrange(spec.values_per_type)]
                for item in tpl.pattern
                if item[0] == "s"
            ]
            abstract.append((tpl, picks))
        for lang in languages:
            utts = []
            for idx, (tpl, picks) in enumerate(abstract):
                tokens: list[str] = []
                labels: list[str] = []
                slot_i = 0
                for kind, ref in tpl.pattern:
                    if kind == "f":
                        tokens.append(concepts[ref][lang])
                        labels.append("O")
                    else:
                        for w, concept in enumerate(picks[slot_i]):
                            tokens.append(concepts[concept][lang])
                            labels.append(("B-" if w == 0 else "I-") + str(ref))
                        slot_i += 1
                utts.append(
                    Utterance(
                        id=f"{split}-{idx:04d}",
                        tokens=tuple(tokens),
                        slot_labels=tuple(labels),
                        intent=tpl.intent,
                    )
                )
            datasets[(lang, split)] = Dataset(
                utterances=tuple(utts), language=lang, split=split
            )

    lexicons: dict[tuple[str, str], tuple[tuple[str, str], ...]] = {}
    for src in languages:
        for tgt in languages:
            if src == tgt:
                continue
            entries = sorted(
                (forms[src], forms[tgt]) for forms in concepts
            )
            lexicons[(src, tgt)] = tuple(entries)

    return SyntheticCorpus(
        spec=spec,
        languages=tuple(languages),
        families=families,
        datasets=datasets,
        lexicons=lexicons,
    )
