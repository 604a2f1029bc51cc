"""Span- and token-level scoring for BIO sequence labeling.

Spans are scored on exact (start, end, type) matches, micro-averaged over
the whole collection.  Predicted label sequences may be ill-formed; an I-x
that does not continue a same-type span opens a new span (standard
conlleval leniency), so scoring never raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Span = tuple[int, int, str]  # start (incl), end (excl), slot type


def bio_spans(labels: Sequence[str]) -> list[Span]:
    """Extract typed spans from a BIO sequence, lenient to ill-formed input."""
    spans: list[Span] = []
    start = -1
    cur: str | None = None
    for i, label in enumerate(labels):
        if label.startswith("B-"):
            if cur is not None:
                spans.append((start, i, cur))
            start, cur = i, label[2:]
        elif label.startswith("I-"):
            if cur != label[2:]:
                if cur is not None:
                    spans.append((start, i, cur))
                start, cur = i, label[2:]
        else:  # O or anything unrecognized
            if cur is not None:
                spans.append((start, i, cur))
            cur = None
    if cur is not None:
        spans.append((start, len(labels), cur))
    return spans


@dataclass(frozen=True)
class PRF:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def span_prf(
    gold: Iterable[Sequence[str]], pred: Iterable[Sequence[str]]
) -> tuple[PRF, dict[str, PRF]]:
    """Micro P/R/F1 over exact span matches, overall and per slot type."""
    tp = fp = fn = 0
    per_type: dict[str, list[int]] = {}
    for g_labels, p_labels in zip(gold, pred, strict=True):
        g = set(bio_spans(g_labels))
        p = set(bio_spans(p_labels))
        for span in p & g:
            tp += 1
            per_type.setdefault(span[2], [0, 0, 0])[0] += 1
        for span in p - g:
            fp += 1
            per_type.setdefault(span[2], [0, 0, 0])[1] += 1
        for span in g - p:
            fn += 1
            per_type.setdefault(span[2], [0, 0, 0])[2] += 1
    return PRF(tp, fp, fn), {
        t: PRF(*counts) for t, counts in sorted(per_type.items())
    }


def token_prf(
    gold: Iterable[Sequence[str]], pred: Iterable[Sequence[str]]
) -> PRF:
    """Micro P/R/F1 over non-O token labels (exact tag match)."""
    tp = fp = fn = 0
    for g_labels, p_labels in zip(gold, pred, strict=True):
        for g, p in zip(g_labels, p_labels, strict=True):
            if p != "O" and g == p:
                tp += 1
            else:
                if p != "O":
                    fp += 1
                if g != "O":
                    fn += 1
    return PRF(tp, fp, fn)
