"""Evaluation metrics: intent accuracy and span-level micro-F1.

Spans are exact (start, end, type) matches pooled over all classes.
The BIO scanner is lenient: an I-<type> without a compatible open span
starts a new span, so noisy predictions still score rather than crash.
"""

from __future__ import annotations

from typing import Sequence


def bio_spans(labels: Sequence[str]) -> list[tuple[int, int, str]]:
    """(start, end, type) triples; end is exclusive."""
    spans: list[tuple[int, int, str]] = []
    start = None
    kind = None
    for i, label in enumerate(labels):
        if label.startswith("B-"):
            if start is not None:
                spans.append((start, i, kind))
            start, kind = i, label[2:]
        elif label.startswith("I-"):
            if start is None or kind != label[2:]:
                if start is not None:
                    spans.append((start, i, kind))
                start, kind = i, label[2:]
        else:
            if start is not None:
                spans.append((start, i, kind))
            start, kind = None, None
    if start is not None:
        spans.append((start, len(labels), kind))
    return spans


def intent_accuracy(gold: Sequence[str], predicted: Sequence[str]) -> float:
    if not gold:
        raise ValueError("cannot score an empty set of intents")
    hits = sum(g == p for g, p in zip(gold, predicted, strict=True))
    return hits / len(gold)


def span_f1(
    gold: Sequence[Sequence[str]], predicted: Sequence[Sequence[str]]
) -> dict[str, float]:
    """Micro precision/recall/F1 over exact span matches, pooled across types."""
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold sequences vs {len(predicted)} predicted")
    tp = fp = fn = 0
    for g, p in zip(gold, predicted):
        if len(g) != len(p):
            raise ValueError(f"{len(g)} gold labels vs {len(p)} predicted")
        gold_spans = set(bio_spans(g))
        pred_spans = set(bio_spans(p))
        tp += len(gold_spans & pred_spans)
        fp += len(pred_spans - gold_spans)
        fn += len(gold_spans - pred_spans)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}
