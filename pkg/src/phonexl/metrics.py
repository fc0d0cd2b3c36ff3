"""Evaluation metrics: entity-level F1 for NER, token-level micro-F1 for POS."""

from dataclasses import dataclass

import numpy as np


def bio_spans(tags: list[str]) -> set[tuple[str, int, int]]:
    """(type, start, end-exclusive) spans from BIO tags.

    An I- tag that does not continue a running entity of the same type opens
    a new span, so slightly malformed sequences still score sensibly.
    """
    spans = set()
    start = None
    kind = None
    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            if start is not None:
                spans.add((kind, start, i))
            start, kind = i, tag[2:]
        elif tag.startswith("I-"):
            if start is None or tag[2:] != kind:
                if start is not None:
                    spans.add((kind, start, i))
                start, kind = i, tag[2:]
        else:
            if start is not None:
                spans.add((kind, start, i))
            start, kind = None, None
    if start is not None:
        spans.add((kind, start, len(tags)))
    return spans


def _prf(n_correct: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    precision = 100.0 * n_correct / n_pred if n_pred else 0.0
    recall = 100.0 * n_correct / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def ner_scores(gold_sentences, pred_sentences) -> tuple[float, float, float]:
    """Micro precision/recall/F1 over exact-match entity spans, in percent."""
    n_correct = n_pred = n_gold = 0
    for gold, pred in zip(gold_sentences, pred_sentences, strict=True):
        g, p = bio_spans(list(gold)), bio_spans(list(pred))
        n_correct += len(g & p)
        n_pred += len(p)
        n_gold += len(g)
    return _prf(n_correct, n_pred, n_gold)


def token_scores(gold_sentences, pred_sentences) -> tuple[float, float, float]:
    """Token-level micro precision/recall/F1 (identical numbers for 1-of-K tags)."""
    n_correct = n_total = 0
    for gold, pred in zip(gold_sentences, pred_sentences, strict=True):
        if len(gold) != len(pred):
            raise ValueError("gold/pred length mismatch")
        n_correct += sum(g == p for g, p in zip(gold, pred))
        n_total += len(gold)
    return _prf(n_correct, n_total, n_total)


def score_task(task: str, gold_sentences, pred_sentences) -> tuple[float, float, float]:
    if task == "ner":
        return ner_scores(gold_sentences, pred_sentences)
    if task == "pos":
        return token_scores(gold_sentences, pred_sentences)
    raise ValueError(f"unknown task {task!r}")


@dataclass
class EvalResult:
    precision: float
    recall: float
    f1: float
    n_sentences: int

    def as_dict(self) -> dict:
        return {"precision": round(self.precision, 4), "recall": round(self.recall, 4),
                "f1": round(self.f1, 4), "n_sentences": self.n_sentences}


@dataclass
class EvalReport:
    """Per-seed results with mean and stdev (stdev only for two seeds or more)."""
    task: str
    language: str
    per_seed: dict

    def mean_f1(self) -> float:
        return float(np.mean([r.f1 for r in self.per_seed.values()]))

    def stdev_f1(self) -> float | None:
        if len(self.per_seed) < 2:
            return None
        return float(np.std([r.f1 for r in self.per_seed.values()], ddof=1))

    def as_dict(self) -> dict:
        out = {"task": self.task, "language": self.language,
               "per_seed": {str(s): r.as_dict() for s, r in sorted(self.per_seed.items())},
               "mean_f1": round(self.mean_f1(), 4)}
        stdev = self.stdev_f1()
        if stdev is not None:
            out["stdev_f1"] = round(stdev, 4)
        return out
