"""Length accuracy, conditional (window-wise) F1 and coarse (presence) F1.

A per-type score is ``None`` ("undefined") when the type never occurs in
the ground truth of the samples it is computed over; undefined types are
left out of the average. Otherwise ``F1 = 2TP / (2TP + FP + FN)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .core import DEFAULT_EVENTS


class UnpairedId(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class Prediction:
    id: str
    labels: tuple
    per_window_latency_ns: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(frozenset(s) for s in self.labels))


@dataclass
class F1Result:
    per_type: dict
    average: Optional[float]
    counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"per_type": dict(self.per_type), "average": self.average, "counts": dict(self.counts)}


@dataclass
class EvalReport:
    length_accuracy: float
    conditional_f1: F1Result
    coarse_f1: F1Result
    n_samples: int
    n_length_matched: int

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_length_matched": self.n_length_matched,
            "length_accuracy": self.length_accuracy,
            "conditional_f1": self.conditional_f1.to_dict(),
            "coarse_f1": self.coarse_f1.to_dict(),
        }


def _labels(x) -> tuple:
    return tuple(x.labels) if hasattr(x, "labels") else tuple(x)


def _pair(preds, truths) -> list[tuple[tuple, tuple]]:
    """Match predictions to truths by id (mappings or objects with ``.id``)."""

    def as_map(xs):
        if isinstance(xs, Mapping):
            return {k: _labels(v) for k, v in xs.items()}
        out = {}
        for x in xs:
            if x.id in out:
                raise UnpairedId(f"duplicate id {x.id!r}")
            out[x.id] = _labels(x)
        return out

    p, t = as_map(preds), as_map(truths)
    if not t and not p:
        raise EmptyInput("no samples to evaluate")
    missing = sorted(set(t) ^ set(p))
    if missing:
        raise UnpairedId(f"ids without a partner: {missing[:5]}")
    return [(p[k], t[k]) for k in sorted(t)]


def _f1(counts: dict) -> Optional[float]:
    tp, fp, fn = counts["tp"], counts["fp"], counts["fn"]
    if tp + fn == 0:
        return None
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def _summarise(counts: dict) -> F1Result:
    per = {e: _f1(c) for e, c in counts.items()}
    defined = [v for v in per.values() if v is not None]
    avg = sum(defined) / len(defined) if defined else None
    return F1Result(per, avg, counts)


def length_accuracy(preds, truths) -> float:
    pairs = _pair(preds, truths)
    return sum(len(p) == len(t) for p, t in pairs) / len(pairs)


def conditional_f1(preds, truths, events: Sequence[str] = DEFAULT_EVENTS) -> F1Result:
    """Window-wise F1 per type, micro-aggregated over length-matched samples."""
    counts = {e: {"tp": 0, "fp": 0, "fn": 0} for e in events}
    for p, t in _pair(preds, truths):
        if len(p) != len(t):
            continue
        for ps, ts in zip(p, t):
            for e in events:
                a, b = e in ps, e in ts
                if a and b:
                    counts[e]["tp"] += 1
                elif a:
                    counts[e]["fp"] += 1
                elif b:
                    counts[e]["fn"] += 1
    return _summarise(counts)


def coarse_f1(preds, truths, events: Sequence[str] = DEFAULT_EVENTS) -> F1Result:
    """Sample-wise F1 on whether each type occurs anywhere; lengths may differ."""
    counts = {e: {"tp": 0, "fp": 0, "fn": 0} for e in events}
    for p, t in _pair(preds, truths):
        ps = frozenset().union(*p)
        ts = frozenset().union(*t)
        for e in events:
            a, b = e in ps, e in ts
            if a and b:
                counts[e]["tp"] += 1
            elif a:
                counts[e]["fp"] += 1
            elif b:
                counts[e]["fn"] += 1
    return _summarise(counts)


def evaluate(preds, truths, events: Sequence[str] = DEFAULT_EVENTS) -> EvalReport:
    pairs = _pair(preds, truths)
    matched = sum(len(p) == len(t) for p, t in pairs)
    return EvalReport(
        length_accuracy=matched / len(pairs),
        conditional_f1=conditional_f1(preds, truths, events),
        coarse_f1=coarse_f1(preds, truths, events),
        n_samples=len(pairs),
        n_length_matched=matched,
    )
