"""Per-window step latency of the crisp and belief detectors."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Vocabulary
from .engine import BeliefDetector, CrispDetector
from .rules.model import TimedAutomaton
from .simgen import NoiseModel, SimConfig, corrupt, derive_seed, simulate


@dataclass(frozen=True)
class LatencyStats:
    n: int
    mean_ns: float
    p50_ns: float
    p99_ns: float
    max_ns: float

    @classmethod
    def of(cls, samples) -> "LatencyStats":
        a = np.asarray(samples, dtype=np.int64)
        if a.size == 0:
            raise ValueError("no latency samples")
        # "higher" reports an observed sample rather than an interpolated one
        return cls(
            n=int(a.size),
            mean_ns=float(a.mean()),
            p50_ns=float(np.percentile(a, 50, method="higher")),
            p99_ns=float(np.percentile(a, 99, method="higher")),
            max_ns=float(a.max()),
        )


@dataclass(frozen=True)
class LatencyReport:
    per_mode: dict  # mode -> LatencyStats

    # headline numbers are the crisp detector's
    @property
    def mean_ns(self) -> float:
        return self.per_mode["crisp"].mean_ns

    @property
    def p50_ns(self) -> float:
        return self.per_mode["crisp"].p50_ns

    @property
    def p99_ns(self) -> float:
        return self.per_mode["crisp"].p99_ns

    @property
    def max_ns(self) -> float:
        return self.per_mode["crisp"].max_ns

    def to_dict(self) -> dict:
        return {m: vars(s) for m, s in self.per_mode.items()}


def bench_latency(
    rules: Sequence[TimedAutomaton],
    span_windows: int,
    trials: int,
    seed: int = 0,
    vocab: Vocabulary = None,
    threshold: float = 0.5,
    p_correct: float = 0.9,
) -> LatencyReport:
    """Time one detector step per window over ``trials`` simulated traces.

    Trace generation and noise happen before the clock starts; only
    ``step`` calls are timed, with ``time.perf_counter_ns``.
    """
    if trials < 1 or span_windows < 1:
        raise ValueError("trials and span_windows must be positive")
    vocab = vocab or Vocabulary()
    cfg = SimConfig(span_windows=span_windows, seed=seed)
    nm = NoiseModel(p_correct)
    traces = [corrupt(simulate(cfg, i), nm, derive_seed(seed, 1, i), vocab) for i in range(trials)]

    clock = time.perf_counter_ns
    crisp, belief = [], []
    for t in traces:
        det = CrispDetector(rules, vocab)
        for x in vocab.encode(t.activities).tolist():
            t0 = clock()
            det.step(x)
            crisp.append(clock() - t0)
        bdet = BeliefDetector(rules, vocab, threshold)
        for p in t.soft:
            t0 = clock()
            bdet.step(p)
            belief.append(clock() - t0)
    return LatencyReport({"crisp": LatencyStats.of(crisp), "belief": LatencyStats.of(belief)})
