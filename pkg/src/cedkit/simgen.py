"""Seeded simulator of daily routines at the atomic-activity level.

Random streams
--------------
Every trace draws from its own ``numpy.random.PCG64`` stream seeded with
``derive_seed(cfg.seed, index)``, where ``derive_seed`` hashes the pair
through ``numpy.random.SeedSequence`` and takes the first 64-bit word. The
trace index, not the worker that produced it, fixes the stream, so output
is identical for any worker count.

Time stretch
------------
Traces of different lengths model the same routines played out over a
longer or shorter span. ``stretch`` (default ``span_windows / 60``) divides
the per-window routine start rate and multiplies the don't-care gaps inside
routines; activity durations themselves are not stretched.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import Trace, Vocabulary, WindowSpec, windows_for
from .oracle import oracle_all

ROUTINES = ("restroom", "meal", "brush")
RULE_OF = {"restroom": "e1", "meal": "e2", "brush": "e3"}
CALM = ("walk", "sit", "stand", "idle")


class InfeasibleConfig(ValueError):
    pass


def _default_durations() -> dict:
    return {
        "use_restroom": (2, 6),
        "wash_hands": (1, 8),
        "work": (3, 12),
        "eat": (6, 24),
        "brush_teeth": (6, 30),
        "touch_object": (1, 2),
        "gap": (0, 3),
        "background": (1, 6),
    }


@dataclass(frozen=True)
class SimConfig:
    span_windows: int = 60
    routine_rates: dict = field(default_factory=lambda: {r: 1.0 for r in ROUTINES})
    violation_prob: dict = field(default_factory=lambda: {"e1": 0.5, "e2": 0.5, "e3": 0.5})
    duration_ranges: dict = field(default_factory=_default_durations)
    background_weights: dict = field(
        default_factory=lambda: {"walk": 3.0, "sit": 3.0, "stand": 2.0, "work": 3.0, "idle": 2.0, "touch_object": 1.0}
    )
    stretch: Optional[float] = None
    window: WindowSpec = field(default_factory=WindowSpec)
    seed: int = 0

    def __post_init__(self):
        if self.span_windows < 1:
            raise ValueError("span_windows must be positive")
        for r, v in self.routine_rates.items():
            if r not in ROUTINES or v < 0:
                raise ValueError(f"bad routine rate {r}={v}")
        for r, p in self.violation_prob.items():
            if r not in RULE_OF.values() or not 0.0 <= p <= 1.0:
                raise ValueError(f"bad violation probability {r}={p}")
        for k, (lo, hi) in self.duration_ranges.items():
            if lo < 0 or hi < lo:
                raise ValueError(f"empty duration range {k}=({lo}, {hi})")
        w = self.background_weights
        if any(v < 0 for v in w.values()) or sum(w.values()) <= 0:
            raise ValueError("background weights must be nonnegative with a positive sum")
        if self.stretch is not None and self.stretch <= 0:
            raise ValueError("stretch must be positive")

    @property
    def time_stretch(self) -> float:
        return self.stretch if self.stretch is not None else self.span_windows / 60.0

    def with_span(self, span_windows: int) -> "SimConfig":
        return replace(self, span_windows=span_windows)


def derive_seed(base: int, *keys: int) -> int:
    """Mix integers into an independent 64-bit seed."""
    ss = np.random.SeedSequence([int(base) & (2**64 - 1), *(int(k) for k in keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class _Builder:
    """Expands routine templates for one trace."""

    def __init__(self, cfg: SimConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        d = cfg.duration_ranges
        self.dur = d
        win = cfg.window
        self.wash_need = windows_for(20, win)
        self.deadline = windows_for(120, win)
        self.brush_need = windows_for(120, win)
        self.max_pause = windows_for(10, win)
        names = [k for k, v in cfg.background_weights.items() if v > 0]
        weights = np.array([cfg.background_weights[k] for k in names], dtype=float)
        self.bg_names = names
        self.bg_p = weights / weights.sum()
        calm = [k for k in names if k in CALM] or list(CALM)
        self.calm = calm

    def span(self, lo: int, hi: int) -> int:
        return int(self.rng.integers(lo, hi + 1))

    def d(self, key: str) -> int:
        lo, hi = self.dur[key]
        return self.span(lo, hi)

    def gap(self, choices=None, cap: Optional[int] = None) -> list[str]:
        lo, hi = self.dur["gap"]
        s = self.cfg.time_stretch
        lo, hi = int(round(lo * s)), int(round(hi * s))
        if cap is not None:
            hi = min(hi, cap)
            lo = min(lo, hi)
        n = self.span(lo, hi)
        pool = choices or self.calm
        return [pool[int(i)] for i in self.rng.integers(0, len(pool), n)]

    def wash_ok(self) -> list[str]:
        lo, hi = self.dur["wash_hands"]
        return ["wash_hands"] * self.span(max(lo, self.wash_need), max(hi, self.wash_need))

    def wash_short(self) -> list[str]:
        lo, _ = self.dur["wash_hands"]
        hi = self.wash_need - 1
        if hi < 1:
            return []
        return ["wash_hands"] * self.span(max(1, min(lo, hi)), hi)

    def violates(self, rule: str) -> bool:
        return bool(self.rng.random() < self.cfg.violation_prob.get(rule, 0.5))

    def restroom(self) -> list[str]:
        body = ["use_restroom"] * self.d("use_restroom")
        if self.violates("e1"):
            if self.rng.random() < 0.5:
                body += self.wash_short()
        else:
            body += self.wash_ok()
        body += self.gap()
        return body + ["work"] * self.d("work")

    def meal(self) -> list[str]:
        eat = ["eat"] * self.d("eat")
        if not self.violates("e2"):
            return self.wash_ok() + self.gap(cap=self.deadline - 1) + eat
        kind = int(self.rng.integers(4))
        if kind == 0:
            pre = self.gap()
        elif kind == 1:
            pre = self.wash_short() + self.gap(cap=self.deadline - 1)
        elif kind == 2:
            pre = self.wash_ok() + ["touch_object"] * self.d("touch_object") + self.gap()
        else:
            late = self.deadline + self.span(0, max(1, self.deadline // 4))
            pre = self.wash_ok() + [self.calm[int(i)] for i in self.rng.integers(0, len(self.calm), late)]
        return pre + eat

    def brush(self) -> list[str]:
        lo, hi = self.dur["brush_teeth"]
        if self.violates("e3"):
            total = self.span(min(lo, self.brush_need - 1), self.brush_need - 1)
        else:
            total = self.span(max(lo, self.brush_need), max(hi, self.brush_need))
        pieces = min(int(self.rng.integers(1, 4)), total)
        cuts = sorted(self.rng.choice(np.arange(1, total), size=pieces - 1, replace=False).tolist()) if pieces > 1 else []
        bounds = [0, *cuts, total]
        body: list[str] = []
        for i in range(len(bounds) - 1):
            if i:
                body += [self.calm[int(self.rng.integers(len(self.calm)))]] * self.span(1, self.max_pause)
            body += ["brush_teeth"] * (bounds[i + 1] - bounds[i])
        return body

    def background(self, n: int) -> list[str]:
        out: list[str] = []
        lo, hi = self.dur["background"]
        while len(out) < n:
            act = self.bg_names[int(self.rng.choice(len(self.bg_names), p=self.bg_p))]
            out += [act] * self.span(max(1, lo), max(1, hi))
        return out[:n]


def _min_length(cfg: SimConfig, routine: str) -> int:
    d = cfg.duration_ranges
    if routine == "restroom":
        return d["use_restroom"][0] + d["work"][0]
    if routine == "meal":
        return d["eat"][0]
    return max(1, min(d["brush_teeth"][0], windows_for(120, cfg.window) - 1))


def check_feasible(cfg: SimConfig) -> None:
    windows_for(20, cfg.window), windows_for(120, cfg.window), windows_for(10, cfg.window)
    for r in ROUTINES:
        if cfg.routine_rates.get(r, 0.0) > 0 and _min_length(cfg, r) > cfg.span_windows:
            raise InfeasibleConfig(
                f"shortest {r} routine needs {_min_length(cfg, r)} windows, span is {cfg.span_windows}"
            )


def simulate(cfg: SimConfig, index: int, id_prefix: str = "trace-") -> Trace:
    """One trace; fully determined by ``(cfg, index)``."""
    seed = derive_seed(cfg.seed, index)
    rng = np.random.Generator(np.random.PCG64(seed))
    b = _Builder(cfg, rng)
    span = cfg.span_windows
    per_window = np.array([cfg.routine_rates.get(r, 0.0) for r in ROUTINES]) / (60.0 * cfg.time_stretch)
    starts = rng.random((span, len(ROUTINES))) < np.minimum(per_window, 1.0)
    acts: list[str] = []
    for t, k in zip(*np.nonzero(starts)):
        if len(acts) >= span:
            break
        # later routines queue behind the one in progress
        if t > len(acts):
            acts += b.background(t - len(acts))
        acts += getattr(b, ROUTINES[k])()
    if len(acts) < span:
        acts += b.background(span - len(acts))
    acts = acts[:span]
    return Trace(
        id=f"{id_prefix}{index:06d}",
        activities=tuple(acts),
        window=cfg.window,
        labels=tuple(oracle_all(acts, cfg.window)),
        seed=seed,
    )


def _chunk(args):
    cfg, lo, hi, prefix = args
    return [simulate(cfg, i, prefix) for i in range(lo, hi)]


def generate(cfg: SimConfig, n: int, id_prefix: str = "trace-", workers: int = 1) -> list[Trace]:
    """Generate ``n`` labeled traces of exactly ``cfg.span_windows`` windows."""
    check_feasible(cfg)
    if workers <= 1 or n < 2:
        return [simulate(cfg, i, id_prefix) for i in range(n)]
    step = math.ceil(n / workers)
    jobs = [(cfg, lo, min(lo + step, n), id_prefix) for lo in range(0, n, step)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return [t for part in ex.map(_chunk, jobs) for t in part]


@dataclass(frozen=True)
class NoiseModel:
    """Symmetric confusion: the true label survives with ``p_correct``,
    otherwise one of the other K-1 labels is drawn uniformly.

    ``soft_center`` picks what the soft output is centred on. ``"observed"``
    (default) gives the calibrated posterior of a classifier that reported
    the corrupted label, so its argmax is that label; ``"true"`` centres it
    on the clean label instead.
    """

    p_correct: float = 0.9
    kind: str = "symmetric"
    soft_center: str = "observed"

    def __post_init__(self):
        if not 0.0 < self.p_correct <= 1.0:
            raise ValueError("p_correct must be in (0, 1]")
        if self.kind != "symmetric":
            raise ValueError(f"unsupported noise kind {self.kind!r}")
        if self.soft_center not in ("observed", "true"):
            raise ValueError("soft_center must be 'observed' or 'true'")

    def confusion(self, k: int) -> np.ndarray:
        off = (1.0 - self.p_correct) / (k - 1)
        m = np.full((k, k), off)
        np.fill_diagonal(m, self.p_correct)
        return m


def corrupt(t: Trace, nm: NoiseModel, seed: int, vocab: Vocabulary = None) -> Trace:
    """Noisy copy of ``t``; ground-truth labels are carried over unchanged."""
    vocab = vocab or Vocabulary()
    k = len(vocab)
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed)))
    true = vocab.encode(t.activities)
    n = len(true)
    flip = rng.random(n) >= nm.p_correct
    shift = rng.integers(1, k, n)
    observed = np.where(flip, (true + shift) % k, true)
    center = observed if nm.soft_center == "observed" else true
    soft = nm.confusion(k)[center]
    return replace(t, activities=vocab.decode(observed), soft=soft)


def dataset(
    cfg: SimConfig,
    sizes: tuple[int, int, int] = (10_000, 1_000, 1_000),
    base_seed: int = 0,
    workers: int = 1,
) -> dict[str, list[Trace]]:
    """Train/val/test splits with per-split seeds ``derive_seed(base_seed, split_no)``."""
    out = {}
    for no, (name, n) in enumerate(zip(("train", "val", "test"), sizes)):
        split_cfg = replace(cfg, seed=derive_seed(base_seed, no))
        out[name] = generate(split_cfg, n, id_prefix=f"{name}-", workers=workers)
    return out


__all__ = [
    "InfeasibleConfig",
    "NoiseModel",
    "SimConfig",
    "check_feasible",
    "corrupt",
    "dataset",
    "derive_seed",
    "generate",
    "simulate",
]
