"""Streaming evaluation of timed automata over per-window observations.

Two modes are offered. Crisp mode steps each automaton on one activity per
window. Belief mode keeps an exact probability vector over the reachable
(state, counters) configurations and, each window, pushes it through the
transition table weighted by the window's activity distribution; an event
is emitted when the probability mass of transitions emitting it reaches the
threshold.

Automata are compiled once per vocabulary into dense ``next``/``emit``
tables over the configurations reachable from the initial one, so a crisp
step is two array lookups and a belief step is one ``bincount``.
"""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import VocabularyMismatch, Vocabulary, check_distribution
from .rules.model import TimedAutomaton


class InvalidThreshold(ValueError):
    pass


@dataclass(frozen=True)
class MachineConfig:
    state: str
    counters: tuple[int, ...] = ()


def initial_config(a: TimedAutomaton) -> MachineConfig:
    return MachineConfig(a.initial.name, (0,) * len(a.counters))


def _preds_hold(a: TimedAutomaton, preds, counters) -> bool:
    return all(p.holds(counters[a.counter_index(p.counter)]) for p in preds)


def step_crisp(a: TimedAutomaton, cfg: MachineConfig, x: str) -> tuple[MachineConfig, frozenset]:
    """Apply the first arm of ``cfg.state`` matching activity ``x``."""
    for arm in a.state(cfg.state).arms:
        if arm.activities is not None and x not in arm.activities:
            continue
        if not _preds_hold(a, arm.preds, cfg.counters):
            continue
        vals = list(cfg.counters)
        for act in arm.actions:
            i = a.counter_index(act.counter)
            if act.kind == "inc":
                vals[i] = min(vals[i] + 1, a.counters[i].max)
            elif act.kind == "reset":
                vals[i] = 0
            else:
                vals[i] = act.value
        return MachineConfig(arm.target, tuple(vals)), arm.emits
    raise RuntimeError(f"no arm of state {cfg.state!r} matches {x!r}; automaton is not total")


def end_emissions(a: TimedAutomaton, cfg: MachineConfig) -> frozenset:
    """Events emitted when the trace ends while in ``cfg``."""
    if a.end_policy != "close_sessions":
        return frozenset()
    out = set()
    for e in a.state(cfg.state).end_arms:
        if _preds_hold(a, e.preds, cfg.counters):
            out |= e.emits
    return frozenset(out)


class CompiledAutomaton:
    """Transition tables of one automaton over its reachable configurations."""

    def __init__(self, a: TimedAutomaton, vocab: Vocabulary):
        self.automaton = a
        self.vocab = vocab
        self.events = tuple(sorted(a.events))
        bit = {e: 1 << i for i, e in enumerate(self.events)}

        def mask(emits):
            m = 0
            for e in emits:
                m |= bit[e]
            return m

        start = initial_config(a)
        configs = [start]
        index = {start: 0}
        nxt, emt = [], []
        k = 0
        # breadth-first over reachable configurations
        while k < len(configs):
            cfg = configs[k]
            row_n, row_e = [], []
            for x in vocab.names:
                c2, em = step_crisp(a, cfg, x)
                j = index.get(c2)
                if j is None:
                    j = index[c2] = len(configs)
                    configs.append(c2)
                row_n.append(j)
                row_e.append(mask(em))
            nxt.append(row_n)
            emt.append(row_e)
            k += 1
        self.configs = configs
        self.index = index
        self.next = np.array(nxt, dtype=np.intp)
        self.emit = np.array(emt, dtype=np.int64)
        self.end_emit = np.array([mask(end_emissions(a, c)) for c in configs], dtype=np.int64)
        # python-level copies keep the crisp hot path free of numpy scalar overhead
        self.next_list = nxt
        self.emit_list = emt
        self.end_list = self.end_emit.tolist()
        self.event_bits = [(e, bit[e]) for e in self.events]
        self.emit_masks = [(e, (self.emit & bit[e]) != 0) for e in self.events]
        self._decode = {}

    def __len__(self) -> int:
        return len(self.configs)

    def decode(self, m: int) -> frozenset:
        out = self._decode.get(m)
        if out is None:
            out = self._decode[m] = frozenset(e for e, b in self.event_bits if m & b)
        return out


@functools.lru_cache(maxsize=256)
def _compile(a: TimedAutomaton, vocab: Vocabulary) -> CompiledAutomaton:
    return CompiledAutomaton(a, vocab)


def compile_rules(rules: Sequence[TimedAutomaton], vocab: Vocabulary) -> list[CompiledAutomaton]:
    return [_compile(a, vocab) for a in rules]


@dataclass
class DetectorOutput:
    labels: list
    per_window_latency_ns: Optional[list] = None

    def __len__(self) -> int:
        return len(self.labels)


class CrispDetector:
    """Window-by-window crisp detector holding one configuration per automaton.

    ``state`` / ``from_state`` allow a stream to be suspended and resumed.
    """

    def __init__(self, rules: Sequence[TimedAutomaton], vocab: Vocabulary = None):
        self.vocab = vocab or Vocabulary()
        self.compiled = compile_rules(rules, self.vocab)
        self.current = [0] * len(self.compiled)
        self._index = {n: i for i, n in enumerate(self.vocab.names)}

    def step(self, x) -> frozenset:
        if isinstance(x, str):
            try:
                x = self._index[x]
            except KeyError:
                raise VocabularyMismatch(f"unknown activity {x!r}") from None
        out = frozenset()
        cur = self.current
        for i, ca in enumerate(self.compiled):
            c = cur[i]
            m = ca.emit_list[c][x]
            cur[i] = ca.next_list[c][x]
            if m:
                out = out | ca.decode(m)
        return out

    def finish(self) -> frozenset:
        out = frozenset()
        for ca, c in zip(self.compiled, self.current):
            m = ca.end_list[c]
            if m:
                out = out | ca.decode(m)
        return out

    @property
    def state(self) -> list[MachineConfig]:
        return [ca.configs[c] for ca, c in zip(self.compiled, self.current)]

    @classmethod
    def from_state(cls, rules, vocab, configs: Sequence[MachineConfig]) -> "CrispDetector":
        d = cls(rules, vocab)
        d.current = [ca.index[c] for ca, c in zip(d.compiled, configs)]
        return d


def run_crisp(
    rules: Sequence[TimedAutomaton],
    activities: Sequence,
    vocab: Vocabulary = None,
    timing: bool = False,
) -> DetectorOutput:
    """Label every window; end-of-trace emissions land on the final window."""
    det = CrispDetector(rules, vocab)
    idx = det._index
    try:
        xs = [a if not isinstance(a, str) else idx[a] for a in activities]
    except KeyError as exc:
        raise VocabularyMismatch(f"unknown activity {exc.args[0]!r}") from None
    labels = []
    lat = [] if timing else None
    clock = time.perf_counter_ns
    for x in xs:
        if timing:
            t0 = clock()
            labels.append(det.step(x))
            lat.append(clock() - t0)
        else:
            labels.append(det.step(x))
    if labels:
        labels[-1] = labels[-1] | det.finish()
    return DetectorOutput(labels, lat)


class BeliefState:
    """Distribution over the reachable configurations of one automaton."""

    def __init__(self, compiled: CompiledAutomaton, prune_epsilon: float = 1e-9):
        self.compiled = compiled
        self.prune_epsilon = prune_epsilon
        self.probs = np.zeros(len(compiled))
        self.probs[0] = 1.0

    def entries(self) -> dict[MachineConfig, float]:
        nz = np.flatnonzero(self.probs)
        return {self.compiled.configs[i]: float(self.probs[i]) for i in nz}

    def _joint(self, p: np.ndarray) -> np.ndarray:
        # mass of each (config, activity) transition this window
        return self.probs[:, None] * p[None, :]

    def step(self, p: np.ndarray) -> dict[str, float]:
        """Advance one window; return emission mass per event."""
        ca = self.compiled
        w = self._joint(p)
        masses = {e: float(w[m].sum()) for e, m in ca.emit_masks}
        new = np.bincount(ca.next.ravel(), weights=w.ravel(), minlength=len(ca))
        if self.prune_epsilon > 0:
            new[new < self.prune_epsilon] = 0.0
        self.probs = new / new.sum()
        return masses

    def final_masses(self, prev: np.ndarray, p: np.ndarray) -> dict[str, float]:
        """Mass of each event on the last window, counting end-of-trace closure.

        ``prev`` is the belief before the last step; a trajectory counts once
        even if both its last transition and its closure emit the event.
        """
        ca = self.compiled
        w = prev[:, None] * p[None, :]
        both = ca.emit | ca.end_emit[ca.next]
        return {e: float(w[(both & b) != 0].sum()) for e, b in ca.event_bits}


class BeliefDetector:
    def __init__(
        self,
        rules: Sequence[TimedAutomaton],
        vocab: Vocabulary = None,
        threshold: float = 0.5,
        prune_epsilon: float = 1e-9,
    ):
        if not 0.0 < threshold <= 1.0:
            raise InvalidThreshold(f"threshold must be in (0, 1], got {threshold}")
        self.vocab = vocab or Vocabulary()
        self.threshold = threshold
        self.beliefs = [BeliefState(ca, prune_epsilon) for ca in compile_rules(rules, self.vocab)]
        self._last = None

    def step(self, p) -> frozenset:
        p = np.asarray(p, dtype=float)
        self._last = ([b.probs for b in self.beliefs], p)
        out = set()
        for b in self.beliefs:
            for e, m in b.step(p).items():
                if m >= self.threshold:
                    out.add(e)
        return frozenset(out)

    def finish(self) -> frozenset:
        if self._last is None:
            return frozenset()
        prevs, p = self._last
        out = set()
        for b, prev in zip(self.beliefs, prevs):
            if b.compiled.automaton.end_policy != "close_sessions":
                continue
            for e, m in b.final_masses(prev, p).items():
                if m >= self.threshold:
                    out.add(e)
        return frozenset(out)


def _check_soft(soft, vocab: Vocabulary) -> np.ndarray:
    soft = np.asarray(soft, dtype=float)
    if soft.size == 0:
        return soft.reshape(0, len(vocab))
    if soft.ndim != 2 or soft.shape[1] != len(vocab):
        raise VocabularyMismatch(f"soft observations have shape {soft.shape}, vocabulary has {len(vocab)} tokens")
    for row in soft:
        check_distribution(row, len(vocab))
    return soft


def parse_mode(mode: str) -> tuple[str, float]:
    """``"argmax"`` / ``"belief"`` / ``"belief:0.7"`` -> (kind, threshold)."""
    if mode == "argmax":
        return "argmax", 0.5
    if mode == "belief":
        return "belief", 0.5
    if mode.startswith("belief:"):
        try:
            th = float(mode.split(":", 1)[1])
        except ValueError:
            raise InvalidThreshold(f"bad threshold in mode {mode!r}") from None
        if not 0.0 < th <= 1.0:
            raise InvalidThreshold(f"threshold must be in (0, 1], got {th}")
        return "belief", th
    raise ValueError(f"unknown mode {mode!r}")


def run_on_soft(
    rules: Sequence[TimedAutomaton],
    soft,
    mode: str = "argmax",
    vocab: Vocabulary = None,
    timing: bool = False,
    prune_epsilon: float = 1e-9,
) -> DetectorOutput:
    """Detect over per-window activity distributions.

    ``mode`` is ``"argmax"`` (most probable activity, then crisp) or
    ``"belief"`` / ``"belief:<threshold>"``.
    """
    vocab = vocab or Vocabulary()
    kind, th = parse_mode(mode)
    soft = _check_soft(soft, vocab)
    if kind == "argmax":
        # np.argmax picks the lowest index among ties
        return run_crisp(rules, np.argmax(soft, axis=1).tolist(), vocab, timing)
    det = BeliefDetector(rules, vocab, th, prune_epsilon)
    labels = []
    lat = [] if timing else None
    clock = time.perf_counter_ns
    for p in soft:
        t0 = clock()
        labels.append(det.step(p))
        if timing:
            lat.append(clock() - t0)
    if labels:
        labels[-1] = labels[-1] | det.finish()
    return DetectorOutput(labels, lat)


def run_stream(rules, chunks: Iterable[Sequence], vocab: Vocabulary = None) -> list:
    """Crisp labels for a stream delivered in chunks, persisting only configs between chunks."""
    vocab = vocab or Vocabulary()
    configs = None
    labels: list = []
    for chunk in chunks:
        det = CrispDetector(rules, vocab) if configs is None else CrispDetector.from_state(rules, vocab, configs)
        labels.extend(det.step(x) for x in chunk)
        configs = det.state
    if labels:
        det = CrispDetector.from_state(rules, vocab, configs)
        labels[-1] = labels[-1] | det.finish()
    return labels
