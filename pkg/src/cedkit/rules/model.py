"""Immutable automaton description produced by the rule parser."""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Optional

COMPARATORS = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
}

END_POLICIES = ("ignore", "close_sessions")

MAX_COUNTER = 10_000
MAX_VALUATIONS = 1_000_000


@dataclass(frozen=True)
class CounterDecl:
    name: str
    max: int
    pos: Optional[tuple[int, int]] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pred:
    counter: str
    op: str
    value: int

    def holds(self, v: int) -> bool:
        return COMPARATORS[self.op](v, self.value)


@dataclass(frozen=True)
class Action:
    kind: str  # "inc" | "reset" | "set"
    counter: str
    value: int = 0


@dataclass(frozen=True)
class Arm:
    """One guarded transition. ``activities is None`` is the otherwise arm."""

    activities: Optional[frozenset[str]]
    preds: tuple[Pred, ...]
    target: str
    actions: tuple[Action, ...] = ()
    emits: frozenset[str] = frozenset()
    pos: Optional[tuple[int, int]] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class EndArm:
    preds: tuple[Pred, ...]
    emits: frozenset[str]
    pos: Optional[tuple[int, int]] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class State:
    name: str
    arms: tuple[Arm, ...]
    end_arms: tuple[EndArm, ...] = ()
    initial: bool = False
    pos: Optional[tuple[int, int]] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TimedAutomaton:
    event: str
    states: tuple[State, ...]
    counters: tuple[CounterDecl, ...] = ()
    end_policy: str = "ignore"
    pos: Optional[tuple[int, int]] = field(default=None, compare=False, repr=False)

    @property
    def initial(self) -> State:
        return next(s for s in self.states if s.initial)

    def state(self, name: str) -> State:
        for s in self.states:
            if s.name == name:
                return s
        raise KeyError(name)

    def counter_index(self, name: str) -> int:
        for i, c in enumerate(self.counters):
            if c.name == name:
                return i
        raise KeyError(name)

    @property
    def events(self) -> frozenset[str]:
        out = set()
        for s in self.states:
            for a in s.arms:
                out |= a.emits
            for e in s.end_arms:
                out |= e.emits
        return frozenset(out) | {self.event}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    col: int = 0
    severity: str = "error"

    def format(self, filename: str = "<rules>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.code}: {self.message}"


class RuleError(Exception):
    """Raised when rule text fails to parse or validate."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.format() for d in self.diagnostics))
