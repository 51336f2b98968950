"""Static checks for timed automata."""

from __future__ import annotations

import math
from collections import Counter
from typing import Optional

import numpy as np

from ..core import Vocabulary
from .model import (
    COMPARATORS,
    END_POLICIES,
    MAX_COUNTER,
    MAX_VALUATIONS,
    Diagnostic,
    TimedAutomaton,
)


def _at(pos, code, msg, severity="error") -> Diagnostic:
    line, col = pos if pos else (0, 0)
    return Diagnostic(code, msg, line, col, severity)


def validate(a: TimedAutomaton, vocab: Optional[Vocabulary] = None) -> list[Diagnostic]:
    """Return every violated invariant of ``a``; an empty list means valid."""
    diags: list[Diagnostic] = []
    state_names = [s.name for s in a.states]
    counter_names = [c.name for c in a.counters]
    bounds = {c.name: c.max for c in a.counters}

    if a.end_policy not in END_POLICIES:
        diags.append(_at(a.pos, "SyntaxError", f"unknown end-of-trace policy {a.end_policy!r}"))
    if not a.states:
        diags.append(_at(a.pos, "NoInitialState", f"automaton {a.event!r} declares no states"))
    initials = [s for s in a.states if s.initial]
    if a.states and len(initials) != 1:
        code = "NoInitialState" if not initials else "MultipleInitialStates"
        diags.append(_at(a.pos, code, f"automaton {a.event!r} needs exactly one initial state"))
    for name, n in Counter(state_names).items():
        if n > 1:
            s = [s for s in a.states if s.name == name][1]
            diags.append(_at(s.pos, "DuplicateState", f"state {name!r} declared {n} times"))
    for name, n in Counter(counter_names).items():
        if n > 1:
            c = [c for c in a.counters if c.name == name][1]
            diags.append(_at(c.pos, "DuplicateCounter", f"counter {name!r} declared {n} times"))

    too_large = False
    for c in a.counters:
        if not 1 <= c.max <= MAX_COUNTER:
            diags.append(_at(c.pos, "CounterBound", f"counter {c.name!r} max {c.max} outside [1, {MAX_COUNTER}]"))
    space = math.prod(c.max + 1 for c in a.counters)
    if space > MAX_VALUATIONS:
        too_large = True
        diags.append(
            _at(a.pos, "StateSpaceTooLarge", f"counter valuations {space} exceed {MAX_VALUATIONS}")
        )

    for s in a.states:
        for arm in s.arms:
            if arm.target not in state_names:
                diags.append(_at(arm.pos, "UnknownState", f"target state {arm.target!r} is not declared"))
            if vocab is not None and arm.activities is not None:
                for act in sorted(arm.activities - set(vocab.names)):
                    diags.append(_at(arm.pos, "UnknownActivity", f"activity {act!r} is not in the vocabulary"))
            for p in arm.preds:
                if p.counter not in bounds:
                    diags.append(_at(arm.pos, "UnknownCounter", f"counter {p.counter!r} is not declared"))
                if p.op not in COMPARATORS:
                    diags.append(_at(arm.pos, "SyntaxError", f"bad comparator {p.op!r}"))
            for act in arm.actions:
                if act.counter not in bounds:
                    diags.append(_at(arm.pos, "UnknownCounter", f"counter {act.counter!r} is not declared"))
                elif act.kind == "set" and not 0 <= act.value <= bounds[act.counter]:
                    diags.append(
                        _at(arm.pos, "ValueOutOfRange",
                            f"set {act.counter} = {act.value} outside [0, {bounds[act.counter]}]")
                    )
                if act.kind not in ("inc", "reset", "set"):
                    diags.append(_at(arm.pos, "SyntaxError", f"bad action {act.kind!r}"))
        for e in s.end_arms:
            for p in e.preds:
                if p.counter not in bounds:
                    diags.append(_at(e.pos, "UnknownCounter", f"counter {p.counter!r} is not declared"))

    if not too_large and not any(d.code in ("UnknownCounter", "SyntaxError") for d in diags):
        for s in a.states:
            diags.extend(_coverage(a, s, bounds, vocab))
    return diags


def _coverage(a, s, bounds, vocab) -> list[Diagnostic]:
    """Totality and shadowed-arm check by enumerating (activity, valuation)."""
    if vocab is not None:
        acts = list(vocab.names)
    else:
        mentioned = set()
        for arm in s.arms:
            mentioned |= arm.activities or set()
        acts = sorted(mentioned) + ["<other>"]
    used = sorted({p.counter for arm in s.arms for p in arm.preds})
    sizes = [bounds[c] + 1 for c in used]
    grid = np.indices(sizes).reshape(len(used), -1) if used else np.zeros((0, 1), dtype=int)
    col = {c: grid[i] for i, c in enumerate(used)}
    n_val = grid.shape[1]

    out = []
    covered = np.zeros((len(acts), n_val), dtype=bool)
    for arm in s.arms:
        amask = np.array([arm.activities is None or x in arm.activities for x in acts])
        pmask = np.ones(n_val, dtype=bool)
        for p in arm.preds:
            pmask &= COMPARATORS[p.op](col[p.counter], p.value)
        mask = np.outer(amask, pmask)
        if amask.any() and not (mask & ~covered).any():
            out.append(
                _at(arm.pos, "Overlap",
                    f"arm in state {s.name!r} can never fire; earlier arms match all of its inputs",
                    severity="warning")
            )
        covered |= mask
    if not covered.all():
        ai, vi = np.argwhere(~covered)[0]
        where = ", ".join(f"{c}={grid[i][vi]}" for i, c in enumerate(used))
        suffix = f" with {where}" if where else ""
        out.append(
            _at(s.pos, "NonTotalState",
                f"state {s.name!r} has no arm for activity {acts[ai]!r}{suffix}; add an 'otherwise' arm")
        )
    return out


def validate_set(automata: list[TimedAutomaton]) -> list[Diagnostic]:
    out = []
    seen = set()
    for a in automata:
        if a.event in seen:
            out.append(_at(a.pos, "DuplicateEvent", f"event {a.event!r} defined twice"))
        seen.add(a.event)
    return out
