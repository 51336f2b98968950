"""Offline reference labelers for the built-in events.

Each function scans a complete activity sequence and searches for the
pattern directly (backward searches, run segmentation, session grouping).
They share no code with the automata so agreement between the two is
evidence rather than a restatement.
"""

from __future__ import annotations

from typing import Sequence

from .core import WindowSpec, windows_for

CONTAMINATION = frozenset({"touch_object", "use_restroom", "work"})


def _runs(activities: Sequence[str], token: str) -> list[tuple[int, int]]:
    """Maximal runs of ``token`` as inclusive (start, end) pairs."""
    out = []
    start = None
    for i, a in enumerate(activities):
        if a == token:
            if start is None:
                start = i
        elif start is not None:
            out.append((start, i - 1))
            start = None
    if start is not None:
        out.append((start, len(activities) - 1))
    return out


def _has_long_run(activities: Sequence[str], lo: int, hi: int, token: str, length: int) -> bool:
    """True if ``activities[lo:hi]`` contains ``length`` consecutive ``token``."""
    streak = 0
    for a in activities[lo:hi]:
        streak = streak + 1 if a == token else 0
        if streak >= length:
            return True
    return False


def oracle_e1(activities: Sequence[str], window: WindowSpec = WindowSpec()) -> list[frozenset]:
    need = windows_for(20, window)
    out = [frozenset()] * len(activities)
    for w, a in enumerate(activities):
        if a != "work":
            continue
        # walk back over every restroom visit that has no work window after it
        r = w - 1
        while r >= 0 and activities[r] != "work":
            if activities[r] == "use_restroom" and not _has_long_run(activities, r + 1, w, "wash_hands", need):
                out[w] = frozenset({"e1"})
                break
            r -= 1
    return out


def oracle_e2(activities: Sequence[str], window: WindowSpec = WindowSpec()) -> list[frozenset]:
    need = windows_for(20, window)
    deadline = windows_for(120, window)
    out = [frozenset()] * len(activities)
    wash_ends = [end for start, end in _runs(activities, "wash_hands") if end - start + 1 >= need]
    for m, _ in _runs(activities, "eat"):
        clean = False
        for q in wash_ends:
            if q >= m or m - q > deadline:
                continue
            between = activities[q + 1 : m]
            if not any(a in CONTAMINATION or a == "eat" for a in between):
                clean = True
                break
        if not clean:
            out[m] = frozenset({"e2"})
    return out


def oracle_e3(activities: Sequence[str], window: WindowSpec = WindowSpec()) -> list[frozenset]:
    minimum = windows_for(120, window)
    max_gap = windows_for(10, window)
    n = len(activities)
    out = [frozenset()] * n
    brush = [i for i, a in enumerate(activities) if a == "brush_teeth"]
    sessions: list[list[int]] = []
    for i in brush:
        if sessions and i - sessions[-1][-1] - 1 <= max_gap:
            sessions[-1].append(i)
        else:
            sessions.append([i])
    for s in sessions:
        close = min(s[-1] + max_gap + 1, n - 1)
        if len(s) < minimum:
            out[close] = frozenset({"e3"})
    return out


def oracle_all(activities: Sequence[str], window: WindowSpec = WindowSpec()) -> list[frozenset]:
    parts = (oracle_e1(activities, window), oracle_e2(activities, window), oracle_e3(activities, window))
    return [a | b | c for a, b, c in zip(*parts)]
