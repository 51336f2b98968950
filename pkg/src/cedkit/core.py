"""Shared vocabulary, windowing and trace types."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_ACTIVITIES = (
    "walk",
    "sit",
    "stand",
    "work",
    "use_restroom",
    "wash_hands",
    "eat",
    "brush_teeth",
    "touch_object",
    "idle",
)

DEFAULT_EVENTS = ("e1", "e2", "e3")

_TOKEN_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class NonDivisible(ValueError):
    """A duration is not a whole number of windows."""


class VocabularyMismatch(ValueError):
    """An observation does not fit the active vocabulary."""


class Vocabulary:
    """Ordered set of activity tokens; position is the label index."""

    def __init__(self, names: Iterable[str] = DEFAULT_ACTIVITIES):
        names = tuple(names)
        if len(names) < 2:
            raise ValueError("vocabulary needs at least two activities")
        for n in names:
            if not _TOKEN_RE.match(n):
                raise ValueError(f"bad activity token {n!r}")
        if len(set(names)) != len(names):
            raise ValueError("duplicate activity tokens")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, token) -> bool:
        return token in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Vocabulary({list(self.names)!r})"

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise VocabularyMismatch(f"unknown activity {token!r}") from None

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        return np.fromiter((self.index(t) for t in tokens), dtype=np.intp, count=len(tokens))

    def decode(self, indices: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.names[int(i)] for i in indices)


@dataclass(frozen=True)
class WindowSpec:
    seconds_per_window: int = 5

    def __post_init__(self):
        if int(self.seconds_per_window) != self.seconds_per_window or self.seconds_per_window <= 0:
            raise ValueError("seconds_per_window must be a positive integer")


def windows_for(duration_seconds: int, window: WindowSpec = WindowSpec()) -> int:
    """Convert a duration in seconds into an exact window count."""
    if duration_seconds <= 0:
        raise ValueError("duration must be positive")
    q, r = divmod(duration_seconds, window.seconds_per_window)
    if r:
        raise NonDivisible(
            f"{duration_seconds}s is not a multiple of the {window.seconds_per_window}s window"
        )
    return q


def check_distribution(d, k: Optional[int] = None, atol: float = 1e-9) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or (k is not None and d.shape[0] != k):
        raise VocabularyMismatch(f"distribution has shape {d.shape}, expected ({k},)")
    if (d < 0).any() or abs(d.sum() - 1.0) > atol:
        raise ValueError("not a probability distribution")
    return d


def argmax_label(d) -> int:
    """Index of the most probable activity; ties go to the lowest index."""
    # np.argmax already returns the first maximal position
    return int(np.argmax(np.asarray(d, dtype=float)))


LabelSeq = list  # list[frozenset[str]], one entry per window


@dataclass(frozen=True, eq=False)
class Trace:
    """Per-window activity tokens with optional soft observations and labels.

    ``soft`` is a (T, K) float array aligned with the vocabulary used to
    build it; ``labels`` holds one frozenset of event ids per window.
    """

    id: str
    activities: tuple[str, ...]
    window: WindowSpec = field(default_factory=WindowSpec)
    soft: Optional[np.ndarray] = None
    labels: Optional[tuple[frozenset, ...]] = None
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "activities", tuple(self.activities))
        n = len(self.activities)
        if self.soft is not None:
            soft = np.asarray(self.soft, dtype=float)
            if soft.ndim != 2 or soft.shape[0] != n:
                raise ValueError(f"soft has shape {soft.shape}, expected ({n}, K)")
            object.__setattr__(self, "soft", soft)
        if self.labels is not None:
            labels = tuple(frozenset(s) for s in self.labels)
            if len(labels) != n:
                raise ValueError(f"labels has length {len(labels)}, expected {n}")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.activities)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        if (self.soft is None) != (other.soft is None):
            return False
        if self.soft is not None and not np.array_equal(self.soft, other.soft):
            return False
        return (
            self.id == other.id
            and self.activities == other.activities
            and self.window == other.window
            and self.labels == other.labels
            and self.seed == other.seed
        )
