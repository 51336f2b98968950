import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cedkit.core import (
    DEFAULT_ACTIVITIES,
    NonDivisible,
    Trace,
    Vocabulary,
    VocabularyMismatch,
    WindowSpec,
    argmax_label,
    check_distribution,
    windows_for,
)


@pytest.mark.parametrize(
    "seconds, per_window, expected",
    [(20, 5, 4), (120, 5, 24), (5, 5, 1), (10, 5, 2)],
)
def test_windows_for(seconds, per_window, expected):
    assert windows_for(seconds, WindowSpec(per_window)) == expected


def test_windows_for_rejects_remainder():
    with pytest.raises(NonDivisible):
        windows_for(20, WindowSpec(7))


@given(st.integers(1, 5000), st.integers(1, 120))
def test_windows_for_round_trip(n, w):
    assert windows_for(n * w, WindowSpec(w)) == n


def test_argmax_examples():
    assert argmax_label([0.1, 0.7, 0.2]) == 1
    assert argmax_label([0.5, 0.5]) == 0
    for i in range(10):
        assert argmax_label(np.eye(10)[i]) == i


@given(st.lists(st.floats(0, 1), min_size=2, max_size=12))
def test_argmax_is_lowest_maximal_index(xs):
    i = argmax_label(xs)
    assert xs[i] == max(xs)
    assert all(x < xs[i] for x in xs[:i])
    assert argmax_label(list(xs)) == i


def test_default_vocabulary():
    v = Vocabulary()
    assert len(v) == 10
    assert v.names == DEFAULT_ACTIVITIES
    assert v.decode(v.encode(["eat", "walk"])) == ("eat", "walk")
    with pytest.raises(VocabularyMismatch):
        v.index("swim")


@pytest.mark.parametrize("names", [["walk"], ["walk", "walk"], ["Walk", "sit"], ["", "sit"]])
def test_vocabulary_invariants(names):
    with pytest.raises(ValueError):
        Vocabulary(names)


def test_check_distribution():
    check_distribution([0.25, 0.75], 2)
    with pytest.raises(ValueError):
        check_distribution([0.3, 0.3], 2)
    with pytest.raises(VocabularyMismatch):
        check_distribution([1.0], 2)


def test_trace_lengths_must_agree():
    Trace("t", ("walk", "sit"), labels=[set(), {"e1"}])
    with pytest.raises(ValueError):
        Trace("t", ("walk", "sit"), labels=[set()])
    with pytest.raises(ValueError):
        Trace("t", ("walk", "sit"), soft=np.ones((3, 10)) / 10)
