from dataclasses import replace

import numpy as np
import pytest

from cedkit.core import Vocabulary, WindowSpec
from cedkit.engine import run_crisp
from cedkit.oracle import oracle_all
from cedkit.rules import builtin_rules
from cedkit.simgen import (
    InfeasibleConfig,
    NoiseModel,
    SimConfig,
    corrupt,
    dataset,
    derive_seed,
    generate,
    simulate,
)

V = Vocabulary()
RULES = builtin_rules()


def test_zero_rates_give_no_events():
    cfg = SimConfig(routine_rates={"restroom": 0.0, "meal": 0.0, "brush": 0.0})
    for t in generate(cfg, 200):
        assert all(s == frozenset() for s in t.labels)
        assert "use_restroom" not in t.activities and "eat" not in t.activities


@pytest.mark.parametrize("span", [36, 60, 180, 360])
def test_traces_have_exact_span_and_oracle_labels(span):
    for t in generate(SimConfig(span_windows=span, seed=3), 50):
        assert len(t.activities) == span
        assert list(t.labels) == oracle_all(t.activities)
        assert run_crisp(RULES, t.activities).labels == list(t.labels)


def test_same_seed_same_traces():
    cfg = SimConfig(seed=11)
    assert generate(cfg, 30) == generate(cfg, 30)
    assert simulate(cfg, 7) == generate(cfg, 8)[7]
    assert generate(replace(cfg, seed=12), 30) != generate(cfg, 30)


def test_worker_count_does_not_change_output():
    cfg = SimConfig(seed=5)
    assert generate(cfg, 40, workers=1) == generate(cfg, 40, workers=3)


def test_every_event_is_common_enough():
    traces = generate(SimConfig(seed=1), 1000)
    for e in ("e1", "e2", "e3"):
        share = np.mean([any(e in s for s in t.labels) for t in traces])
        assert share >= 0.05, (e, share)


def test_longer_spans_stretch_routines():
    def meals_per_trace(span):
        ts = generate(SimConfig(span_windows=span, seed=2), 300)
        return np.mean([sum(a == "eat" and (i == 0 or t.activities[i - 1] != "eat")
                            for i, a in enumerate(t.activities)) for t in ts])

    # six times the span, but the same routines spread over it, not six times as many
    short, long = meals_per_trace(60), meals_per_trace(360)
    assert 0.3 < short and long < 2 * short


def test_infeasible_config():
    durations = dict(SimConfig().duration_ranges, eat=(80, 90))
    with pytest.raises(InfeasibleConfig):
        generate(SimConfig(duration_ranges=durations), 1)
    with pytest.raises(ValueError):
        SimConfig(violation_prob={"e1": 1.5})
    with pytest.raises(ValueError):
        SimConfig(duration_ranges={"eat": (5, 2)})


def test_window_must_divide_thresholds():
    with pytest.raises(ValueError):
        generate(SimConfig(window=WindowSpec(7)), 1)


def test_derive_seed_is_stable_and_spreads():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert len({derive_seed(0, i) for i in range(1000)}) == 1000


# -- noise ------------------------------------------------------------------


def _long_trace(n=10_000):
    return simulate(SimConfig(span_windows=n, seed=4), 0)


def test_perfect_noise_is_identity():
    t = _long_trace(500)
    c = corrupt(t, NoiseModel(1.0), seed=0)
    assert c.activities == t.activities
    assert np.array_equal(c.soft, np.eye(len(V))[V.encode(t.activities)])


def test_uniform_noise_gives_uniform_soft():
    t = _long_trace(200)
    c = corrupt(t, NoiseModel(1 / len(V)), seed=0)
    assert np.allclose(c.soft, 1 / len(V))


def test_flip_rate_matches_p_correct():
    t = _long_trace()
    c = corrupt(t, NoiseModel(0.9), seed=123)
    flips = sum(a != b for a, b in zip(t.activities, c.activities))
    assert abs(flips - 1000) <= 90


def test_corrupt_keeps_labels_and_length():
    t = simulate(SimConfig(seed=8), 0)
    for center in ("observed", "true"):
        c = corrupt(t, NoiseModel(0.8, soft_center=center), seed=1)
        assert c.labels == t.labels
        assert len(c.activities) == len(t.activities) == len(c.soft)
        assert np.allclose(c.soft.sum(axis=1), 1.0)
    obs = corrupt(t, NoiseModel(0.8), seed=1)
    assert [V.names[i] for i in obs.soft.argmax(axis=1)] == list(obs.activities)
    true = corrupt(t, NoiseModel(0.8, soft_center="true"), seed=1)
    assert [V.names[i] for i in true.soft.argmax(axis=1)] == list(t.activities)


def test_corrupt_is_seeded():
    t = simulate(SimConfig(seed=8), 0)
    nm = NoiseModel(0.7)
    a, b = corrupt(t, nm, 3), corrupt(t, nm, 3)
    assert a.activities == b.activities and np.array_equal(a.soft, b.soft)
    assert corrupt(t, nm, 4).activities != a.activities


def test_noise_model_bounds():
    for p in (0.0, 1.1):
        with pytest.raises(ValueError):
            NoiseModel(p)


# -- splits -----------------------------------------------------------------


def test_dataset_sizes_and_unique_ids():
    d = dataset(SimConfig(), (30, 5, 5), base_seed=9)
    assert [len(d[k]) for k in ("train", "val", "test")] == [30, 5, 5]
    ids = [t.id for ts in d.values() for t in ts]
    assert len(ids) == len(set(ids))
    assert d["train"][0].activities != d["test"][0].activities


def test_dataset_with_empty_splits():
    d = dataset(SimConfig(), (0, 0, 1))
    assert [len(d[k]) for k in ("train", "val", "test")] == [0, 0, 1]
