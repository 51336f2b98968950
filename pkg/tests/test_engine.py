import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cedkit.bench import bench_latency
from cedkit.core import DEFAULT_ACTIVITIES, Vocabulary, VocabularyMismatch
from cedkit.engine import (
    BeliefDetector,
    BeliefState,
    CrispDetector,
    InvalidThreshold,
    MachineConfig,
    compile_rules,
    run_crisp,
    run_on_soft,
    run_stream,
    step_crisp,
)
from cedkit.oracle import oracle_all, oracle_e1, oracle_e2, oracle_e3
from cedkit.rules import builtin_rules, parse_rules

V = Vocabulary()
RULES = builtin_rules()
E1, E2, E3 = RULES
EMPTY = frozenset()
VIOLATION = ["use_restroom", "use_restroom", "wash_hands", "wash_hands", "wash_hands", "work"]


def one_hot(seq):
    return np.eye(len(V))[V.encode(seq)]


def peaked(seq, p):
    soft = np.full((len(seq), len(V)), (1 - p) / (len(V) - 1))
    soft[np.arange(len(seq)), V.encode(seq)] = p
    return soft


def test_step_e1_work_while_pending():
    cfg, out = step_crisp(E1, MachineConfig("after_restroom", (3,)), "work")
    assert (cfg, out) == (MachineConfig("idle", (0,)), {"e1"})
    # the same situation reached through a trace, checked against the oracle
    assert oracle_e1(["use_restroom", "wash_hands", "wash_hands", "wash_hands", "work"])[-1] == {"e1"}


def test_step_e1_fourth_wash_returns_to_idle():
    cfg, out = step_crisp(E1, MachineConfig("after_restroom", (3,)), "wash_hands")
    assert cfg.state == "idle" and out == EMPTY
    assert oracle_e1(["use_restroom"] + ["wash_hands"] * 4 + ["work"])[-1] == EMPTY


def test_step_e1_irrelevant_self_loop():
    assert step_crisp(E1, MachineConfig("idle", (0,)), "walk") == (MachineConfig("idle", (0,)), EMPTY)


def test_run_crisp_examples():
    assert run_crisp(RULES, VIOLATION).labels == [EMPTY] * 5 + [frozenset({"e1"})]
    assert run_crisp(RULES, ["use_restroom"] + ["wash_hands"] * 4 + ["work"]).labels == [EMPTY] * 6
    assert run_crisp(RULES, ["walk", "walk", "sit"]).labels == [EMPTY] * 3


def test_run_crisp_examples_match_oracle():
    for seq in (VIOLATION, ["use_restroom"] + ["wash_hands"] * 4 + ["work"], ["walk", "walk", "sit"]):
        assert run_crisp(RULES, seq).labels == oracle_all(seq)


def test_end_of_trace_lands_on_final_window():
    assert run_crisp(RULES, ["brush_teeth"] * 3).labels == [EMPTY, EMPTY, frozenset({"e3"})]
    assert run_crisp(RULES, []).labels == []


def test_unknown_activity():
    with pytest.raises(VocabularyMismatch):
        run_crisp(RULES, ["walk", "swim"])
    with pytest.raises(VocabularyMismatch):
        run_on_soft(RULES, np.ones((2, 3)) / 3)


@pytest.mark.parametrize("mode", ["belief:0", "belief:1.5", "belief:x"])
def test_invalid_threshold(mode):
    with pytest.raises(InvalidThreshold):
        run_on_soft(RULES, one_hot(["walk"]), mode)


acts = st.lists(st.sampled_from(DEFAULT_ACTIVITIES), max_size=120)


@settings(max_examples=200, deadline=None)
@given(acts)
def test_length_preserved_and_matches_oracle(seq):
    out = run_crisp(RULES, seq).labels
    assert len(out) == len(seq)
    assert out == oracle_all(seq)


@settings(max_examples=100, deadline=None)
@given(acts, st.lists(st.integers(1, 30), max_size=8))
def test_streaming_equals_offline(seq, cuts):
    chunks, i = [], 0
    for c in cuts:
        chunks.append(seq[i : i + c])
        i += c
    chunks.append(seq[i:])
    assert run_stream(RULES, chunks) == run_crisp(RULES, seq).labels


@settings(max_examples=60, deadline=None)
@given(acts, st.floats(1e-6, 1.0))
def test_one_hot_belief_equals_crisp_for_any_threshold(seq, th):
    crisp = run_crisp(RULES, seq).labels
    assert run_on_soft(RULES, one_hot(seq), "argmax").labels == crisp
    assert run_on_soft(RULES, one_hot(seq), f"belief:{th}").labels == crisp


def test_detector_state_is_configs_only():
    det = CrispDetector(RULES)
    for x in VIOLATION * 500:
        det.step(x)
    assert len(det.current) == len(RULES)
    assert all(isinstance(c, MachineConfig) for c in det.state)
    resumed = CrispDetector.from_state(RULES, V, det.state)
    assert resumed.state == det.state


# -- belief mode checked against exhaustive weighted enumeration -------------

# tokens each oracle cannot tell apart are merged, keeping one representative
CLASSES = {
    "e1": ({"use_restroom"}, {"wash_hands"}, {"work"}),
    "e2": ({"wash_hands"}, {"eat"}, {"touch_object", "use_restroom", "work"}),
    "e3": ({"brush_teeth"},),
}
ORACLES = {"e1": oracle_e1, "e2": oracle_e2, "e3": oracle_e3}


def enumerate_masses(event, soft):
    """P(event labeled at window t) under independent per-window draws."""
    groups = [sorted(g) for g in CLASSES[event]]
    named = set().union(*CLASSES[event])
    groups.append(sorted(set(V.names) - named))
    reps = [g[0] for g in groups]
    probs = np.array([[row[[V.index(x) for x in g]].sum() for g in groups] for row in soft])
    out = np.zeros(len(soft))
    for combo in itertools.product(range(len(groups)), repeat=len(soft)):
        w = math.prod(probs[t, c] for t, c in enumerate(combo))
        if w == 0.0:
            continue
        labels = ORACLES[event]([reps[c] for c in combo])
        out += w * np.array([event in s for s in labels])
    return out


def belief_masses(automaton, soft):
    (ca,) = compile_rules([automaton], V)
    b = BeliefState(ca, prune_epsilon=0.0)
    out, prev = [], None
    for p in soft:
        prev = b.probs
        out.append(b.step(p)[automaton.event])
    if automaton.end_policy == "close_sessions" and len(soft):
        out[-1] = b.final_masses(prev, soft[-1])[automaton.event]
    return np.array(out)


def test_uniform_soft_never_reaches_half_for_e1():
    soft = np.full((6, len(V)), 1 / len(V))
    expected = enumerate_masses("e1", soft)
    assert expected.max() < 0.5
    assert np.allclose(belief_masses(E1, soft), expected, atol=1e-12)
    assert all("e1" not in s for s in run_on_soft(RULES, soft, "belief:0.5").labels)


def test_peaked_soft_still_detects_e1():
    soft = peaked(VIOLATION, 0.9)
    expected = enumerate_masses("e1", soft)
    assert expected[5] >= 0.5
    assert np.allclose(belief_masses(E1, soft), expected, atol=1e-12)
    out = run_on_soft(RULES, soft, "belief:0.5").labels
    assert "e1" in out[5]
    assert not any("e1" in s for s in out[:5])


@pytest.mark.parametrize("event, automaton", [("e1", E1), ("e2", E2), ("e3", E3)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_belief_masses_are_exact(event, automaton, seed):
    rng = np.random.default_rng(seed)
    soft = rng.dirichlet(np.full(len(V), 0.3), size=7)
    assert np.allclose(belief_masses(automaton, soft), enumerate_masses(event, soft), atol=1e-12)


def test_belief_state_stays_normalised():
    rng = np.random.default_rng(5)
    det = BeliefDetector(RULES, V)
    for p in rng.dirichlet(np.ones(len(V)), size=200):
        det.step(p)
        for b in det.beliefs:
            e = b.entries()
            assert abs(sum(e.values()) - 1.0) < 1e-6
            assert min(e.values()) >= b.prune_epsilon


def test_user_rule_metamorphic():
    # emits on every eat window, so labels mirror the eat positions exactly
    (a,) = parse_rules("automaton meal { state s initial { on eat -> s emit; otherwise -> s; } }")
    rng = np.random.default_rng(3)
    seq = list(rng.choice(DEFAULT_ACTIVITIES, 200))
    out = run_crisp([a], seq).labels
    assert [bool(s) for s in out] == [x == "eat" for x in seq]
    # prepending a don't-care window shifts the labels by one
    assert run_crisp([a], ["walk"] + seq).labels == [EMPTY] + out


# -- latency report ----------------------------------------------------------


def test_bench_shape_30_minutes():
    rep = bench_latency(RULES, 360, 1, seed=0)
    for s in rep.per_mode.values():
        assert s.n == 360
        assert 0 < s.p99_ns < math.inf
    assert rep.p99_ns == rep.per_mode["crisp"].p99_ns


def test_bench_single_sample():
    rep = bench_latency(RULES, 1, 1, seed=0)
    for s in rep.per_mode.values():
        assert s.mean_ns == s.p50_ns == s.p99_ns == s.max_ns


def test_crisp_is_not_slower_than_belief():
    rep = bench_latency(RULES, 60, 5, seed=1)
    assert rep.per_mode["crisp"].p50_ns <= rep.per_mode["belief"].p50_ns
