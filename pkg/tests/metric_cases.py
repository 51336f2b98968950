"""Hand-counted metric examples shared by the unit and acceptance suites."""

E = frozenset()
E1 = frozenset({"e1"})
E2 = frozenset({"e2"})


def _one_hot_at(i, n=6, s=E1):
    return [s if j == i else E for j in range(n)]


def _truth_and_engine():
    return {"a": _one_hot_at(5), "b": _one_hot_at(2, s=E2)}


def case_length_all_engine():
    t = _truth_and_engine()
    return ("length_accuracy", dict(t), t), 1.0


def case_length_one_of_four():
    t = {k: [E] * 4 for k in "abcd"}
    p = {"a": [E] * 4, "b": [E] * 3, "c": [E] * 5, "d": []}
    return ("length_accuracy", p, t), 0.25


def case_length_empty_prediction():
    return ("length_accuracy", {"a": []}, {"a": [E] * 60}), 0.0


def case_conditional_identity():
    t = _truth_and_engine()
    return ("conditional_f1", dict(t), t), {"e1": 1.0, "e2": 1.0, "e3": None}


def case_conditional_all_empty():
    t = _truth_and_engine()
    p = {k: [E] * len(v) for k, v in t.items()}
    return ("conditional_f1", p, t), {"e1": 0.0, "e2": 0.0, "e3": None}


def case_conditional_timing_miss():
    return ("conditional_f1", {"a": _one_hot_at(4)}, {"a": _one_hot_at(5)}), {"e1": 0.0, "e2": None, "e3": None}


def case_coarse_timing_miss():
    return ("coarse_f1", {"a": _one_hot_at(4)}, {"a": _one_hot_at(5)}), {"e1": 1.0, "e2": None, "e3": None}


def case_coarse_all_empty():
    t = {"a": _one_hot_at(1, s=E2), "b": [E] * 6}
    p = {"a": [E] * 6, "b": [E] * 6}
    return ("coarse_f1", p, t), {"e1": None, "e2": 0.0, "e3": None}


def case_coarse_identity():
    t = _truth_and_engine()
    return ("coarse_f1", dict(t), t), {"e1": 1.0, "e2": 1.0, "e3": None}


CASES = [
    case_length_all_engine,
    case_length_one_of_four,
    case_length_empty_prediction,
    case_conditional_identity,
    case_conditional_all_empty,
    case_conditional_timing_miss,
    case_coarse_timing_miss,
    case_coarse_all_empty,
    case_coarse_identity,
]


def check(case) -> bool:
    from cedkit import metrics

    (fn, preds, truths), expected = case()
    got = getattr(metrics, fn)(preds, truths)
    if fn == "length_accuracy":
        return got == expected
    return got.per_type == expected
