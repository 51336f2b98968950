"""
How perception errors add up over longer traces
===============================================

Each window's activity is misread with probability 0.1. The argmax detector
trusts every reading; the belief detector carries the whole distribution.
"""

from cedkit import NoiseModel, SimConfig, builtin_rules, corrupt, evaluate, run_on_soft
from cedkit.metrics import Prediction
from cedkit.simgen import derive_seed, simulate

rules = builtin_rules()
noise = NoiseModel(p_correct=0.9)
N = 300  # the acceptance suite uses 1000


def score(traces, mode):
    preds = [Prediction(t.id, run_on_soft(rules, t.soft, mode).labels) for t in traces]
    return evaluate(preds, traces)


for span in (60, 180, 360):
    cfg = SimConfig(span_windows=span, seed=3)
    traces = [corrupt(simulate(cfg, i), noise, derive_seed(3, i)) for i in range(N)]
    a, b = score(traces, "argmax"), score(traces, "belief:0.5")
    print(f"{span:4d} windows  argmax {a.conditional_f1.average:.3f}  belief {b.conditional_f1.average:.3f}"
          f"  coarse(argmax) {a.coarse_f1.average:.3f}")

# per-type view at the shortest span
rep = score([corrupt(simulate(SimConfig(seed=3), i), noise, i) for i in range(N)], "argmax")
print(rep.conditional_f1.per_type)
