"""
Scoring label sequences produced elsewhere
==========================================

Predictions from any model (a language model, a neural net) can be scored
as long as they are written as JSON lines with an id and one label set per
window. Lengths may be wrong; those samples only count toward coarse F1.
"""

import json
import random

from cedkit import SimConfig, generate
from cedkit.io import read_predictions, write_jsonl
from cedkit.metrics import evaluate

truths = generate(SimConfig(seed=5), 100)
write_jsonl(truths, "/tmp/cedkit_truth.jsonl")

# a sloppy predictor: right events, sometimes a window early, sometimes cut short
rng = random.Random(0)
with open("/tmp/cedkit_pred.jsonl", "w") as f:
    for t in truths:
        labels = [sorted(s) for s in t.labels]
        if rng.random() < 0.3:
            labels = labels[1:] + [[]]
        if rng.random() < 0.2:
            labels = labels[: rng.randint(10, 50)]
        f.write(json.dumps({"id": t.id, "labels": labels}) + "\n")

report = evaluate(list(read_predictions("/tmp/cedkit_pred.jsonl")), truths)
print(json.dumps(report.to_dict(), indent=2))

# the same from the shell:
#   cedkit eval --pred /tmp/cedkit_pred.jsonl --truth /tmp/cedkit_truth.jsonl
