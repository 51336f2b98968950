"""
Simulated routines and a train/val/test split
=============================================
"""

import numpy as np

from cedkit import SimConfig, dataset, generate
from cedkit.io import write_jsonl

cfg = SimConfig(span_windows=60, seed=1)     # 5 minutes of 5 s windows
traces = generate(cfg, 500)

t = traces[0]
for i, (act, labels) in enumerate(zip(t.activities, t.labels)):
    if labels:
        print(i, act, sorted(labels))

# how often each event shows up in a trace
for e in ("e1", "e2", "e3"):
    share = np.mean([any(e in s for s in t.labels) for t in traces])
    print(f"{e}: {share:.0%} of traces")

# longer spans stretch the same routines instead of packing in more of them
for span in (36, 180, 360):
    ts = generate(cfg.with_span(span), 200)
    print(span, "windows:", np.mean([sum(bool(s) for s in t.labels) for t in ts]), "labels per trace")

# the split used for training perception models; small sizes keep this quick
splits = dataset(cfg, sizes=(200, 20, 20), base_seed=7)
for name, ts in splits.items():
    n = write_jsonl(ts, f"/tmp/cedkit_{name}.jsonl")
    print(name, n, "traces")
