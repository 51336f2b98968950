"""
Per-window latency
==================
"""

from cedkit import builtin_rules
from cedkit.bench import bench_latency

rep = bench_latency(builtin_rules(), span_windows=360, trials=20, seed=0)
for mode, s in rep.per_mode.items():
    print(f"{mode:6s} p50 {s.p50_ns / 1e3:7.1f} us   p99 {s.p99_ns / 1e3:7.1f} us   max {s.max_ns / 1e3:8.1f} us")

# at 5 s per window both modes leave the window almost entirely idle
