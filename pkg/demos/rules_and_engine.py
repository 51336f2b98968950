"""
Writing a rule and running it over a trace
==========================================

The three built-in rules, a rule of our own, and the two ways of feeding
a detector: whole traces and one window at a time.
"""

from cedkit import builtin_rules, parse_rules, run_crisp
from cedkit.engine import CrispDetector
from cedkit.rules import builtin_source, format_rules

# the built-in rules are plain text; durations are written in seconds
print(builtin_source())

rules = builtin_rules()          # compiled for 5 s windows
print(format_rules(rules[:1]))   # printed back with window counts

trace = ["use_restroom", "use_restroom", "wash_hands", "wash_hands", "wash_hands", "work"]
for act, labels in zip(trace, run_crisp(rules, trace).labels):
    print(f"{act:14s} {sorted(labels)}")

# three washes is 15 s, one short of the 20 s rule. a fourth fixes it
print(run_crisp(rules, trace[:2] + ["wash_hands"] * 4 + ["work"]).labels)

# a rule of our own: flag every meal eaten right after touching something
snack = parse_rules("""
automaton snack {
  state idle initial {
    on touch_object -> touched;
    otherwise -> idle;
  }
  state touched {
    on eat -> idle emit;
    on touch_object -> touched;
    otherwise -> idle;
  }
}
""")
print(run_crisp(snack, ["walk", "touch_object", "eat", "eat"]).labels)

# streaming: the detector keeps only its current configuration
det = CrispDetector(rules)
for act in trace:
    fired = det.step(act)
    if fired:
        print("fired", sorted(fired), "in state", det.state)
print("end of trace:", det.finish())
