from __future__ import annotations

from .model import Arm, EndArm, TimedAutomaton


def _preds(preds) -> str:
    if not preds:
        return ""
    return " if " + " and ".join(f"{p.counter} {p.op} {p.value}" for p in preds)


def _emit(emits, event) -> str:
    if not emits:
        return ""
    if emits == frozenset([event]):
        return " emit"
    return " emit " + ", ".join(sorted(emits))


def _arm(arm: Arm, event: str) -> str:
    head = "otherwise" if arm.activities is None else "on " + ", ".join(sorted(arm.activities))
    body = ""
    if arm.actions:
        parts = []
        for act in arm.actions:
            if act.kind == "set":
                parts.append(f"set {act.counter} = {act.value};")
            else:
                parts.append(f"{act.kind} {act.counter};")
        body = " { " + " ".join(parts) + " }"
    return f"{head}{_preds(arm.preds)} -> {arm.target}{body}{_emit(arm.emits, event)};"


def _end_arm(arm: EndArm, event: str) -> str:
    return f"at end{_preds(arm.preds)}{_emit(arm.emits, event)};"


def format_automaton(a: TimedAutomaton) -> str:
    """Render ``a`` as rule text; all constants are written as window counts."""
    lines = [f"automaton {a.event} {{"]
    if a.counters:
        lines.append("  counters {")
        lines.extend(f"    {c.name} max {c.max};" for c in a.counters)
        lines.append("  }")
    lines.append(f"  end {a.end_policy};")
    for s in a.states:
        lines.append(f"  state {s.name}{' initial' if s.initial else ''} {{")
        lines.extend("    " + _arm(arm, a.event) for arm in s.arms)
        lines.extend("    " + _end_arm(e, a.event) for e in s.end_arms)
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_rules(automata) -> str:
    return "\n".join(format_automaton(a) for a in automata)
