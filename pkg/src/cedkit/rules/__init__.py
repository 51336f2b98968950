"""Rule language for complex events: parsing, validation and the built-in rules."""

from importlib import resources

from ..core import Vocabulary, WindowSpec
from .model import (
    Action,
    Arm,
    CounterDecl,
    Diagnostic,
    EndArm,
    Pred,
    RuleError,
    State,
    TimedAutomaton,
)
from .parser import check_rules, parse_rules
from .printer import format_automaton, format_rules
from .validate import validate, validate_set


def builtin_source() -> str:
    return resources.files(__package__).joinpath("builtin.ced").read_text(encoding="utf-8")


def builtin_rules(window: WindowSpec = WindowSpec(), vocab: Vocabulary = None) -> list[TimedAutomaton]:
    """The three built-in automata (e1, e2, e3) scaled to ``window``.

    Raises :class:`cedkit.core.NonDivisible` when a threshold (20 s, 2 min,
    10 s) is not a whole number of windows.
    """
    from ..core import windows_for

    for seconds in (20, 120, 10):
        windows_for(seconds, window)
    return parse_rules(builtin_source(), vocab or Vocabulary(), window)


__all__ = [
    "Action",
    "Arm",
    "CounterDecl",
    "Diagnostic",
    "EndArm",
    "Pred",
    "RuleError",
    "State",
    "TimedAutomaton",
    "builtin_rules",
    "builtin_source",
    "check_rules",
    "format_automaton",
    "format_rules",
    "parse_rules",
    "validate",
    "validate_set",
]
