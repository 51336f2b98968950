"""Complex event detection with timed automata over per-window activity traces."""

from .core import (
    DEFAULT_ACTIVITIES,
    DEFAULT_EVENTS,
    NonDivisible,
    Trace,
    Vocabulary,
    VocabularyMismatch,
    WindowSpec,
    argmax_label,
    windows_for,
)
from .engine import (
    BeliefDetector,
    BeliefState,
    CrispDetector,
    DetectorOutput,
    InvalidThreshold,
    MachineConfig,
    run_crisp,
    run_on_soft,
    step_crisp,
)
from .metrics import EvalReport, Prediction, coarse_f1, conditional_f1, evaluate, length_accuracy
from .oracle import oracle_all, oracle_e1, oracle_e2, oracle_e3
from .rules import RuleError, TimedAutomaton, builtin_rules, format_rules, parse_rules, validate
from .simgen import InfeasibleConfig, NoiseModel, SimConfig, corrupt, dataset, generate

__version__ = "0.1.0"
