"""Recursive-descent parser for ``.ced`` rule files.

Grammar (``#`` starts a comment)::

    file      := automaton*
    automaton := 'automaton' NAME '{' item* '}'
    item      := 'counters' '{' (NAME 'max' const ';')* '}'
               | 'end' ('ignore' | 'close_sessions') ';'
               | 'state' NAME ['initial'] '{' arm* '}'
    arm       := ('on' NAME (',' NAME)* | 'otherwise') ['if' preds]
                 '->' NAME ['{' action* '}'] [emit] ';'
               | 'at' 'end' ['if' preds] emit ';'
    emit      := 'emit' [NAME (',' NAME)*]
    preds     := NAME CMP const ('and' NAME CMP const)*
    action    := 'inc' NAME ';' | 'reset' NAME ';' | 'set' NAME '=' const ';'
    const     := term (('+' | '-') term)*
    term      := INT | INT ('s' | 'm' | 'h' | 'w')

Bare integers and ``w`` suffixes are window counts; ``s``/``m``/``h``
durations are converted with :func:`cedkit.core.windows_for`.
"""

from __future__ import annotations

import re
from typing import Optional

from ..core import NonDivisible, Vocabulary, WindowSpec, windows_for
from .model import (
    END_POLICIES,
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

_TOKEN_SPEC = [
    ("ws", r"[ \t\r]+"),
    ("nl", r"\n"),
    ("comment", r"#[^\n]*"),
    ("dur", r"\d+[smhw]\b"),
    ("int", r"\d+"),
    ("name", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("arrow", r"->"),
    ("cmp", r"<=|>=|==|<|>"),
    ("sym", r"[{};,=+\-]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKEN_SPEC))
_UNIT_SECONDS = {"s": 1, "m": 60, "h": 3600}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


class _SyntaxError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


def tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _SyntaxError(
                Diagnostic("SyntaxError", f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            )
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, vocab: Optional[Vocabulary], window: WindowSpec):
        self.toks = tokenize(text)
        self.i = 0
        self.vocab = vocab
        self.window = window
        self.diags: list[Diagnostic] = []

    # -- token helpers
    @property
    def tok(self) -> _Token:
        return self.toks[self.i]

    def _fail(self, expected: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise _SyntaxError(Diagnostic("SyntaxError", f"expected {expected}, found {found}", t.line, t.col))

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("name", "sym", "arrow", "cmp")

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            self._fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def name(self, what: str = "name") -> _Token:
        if self.tok.kind != "name":
            self._fail(what)
        t = self.tok
        self.i += 1
        return t

    def error(self, code: str, msg: str, t: _Token, severity: str = "error"):
        self.diags.append(Diagnostic(code, msg, t.line, t.col, severity))

    # -- grammar
    def parse(self) -> list[TimedAutomaton]:
        out = []
        while self.tok.kind != "eof":
            out.append(self.automaton())
        return out

    def automaton(self) -> TimedAutomaton:
        start = self.expect("automaton")
        event = self.name("event name").text
        self.expect("{")
        counters: list[CounterDecl] = []
        states: list[State] = []
        policy = "ignore"
        while not self.accept("}"):
            if self.accept("counters"):
                self.expect("{")
                while not self.accept("}"):
                    t = self.name("counter name")
                    self.expect("max")
                    mx = self.const()
                    self.expect(";")
                    counters.append(CounterDecl(t.text, mx, (t.line, t.col)))
            elif self.accept("end"):
                t = self.name("end-of-trace policy")
                if t.text not in END_POLICIES:
                    self.error("SyntaxError", f"unknown end-of-trace policy {t.text!r}", t)
                policy = t.text
                self.expect(";")
            elif self.at("state"):
                states.append(self.state(event))
            else:
                self._fail("'counters', 'end', 'state' or '}'")
        return TimedAutomaton(event, tuple(states), tuple(counters), policy, (start.line, start.col))

    def state(self, event: str) -> State:
        start = self.expect("state")
        name = self.name("state name").text
        initial = self.accept("initial")
        self.expect("{")
        arms, end_arms = [], []
        while not self.accept("}"):
            if self.at("at"):
                end_arms.append(self.end_arm(event))
            else:
                arms.append(self.arm(event))
        return State(name, tuple(arms), tuple(end_arms), initial, (start.line, start.col))

    def arm(self, event: str) -> Arm:
        start = self.tok
        if self.accept("otherwise"):
            acts = None
        elif self.accept("on"):
            names = [self.name("activity")]
            while self.accept(","):
                names.append(self.name("activity"))
            for t in names:
                if self.vocab is not None and t.text not in self.vocab:
                    self.error("UnknownActivity", f"activity {t.text!r} is not in the vocabulary", t)
            acts = frozenset(t.text for t in names)
        else:
            self._fail("'on', 'otherwise', 'at' or '}'")
        preds = self.preds() if self.accept("if") else ()
        self.expect("->")
        target = self.name("target state").text
        actions = []
        if self.accept("{"):
            while not self.accept("}"):
                actions.append(self.action())
        emits = self.emit(event) if self.at("emit") else frozenset()
        self.expect(";")
        return Arm(acts, preds, target, tuple(actions), emits, (start.line, start.col))

    def end_arm(self, event: str) -> EndArm:
        start = self.expect("at")
        self.expect("end")
        preds = self.preds() if self.accept("if") else ()
        if not self.at("emit"):
            self._fail("'emit'")
        emits = self.emit(event)
        self.expect(";")
        return EndArm(preds, emits, (start.line, start.col))

    def emit(self, event: str) -> frozenset[str]:
        self.expect("emit")
        if self.tok.kind != "name":
            return frozenset([event])
        names = [self.name("event").text]
        while self.accept(","):
            names.append(self.name("event").text)
        return frozenset(names)

    def preds(self) -> tuple[Pred, ...]:
        out = []
        while True:
            c = self.name("counter").text
            if self.tok.kind != "cmp":
                self._fail("comparison operator")
            op = self.tok.text
            self.i += 1
            out.append(Pred(c, op, self.const()))
            if not self.accept("and"):
                return tuple(out)

    def action(self) -> Action:
        t = self.name("'inc', 'reset' or 'set'")
        if t.text in ("inc", "reset"):
            c = self.name("counter").text
            self.expect(";")
            return Action(t.text, c)
        if t.text == "set":
            c = self.name("counter").text
            self.expect("=")
            v = self.const()
            self.expect(";")
            return Action("set", c, v)
        self.i -= 1
        self._fail("'inc', 'reset' or 'set'")

    def const(self) -> int:
        total = self.term()
        while self.at("+") or self.at("-"):
            sign = 1 if self.tok.text == "+" else -1
            self.i += 1
            total += sign * self.term()
        return total

    def term(self) -> int:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "dur":
            self.i += 1
            n, unit = int(t.text[:-1]), t.text[-1]
            if unit == "w":
                return n
            try:
                return windows_for(n * _UNIT_SECONDS[unit], self.window)
            except (NonDivisible, ValueError) as exc:
                self.error("NonDivisible", str(exc), t)
                return 0
        self._fail("integer or duration")


def check_rules(
    text: str,
    vocab: Optional[Vocabulary] = None,
    window: WindowSpec = WindowSpec(),
) -> tuple[list[TimedAutomaton], list[Diagnostic]]:
    """Parse and validate without raising.

    Returns the automata (empty if any error was found) and every diagnostic,
    warnings included.
    """
    from .validate import validate, validate_set

    if vocab is None:
        vocab = Vocabulary()
    try:
        p = _Parser(text, vocab, window)
        automata = p.parse()
    except _SyntaxError as exc:
        return [], [exc.diag]
    diags = list(p.diags)
    for a in automata:
        diags.extend(d for d in validate(a, vocab) if d.code != "UnknownActivity")
    diags.extend(validate_set(automata))
    diags.sort(key=lambda d: (d.line, d.col))
    if any(d.severity == "error" for d in diags):
        return [], diags
    return automata, diags


def parse_rules(
    text: str,
    vocab: Optional[Vocabulary] = None,
    window: WindowSpec = WindowSpec(),
) -> list[TimedAutomaton]:
    """Parse rule text into validated automata, raising :class:`RuleError` on errors."""
    automata, diags = check_rules(text, vocab, window)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise RuleError(errors)
    return automata
