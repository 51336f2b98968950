"""Command-line entry point: ``cedkit <command> ...``.

Exit codes: 0 success, 1 usage error, 2 validation or diagnostic failure,
3 I/O error. Diagnostics and errors go to standard error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import io as cio
from .core import Vocabulary, VocabularyMismatch, WindowSpec, windows_for
from .engine import InvalidThreshold, parse_mode, run_crisp, run_on_soft
from .metrics import EmptyInput, Prediction, UnpairedId, evaluate
from .rules import RuleError, builtin_rules, check_rules
from .simgen import InfeasibleConfig, NoiseModel, SimConfig, corrupt, derive_seed, generate

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3

# offsets mixed into --seed so noise and generation draw from unrelated streams
NOISE_STREAM = 0x6E6F697365


class _Usage(Exception):
    pass


class _Invalid(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def parse_span(text: str, window: WindowSpec) -> int:
    m = re.fullmatch(r"(\d+)([smhw]?)", text.strip())
    if not m:
        raise _Usage(f"bad span {text!r}; use e.g. 5m, 30m or 60w")
    n, unit = int(m.group(1)), m.group(2)
    if unit in ("", "w"):
        return n
    return windows_for(n * {"s": 1, "m": 60, "h": 3600}[unit], window)


def load_rules(path: Optional[str], window: WindowSpec, vocab: Vocabulary):
    """Return ``(automata, is_builtin)``; ``None`` or ``"builtin"`` selects the built-in rules."""
    if path in (None, "builtin"):
        return builtin_rules(window, vocab), True
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise OSError(f"cannot read rules: {exc}") from None
    automata, diags = check_rules(text, vocab, window)
    for d in diags:
        print(d.format(path), file=sys.stderr)
    if not automata and any(d.severity == "error" for d in diags):
        raise _Invalid(f"{path}: rules failed validation")
    return automata, automata == builtin_rules(window, vocab)


def _label(rules, is_builtin: bool, acts, window: WindowSpec, vocab: Vocabulary):
    if is_builtin:
        from .oracle import oracle_all

        return tuple(oracle_all(acts, window))
    return tuple(run_crisp(rules, acts, vocab).labels)


def cmd_validate(args, vocab) -> int:
    window = WindowSpec(args.window_s)
    with open(args.rules, encoding="utf-8") as f:
        text = f.read()
    automata, diags = check_rules(text, vocab, window)
    for d in diags:
        print(d.format(args.rules), file=sys.stderr)
    if any(d.severity == "error" for d in diags):
        return EXIT_INVALID
    print(f"{args.rules}: {len(automata)} automata OK")
    return EXIT_OK


def cmd_gen(args, vocab) -> int:
    cfg = cio.read_sim_config(args.config) if args.config else SimConfig()
    window = cfg.window
    span = parse_span(args.span, window) if args.span else cfg.span_windows
    cfg = replace(cfg, span_windows=span, seed=args.seed if args.seed is not None else cfg.seed)
    rules, is_builtin = load_rules(args.rules, window, vocab)
    traces = generate(cfg, args.n, id_prefix=args.id_prefix, workers=args.workers)

    def records():
        for i, t in enumerate(traces):
            if not is_builtin:
                t = replace(t, labels=_label(rules, False, t.activities, window, vocab))
            if args.noise is not None:
                t = corrupt(t, NoiseModel(args.noise), derive_seed(cfg.seed, NOISE_STREAM, i), vocab)
            yield t

    n = cio.write_jsonl(records(), args.out)
    print(f"wrote {n} traces of {span} windows to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_label(args, vocab) -> int:
    window = WindowSpec(args.window_s)
    rules, is_builtin = load_rules(args.rules, window, vocab)

    def records():
        for t in cio.read_traces(args.inp):
            if t.window != window:
                raise _Invalid(f"trace {t.id} uses {t.window.seconds_per_window}s windows, rules use {window.seconds_per_window}s")
            yield replace(t, labels=_label(rules, is_builtin, t.activities, window, vocab))

    cio.write_jsonl(records(), args.out)
    return EXIT_OK


def cmd_detect(args, vocab) -> int:
    window = WindowSpec(args.window_s)
    rules, _ = load_rules(args.rules, window, vocab)
    mode = args.mode
    if mode != "crisp":
        parse_mode(mode)

    def records():
        for t in cio.read_traces(args.inp):
            if t.window != window:
                raise _Invalid(f"trace {t.id} uses {t.window.seconds_per_window}s windows, rules use {window.seconds_per_window}s")
            if mode == "crisp":
                out = run_crisp(rules, t.activities, vocab, timing=args.timing)
            else:
                if t.soft is None:
                    raise _Invalid(f"trace {t.id} has no soft observations; mode {mode} needs them")
                out = run_on_soft(rules, t.soft, mode, vocab, timing=args.timing)
            lat = tuple(out.per_window_latency_ns) if args.timing else None
            yield Prediction(t.id, out.labels, lat)

    cio.write_jsonl(records(), args.out)
    return EXIT_OK


def cmd_eval(args, vocab) -> int:
    window = WindowSpec(args.window_s)
    rules, _ = load_rules(args.rules, window, vocab)
    events = sorted({a.event for a in rules})
    truths = {t.id: t for t in cio.read_traces(args.truth)}
    missing = [k for k, t in truths.items() if t.labels is None]
    if missing:
        raise _Invalid(f"truth trace {missing[0]} has no labels")
    preds = list(cio.read_predictions(args.pred))
    report = evaluate(preds, list(truths.values()), events)
    doc = report.to_dict()
    text = json.dumps(doc, indent=2)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    print(_summary(doc, events))
    return EXIT_OK


def _fmt(x) -> str:
    return "undef" if x is None else f"{x:.4f}"


def _summary(doc: dict, events) -> str:
    lines = [f"samples {doc['n_samples']}  length-matched {doc['n_length_matched']}  length_acc {_fmt(doc['length_accuracy'])}"]
    for key in ("conditional_f1", "coarse_f1"):
        per = doc[key]["per_type"]
        cells = "  ".join(f"{e} {_fmt(per[e])}" for e in events)
        lines.append(f"{key:15s} {cells}  avg {_fmt(doc[key]['average'])}")
    return "\n".join(lines)


def cmd_bench(args, vocab) -> int:
    from .bench import bench_latency

    window = WindowSpec(args.window_s)
    rules, _ = load_rules(args.rules, window, vocab)
    span = parse_span(args.span, window)
    rep = bench_latency(rules, span, args.trials, args.seed, vocab)
    failed = False
    for mode, limit in (("crisp", args.max_crisp_p99_us), ("belief", args.max_belief_p99_us)):
        s = rep.per_mode[mode]
        verdict = ""
        if limit is not None:
            ok = s.p99_ns <= limit * 1000
            failed |= not ok
            verdict = f"  limit {limit:g}us {'PASS' if ok else 'FAIL'}"
        print(
            f"{mode:6s} n={s.n} mean={s.mean_ns / 1000:.2f}us p50={s.p50_ns / 1000:.2f}us "
            f"p99={s.p99_ns / 1000:.2f}us max={s.max_ns / 1000:.2f}us{verdict}"
        )
    if args.json:
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(rep.to_dict(), f, indent=2)
    return EXIT_INVALID if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cedkit", description="Complex event detection over per-window activity traces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, rules_required=False):
        sp.add_argument("--rules", required=rules_required, help="rule file (.ced); default: built-in rules")
        sp.add_argument("--window-s", type=int, default=5, help="seconds per window (default 5)")

    sp = sub.add_parser("validate", help="check a rule file")
    common(sp, rules_required=True)

    sp = sub.add_parser("gen", help="simulate labeled traces")
    common(sp)
    sp.add_argument("--config", help="simulator config file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--span", help="3m, 5m, 15m, 30m or <N>w")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True)
    sp.add_argument("--noise", type=float, help="p_correct of the symmetric noise model")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--id-prefix", default="trace-")

    sp = sub.add_parser("label", help="attach ground-truth labels")
    common(sp)
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("detect", help="run the detector")
    common(sp)
    sp.add_argument("--mode", default="crisp", help="crisp | argmax | belief[:threshold]")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--timing", action="store_true", help="record per-window latency")

    sp = sub.add_parser("eval", help="score predictions against truth")
    common(sp)
    sp.add_argument("--pred", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--report")

    sp = sub.add_parser("bench", help="per-window latency benchmark")
    common(sp)
    sp.add_argument("--span", default="30m")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-crisp-p99-us", type=float)
    sp.add_argument("--max-belief-p99-us", type=float)
    sp.add_argument("--json", help="write the report as JSON")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "gen": cmd_gen,
    "label": cmd_label,
    "detect": cmd_detect,
    "eval": cmd_eval,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _Usage as exc:
        print(f"cedkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    vocab = Vocabulary()
    try:
        return COMMANDS[args.command](args, vocab)
    except _Usage as exc:
        print(f"cedkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (cio.ParseError, cio.SchemaError) as exc:
        print(f"cedkit: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"cedkit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (_Invalid, RuleError, InfeasibleConfig, VocabularyMismatch, InvalidThreshold,
            UnpairedId, EmptyInput, ValueError) as exc:
        print(f"cedkit: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
