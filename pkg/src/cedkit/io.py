"""JSON-Lines records for traces and predictions, and the simulator config file.

Trace record fields, always written in this order (optional ones omitted
when absent)::

    id, window_s, activities, soft?, labels?, seed?

Prediction record fields::

    id, labels, per_window_latency_ns?

Labels are arrays of arrays of event ids, one inner array per window,
each sorted.
"""

from __future__ import annotations

import configparser
import contextlib
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .core import Trace, WindowSpec
from .metrics import Prediction
from .simgen import ROUTINES, SimConfig

PathOrStream = Union[str, Path, IO[str]]


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


class SchemaError(ValueError):
    def __init__(self, line: int, field: str, msg: str = "missing or invalid"):
        self.line = line
        self.field = field
        super().__init__(f"line {line}: field {field!r}: {msg}")


@contextlib.contextmanager
def _open(target: PathOrStream, mode: str):
    if target == "-":
        yield sys.stdin if "r" in mode else sys.stdout
    elif isinstance(target, (str, Path)):
        with open(target, mode, encoding="utf-8", newline="\n") as f:
            yield f
    else:
        yield target


def _labels_out(labels) -> list:
    return [sorted(s) for s in labels]


def trace_to_record(t: Trace) -> dict:
    rec = {"id": t.id, "window_s": t.window.seconds_per_window, "activities": list(t.activities)}
    if t.soft is not None:
        rec["soft"] = t.soft.tolist()
    if t.labels is not None:
        rec["labels"] = _labels_out(t.labels)
    if t.seed is not None:
        rec["seed"] = t.seed
    return rec


def _require(rec: dict, key: str, typ, line: int):
    if key not in rec or not isinstance(rec[key], typ):
        raise SchemaError(line, key)
    return rec[key]


def _label_array(rec: dict, key: str, line: int) -> tuple:
    val = _require(rec, key, list, line)
    if not all(isinstance(s, list) and all(isinstance(e, str) for e in s) for s in val):
        raise SchemaError(line, key, "expected an array of arrays of event ids")
    return tuple(frozenset(s) for s in val)


def record_to_trace(rec: dict, line: int = 0) -> Trace:
    if not isinstance(rec, dict):
        raise SchemaError(line, "<record>", "expected a JSON object")
    tid = _require(rec, "id", str, line)
    window_s = _require(rec, "window_s", int, line)
    acts = _require(rec, "activities", list, line)
    if not all(isinstance(a, str) for a in acts):
        raise SchemaError(line, "activities", "expected an array of activity tokens")
    soft = rec.get("soft")
    if soft is not None and (
        not isinstance(soft, list) or len(soft) != len(acts) or not all(isinstance(r, list) for r in soft)
    ):
        raise SchemaError(line, "soft", "expected one probability vector per window")
    labels = _label_array(rec, "labels", line) if "labels" in rec else None
    if labels is not None and len(labels) != len(acts):
        raise SchemaError(line, "labels", f"length {len(labels)} != {len(acts)} activities")
    seed = rec.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise SchemaError(line, "seed")
    try:
        return Trace(tid, tuple(acts), WindowSpec(window_s), soft, labels, seed)
    except ValueError as exc:
        raise SchemaError(line, "soft" if soft is not None else "window_s", str(exc)) from None


def prediction_to_record(p: Prediction) -> dict:
    rec = {"id": p.id, "labels": _labels_out(p.labels)}
    if p.per_window_latency_ns is not None:
        rec["per_window_latency_ns"] = list(p.per_window_latency_ns)
    return rec


def record_to_prediction(rec: dict, line: int = 0) -> Prediction:
    if not isinstance(rec, dict):
        raise SchemaError(line, "<record>", "expected a JSON object")
    pid = _require(rec, "id", str, line)
    labels = _label_array(rec, "labels", line)
    lat = rec.get("per_window_latency_ns")
    return Prediction(pid, labels, tuple(lat) if lat is not None else None)


def iter_json(source: PathOrStream) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, object)`` for each non-blank line."""
    with _open(source, "r") as f:
        for no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                yield no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(no, exc.msg) from None


def read_traces(source: PathOrStream) -> Iterator[Trace]:
    for no, rec in iter_json(source):
        yield record_to_trace(rec, no)


def read_predictions(source: PathOrStream) -> Iterator[Prediction]:
    for no, rec in iter_json(source):
        yield record_to_prediction(rec, no)


def read_jsonl(source: PathOrStream, kind: str = "trace") -> Iterator:
    return read_traces(source) if kind == "trace" else read_predictions(source)


def dumps(rec: dict) -> str:
    return json.dumps(rec, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(items: Iterable, target: PathOrStream) -> int:
    """Stream traces, predictions or plain dicts to ``target``; returns the count."""
    n = 0
    with _open(target, "w") as f:
        for it in items:
            if isinstance(it, Trace):
                it = trace_to_record(it)
            elif isinstance(it, Prediction):
                it = prediction_to_record(it)
            f.write(dumps(it))
            f.write("\n")
            n += 1
    return n


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    return (int(lo), int(hi)) if sep else (int(lo), int(lo))


def read_sim_config(source: PathOrStream) -> SimConfig:
    """Load a :class:`SimConfig` from an INI-style file.

    Sections and keys::

        [sim]         span_windows, seed, window_s, stretch (number or "auto")
        [rates]       restroom, meal, brush        (occurrences per 60 windows)
        [violation]   e1, e2, e3                   (probability)
        [durations]   <name> = lo-hi               (windows, inclusive)
        [background]  <activity> = weight          (replaces the default table)
    """
    cp = configparser.ConfigParser()
    with _open(source, "r") as f:
        cp.read_file(f)
    cfg = SimConfig()
    sim = cp["sim"] if cp.has_section("sim") else {}
    stretch = sim.get("stretch", "auto")
    cfg = replace(
        cfg,
        span_windows=int(sim.get("span_windows", cfg.span_windows)),
        seed=int(sim.get("seed", cfg.seed)),
        window=WindowSpec(int(sim.get("window_s", cfg.window.seconds_per_window))),
        stretch=None if stretch == "auto" else float(stretch),
    )
    if cp.has_section("rates"):
        rates = dict(cfg.routine_rates)
        for k, v in cp["rates"].items():
            if k not in ROUTINES:
                raise ValueError(f"unknown routine {k!r} in [rates]")
            rates[k] = float(v)
        cfg = replace(cfg, routine_rates=rates)
    if cp.has_section("violation"):
        cfg = replace(cfg, violation_prob={**cfg.violation_prob, **{k: float(v) for k, v in cp["violation"].items()}})
    if cp.has_section("durations"):
        cfg = replace(cfg, duration_ranges={**cfg.duration_ranges, **{k: _range(v) for k, v in cp["durations"].items()}})
    if cp.has_section("background"):
        cfg = replace(cfg, background_weights={k: float(v) for k, v in cp["background"].items()})
    return cfg
