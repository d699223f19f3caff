"""Scenario-driven batch runner.

    netcoh run scenario.json [--out report.json] [--csv table.csv] [--jobs N] [--seed N]
    netcoh --list-checks
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from .checks import CHECKS, NEEDS_SYMMETRIC, Context, Outcome, frac
from .piecewise import Q
from .poset import KINDS


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line, self.column = line, column


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class CheckSpec:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    window: tuple[Fraction, Fraction]
    step: Fraction
    poset_kind: str
    checks: tuple[CheckSpec, ...]
    seed: int = 0
    limits: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {"window": [frac(self.window[0]), frac(self.window[1])], "step": frac(self.step),
                "posetKind": self.poset_kind, "seed": self.seed, "limits": self.limits,
                "checks": [{"kind": c.kind, "params": c.params} for c in self.checks]}


def _rational(x: Any, what: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ValidationError(f"{what} must be an integer or a 'p/q' string, got {x!r}")
    try:
        return Q(x)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"{what}: {e}") from e


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _locate_kind(text: str, token: str) -> tuple[int, int]:
    m = re.search(r'"kind"\s*:\s*"(' + re.escape(token) + r')"', text)
    return _position(text, m.start(1)) if m else (1, 1)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from e
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object", 1, 1)
    checks = []
    for i, c in enumerate(doc.get("checks", [])):
        if isinstance(c, str):
            c = {"kind": c}
        if not isinstance(c, dict) or "kind" not in c:
            raise ValidationError(f"check #{i} needs a 'kind'")
        if c["kind"] not in CHECKS:
            line, col = _locate_kind(text, str(c["kind"]))
            raise ParseError(f"unknown check kind {c['kind']!r}", line, col)
        checks.append(CheckSpec(c["kind"], dict(c.get("params", {}))))
    try:
        lo, hi = doc["window"]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError("'window' must be a pair [lo, hi]") from e
    lo, hi = _rational(lo, "window"), _rational(hi, "window")
    step = _rational(doc.get("step", "1/4"), "step")
    kind = doc.get("posetKind", "D")
    if kind not in KINDS:
        line, col = _position(text, text.find(f'"{kind}"') + 1) if f'"{kind}"' in text else (1, 1)
        raise ParseError(f"unknown poset kind {kind!r}", line, col)
    if not lo < hi or step <= 0 or ((hi - lo) / step).denominator != 1:
        raise ValidationError(f"step {step} must divide the window [{lo}, {hi}]")
    for c in checks:
        if c.kind not in NEEDS_SYMMETRIC:
            continue
        w = c.params.get("window")
        clo, chi = (_rational(w[0], "window"), _rational(w[1], "window")) if w else (lo, hi)
        if clo != -chi:
            raise ValidationError(f"window [{clo}, {chi}] is not symmetric about 0, as {c.kind} requires")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError("'seed' must be an integer")
    return Scenario((lo, hi), step, kind, tuple(checks), seed, dict(doc.get("limits", {})))


@dataclass
class CheckRecord:
    name: str
    status: str
    dimensions: dict
    witness: Any
    detail: str
    time_ms: int


@dataclass
class Report:
    scenario: dict
    seed: int
    checks: list[CheckRecord]

    @property
    def summary(self) -> dict:
        n = {s: sum(c.status == s for c in self.checks) for s in ("pass", "fail", "skipped")}
        return {"total": len(self.checks), **n, "status": "fail" if n["fail"] else "pass"}

    @property
    def ok(self) -> bool:
        return self.summary["status"] == "pass"

    def to_dict(self) -> dict:
        return {"input": self.scenario, "seed": self.seed, "summary": self.summary,
                "checks": [asdict(c) for c in self.checks]}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["input"], d["seed"], [CheckRecord(**c) for c in d["checks"]])


def _run_one(args: tuple[Scenario, int]) -> CheckRecord:
    sc, i = args
    c = sc.checks[i]
    ctx = Context(sc.window, sc.step, sc.poset_kind, sc.limits)
    rng = random.Random(f"{sc.seed}:{i}:{c.kind}")
    t0 = time.perf_counter()
    try:
        out = CHECKS[c.kind](ctx, c.params, rng)
    except Exception as e:  # a crashing check is a failed entry, not a failed run
        out = Outcome("fail", {}, {"error": type(e).__name__, "message": str(e)}, "check raised")
    ms = int((time.perf_counter() - t0) * 1000)
    return CheckRecord(c.kind, out.status, out.dimensions, out.witness, out.detail, ms)


def run(scenario: Scenario, jobs: int = 1) -> Report:
    tasks = [(scenario, i) for i in range(len(scenario.checks))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_run_one, tasks))
    else:
        records = [_run_one(t) for t in tasks]
    return Report(scenario.echo(), scenario.seed, records)


def emit(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "status", "dimensions", "time_ms"])
        for c in report.checks:
            dims = ";".join(f"{k}={v}" for k, v in c.dimensions.items())
            w.writerow([c.name, c.status, dims, c.time_ms])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="netcoh", description=__doc__.splitlines()[0])
    ap.add_argument("--list-checks", action="store_true", help="print the check kinds and exit")
    sub = ap.add_subparsers(dest="cmd")
    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out", help="write the json report here instead of stdout")
    r.add_argument("--csv", help="also write a csv table")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--list-checks", action="store_true", help="print the check kinds and exit")
    args = ap.parse_args(argv)
    if args.list_checks:
        print("\n".join(CHECKS))
        return 0
    if args.cmd != "run":
        ap.print_usage(sys.stderr)
        return 2
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            sc = parse_scenario(fh.read())
    except (ParseError, ValidationError) as e:
        print(f"{args.scenario}: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return 2
    if args.seed is not None:
        sc = Scenario(sc.window, sc.step, sc.poset_kind, sc.checks, args.seed, sc.limits)
    rep = run(sc, args.jobs)
    text = emit(rep, "json")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(emit(rep, "csv"))
    for c in rep.checks:
        print(f"{c.status.upper():7} {c.name} ({c.time_ms} ms)", file=sys.stderr)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
