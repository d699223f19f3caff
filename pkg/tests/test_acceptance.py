"""The twelve acceptance criteria, run from the shipped scenario at zero tolerance.

    python -m pytest tests/test_acceptance.py -v      # PASS/FAIL lines in the summary
    python tests/test_acceptance.py                   # same lines on stdout
"""
from __future__ import annotations

import time
from functools import lru_cache
from pathlib import Path

import pytest

from netcoh.cli import Report, parse_scenario, run

SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "acceptance.json"

# criterion -> (title, indices into the scenario's check list)
CRITERIA = {
    1: ("Haag duality on intervals", [0]),
    2: ("double-interval duality gap of 2", [1]),
    3: ("additivity of Vf and Vf0 on D", [2]),
    4: ("graded locality on 1000 pairs", [3]),
    5: ("graded and global graded duality", [4, 5]),
    6: ("condition on path intersections: Vf holds, Va fails", [6, 7]),
    7: ("cocycle triviality dichotomy", [8]),
    8: ("Z0 table on I and D", [9]),
    9: ("braiding and monodromy", [10]),
    10: ("Moebius identities and Xi swap", [11, 12]),
    11: ("poset facts, bot graph, flip", [13, 14, 15]),
    12: ("partition of unity", [16]),
}

RESULTS: dict[int, str] = {}


@lru_cache(maxsize=None)
def report() -> tuple[Report, float]:
    t0 = time.perf_counter()
    rep = run(parse_scenario(SCENARIO.read_text(encoding="utf-8")))
    return rep, time.perf_counter() - t0


def verdict(n: int) -> tuple[bool, str]:
    rep, _ = report()
    title, idx = CRITERIA[n]
    bad = [rep.checks[i] for i in idx if rep.checks[i].status != "pass"]
    line = f"{'PASS' if not bad else 'FAIL'} criterion {n:2d}: {title}"
    if bad:
        line += " [" + "; ".join(f"{c.name}: {c.detail} {c.dimensions}" for c in bad) + "]"
    return not bad, line


def test_scenario_covers_every_criterion():
    rep, _ = report()
    used = sorted(i for _, idx in CRITERIA.values() for i in idx)
    assert used == list(range(len(rep.checks)))


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, line = verdict(n)
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_runtime_budget():
    _, secs = report()
    assert secs < 60, f"acceptance scenario took {secs:.1f} s"


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(verdict(n)[1])
    print(f"scenario runtime: {report()[1]:.1f} s")
