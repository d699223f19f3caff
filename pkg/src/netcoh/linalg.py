"""Sparse exact linear algebra over the rationals.

Vectors are ``dict[int, Fraction]`` with no zero entries.  The matrices that
show up here are banded, so sparse elimination keeps fill-in small.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Mapping

Vec = dict[int, Fraction]


def clean(v: Mapping[int, Fraction]) -> Vec:
    return {k: Fraction(x) for k, x in v.items() if x != 0}


def axpy(y: Vec, a: Fraction, x: Mapping[int, Fraction]) -> None:
    """y += a*x in place."""
    for k, xv in x.items():
        nv = y.get(k, 0) + a * xv
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


def dot(u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Fraction:
    if len(u) > len(v):
        u, v = v, u
    return sum((x * v[k] for k, x in u.items() if k in v), Fraction(0))


def scale(v: Mapping[int, Fraction], a: Fraction) -> Vec:
    return {k: a * x for k, x in v.items()} if a else {}


class Echelon:
    """Row echelon form built one row at a time.

    Each stored row has pivot 1 at its smallest column.
    """

    def __init__(self, ncols: int, rows: Iterable[Mapping[int, Fraction]] = ()):
        self.ncols = ncols
        self.piv: dict[int, Vec] = {}
        for r in rows:
            self.add(r)

    def copy(self) -> "Echelon":
        e = Echelon(self.ncols)
        e.piv = dict(self.piv)
        return e

    @property
    def rank(self) -> int:
        return len(self.piv)

    def reduce(self, v: Mapping[int, Fraction]) -> Vec:
        out = {k: x for k, x in v.items() if x}
        heap = [k for k in out if k in self.piv]
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            c = heapq.heappop(heap)
            a = out.get(c)
            if not a:
                continue
            row = self.piv[c]
            for k, x in row.items():
                nv = out.get(k, 0) - a * x
                if nv:
                    out[k] = nv
                    if k not in seen and k in self.piv:
                        seen.add(k)
                        heapq.heappush(heap, k)
                else:
                    out.pop(k, None)
        return out

    def add(self, v: Mapping[int, Fraction]) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        self.piv[p] = {k: x * inv for k, x in r.items()}
        return True

    def contains(self, v: Mapping[int, Fraction]) -> bool:
        return not self.reduce(v)

    def reduced_rows(self) -> dict[int, Vec]:
        """Fully reduced echelon form, keyed by pivot column."""
        done: dict[int, Vec] = {}
        for p in sorted(self.piv, reverse=True):
            row = dict(self.piv[p])
            for k in [k for k in row if k != p and k in done]:
                a = row.get(k)
                if a:
                    axpy(row, -a, done[k])
            done[p] = row
        return done

    def basis(self) -> list[Vec]:
        return [dict(r) for _, r in sorted(self.reduced_rows().items())]

    def nullspace(self) -> list[Vec]:
        """Basis of {x : r.x = 0 for every row r}."""
        red = self.reduced_rows()
        free = [c for c in range(self.ncols) if c not in red]
        by_free: dict[int, Vec] = {f: {f: Fraction(1)} for f in free}
        for p, row in red.items():
            for k, x in row.items():
                if k != p:
                    by_free[k][p] = -x
        return [by_free[f] for f in free]


def nullspace(rows: Iterable[Mapping[int, Fraction]], ncols: int) -> list[Vec]:
    return Echelon(ncols, rows).nullspace()


def rank(rows: Iterable[Mapping[int, Fraction]], ncols: int) -> int:
    return Echelon(ncols, rows).rank


def solve_affine(rows: Iterable[tuple[Mapping[int, Fraction], Fraction]], ncols: int) -> Vec | None:
    """One solution x of r.x = c for every (r, c), free variables set to 0; None if inconsistent."""
    aug = Echelon(ncols + 1)
    for r, c in rows:
        v = dict(r)
        if c:
            v[ncols] = -Fraction(c)
        aug.add(v)
    if ncols in aug.piv:
        return None
    x: Vec = {}
    for p, row in aug.reduced_rows().items():
        rhs = -row.get(ncols, 0)
        if rhs:
            x[p] = rhs
    return x
