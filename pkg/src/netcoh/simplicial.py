"""Singular 0-, 1- and 2-simplices of a causal poset, and paths.

Face convention: a 1-simplex b runs from d1(b) to d0(b).  A 2-simplex with
vertices v0, v1, v2 has d0 = [v1, v2], d1 = [v0, v2], d2 = [v0, v1].
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Optional

from .poset import CausalPoset, IndexElement, leq


class SimplicialError(ValueError):
    pass


class NoCommonSupport(SimplicialError):
    pass


class NonComposable(SimplicialError):
    pass


@dataclass(frozen=True)
class Simplex0:
    body: IndexElement
    support: IndexElement

    def __post_init__(self):
        if not leq(self.body, self.support):
            raise SimplicialError(f"{self.body} is not inside its support {self.support}")

    @classmethod
    def at(cls, a: IndexElement) -> "Simplex0":
        return cls(a, a)


@dataclass(frozen=True)
class Simplex1:
    support: IndexElement
    d0: Simplex0
    d1: Simplex0

    def __post_init__(self):
        for f in (self.d0, self.d1):
            if not leq(f.support, self.support):
                raise SimplicialError("face support escapes the 1-simplex support")

    def reversed(self) -> "Simplex1":
        return Simplex1(self.support, self.d1, self.d0)


@dataclass(frozen=True)
class Simplex2:
    support: IndexElement
    d0: Simplex1
    d1: Simplex1
    d2: Simplex1

    def faces_compatible(self) -> bool:
        # d_i d_j = d_{j-1} d_i for i < j
        return (self.d0.d0 == self.d1.d0 and      # i=0, j=1
                self.d0.d1 == self.d2.d0 and      # i=0, j=2
                self.d1.d1 == self.d2.d1)         # i=1, j=2

    def supports_inside(self) -> bool:
        return all(leq(f.support, self.support) for f in (self.d0, self.d1, self.d2))


def _as_element(a) -> IndexElement:
    return a.body if isinstance(a, Simplex0) else a


@lru_cache(maxsize=None)
def _upper_bounds(poset: CausalPoset, members: frozenset) -> tuple[IndexElement, ...]:
    return tuple(z for z in poset if all(leq(x, z) for x in members))


def minimal_supports(poset: CausalPoset, *faces: IndexElement) -> list[IndexElement]:
    ups = _upper_bounds(poset, frozenset(faces))
    return [z for z in ups if not any(w != z and leq(w, z) for w in ups)]


def canonical_simplex1(a0, a1, poset: CausalPoset) -> Simplex1:
    """The 1-simplex from a1 to a0 on the first minimal common support."""
    x0, x1 = _as_element(a0), _as_element(a1)
    mins = minimal_supports(poset, x0, x1)
    if not mins:
        raise NoCommonSupport(f"no element of {poset} contains {x0} and {x1}")
    return Simplex1(mins[0], Simplex0.at(x0), Simplex0.at(x1))


def edge(x, y, poset: CausalPoset) -> Simplex1:
    """Canonical 1-simplex going from x to y."""
    return canonical_simplex1(y, x, poset)


def canonical_simplex2(v0, v1, v2, poset: CausalPoset) -> Optional[Simplex2]:
    x0, x1, x2 = (_as_element(v) for v in (v0, v1, v2))
    try:
        d0, d1, d2 = edge(x1, x2, poset), edge(x0, x2, poset), edge(x0, x1, poset)
    except NoCommonSupport:
        return None
    need = frozenset({d0.support, d1.support, d2.support})
    mins = minimal_supports(poset, *need)
    if not mins:
        return None
    return Simplex2(mins[0], d0, d1, d2)


def enumerate_simplices(poset: CausalPoset, n: int, support_policy: str = "minimal",
                        max_count: Optional[int] = None) -> list:
    return list(_enumerate(poset, n, support_policy, max_count))


@lru_cache(maxsize=64)
def _enumerate(poset: CausalPoset, n: int, support_policy: str, max_count: Optional[int]) -> list:
    if n not in (0, 1, 2):
        raise SimplicialError("only dimensions 0, 1 and 2 are enumerated")
    if support_policy not in ("minimal", "all"):
        raise SimplicialError(f"unknown support policy {support_policy!r}")
    out: list = []

    def push(s) -> bool:
        out.append(s)
        return max_count is not None and len(out) >= max_count

    els = poset.elements
    if n == 0:
        for a in els:
            sups = [a] if support_policy == "minimal" else _upper_bounds(poset, frozenset({a}))
            for s in sups:
                if push(Simplex0(a, s)):
                    return out
        return out
    if n == 1:
        for a1 in els:
            for a0 in els:
                if support_policy == "minimal":
                    try:
                        s = canonical_simplex1(a0, a1, poset)
                    except NoCommonSupport:
                        continue
                    if push(s):
                        return out
                else:
                    for z in _upper_bounds(poset, frozenset({a0, a1})):
                        if push(Simplex1(z, Simplex0.at(a0), Simplex0.at(a1))):
                            return out
        return out
    for v0 in els:
        for v1 in els:
            for v2 in els:
                c = canonical_simplex2(v0, v1, v2, poset)
                if c is None:
                    continue
                if support_policy == "minimal":
                    if push(c):
                        return out
                    continue
                need = frozenset({c.d0.support, c.d1.support, c.d2.support})
                for z in _upper_bounds(poset, need):
                    if push(Simplex2(z, c.d0, c.d1, c.d2)):
                        return out
    return out


@dataclass(frozen=True)
class Path:
    steps: tuple[Simplex1, ...]

    def __post_init__(self):
        if not self.steps:
            raise SimplicialError("a path has at least one 1-simplex")
        for b, nxt in zip(self.steps, self.steps[1:]):
            if nxt.d1 != b.d0:
                raise SimplicialError("consecutive 1-simplices do not chain")

    @property
    def start(self) -> Simplex0:
        return self.steps[0].d1

    @property
    def end(self) -> Simplex0:
        return self.steps[-1].d0

    def vertices(self) -> list[Simplex0]:
        return [self.start] + [b.d0 for b in self.steps]

    def supports(self) -> list[IndexElement]:
        return [b.support for b in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


class PathBoundary(NamedTuple):
    start: Simplex0
    end: Simplex0


def path_boundary(p: Path) -> PathBoundary:
    return PathBoundary(p.start, p.end)


def path_reverse(p: Path) -> Path:
    return Path(tuple(b.reversed() for b in reversed(p.steps)))


def path_compose(p: Path, q: Path) -> Path:
    """p followed by q."""
    if p.end != q.start:
        raise NonComposable(f"path ends at {p.end.body}, next starts at {q.start.body}")
    return Path(p.steps + q.steps)


def iter_paths(start, end, poset: CausalPoset, max_len: int) -> Iterator[Path]:
    """Chains of canonical 1-simplices, shortest first."""
    if max_len < 1:
        raise SimplicialError("max_len must be at least 1")
    s, e = _as_element(start), _as_element(end)
    nbrs: dict[IndexElement, list[tuple[IndexElement, Simplex1]]] = {}

    def neighbours(x: IndexElement):
        if x not in nbrs:
            lst = []
            for y in poset:
                try:
                    lst.append((y, edge(x, y, poset)))
                except NoCommonSupport:
                    pass
            nbrs[x] = lst
        return nbrs[x]

    for length in range(1, max_len + 1):
        def walk(x: IndexElement, acc: tuple, left: int):
            if left == 1:
                for y, b in neighbours(x):
                    if y == e:
                        yield Path(acc + (b,))
                return
            for y, b in neighbours(x):
                yield from walk(y, acc + (b,), left - 1)
        yield from walk(s, (), length)


def enumerate_paths(start, end, poset: CausalPoset, max_len: int) -> list[Path]:
    seen, out = set(), []
    for p in iter_paths(start, end, poset, max_len):
        key = (tuple((b.d1, b.d0) for b in p.steps), tuple(p.supports()))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out
