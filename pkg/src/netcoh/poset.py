"""Finite causal index sets on a rational window of the line.

Elements are finite unions of open intervals; ``None`` stands for an
infinite end.  Order is set inclusion and disjointness is empty
intersection, so everything reduces to endpoint comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterator, Optional

from .piecewise import Q, RationalLike

End = Optional[Fraction]


class PosetError(ValueError):
    pass


class TooManyElements(PosetError):
    pass


class ElementNotInPoset(PosetError):
    pass


class WindowNotSymmetric(PosetError):
    pass


KINDS = ("I", "I2", "D", "J")


@dataclass(frozen=True, order=False)
class IndexElement:
    parts: tuple[tuple[End, End], ...]

    def __post_init__(self):
        if not self.parts or len(self.parts) > 2:
            raise PosetError("an element has one or two components")
        for a, b in self.parts:
            if a is not None and b is not None and not a < b:
                raise PosetError(f"empty component ({a}, {b})")
        if len(self.parts) == 2:
            (a, b), (c, d) = self.parts
            if None in (b, c) or not b < c:
                raise PosetError("components of a double interval need a gap between them")
            if a is None or d is None:
                raise PosetError("double intervals are bounded")

    @property
    def variant(self) -> str:
        if len(self.parts) == 2:
            return "double"
        a, b = self.parts[0]
        if a is None and b is None:
            return "line"
        if a is None:
            return "half-left"
        if b is None:
            return "half-right"
        return "interval"

    @property
    def inf(self) -> End:
        return self.parts[0][0]

    @property
    def sup(self) -> End:
        return self.parts[-1][1]

    @property
    def is_bounded(self) -> bool:
        return self.inf is not None and self.sup is not None

    def hull(self) -> "IndexElement":
        return IndexElement(((self.inf, self.sup),))

    def gap(self) -> Optional[tuple[Fraction, Fraction]]:
        if len(self.parts) == 2:
            return self.parts[0][1], self.parts[1][0]
        return None

    def sort_key(self):
        lo = (0, Fraction(0)) if self.inf is None else (1, self.inf)
        hi = (1, Fraction(0)) if self.sup is None else (0, self.sup)
        inner = tuple(x for p in self.parts for x in p if x is not None)
        return (lo, hi, len(self.parts), inner)

    def __lt__(self, other: "IndexElement") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        def fmt(a: End, b: End) -> str:
            return f"({'-inf' if a is None else a}, {'inf' if b is None else b})"
        return " u ".join(fmt(a, b) for a, b in self.parts)


def interval(a: RationalLike, b: RationalLike) -> IndexElement:
    return IndexElement(((Q(a), Q(b)),))


def double_interval(a: RationalLike, b: RationalLike, c: RationalLike, d: RationalLike) -> IndexElement:
    return IndexElement(((Q(a), Q(b)), (Q(c), Q(d))))


def half_left(b: RationalLike) -> IndexElement:
    """The half-line (-inf, b)."""
    return IndexElement(((None, Q(b)),))


def half_right(a: RationalLike) -> IndexElement:
    """The half-line (a, inf)."""
    return IndexElement(((Q(a), None),))


def _le_lo(a: End, b: End) -> bool:
    # lower ends: None is -inf
    return a is None or (b is not None and a <= b)


def _le_hi(a: End, b: End) -> bool:
    # upper ends: None is +inf
    return b is None or (a is not None and a <= b)


def _sep(b: End, c: End) -> bool:
    """An upper end b sits at or below a lower end c."""
    return b is not None and c is not None and b <= c


def leq(o1: IndexElement, o2: IndexElement) -> bool:
    return all(any(_le_lo(c, a) and _le_hi(b, d) for c, d in o2.parts) for a, b in o1.parts)


def disjoint(o1: IndexElement, o2: IndexElement) -> bool:
    return all(_sep(b, c) or _sep(d, a) for a, b in o1.parts for c, d in o2.parts)


def before(o1: IndexElement, o2: IndexElement) -> bool:
    return _sep(o1.sup, o2.inf)


def apply_inversion(o: IndexElement) -> IndexElement:
    parts = [(None if b is None else -b, None if a is None else -a) for a, b in reversed(o.parts)]
    return IndexElement(tuple(parts))


@dataclass(frozen=True)
class ComplementPiece:
    """One connected piece of a causal complement, clipped to a window.

    ``unbounded`` marks the pieces whose true extent runs off the window.
    """

    role: str  # "left", "gap" or "right"
    lo: Fraction
    hi: Fraction
    unbounded: bool

    @property
    def empty(self) -> bool:
        return not self.lo < self.hi

    def element(self) -> IndexElement:
        return interval(self.lo, self.hi)


def causal_complement(o: IndexElement, window: tuple[RationalLike, RationalLike]) -> list[ComplementPiece]:
    lo, hi = Q(window[0]), Q(window[1])
    if not o.is_bounded:
        raise PosetError("complements are taken for bounded elements")
    if o.inf < lo or o.sup > hi:
        raise PosetError(f"{o} is not inside the window")
    pieces = [ComplementPiece("left", lo, o.inf, True)]
    g = o.gap()
    if g is not None:
        pieces.append(ComplementPiece("gap", g[0], g[1], False))
    pieces.append(ComplementPiece("right", o.sup, hi, True))
    return pieces


class CausalPoset:
    """Grid elements of one kind inside a window, enumerated on first use."""

    def __init__(self, kind: str, window: tuple[RationalLike, RationalLike], step: RationalLike,
                 max_elements: Optional[int] = None):
        if kind not in KINDS:
            raise PosetError(f"unknown poset kind {kind!r}")
        lo, hi, h = Q(window[0]), Q(window[1]), Q(step)
        if not lo < hi or h <= 0:
            raise PosetError("need lo < hi and a positive step")
        n = (hi - lo) / h
        if n.denominator != 1 or n < 1:
            raise PosetError("the step must divide the window into whole cells")
        self.kind, self.lo, self.hi, self.step = kind, lo, hi, h
        self.cells = int(n)
        self.max_elements = max_elements
        if max_elements is not None and self.count > max_elements:
            raise TooManyElements(f"{kind} on [{lo}, {hi}] step {h} has {self.count} elements > {max_elements}")

    @property
    def window(self) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi

    @property
    def count(self) -> int:
        n = self.cells
        if self.kind == "I":
            return n * (n + 1) // 2
        if self.kind == "I2":
            return comb(n + 1, 4)
        if self.kind == "D":
            return n * (n + 1) // 2 + comb(n + 1, 4)
        return 2 * n

    def __len__(self) -> int:
        return self.count

    def node(self, k: int) -> Fraction:
        return self.lo + k * self.step

    def _on_grid(self, x: End) -> bool:
        if x is None or not self.lo <= x <= self.hi:
            return False
        return ((x - self.lo) / self.step).denominator == 1

    def __contains__(self, o: object) -> bool:
        if not isinstance(o, IndexElement):
            return False
        v = o.variant
        if self.kind == "J":
            if v == "half-left":
                return self._on_grid(o.sup) and o.sup > self.lo
            if v == "half-right":
                return self._on_grid(o.inf) and o.inf < self.hi
            return False
        allowed = {"I": ("interval",), "I2": ("double",), "D": ("interval", "double")}[self.kind]
        return v in allowed and all(self._on_grid(x) for p in o.parts for x in p)

    def _generate(self) -> Iterator[IndexElement]:
        nodes = [self.node(k) for k in range(self.cells + 1)]
        if self.kind in ("I", "D"):
            for a, b in combinations(nodes, 2):
                yield IndexElement(((a, b),))
        if self.kind in ("I2", "D"):
            for a, b, c, d in combinations(nodes, 4):
                yield IndexElement(((a, b), (c, d)))
        if self.kind == "J":
            for b in nodes[1:]:
                yield half_left(b)
            for a in nodes[:-1]:
                yield half_right(a)

    @cached_property
    def elements(self) -> tuple[IndexElement, ...]:
        return tuple(sorted(self._generate()))

    @cached_property
    def index(self) -> dict[IndexElement, int]:
        return {o: i for i, o in enumerate(self.elements)}

    def __iter__(self) -> Iterator[IndexElement]:
        return iter(self.elements)

    def extended(self, kind: Optional[str] = None, cells_right: int = 0) -> "CausalPoset":
        return CausalPoset(kind or self.kind, (self.lo, self.hi + cells_right * self.step), self.step)

    def is_symmetric(self) -> bool:
        return self.lo == -self.hi

    def __repr__(self) -> str:
        return f"CausalPoset({self.kind}, [{self.lo}, {self.hi}], step={self.step})"


def build_poset(kind: str, window: tuple[RationalLike, RationalLike], step: RationalLike,
                max_elements: Optional[int] = None) -> CausalPoset:
    return CausalPoset(kind, window, step, max_elements)


def up_set(o: IndexElement, poset: CausalPoset) -> list[IndexElement]:
    return [z for z in poset if leq(o, z)]


@dataclass(frozen=True)
class Sieve:
    left: tuple[IndexElement, ...]
    right: tuple[IndexElement, ...]
    other: tuple[IndexElement, ...]

    def all(self) -> set[IndexElement]:
        return set(self.left) | set(self.right) | set(self.other)


def disjoint_sieve(o: IndexElement, poset: CausalPoset) -> Sieve:
    if o not in poset:
        raise ElementNotInPoset(str(o))
    left, right, other = [], [], []
    for x in poset:
        if not disjoint(x, o):
            continue
        if before(x, o):
            left.append(x)
        elif before(o, x):
            right.append(x)
        else:
            other.append(x)
    return Sieve(tuple(left), tuple(right), tuple(other))


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry, key=repr)] = min(rx, ry, key=repr)

    def groups(self, items) -> list[list]:
        out: dict = {}
        for x in items:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


# Upper bounds of a finite window are searched a few cells past its right end,
# standing in for the unbounded line the families really live on.
DEFAULT_HALO = 2


def _halo(poset: CausalPoset, kind: Optional[str], halo_cells: int) -> CausalPoset:
    return poset.extended(kind, halo_cells) if (halo_cells or kind) else poset


def is_directed(poset: CausalPoset, halo_cells: int = DEFAULT_HALO) -> bool:
    """Every pair of elements has an upper bound of the same kind."""
    bounds = _halo(poset, None, halo_cells).elements
    els = poset.elements
    for i, x in enumerate(els):
        for y in els[i + 1:]:
            if not any(leq(x, z) and leq(y, z) for z in bounds):
                return False
    return True


def is_connected(poset: CausalPoset, halo_cells: int = DEFAULT_HALO) -> bool:
    """Elements sharing a common upper bound are joined; one class means connected."""
    uf = _UnionFind()
    els = poset.elements
    for x in els:
        uf.find(x)
    for z in _halo(poset, None, halo_cells):
        below = [x for x in els if leq(x, z)]
        for x in below[1:]:
            uf.union(below[0], x)
    return len(uf.groups(els)) <= 1


def is_cofinal(sub: CausalPoset, sup: CausalPoset, halo_cells: int = DEFAULT_HALO) -> bool:
    """Every element of ``sup`` lies inside some element of ``sub``."""
    covers = CausalPoset(sub.kind, (sub.lo, sub.hi + halo_cells * sub.step), sub.step).elements
    return all(any(leq(x, z) for z in covers) for x in sup)


@dataclass(frozen=True)
class BotGraph:
    component_count: int
    less: tuple[tuple[IndexElement, IndexElement], ...]
    greater: tuple[tuple[IndexElement, IndexElement], ...]
    interleaved: tuple[tuple[IndexElement, IndexElement], ...]
    components: tuple[frozenset, ...]

    @property
    def oriented_split_is_components(self) -> bool:
        """True when the components are exactly the two oriented halves."""
        want = {frozenset(self.less), frozenset(self.greater)} - {frozenset()}
        return set(self.components) == want


def bot_graph(poset: CausalPoset) -> BotGraph:
    """Connected components of the disjoint pairs under the product order.

    Moving from (x, y) to a larger pair one coordinate at a time stays inside
    the graph, so joining each pair to its one-coordinate enlargements already
    recovers every comparability class.
    """
    els = poset.elements
    up = {x: [z for z in els if z != x and leq(x, z)] for x in els}
    pairs = [(x, y) for x in els for y in els if disjoint(x, y)]
    uf = _UnionFind()
    for x, y in pairs:
        uf.find((x, y))
        for z in up[x]:
            if disjoint(z, y):
                uf.union((x, y), (z, y))
        for z in up[y]:
            if disjoint(x, z):
                uf.union((x, y), (x, z))
    less = tuple(p for p in pairs if before(p[0], p[1]))
    greater = tuple(p for p in pairs if before(p[1], p[0]))
    inter = tuple(p for p in pairs if not before(p[0], p[1]) and not before(p[1], p[0]))
    comps = tuple(frozenset(g) for g in uf.groups(pairs))
    return BotGraph(len(comps), less, greater, inter, comps)


def flip_check(poset: CausalPoset) -> bool:
    """Space inversion maps the poset to itself and swaps the oriented pairs."""
    if not poset.is_symmetric():
        raise WindowNotSymmetric(f"window [{poset.lo}, {poset.hi}] is not symmetric about 0")
    for x in poset:
        if apply_inversion(x) not in poset:
            return False
    for x in poset:
        sx = apply_inversion(x)
        for y in poset:
            if not disjoint(x, y):
                continue
            sy = apply_inversion(y)
            if before(x, y) != before(sy, sx) or before(y, x) != before(sx, sy):
                return False
    return True
