"""Exact piecewise-linear test data on the real line.

A function is stored by its breakpoints and values and extended by constants
beyond the outermost breakpoints.  Everything is a ``Fraction``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, str, Fraction]


class PiecewiseError(ValueError):
    pass


class BothTailsNonzero(PiecewiseError):
    """Neither factor of a product integral vanishes at infinity."""


class UnsupportedMap(PiecewiseError):
    pass


def Q(x: RationalLike) -> Fraction:
    """Coerce ints, ``"p/q"`` strings and Fractions; floats are refused."""
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass a Fraction or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True)
class PiecewiseLinear:
    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.breakpoints) == 0 or len(self.breakpoints) != len(self.values):
            raise PiecewiseError("need matching non-empty breakpoints and values")
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if not a < b:
                raise PiecewiseError("breakpoints must be strictly increasing")

    @classmethod
    def from_points(cls, points: Iterable[tuple[RationalLike, RationalLike]]) -> "PiecewiseLinear":
        pts = [(Q(x), Q(y)) for x, y in points]
        return cls(tuple(x for x, _ in pts), tuple(y for _, y in pts))

    @classmethod
    def constant(cls, c: RationalLike = 0) -> "PiecewiseLinear":
        return cls((Fraction(0),), (Q(c),))

    @property
    def left_tail(self) -> Fraction:
        return self.values[0]

    @property
    def right_tail(self) -> Fraction:
        return self.values[-1]

    @property
    def is_compact(self) -> bool:
        return self.values[0] == 0 and self.values[-1] == 0

    def __call__(self, x: RationalLike) -> Fraction:
        x = Q(x)
        xs, ys = self.breakpoints, self.values
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        lo, hi = 0, len(xs) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if xs[mid] <= x:
                lo = mid
            else:
                hi = mid
        x0, x1 = xs[lo], xs[hi]
        return ys[lo] + (ys[hi] - ys[lo]) * (x - x0) / (x1 - x0)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def is_constant(self) -> bool:
        return all(v == self.values[0] for v in self.values)

    def simplified(self) -> "PiecewiseLinear":
        """Drop breakpoints where the slope does not change."""
        xs, ys = list(self.breakpoints), list(self.values)
        keep = [0]
        for i in range(1, len(xs) - 1):
            a, b = keep[-1], i + 1
            lhs = (ys[i] - ys[a]) * (xs[b] - xs[a])
            rhs = (ys[b] - ys[a]) * (xs[i] - xs[a])
            if lhs != rhs:
                keep.append(i)
        if len(xs) > 1:
            keep.append(len(xs) - 1)
        # collapse a constant function to a single point
        if all(ys[k] == ys[0] for k in keep):
            keep = [0]
        # an end point on a flat stretch only repeats the tail
        while len(keep) > 1 and ys[keep[0]] == ys[keep[1]]:
            keep.pop(0)
        while len(keep) > 1 and ys[keep[-1]] == ys[keep[-2]]:
            keep.pop()
        return PiecewiseLinear(tuple(xs[k] for k in keep), tuple(ys[k] for k in keep))

    def same_function(self, other: "PiecewiseLinear") -> bool:
        grid = merge_breakpoints(self, other)
        return sample_sorted(self, grid) == sample_sorted(other, grid)

    def __neg__(self) -> "PiecewiseLinear":
        return PiecewiseLinear(self.breakpoints, tuple(-v for v in self.values))

    def __add__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        return pl_combine(1, self, 1, other)

    def __sub__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        return pl_combine(1, self, -1, other)

    def scaled(self, a: RationalLike) -> "PiecewiseLinear":
        a = Q(a)
        return PiecewiseLinear(self.breakpoints, tuple(a * v for v in self.values))

    def integral(self) -> Fraction:
        if not self.is_compact:
            raise PiecewiseError("integral of a function with nonzero tails")
        xs, ys = self.breakpoints, self.values
        return sum(((xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]) / 2 for i in range(len(xs) - 1)), Fraction(0))


ZERO = PiecewiseLinear.constant(0)


def merge_breakpoints(*fs: PiecewiseLinear) -> list[Fraction]:
    return sorted(set().union(*(f.breakpoints for f in fs)))


def sample_sorted(f: PiecewiseLinear, xs: Sequence[Fraction]) -> list[Fraction]:
    """f at each point of an ascending sequence, in one sweep."""
    bx, by = f.breakpoints, f.values
    out, j, n = [], 0, len(bx)
    for x in xs:
        while j < n and bx[j] <= x:
            j += 1
        if j == 0:
            out.append(by[0])
        elif j == n:
            out.append(by[-1])
        else:
            x0, x1 = bx[j - 1], bx[j]
            out.append(by[j - 1] + (by[j] - by[j - 1]) * (x - x0) / (x1 - x0))
    return out


def pl_combine(a: RationalLike, f: PiecewiseLinear, b: RationalLike, g: PiecewiseLinear) -> PiecewiseLinear:
    a, b = Q(a), Q(b)
    xs = merge_breakpoints(f, g)
    fv, gv = sample_sorted(f, xs), sample_sorted(g, xs)
    return PiecewiseLinear(tuple(xs), tuple(a * u + b * v for u, v in zip(fv, gv)))


def pl_product_integral(f: PiecewiseLinear, g: PiecewiseLinear) -> Fraction:
    """Exact integral of f*g; one factor must vanish at both ends."""
    if not (f.is_compact or g.is_compact):
        raise BothTailsNonzero("product integral needs one compactly supported factor")
    c = f if f.is_compact else g
    lo, hi = c.breakpoints[0], c.breakpoints[-1]
    xs = [x for x in merge_breakpoints(f, g) if lo <= x <= hi]
    fv, gv = sample_sorted(f, xs), sample_sorted(g, xs)
    total = Fraction(0)
    for i in range(len(xs) - 1):
        fa, fb, ga, gb = fv[i], fv[i + 1], gv[i], gv[i + 1]
        total += (xs[i + 1] - xs[i]) * (2 * fa * ga + fa * gb + fb * ga + 2 * fb * gb)
    return total / 6


def tent(a: RationalLike, b: RationalLike, peak: RationalLike = 1, apex: RationalLike | None = None) -> PiecewiseLinear:
    a, b = Q(a), Q(b)
    m = (a + b) / 2 if apex is None else Q(apex)
    if not a < m < b:
        raise PiecewiseError("apex must lie strictly inside the base")
    return PiecewiseLinear((a, m, b), (Fraction(0), Q(peak), Fraction(0)))


def ramp(a: RationalLike, b: RationalLike, start: RationalLike = 0, end: RationalLike = 1) -> PiecewiseLinear:
    """Constant ``start`` left of a, linear on [a, b], constant ``end`` right of b."""
    a, b = Q(a), Q(b)
    if not a < b:
        raise PiecewiseError("ramp needs a < b")
    return PiecewiseLinear((a, b), (Q(start), Q(end)))


@dataclass(frozen=True)
class TestPair:
    """f0 is the compactly supported density, f1 the field with constant tails."""

    __test__ = False  # keep pytest from collecting this class

    f0: PiecewiseLinear = ZERO
    f1: PiecewiseLinear = ZERO

    def __post_init__(self):
        if not self.f0.is_compact:
            raise PiecewiseError("f0 must vanish at both ends")

    def __add__(self, other: "TestPair") -> "TestPair":
        return TestPair(self.f0 + other.f0, self.f1 + other.f1)

    def __sub__(self, other: "TestPair") -> "TestPair":
        return TestPair(self.f0 - other.f0, self.f1 - other.f1)

    def __neg__(self) -> "TestPair":
        return TestPair(-self.f0, -self.f1)

    def scaled(self, a: RationalLike) -> "TestPair":
        return TestPair(self.f0.scaled(a), self.f1.scaled(a))

    def is_zero(self) -> bool:
        return self.f0.is_zero() and self.f1.is_zero()

    def same_as(self, other: "TestPair") -> bool:
        return self.f0.same_function(other.f0) and self.f1.same_function(other.f1)

    def simplified(self) -> "TestPair":
        return TestPair(self.f0.simplified(), self.f1.simplified())


def pair_combine(a: RationalLike, F: TestPair, b: RationalLike, G: TestPair) -> TestPair:
    return TestPair(pl_combine(a, F.f0, b, G.f0), pl_combine(a, F.f1, b, G.f1))


def symplectic_form(F: TestPair, G: TestPair) -> Fraction:
    return pl_product_integral(F.f0, G.f1) - pl_product_integral(F.f1, G.f0)


def _merge_closed(segments: Sequence[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[list[Fraction]] = []
    for a, b in sorted(segments):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def localization(F: TestPair) -> list[tuple[Fraction, Fraction]]:
    """Closed intervals outside of which f0 vanishes and f1 is locally constant."""
    xs = merge_breakpoints(F.f0, F.f1)
    active = []
    for x0, x1 in zip(xs, xs[1:]):
        if F.f0(x0) != 0 or F.f0(x1) != 0 or F.f1(x0) != F.f1(x1):
            active.append((x0, x1))
    return _merge_closed(active)


def closed_union_contains(outer: Sequence[tuple[Fraction, Fraction]], inner: Sequence[tuple[Fraction, Fraction]]) -> bool:
    merged = _merge_closed(outer)
    return all(any(a <= c and d <= b for a, b in merged) for c, d in inner)


@dataclass(frozen=True)
class ChargePair:
    c: Fraction
    q: Fraction

    def __add__(self, other: "ChargePair") -> "ChargePair":
        return ChargePair(self.c + other.c, self.q + other.q)

    def __neg__(self) -> "ChargePair":
        return ChargePair(-self.c, -self.q)

    def scaled(self, n: RationalLike) -> "ChargePair":
        n = Q(n)
        return ChargePair(n * self.c, n * self.q)

    @property
    def is_zero(self) -> bool:
        return self.c == 0 and self.q == 0

    @classmethod
    def of(cls, c: RationalLike, q: RationalLike) -> "ChargePair":
        return cls(Q(c), Q(q))


def charges(F: TestPair) -> tuple[ChargePair, Fraction, Fraction]:
    left, right = F.f1.left_tail, F.f1.right_tail
    return ChargePair(F.f0.integral(), right - left), left, right


class SpaceTag(enum.Enum):
    Va = "Va"
    Vb = "Vb"
    Vc = "Vc"
    Vq = "Vq"
    Ve = "Ve"
    Vf = "Vf"
    Vfl = "Vfl"
    Vfr = "Vfr"
    Vf0 = "Vf0"


def tag_condition(tag: SpaceTag, c: Fraction, left: Fraction, right: Fraction) -> bool:
    if tag is SpaceTag.Va:
        return c == 0 and left == 0 and right == 0
    if tag is SpaceTag.Vb:
        return c == 0 and left == right
    if tag is SpaceTag.Vc:
        return left == right
    if tag is SpaceTag.Vq:
        return c == 0 and left == -right
    if tag is SpaceTag.Ve:
        return c == 0
    if tag is SpaceTag.Vf:
        return True
    if tag is SpaceTag.Vfl:
        return right == 0
    if tag is SpaceTag.Vfr:
        return left == 0
    return left == 0 and right == 0  # Vf0


def space_member(F: TestPair, tag: SpaceTag) -> bool:
    (ch, left, right) = charges(F)
    return tag_condition(tag, ch.c, left, right)


@dataclass(frozen=True)
class AffineIsometry:
    """x -> eps*x + shift with eps = +1 or -1."""

    eps: int
    shift: Fraction

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise UnsupportedMap(f"scale {self.eps} is not an isometry")

    def __call__(self, x: RationalLike) -> Fraction:
        return self.eps * Q(x) + self.shift

    def inverse(self) -> "AffineIsometry":
        return AffineIsometry(self.eps, -self.eps * self.shift)

    @classmethod
    def translation(cls, t: RationalLike) -> "AffineIsometry":
        return cls(1, Q(t))

    @classmethod
    def reflection(cls, center: RationalLike) -> "AffineIsometry":
        return cls(-1, 2 * Q(center))


def _pull_pl(f: PiecewiseLinear, m: AffineIsometry) -> PiecewiseLinear:
    pts = sorted((m(x), y) for x, y in zip(f.breakpoints, f.values))
    return PiecewiseLinear(tuple(x for x, _ in pts), tuple(y for _, y in pts))


def pullback_isometry(F: TestPair, m: AffineIsometry | tuple[RationalLike, RationalLike]) -> TestPair:
    """Transport F along m, i.e. the components become f o m^-1."""
    if not isinstance(m, AffineIsometry):
        eps, shift = m
        eps = Q(eps)
        if eps not in (1, -1):
            raise UnsupportedMap(f"scale {eps} is not an isometry")
        m = AffineIsometry(int(eps), Q(shift))
    return TestPair(_pull_pl(F.f0, m), _pull_pl(F.f1, m))
