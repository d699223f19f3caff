"""Heisenberg phase group over test pairs, grading generators, and the
reflection and Moebius symmetries of intervals and double intervals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .piecewise import (
    AffineIsometry,
    Q,
    RationalLike,
    TestPair,
    charges,
    closed_union_contains,
    localization,
    pullback_isometry,
    ramp,
    symplectic_form,
)
from .poset import IndexElement, PosetError


class WeylError(ValueError):
    pass


class IntervalTooSmall(WeylError):
    pass


class SideMismatch(WeylError):
    pass


class PoleHit(WeylError):
    pass


@dataclass(frozen=True)
class WeylElement:
    """e^{i theta} W(F)."""

    F: TestPair
    theta: Fraction = Fraction(0)

    def same_as(self, other: "WeylElement") -> bool:
        return self.theta == other.theta and self.F.same_as(other.F)


IDENTITY = WeylElement(TestPair(), Fraction(0))


def W(F: TestPair, theta: RationalLike = 0) -> WeylElement:
    return WeylElement(F, Q(theta))


def weyl_mul(w1: WeylElement, w2: WeylElement) -> WeylElement:
    return WeylElement((w1.F + w2.F).simplified(), w1.theta + w2.theta - symplectic_form(w1.F, w2.F) / 2)


def weyl_inverse(w: WeylElement) -> WeylElement:
    return WeylElement(-w.F, -w.theta)


def commutator_exponent(F: TestPair, G: TestPair) -> Fraction:
    """Phase of W(F) W(G) W(F)^-1 W(G)^-1, multiplied out."""
    a, b = W(F), W(G)
    prod = weyl_mul(weyl_mul(weyl_mul(a, b), weyl_inverse(a)), weyl_inverse(b))
    if not prod.F.is_zero() and not prod.F.simplified().is_zero():
        raise WeylError("commutator did not collapse to a phase")
    return prod.theta


def adjoint_phase(F: TestPair, G: TestPair) -> Fraction:
    return symplectic_form(F, G)


def _interval_ends(I) -> tuple[Fraction, Fraction]:
    if isinstance(I, IndexElement):
        if I.variant != "interval":
            raise WeylError(f"{I} is not a bounded interval")
        (a, b), = I.parts
        return a, b  # type: ignore[return-value]
    a, b = I
    return Q(a), Q(b)


@dataclass(frozen=True)
class GradingRep:
    side: str  # "l", "r" or "global"
    base: tuple[Fraction, Fraction]
    F: TestPair

    def at(self, n: RationalLike) -> TestPair:
        return self.F.scaled(n)


def partition_of_unity(I, step: RationalLike | None = None) -> tuple[TestPair, TestPair]:
    """Two fields summing to 1, each switching between 0 and 1 inside I."""
    a, b = _interval_ends(I)
    if not a < b or (step is not None and b - a < Q(step)):
        raise IntervalTooSmall(f"({a}, {b}) holds no grid cell")
    return TestPair(f1=ramp(a, b, 1, 0)), TestPair(f1=ramp(a, b, 0, 1))


def grading_rep(side: str, I, step: RationalLike | None = None) -> GradingRep:
    a, b = _interval_ends(I)
    if side == "global":
        from .piecewise import PiecewiseLinear
        return GradingRep("global", (a, b), TestPair(f1=PiecewiseLinear.constant(1)))
    Fl, Fr = partition_of_unity((a, b), step)
    if side == "l":
        return GradingRep("l", (a, b), Fl)
    if side == "r":
        return GradingRep("r", (a, b), Fr)
    raise WeylError(f"unknown side {side!r}")


def rep_ambiguity(V1: GradingRep, V2: GradingRep, n: RationalLike) -> TestPair:
    """n(F1 - F2): the local perturbation relating two grading representatives."""
    if V1.side != V2.side:
        raise SideMismatch(f"{V1.side} vs {V2.side}")
    diff = (V1.at(n) - V2.at(n)).simplified()
    hull = (min(V1.base[0], V2.base[0]), max(V1.base[1], V2.base[1]))
    _, left, right = charges(diff)
    if left != 0 or right != 0 or not closed_union_contains([hull], localization(diff)):
        raise WeylError("representatives differ by more than a local perturbation")
    return diff


def xi_interval(I) -> AffineIsometry:
    a, b = _interval_ends(I)
    return AffineIsometry(-1, a + b)


def xi_apply(I, F: TestPair) -> TestPair:
    return pullback_isometry(F, xi_interval(I))


@dataclass(frozen=True)
class MobiusMap:
    """x -> (m00 x + m01) / (m10 x + m11), scaled so the first nonzero entry is 1."""

    m: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    def __post_init__(self):
        (a, b), (c, d) = self.m
        if a * d - b * c == 0:
            raise WeylError("singular Moebius matrix")

    @classmethod
    def of(cls, a, b, c, d) -> "MobiusMap":
        a, b, c, d = (Q(x) for x in (a, b, c, d))
        first = next(x for x in (a, b, c, d) if x != 0)
        s = 1 / first
        return cls(((a * s, b * s), (c * s, d * s)))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls.of(1, 0, 0, 1)

    @classmethod
    def affine(cls, m: AffineIsometry) -> "MobiusMap":
        return cls.of(m.eps, m.shift, 0, 1)

    @property
    def det(self) -> Fraction:
        (a, b), (c, d) = self.m
        return a * d - b * c

    @property
    def orientation(self) -> int:
        return 1 if self.det > 0 else -1

    @property
    def pole(self) -> Fraction | None:
        (_, _), (c, d) = self.m
        return None if c == 0 else -d / c

    def abc(self) -> tuple[Fraction, Fraction, Fraction]:
        """(a, b, c) of the form (a x + b) / (x + c); needs a nonzero lower-left entry."""
        (a, b), (c, d) = self.m
        if c == 0:
            raise WeylError("map is affine")
        return a / c, b / c, d / c

    def is_identity(self) -> bool:
        return self == MobiusMap.identity()

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other."""
        (a, b), (c, d) = self.m
        (e, f), (g, h) = other.m
        return MobiusMap.of(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def proportional(self, other: "MobiusMap") -> bool:
        (a, b), (c, d) = self.m
        (e, f), (g, h) = other.m
        return all(x * y2 == y * x2 for (x, y), (x2, y2) in
                   [((a, e), (b, f)), ((a, e), (c, g)), ((a, e), (d, h)), ((b, f), (c, g)), ((b, f), (d, h)), ((c, g), (d, h))])


def mobius_from_double_interval(E: Union[IndexElement, tuple]) -> MobiusMap:
    if isinstance(E, IndexElement):
        if E.variant != "double":
            raise PosetError(f"{E} is not a double interval")
        (al, be), (ga, de) = E.parts
    else:
        al, be, ga, de = (Q(x) for x in E)
    if not al < be < ga < de:
        raise WeylError("need alpha < beta < gamma < delta")
    if de - ga == be - al:
        return MobiusMap.identity()
    c = (al * de - be * ga) / ((de - ga) - (be - al)) - (al + de)
    a = c + al + de
    b = -al * de
    return MobiusMap.of(a, b, 1, c)


def xi_double_interval(E: IndexElement) -> MobiusMap:
    """g composed with x -> -x + alpha + delta."""
    g = mobius_from_double_interval(E)
    return g.compose(MobiusMap.affine(AffineIsometry(-1, E.inf + E.sup)))


def mobius_apply_endpoint(m: MobiusMap, x: RationalLike) -> Fraction:
    x = Q(x)
    (a, b), (c, d) = m.m
    den = c * x + d
    if den == 0:
        raise PoleHit(f"{x} is the pole")
    return (a * x + b) / den


def mobius_apply_element(m: MobiusMap, o: IndexElement) -> IndexElement:
    if not o.is_bounded:
        raise WeylError("only bounded elements are mapped")
    p = m.pole
    if p is not None and any(lo <= p <= hi for lo, hi in o.parts):
        raise PoleHit(f"pole {p} lies in the closure of {o}")
    parts = []
    for lo, hi in o.parts:
        u, v = mobius_apply_endpoint(m, lo), mobius_apply_endpoint(m, hi)
        parts.append((min(u, v), max(u, v)))
    parts.sort()
    try:
        return IndexElement(tuple(parts))
    except PosetError as e:
        raise WeylError(f"image of {o} is not an element: {e}") from e
