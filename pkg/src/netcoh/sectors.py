"""Charged representatives, transporters, braiding phases and the sector
tables of the subnets."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .nets import TAG_CONSTRAINTS, CHARGE_ZERO, AmbientSpace, NetSpec, additive_extension, dual, materialize
from .piecewise import (
    ChargePair,
    PiecewiseLinear,
    Q,
    RationalLike,
    SpaceTag,
    TestPair,
    charges,
    closed_union_contains,
    localization,
    ramp,
    symplectic_form,
    tent,
)
from .poset import build_poset, double_interval
from .weyl import IntervalTooSmall, WeylError, _interval_ends

RIGHT_TAIL_ZERO = "rightTailZero"
LEFT_TAIL_ZERO = "leftTailZero"


class NotOrdered(WeylError):
    pass


@dataclass(frozen=True)
class SectorRep:
    charge: ChargePair
    interval: tuple[Fraction, Fraction]
    representative: TestPair
    convention: str


def canonical_representative(charge: ChargePair, I, convention: str = RIGHT_TAIL_ZERO,
                             step: Optional[RationalLike] = None, apex: Optional[RationalLike] = None) -> SectorRep:
    """Tent of integral c and a field ramp of height q, both inside I.

    With a grid step the tent apex is snapped to a node; ``apex`` overrides it.
    """
    a, b = _interval_ends(I)
    if step is not None:
        h = Q(step)
        if (b - a) / h < 2 or ((b - a) / h).denominator != 1:
            raise IntervalTooSmall(f"({a}, {b}) needs at least two grid cells of {h}")
        mid_cells = ((b - a) / h / 2).__floor__()
        top = a + mid_cells * h if apex is None else Q(apex)
    else:
        if not a < b:
            raise IntervalTooSmall("empty interval")
        top = (a + b) / 2 if apex is None else Q(apex)
    f0 = tent(a, b, 2 * charge.c / (b - a), top) if charge.c else PiecewiseLinear.constant(0)
    if not charge.q:
        f1 = PiecewiseLinear.constant(0)
    elif convention == RIGHT_TAIL_ZERO:
        f1 = ramp(a, b, -charge.q, 0)
    elif convention == LEFT_TAIL_ZERO:
        f1 = ramp(a, b, 0, charge.q)
    else:
        raise WeylError(f"unknown convention {convention!r}")
    return SectorRep(charge, (a, b), TestPair(f0, f1), convention)


def rep_from_pair(F: TestPair) -> SectorRep:
    """Wrap an arbitrary pair; its localization hull becomes the interval."""
    loc = localization(F)
    ch, left, right = charges(F)
    conv = RIGHT_TAIL_ZERO if right == 0 else LEFT_TAIL_ZERO if left == 0 else "mixed"
    span = (loc[0][0], loc[-1][1]) if loc else (Fraction(0), Fraction(0))
    return SectorRep(ch, span, F, conv)


@dataclass(frozen=True)
class BraidResult:
    exponent: Fraction
    charge_term: Fraction
    commutator_term: Fraction


def braiding_phase(rho: SectorRep, tau: SectorRep) -> BraidResult:
    """Exponent of the statistics operator for rho localized left of tau."""
    lr, lt = localization(rho.representative), localization(tau.representative)
    if lr and lt and not lr[-1][1] <= lt[0][0]:
        raise NotOrdered("rho must be localized left of tau")
    cr, ct = charges(rho.representative)[0], charges(tau.representative)[0]
    charge_term = -(cr.c * ct.q + cr.q * ct.c)
    comm = -symplectic_form(tau.representative, rho.representative)
    return BraidResult(charge_term + comm, charge_term, comm)


def _canonical_pair(left: ChargePair, right: ChargePair) -> tuple[SectorRep, SectorRep]:
    return (canonical_representative(left, (0, 2), RIGHT_TAIL_ZERO, 1),
            canonical_representative(right, (4, 6), LEFT_TAIL_ZERO, 1))


def monodromy(rho: ChargePair, tau: ChargePair) -> Fraction:
    """Sum of the braiding exponents for both orderings."""
    r, t = _canonical_pair(rho, tau)
    t2, r2 = _canonical_pair(tau, rho)
    return braiding_phase(r, t).exponent + braiding_phase(t2, r2).exponent


def is_symmetric_pair(rho: ChargePair, tau: ChargePair) -> bool:
    return monodromy(rho, tau) == 0


@dataclass(frozen=True)
class TransporterReport:
    total_charge: ChargePair
    in_dual: bool
    in_additive_extension: bool


DESK_AMBIENT = ((-8, 8), Fraction(1, 4))


def transporter(charge: ChargePair, I1, I2, ambient: Optional[AmbientSpace] = None,
                convention: str = RIGHT_TAIL_ZERO) -> tuple[TestPair, TransporterReport]:
    a1, b1 = _interval_ends(I1)
    a2, b2 = _interval_ends(I2)
    if not b1 < a2:
        raise NotOrdered("I1 must lie before I2 with a gap")
    amb = ambient or AmbientSpace(*DESK_AMBIENT)
    h = amb.step
    F1 = canonical_representative(charge, (a1, b1), convention, h).representative
    F2 = canonical_representative(charge, (a2, b2), convention, h).representative
    T = (F1 - F2).simplified()
    E = double_interval(a1, b1, a2, b2)
    spec = NetSpec(SpaceTag.Va, build_poset("D", amb.window, amb.step), amb)
    rep = TransporterReport(charges(T)[0], dual(spec, E).contains(T), additive_extension(spec, E).contains(T))
    return T, rep


@dataclass(frozen=True)
class ActionProfile:
    coef_c: Fraction
    coef_tail: Fraction
    trivial: bool


def _side_ranges(tag: SpaceTag, side: str) -> tuple[bool, bool]:
    """Whether C_G and the relevant tail of G may be nonzero for G on that side."""
    c_free = CHARGE_ZERO not in TAG_CONSTRAINTS[tag]
    if tag in (SpaceTag.Va, SpaceTag.Vf0):
        tail_free = False
    elif tag is SpaceTag.Vfl:
        tail_free = side == "right"   # the relevant tail of a left-lying G is its right tail
    elif tag is SpaceTag.Vfr:
        tail_free = side == "left"
    else:
        tail_free = True
    return c_free, tail_free


def action_functional(F: TestPair, tag: SpaceTag, side: str) -> ActionProfile:
    """sigma(F, G) = coef_tail * (tail of G facing F) + coef_c * C_G for G beyond loc F on ``side``."""
    ch, left, right = charges(F)
    if side == "left":
        coef_c, coef_tail = -left, ch.c
    elif side == "right":
        coef_c, coef_tail = -right, ch.c
    else:
        raise WeylError(f"side must be 'left' or 'right', got {side!r}")
    c_free, tail_free = _side_ranges(tag, side)
    trivial = (coef_c == 0 or not c_free) and (coef_tail == 0 or not tail_free)
    return ActionProfile(coef_c, coef_tail, trivial)


def _effective(p: ActionProfile, tag: SpaceTag, side: str) -> tuple[Fraction, Fraction]:
    c_free, tail_free = _side_ranges(tag, side)
    return (p.coef_c if c_free else Fraction(0), p.coef_tail if tail_free else Fraction(0))


NET_TAGS = {"A": SpaceTag.Va, "B": SpaceTag.Vb, "C": SpaceTag.Vc, "E": SpaceTag.Ve,
            "Q": SpaceTag.Vq, "F0": SpaceTag.Vf0}


@dataclass(frozen=True)
class SectorGroup:
    net: str
    labels: tuple[str, ...]   # subset of ("C", "Q")
    kind: str                 # "DHR" or "solitonic"
    samples: tuple[ChargePair, ...]


def _internal_charges(tag: SpaceTag) -> tuple[bool, bool]:
    """Whether local elements of the tag already carry nonzero c, resp. q."""
    cons = TAG_CONSTRAINTS[tag]
    c_inner = CHARGE_ZERO not in cons
    q_inner = tag in (SpaceTag.Ve, SpaceTag.Vq, SpaceTag.Vf, SpaceTag.Vfl, SpaceTag.Vfr)
    return c_inner, q_inner


def sector_group(net: str) -> SectorGroup:
    """Charges modulo those carried locally, and how they act on the two complement sides.

    A label acting by the same functional on both sides is read as DHR; one
    acting differently on the two sides is solitonic.
    """
    tag = NET_TAGS[net]
    c_inner, q_inner = _internal_charges(tag)
    labels = tuple(x for x, inner in (("C", c_inner), ("Q", q_inner)) if not inner)
    samples = []
    if "C" in labels:
        samples.append(ChargePair(Fraction(1), Fraction(0)))
    if "Q" in labels:
        samples.append(ChargePair(Fraction(0), Fraction(1)))
    kind = "DHR"
    for ch in samples:
        for conv in (RIGHT_TAIL_ZERO, LEFT_TAIL_ZERO):
            F = canonical_representative(ch, (0, 2), conv, 1).representative
            left = _effective(action_functional(F, tag, "left"), tag, "left")
            right = _effective(action_functional(F, tag, "right"), tag, "right")
            if left != right:
                kind = "solitonic"
    return SectorGroup(net, labels, kind, tuple(samples))


def local_charge(F: TestPair, lo: Fraction, hi: Fraction) -> ChargePair:
    """Charge F carries on the closed stretch [lo, hi]."""
    xs = sorted({lo, hi} | {x for x in F.f0.breakpoints if lo < x < hi})
    c = sum(((x1 - x0) * (F.f0(x0) + F.f0(x1)) / 2 for x0, x1 in zip(xs, xs[1:])), Fraction(0))
    return ChargePair(c, F.f1(hi) - F.f1(lo))


def fits_in(F: TestPair, region) -> bool:
    return closed_union_contains(list(region), localization(F))
