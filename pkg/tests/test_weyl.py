from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from netcoh.nets import AmbientSpace, SymplecticSubspace, local_space
from netcoh.piecewise import PiecewiseLinear, SpaceTag, TestPair, charges, localization, ramp, tent
from netcoh.poset import double_interval, interval
from netcoh.weyl import (
    IDENTITY,
    IntervalTooSmall,
    MobiusMap,
    PoleHit,
    SideMismatch,
    W,
    adjoint_phase,
    commutator_exponent,
    grading_rep,
    mobius_apply_element,
    mobius_apply_endpoint,
    mobius_from_double_interval,
    partition_of_unity,
    rep_ambiguity,
    weyl_inverse,
    weyl_mul,
    xi_apply,
    xi_double_interval,
    xi_interval,
)
from netcoh.piecewise import symplectic_form

from .strategies import pairs, rationals

ONE = TestPair(f1=PiecewiseLinear.constant(1))


@given(pairs(), pairs(), pairs(), rationals, rationals)
def test_group_laws(A, B, C, s, t):
    a, b, c = W(A, s), W(B, t), W(C)
    assert weyl_mul(weyl_mul(a, b), c).same_as(weyl_mul(a, weyl_mul(b, c)))
    assert weyl_mul(a, weyl_inverse(a)).same_as(IDENTITY)
    assert weyl_mul(IDENTITY, a).same_as(a)


@given(pairs(), pairs())
def test_commutator_is_minus_sigma(A, B):
    # expanded by hand: the four products leave -sigma(F, G)
    assert commutator_exponent(A, B) == -symplectic_form(A, B)
    ab, ba = weyl_mul(W(A), W(B)), weyl_mul(W(B), W(A))
    assert ab.theta - ba.theta == -symplectic_form(A, B)


def test_disjoint_va_elements_commute():
    A = TestPair(tent(0, 1) - tent(0, 1, 1, Fraction(1, 4)))
    B = TestPair(tent(2, 3) - tent(2, 3, 1, Fraction(11, 4)))
    assert commutator_exponent(A, B) == 0


def test_adjoint_phase_examples():
    F = TestPair(tent(0, 2))
    assert adjoint_phase(F, F) == 0
    assert adjoint_phase(F, TestPair(f1=ramp(4, 5))) == 0
    assert adjoint_phase(F, TestPair(f1=ramp(-5, -4))) == 1


def test_partition_of_unity_examples():
    Fl, Fr = partition_of_unity((0, 1))
    assert charges(Fl)[1:] == (1, 0) and charges(Fr)[1:] == (0, 1)
    assert (Fl + Fr).same_as(ONE)
    assert localization(Fl) == [(0, 1)]
    with pytest.raises(IntervalTooSmall):
        partition_of_unity((0, Fraction(1, 4)), Fraction(1, 2))


@given(st.integers(-4, 4), st.integers(1, 4), st.integers(-3, 3), pairs())
def test_grading_contract(a, length, n, G):
    I = (Fraction(a), Fraction(a + length))
    Fl, _ = partition_of_unity(I)
    _, left, right = charges(G)
    loc = localization(G)
    if loc and loc[0][0] >= I[1] and left == 0:
        assert adjoint_phase(Fl.scaled(n), G) == 0
    if loc and loc[-1][1] <= I[0] and right == 0:
        assert adjoint_phase(Fl.scaled(n), G) == -n * charges(G)[0].c


def test_rep_ambiguity_examples():
    V1, V2 = grading_rep("l", (0, 1)), grading_rep("l", (0, 2))
    assert rep_ambiguity(V1, V1, 3).is_zero()
    d = rep_ambiguity(V1, V2, 1)
    assert charges(d)[1:] == (0, 0) and localization(d) == [(0, 2)]
    with pytest.raises(SideMismatch):
        rep_ambiguity(V1, grading_rep("r", (0, 1)), 1)
    assert grading_rep("global", (0, 1)).F.same_as(ONE)


def test_xi_interval_examples():
    m = xi_interval((0, 2))
    assert (m.eps, m.shift) == (-1, 2)
    F = TestPair(tent(0, 1), ramp(Fraction(1, 2), 2, 3, -1))
    assert xi_apply((0, 2), xi_apply((0, 2), F)).same_as(F)


def test_xi_swaps_graded_spaces():
    amb = AmbientSpace((-3, 3), Fraction(1, 2))
    for I in (interval(0, 2), interval(-3, 1), interval(-1, 3)):
        L, R = local_space(amb, SpaceTag.Vfl, I), local_space(amb, SpaceTag.Vfr, I)
        image = SymplecticSubspace(amb, [amb.coords(xi_apply(I, F)) for F in L.generators()])
        assert image.same(R)


def test_mobius_examples():
    assert mobius_from_double_interval(double_interval(0, 1, 2, 3)).is_identity()
    g = mobius_from_double_interval(double_interval(0, 1, 2, 4))
    assert g.abc() == (-2, 0, -6)
    assert [mobius_apply_endpoint(g, x) for x in (0, 4, 3, 2)] == [0, 4, 2, 1]
    E = double_interval(0, 1, 2, 4)
    xi = xi_double_interval(E)
    assert mobius_apply_element(xi, E) == E
    assert mobius_apply_element(xi, interval(1, 2)) == interval(1, 2)
    assert mobius_apply_element(MobiusMap.identity(), E) == E
    tau = MobiusMap.of(1, 3, 0, 1)
    assert mobius_apply_element(tau, interval(0, 1)) == interval(3, 4)
    with pytest.raises(PoleHit):
        mobius_apply_endpoint(g, 6)


@given(st.lists(st.integers(-6, 6), min_size=4, max_size=4, unique=True))
def test_mobius_fixed_points(xs):
    al, be, ga, de = sorted(Fraction(x) for x in xs)
    g = mobius_from_double_interval((al, be, ga, de))
    if be - al == de - ga:
        assert g.is_identity()
        return
    assert mobius_apply_endpoint(g, al) == al and mobius_apply_endpoint(g, de) == de
    assert mobius_apply_endpoint(g, -be + al + de) == ga
    assert mobius_apply_endpoint(g, -ga + al + de) == be
    assert g.m[0][0] == 1 or (g.m[0][0] == 0 and g.m[0][1] == 1)
