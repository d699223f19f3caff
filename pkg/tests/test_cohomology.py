from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from netcoh.cohomology import (
    ObstructionCertificate,
    SupportNotCovered,
    TrivializerWitness,
    chain_decompose,
    chain_decompose_field,
    check_cocycle,
    cohomology_ambient,
    coboundary_feasibility,
    condition_aa,
    identity_cocycle,
    induced_cocycle,
    z0,
)
from netcoh.nets import NetSpec, materialize
from netcoh.piecewise import ChargePair, PiecewiseLinear, SpaceTag, TestPair, charges, localization, ramp, tent
from netcoh.poset import build_poset, double_interval, interval
from netcoh.simplicial import canonical_simplex1, enumerate_simplices
from netcoh.weyl import W, weyl_mul

D3 = build_poset("D", (0, 3), 1)
D4 = build_poset("D", (0, 4), 1)


def spec(tag, poset=D4):
    return NetSpec(tag, poset, cohomology_ambient(poset))


def test_zero_charge_gives_identity():
    z = induced_cocycle(ChargePair.of(0, 0), D3)
    assert all(w.F.is_zero() and w.theta == 0 for w in z.values.values())
    assert check_cocycle(identity_cocycle(D3)).ok


@pytest.mark.parametrize("side", ["l", "r"])
@pytest.mark.parametrize("ch", [(1, 0), (0, 1), (2, -1)])
def test_induced_cocycle_is_a_cocycle(ch, side):
    z = induced_cocycle(ChargePair.of(*ch), D3, side)
    rep = check_cocycle(z, strict=True)
    assert rep.ok and rep.simplices1 == 49 and rep.simplices2 == 343
    for w in z.values.values():
        assert charges(w.F)[0].is_zero


def test_values_localize_in_the_support():
    z = induced_cocycle(ChargePair.of(1, 1), D3)
    b = canonical_simplex1(interval(2, 3), interval(0, 1), D3)
    F = z(b).F
    assert not F.is_zero()
    assert all(b.support.inf <= lo and hi <= b.support.sup for lo, hi in localization(F))


def test_perturbed_phase_is_caught():
    z = induced_cocycle(ChargePair.of(1, 1), D3)
    b = canonical_simplex1(interval(2, 3), interval(0, 1), D3)
    bad = z.with_value(b, W(z(b).F, z(b).theta + 1))
    rep = check_cocycle(bad)
    assert rep.identity_violations and not rep.locality_violations
    assert all(b in (c.d0, c.d1, c.d2) for c in rep.identity_violations)


def test_perturbed_support_is_caught():
    z = induced_cocycle(ChargePair.of(1, 0), D3)
    b = canonical_simplex1(interval(1, 2), interval(0, 1), D3)
    stray = TestPair(f1=ramp(2, 3, 0, 1) - ramp(Fraction(5, 2), 3, 0, 1))
    rep = check_cocycle(z.with_value(b, weyl_mul(z(b), W(stray))))
    assert b in rep.locality_violations


def test_chain_decompose_examples():
    f = tent(0, 1, 2) - tent(2, 3, 2)
    pieces = chain_decompose(f, [(0, Fraction(9, 5)), (Fraction(6, 5), 3)])
    assert len(pieces) == 2
    assert all(p.integral() == 0 for p in pieces)
    assert localization(TestPair(pieces[0]))[-1][1] <= Fraction(9, 5)
    assert localization(TestPair(pieces[1]))[0][0] >= Fraction(6, 5)
    assert (pieces[0] + pieces[1]).same_function(f)
    three = chain_decompose(tent(0, 1, 2) - tent(4, 5, 2), [(0, 2), (1, 4), (3, 5)])
    assert [p.integral() for p in three] == [0, 0, 0]
    assert (three[0] + three[1] + three[2]).same_function(tent(0, 1, 2) - tent(4, 5, 2))
    with pytest.raises(SupportNotCovered):
        chain_decompose(tent(0, 1, 2) - tent(6, 7, 2), [(0, 2), (1, 4)])


def test_chain_decompose_field_example():
    f = ramp(0, 1, 0, 2) - ramp(3, 4, 0, 2)
    pieces = chain_decompose_field(f, [(0, 2), (1, 4)])
    assert all(p.is_compact for p in pieces)
    assert (pieces[0] + pieces[1]).same_function(f)


@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.integers(1, 5))
def test_chain_decompose_invariants(vals, cut):
    xs = [Fraction(k, 2) for k in range(1, 7)]
    f = PiecewiseLinear((Fraction(0),) + tuple(xs) + (Fraction(7, 2),), (Fraction(0),) + tuple(map(Fraction, vals)) + (Fraction(0),))
    f = (f - tent(0, Fraction(7, 2), 2 * f.integral() / Fraction(7, 2))).simplified()
    chain = [(0, Fraction(cut, 2) + Fraction(1, 2)), (Fraction(cut, 2), Fraction(7, 2))]
    pieces = chain_decompose(f, chain)
    total = pieces[0] + pieces[1]
    assert total.same_function(f)
    for p, (a, b) in zip(pieces, chain):
        assert p.integral() == 0
        assert all(a <= lo and hi <= b for lo, hi in localization(TestPair(p)))


def test_condition_aa_examples():
    b = canonical_simplex1(interval(3, 4), interval(0, 1), D4)
    ok = condition_aa(spec(SpaceTag.Vf), b, 3)
    assert ok.status == "holds" and ok.witness is None and ok.intersection.same(ok.join)
    bad = condition_aa(spec(SpaceTag.Va), b, 3)
    assert bad.status == "fails" and bad.certified
    assert not bad.join.contains(bad.witness) and bad.intersection.contains(bad.witness)


def test_condition_aa_degenerate_edge():
    a = interval(1, 2)
    b = canonical_simplex1(a, a, D4)
    res = condition_aa(spec(SpaceTag.Va), b, 2)
    assert res.status == "holds" and res.intersection.same(materialize(spec(SpaceTag.Va), b.support))


def test_coboundary_trivializer():
    z = induced_cocycle(ChargePair.of(1, 1), D3)
    for tag in (SpaceTag.Vf, SpaceTag.Vfl):
        out = coboundary_feasibility(z, tag)
        assert isinstance(out, TrivializerWitness)
        assert out.reproduces(z) and all(out.in_target.values())
    # zero charge is a coboundary even for the strictest net
    assert isinstance(coboundary_feasibility(induced_cocycle(ChargePair.of(0, 0), D3), SpaceTag.Va), TrivializerWitness)


def test_coboundary_obstruction_is_tree_independent():
    ch = ChargePair.of(1, 1)
    z = induced_cocycle(ch, D3)
    a = coboundary_feasibility(z, SpaceTag.Va)
    b = coboundary_feasibility(z, SpaceTag.Va, reverse=True)
    assert isinstance(a, ObstructionCertificate) and isinstance(b, ObstructionCertificate)
    assert a.verify() and b.verify()
    assert a.forced_charge == b.forced_charge == ch
    assert a.base != b.base


def test_z0_examples():
    for tag, dim in [(SpaceTag.Va, 0), (SpaceTag.Vq, 0), (SpaceTag.Vf0, 0), (SpaceTag.Vb, 1), (SpaceTag.Ve, 1), (SpaceTag.Vf, 1)]:
        assert z0(spec(tag, D3)).dim == dim, tag
    single = build_poset("I", (0, 1), 1)
    assert len(single.elements) == 1
    S = spec(SpaceTag.Va, single)
    assert z0(S).same(materialize(S, interval(0, 1)))
