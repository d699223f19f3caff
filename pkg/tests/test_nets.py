from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from netcoh.linalg import Echelon, nullspace, solve_affine
from netcoh.nets import (
    TAG_CONSTRAINTS,
    AmbientSpace,
    NetSpec,
    PROBE_REFINEMENT,
    OffGrid,
    SymplecticSubspace,
    additive_extension,
    check_graded_locality,
    check_locality,
    cross_pairing_vanishes,
    dual,
    dual_via_pieces,
    global_graded_dual,
    global_twist,
    graded_dual,
    graded_twist,
    intersect,
    join,
    local_space,
    materialize,
    probe_ambient,
    sigma_annihilator,
)
from netcoh.piecewise import SpaceTag, TestPair, symplectic_form, tent
from netcoh.poset import build_poset, double_interval, interval, leq

H = Fraction(1, 2)
AMB = AmbientSpace((-3, 3), H)
D = build_poset("D", (-3, 3), 1)
I = build_poset("I", (-3, 3), 1)
E = double_interval(-2, -1, 0, 2)
TAGS = list(SpaceTag)


def Va(o):
    return local_space(AMB, SpaceTag.Va, o)


def test_linalg_basics():
    e = Echelon(3, [{0: Fraction(1), 1: Fraction(1)}, {1: Fraction(1), 2: Fraction(1)}])
    assert e.rank == 2 and e.contains({0: Fraction(1), 2: Fraction(-1)})
    ns = nullspace([{0: Fraction(1), 1: Fraction(1)}], 2)
    assert ns == [{1: Fraction(1), 0: Fraction(-1)}]
    assert solve_affine([({0: Fraction(1), 1: Fraction(1)}, Fraction(2)), ({1: Fraction(1)}, Fraction(5))], 2) == {1: 5, 0: -3}
    assert solve_affine([({0: Fraction(1)}, Fraction(1)), ({0: Fraction(2)}, Fraction(1))], 1) is None


def test_sigma_routes_agree():
    F = TestPair(tent(-1, 1), tent(0, 2))
    G = TestPair(tent(0, 2, 3), tent(-2, 0))
    u, w = AMB.coords(F), AMB.coords(G)
    assert AMB.sigma(u, w) == symplectic_form(F, G)
    row = AMB.pairing_row(w)
    assert sum(row.get(k, 0) * x for k, x in u.items()) == symplectic_form(F, G)
    assert AMB.testpair(u).same_as(F)
    with pytest.raises(OffGrid):
        AMB.coords(TestPair(tent(0, Fraction(1, 3))))


def test_materialize_examples():
    coarse = AmbientSpace((-3, 3), 1)
    assert local_space(coarse, SpaceTag.Va, interval(0, 1)).dim == 0
    assert local_space(AmbientSpace((-3, 3), Fraction(1, 4)), SpaceTag.Va, interval(0, 1)).dim > 0
    for o in (interval(0, 2), E):
        assert Va(o).issubspace(local_space(AMB, SpaceTag.Vf, o))
    split = join([Va(interval(-2, -1)), Va(interval(0, 2))])
    assert split.issubspace(Va(E)) and not Va(E).issubspace(split)


def test_join_intersect_examples():
    X = Va(interval(0, 2))
    assert join([X, X]).same(X)
    assert intersect([Va(interval(-2, -1)), Va(interval(0, 2))]).dim == 0
    touching = join([Va(interval(0, 1)), Va(interval(1, 2))])
    assert touching.dim < Va(interval(0, 2)).dim
    overlapping = join([Va(interval(-1, 1)), Va(interval(0, 2))])
    assert overlapping.same(Va(interval(-1, 2)))


def test_additive_extension_examples():
    spec_a = NetSpec(SpaceTag.Va, D, AMB)
    assert additive_extension(NetSpec(SpaceTag.Va, I, AMB), interval(0, 2)).same(Va(interval(0, 2)))
    A = additive_extension(spec_a, E)
    assert A.issubspace(Va(E)) and Va(E).dim - A.dim == 2
    for tag in (SpaceTag.Vf, SpaceTag.Vf0):
        spec = NetSpec(tag, D, AMB)
        assert additive_extension(spec, E).same(materialize(spec, E))
        assert additive_extension(spec, E, exhaustive=True).same(additive_extension(spec, E))


def test_one_cell_components_lose_a_direction():
    # with a single cell per component the plateau of E has nowhere to rise
    E1 = double_interval(0, H, 1, 3 * H)
    spec = NetSpec(SpaceTag.Va, build_poset("D", (-3, 3), H), AMB)
    assert Va(E1).dim - additive_extension(spec, E1).dim == 1


def test_duals():
    spec = NetSpec(SpaceTag.Va, D, AMB)
    for o in (interval(-1, 1), interval(0, 2), E):
        d = dual(spec, o)
        assert d.same(Va(o)) and d.same(dual_via_pieces(spec, o))
    assert dual(spec, interval(-3, 3)).same(local_space(AMB, SpaceTag.Va, interval(-3, 3)))


def test_field_net_is_not_haag_dual():
    spec = NetSpec(SpaceTag.Vf, D, AMB)
    o = interval(0, 2)
    assert not materialize(spec, o).issubspace(dual(spec, o))


def test_graded_duals():
    for o in (interval(-1, 1), E):
        for side, tag in (("l", SpaceTag.Vfl), ("r", SpaceTag.Vfr)):
            assert graded_dual(side, o, AMB).same(local_space(AMB, tag, o))
        assert cross_pairing_vanishes(local_space(AMB, SpaceTag.Vfl, o), graded_twist("l", o, AMB))
        assert global_graded_dual(o, AMB).same(local_space(AMB, SpaceTag.Vc, o))
        assert cross_pairing_vanishes(local_space(AMB, SpaceTag.Vc, o), global_twist(o, AMB))


def test_locality_reports():
    els = [x for x in build_poset("I", (-3, 3), 1) if x.sup - x.inf <= 2]
    assert check_locality(NetSpec(SpaceTag.Va, I, AMB), els).ok
    assert check_graded_locality(NetSpec(SpaceTag.Vfl, I, AMB), NetSpec(SpaceTag.Vfr, I, AMB), els).ok
    rep = check_locality(NetSpec(SpaceTag.Vf, I, AMB), els)
    assert not rep.ok and all(v.value == symplectic_form(v.left, v.right) for v in rep.violations)


def test_vf_is_non_degenerate_against_probe_tests():
    fine = probe_ambient(AMB)
    for o in (interval(-1, 1), interval(0, 3)):
        X = local_space(AMB, SpaceTag.Vf, o)
        probes = local_space(fine, SpaceTag.Vf, o).basis()
        rad = sigma_annihilator(probes, AMB, TAG_CONSTRAINTS[SpaceTag.Vf], fine, PROBE_REFINEMENT)
        assert intersect([X, rad]).dim == 0


def test_same_grid_pairing_has_oscillating_kernel():
    # n-1 interior hats cannot separate n+1 field values
    X = local_space(AMB, SpaceTag.Vf, interval(-1, 1))
    rad = intersect([X, sigma_annihilator(X.basis(), AMB, TAG_CONSTRAINTS[SpaceTag.Vf])])
    assert rad.dim == 2
    assert all(F.f0.is_zero() for F in rad.generators())


elements = st.sampled_from(D.elements)


@given(st.sampled_from(TAGS), elements, elements)
def test_isotony(tag, a, b):
    if leq(a, b):
        assert local_space(AMB, tag, a).issubspace(local_space(AMB, tag, b))


@given(elements)
def test_local_inside_dual(o):
    spec = NetSpec(SpaceTag.Va, D, AMB)
    assert materialize(spec, o).issubspace(dual(spec, o))
