from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from netcoh.poset import (
    ElementNotInPoset,
    PosetError,
    TooManyElements,
    WindowNotSymmetric,
    apply_inversion,
    before,
    bot_graph,
    build_poset,
    causal_complement,
    disjoint,
    disjoint_sieve,
    double_interval,
    flip_check,
    half_left,
    half_right,
    interval,
    is_cofinal,
    is_connected,
    is_directed,
    leq,
)

D04 = build_poset("D", (0, 4), 1)
SMALL = {k: build_poset(k, (0, 3), Fraction(1, 2)) for k in ("I", "I2", "D", "J")}
elements = st.sampled_from(build_poset("D", (0, 5), 1).elements)


def test_build_examples():
    I = build_poset("I", (0, 2), 1)
    assert set(I) == {interval(0, 1), interval(1, 2), interval(0, 2)}
    assert list(build_poset("I2", (0, 3), 1)) == [double_interval(0, 1, 2, 3)]
    J = build_poset("J", (0, 2), 1)
    assert set(J) == {half_left(1), half_left(2), half_right(0), half_right(1)}


@pytest.mark.parametrize("kind", ["I", "I2", "D", "J"])
def test_closed_form_counts(kind):
    P = build_poset(kind, (0, 6), Fraction(1, 2))
    assert P.count == len(P.elements)


def test_caps_and_membership():
    with pytest.raises(TooManyElements):
        build_poset("D", (-8, 8), Fraction(1, 4), max_elements=1000)
    with pytest.raises(PosetError):
        build_poset("I", (0, 1), Fraction(2, 3))
    with pytest.raises(ElementNotInPoset):
        disjoint_sieve(interval(0, 9), D04)


def test_order_examples():
    assert leq(interval(0, 1), double_interval(0, 1, 2, 3))
    assert disjoint(interval(0, 1), interval(1, 2)) and before(interval(0, 1), interval(1, 2))
    assert not disjoint(interval(0, 2), interval(1, 3)) and not before(interval(0, 2), interval(1, 3))


def test_complement_examples():
    pieces = causal_complement(interval(1, 2), (0, 4))
    assert [(p.role, p.lo, p.hi) for p in pieces] == [("left", 0, 1), ("right", 2, 4)]
    pieces = causal_complement(double_interval(0, 1, 2, 3), (-1, 4))
    assert [(p.lo, p.hi, p.unbounded) for p in pieces] == [(-1, 0, True), (1, 2, False), (3, 4, True)]
    assert all(p.empty for p in causal_complement(interval(0, 4), (0, 4)))


def test_sieve_examples():
    # intervals among intervals: the sieve splits into left and right
    I05 = build_poset("I", (0, 5), 1)
    s = disjoint_sieve(interval(1, 2), I05)
    assert not s.other and s.all() == {x for x in I05 if disjoint(x, interval(1, 2))}
    s = disjoint_sieve(double_interval(0, 1, 4, 5), build_poset("D", (0, 5), 1))
    assert interval(2, 3) in s.other
    J = build_poset("J", (0, 3), 1)
    s = disjoint_sieve(half_right(2), J)
    assert set(s.left) == s.all() and not s.right


def test_interval_sieve_in_d_has_straddlers():
    s = disjoint_sieve(interval(1, 2), D04)
    assert set(s.other) == {double_interval(0, 1, 2, 3), double_interval(0, 1, 2, 4), double_interval(0, 1, 3, 4)}


def test_index_set_facts():
    for k in ("I", "I2", "D"):
        assert is_directed(SMALL[k]) and is_connected(SMALL[k])
    assert not is_directed(SMALL["J"]) and not is_connected(SMALL["J"])
    assert is_directed(D04) and is_connected(D04)
    assert is_cofinal(SMALL["I"], SMALL["I2"]) and is_cofinal(SMALL["I"], SMALL["D"])
    assert not is_cofinal(SMALL["I"], SMALL["J"])


def test_bot_graph_intervals_and_half_lines():
    g = bot_graph(build_poset("I", (0, 4), 1))
    assert g.component_count == 2 and g.oriented_split_is_components and not g.interleaved
    g = bot_graph(build_poset("J", (0, 4), 1))
    assert g.component_count == 2 and g.oriented_split_is_components
    assert bot_graph(build_poset("I", (0, 1), 1)).component_count == 0


def test_bot_graph_double_intervals_join_the_orientations():
    # ((0,1),(1,2)) <= ((0,1)u(2,3),(1,2)) >= ((2,3),(1,2)) links G< to G>
    g = bot_graph(build_poset("D", (0, 3), 1))
    comp = next(c for c in g.components if (interval(0, 1), interval(1, 2)) in c)
    assert (interval(2, 3), interval(1, 2)) in comp
    assert (double_interval(0, 1, 2, 3), interval(1, 2)) in g.interleaved
    assert g.component_count == 1 and not g.oriented_split_is_components


def test_inversion_examples():
    assert apply_inversion(interval(1, 2)) == interval(-2, -1)
    assert apply_inversion(double_interval(0, 1, 2, 3)) == double_interval(-3, -2, -1, 0)
    assert flip_check(build_poset("I", (-2, 2), Fraction(1, 2)))
    with pytest.raises(WindowNotSymmetric):
        flip_check(build_poset("I", (0, 2), 1))


@given(elements, elements, elements)
def test_disjointness_axioms(a, b, c):
    assert disjoint(a, b) == disjoint(b, a)
    if leq(a, b) and disjoint(b, c):
        assert disjoint(a, c)
    if before(a, b):
        assert disjoint(a, b) and not before(b, a)
    assert apply_inversion(apply_inversion(a)) == a
    assert before(a, b) == before(apply_inversion(b), apply_inversion(a))


@given(elements, elements)
def test_sieve_antitone(a, b):
    P = build_poset("D", (0, 5), 1)
    if leq(a, b):
        assert disjoint_sieve(b, P).all() <= disjoint_sieve(a, P).all()
    if a.variant == "interval":
        I = build_poset("I", (0, 5), 1)
        assert not disjoint_sieve(a, I).other
    else:
        assert disjoint_sieve(a, P).other
