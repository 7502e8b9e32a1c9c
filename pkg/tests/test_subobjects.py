import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lgrp.core import Elem, as_descriptor, is_orthogonal
from lgrp.errors import DescriptorMismatch, ResourceError, StructuralError, UnsupportedRepresentation
from lgrp.sampling import SamplerConfig
from lgrp.subobjects import (
    INCONCLUSIVE, NO, YES, CoordinateIdeal, Generated, bounded_closure, congruence_centralizer,
    congruence_of, contains, convexity_test, cyclic_subgroup, distributivity_check, huq_bruteforce,
    huq_commutator_ideals, ideal_lattice, ideal_of, ideal_test, polar, polar_test, support_of, whole,
)

SMALL = SamplerConfig(samples=1000)


def ideal(n, *support):
    return CoordinateIdeal(f"Z^{n}", frozenset(support))


def supports(n):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


# ---- bounded closure -------------------------------------------------------

def test_closure_examples():
    twos = Generated("Z", [(2,)], depth=3, box=8)
    assert {x.coords[0] for x in bounded_closure(twos)} == set(range(-8, 9, 2))
    diag = Generated("Z^2", [(1, 1)], depth=2, box=4)
    assert all(a == b and abs(a) <= 4 for a, b in (x.coords for x in bounded_closure(diag)))
    assert bounded_closure(Generated("lex(Z,Z)", [])) == frozenset({as_descriptor("lex(Z,Z)").identity()})


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), max_size=2), st.integers(0, 3), st.integers(1, 6))
def test_closure_monotone(gens, depth, box):
    small = Generated("Z^2", gens, depth=depth, box=box).closure_set()
    assert small <= Generated("Z^2", gens, depth=depth + 1, box=box).closure_set()
    assert small <= Generated("Z^2", gens, depth=depth, box=box + 2).closure_set()
    assert (0, 0) in small


def test_closure_budget():
    with pytest.raises(ResourceError):
        Generated("Z^3", [(1, 0, 0), (0, 1, 0), (0, 0, 1)], depth=6, box=40, budget=1000).closure_set()


def test_closure_predicate_violation_is_structural():
    bad = Generated("Z^2", [(1, -1)], depth=2, predicate=lambda t: t[0] == -t[1])
    with pytest.raises(StructuralError):
        bad.closure_set()


def test_contains_examples():
    s = ideal(3, 0, 1)
    Z3, Z2 = as_descriptor("Z^3"), as_descriptor("Z^2")
    assert contains(s, Z3.elem(4, -4, 0)) == YES
    assert contains(s, Z3.elem(0, 0, 1)) == NO
    diag = Generated(Z2, [(1, 1)])
    assert contains(diag, Z2.elem(3, 3)) == YES
    assert contains(diag, Z2.elem(1, 0)) == INCONCLUSIVE
    # a predicate turns a miss into a definite no at row level, never via contains
    sharp = Generated(Z2, [(1, 1)], predicate=lambda t: t[0] == t[1])
    assert sharp.member_rows(np.array([[1, 0]]))[0] == 0
    assert contains(sharp, Z2.elem(1, 0)) == INCONCLUSIVE
    with pytest.raises(DescriptorMismatch):
        contains(s, Z2.elem(1, 1))


def test_coordinate_ideal_validation():
    with pytest.raises(UnsupportedRepresentation):
        CoordinateIdeal("lex(Z,Z)", frozenset({0}))
    with pytest.raises(StructuralError):
        ideal(2, 5)


def test_cyclic_subgroup():
    c = cyclic_subgroup("Z^2", (1, -1))
    rows = np.array([[3, -3], [0, 0], [1, 0], [2, -1]])
    assert c.member_rows(rows).tolist() == [1, 1, 0, 0]


# ---- convexity and ideals --------------------------------------------------

def test_convexity_examples():
    assert convexity_test(ideal(2, 0), SMALL).passed
    diag = Generated("Z^2", [(1, 1)], predicate=lambda t: t[0] == t[1])
    r = convexity_test(diag, SMALL)
    w = r.witness
    assert [v.coords for v in w.inputs] == [(1, 1), (0, 0), (0, 0), (1, 0)]
    assert w.lhs.coords == (0, 1)
    assert convexity_test(Generated("Z^2", []), SMALL).passed


def test_ideal_test_examples():
    assert ideal_test(ideal(3, 1), SMALL).passed
    evens = Generated("Z", [(2,)], predicate=lambda t: t[0] % 2 == 0)
    r = ideal_test(evens, SMALL)
    assert not r.passed and r.witness.kind == "convexity"
    assert r.witness.lhs.coords == (1,)
    basis = Generated("Z^2", [(1, 0), (0, 1)])
    assert ideal_test(basis, SMALL).status == "pass"


@pytest.mark.parametrize("support", supports(3))
def test_every_coordinate_ideal_is_an_ideal(support):
    assert ideal_test(CoordinateIdeal("Z^3", support), SMALL).passed


@pytest.mark.parametrize("a, b", [(a, b) for a in supports(3) for b in supports(3)][::5])
def test_intersection_of_ideals_is_an_ideal(a, b):
    h = huq_commutator_ideals(CoordinateIdeal("Z^3", a), CoordinateIdeal("Z^3", b))
    assert ideal_test(h, SamplerConfig(samples=300)).passed


def convex_closure_oracle(n, gens, radius=2):
    """Smallest convex l-subgroup containing gens, restricted to the box (brute force)."""
    box = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n)))
    inside = {tuple(g) for g in gens} | {(0,) * n}
    while True:
        s = np.array(sorted(inside))
        below = (s[None, :, :] <= box[:, None, :]).all(axis=2).any(axis=1)
        above = (s[None, :, :] >= box[:, None, :]).all(axis=2).any(axis=1)
        grown = {tuple(r) for r in box[below & above].tolist()}
        for a, b in itertools.product(s.tolist(), repeat=2):
            for c in (np.add(a, b), np.maximum(a, b), np.minimum(a, b), np.negative(a)):
                if np.abs(c).max(initial=0) <= radius:
                    grown.add(tuple(int(v) for v in c))
        if grown <= inside:
            return inside
        inside |= grown


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=1, max_size=2))))
def test_convex_closure_is_the_coordinate_ideal(case):
    n, gens = case
    support = {i for g in gens for i, c in enumerate(g) if c}
    expected = {t for t in itertools.product(range(-2, 3), repeat=n) if all(t[i] == 0 for i in range(n) if i not in support)}
    assert convex_closure_oracle(n, gens) == expected


# ---- polars ----------------------------------------------------------------

def polar_oracle(n, support, radius=3):
    """All x in the box orthogonal to every element of the ideal's box slice."""
    d = as_descriptor(f"Z^{n}")
    pts = list(itertools.product(range(-radius, radius + 1), repeat=n))
    members = [p for p in pts if all(p[i] == 0 for i in range(n) if i not in support)]
    return {p for p in pts if all(is_orthogonal(Elem(d, p), Elem(d, m)) for m in members)}


@pytest.mark.parametrize("support", supports(3))
def test_polar_matches_brute_force(support):
    p = polar(CoordinateIdeal("Z^3", support))
    pts = itertools.product(range(-3, 4), repeat=3)
    assert polar_oracle(3, support) == {t for t in pts if all(t[i] == 0 for i in p.off)}


def test_polar_examples():
    assert polar(ideal(3, 0, 1)).support == {2}
    assert polar(ideal(3)).support == {0, 1, 2}
    assert polar(ideal(3, 0, 1, 2)).support == frozenset()
    with pytest.raises(UnsupportedRepresentation):
        polar(Generated("Z^2", [(1, 1)]))


@settings(max_examples=50, deadline=None)
@given(st.sets(st.integers(0, 4)), st.sets(st.integers(0, 4)))
def test_polar_antitone_and_double(s, t):
    small, big = CoordinateIdeal("Z^5", s & t), CoordinateIdeal("Z^5", s | t)
    assert polar(big).support <= polar(small).support
    assert polar(polar(small)).support == small.support


def test_polar_test_examples():
    assert polar_test(ideal(2, 0), ideal(2, 1), SMALL).passed
    diag = Generated("Z^2", [(1, 1)])
    r = polar_test(diag, ideal(2, 1), SMALL)
    assert r.witness.kind == "not_orthogonal"
    assert [v.coords for v in r.witness.inputs] == [(1, 1), (0, 1)]
    r = polar_test(whole("Z"), whole("Z"), SMALL)
    assert not r.passed
    assert r.violation_count >= len(r.violations) > 0


# ---- commutators, lattices, congruences ------------------------------------

def test_commutator_examples():
    assert huq_commutator_ideals(ideal(3, 0, 1), ideal(3, 1, 2)).support == {1}
    assert huq_commutator_ideals(ideal(3, 0), ideal(3, 1)).support == frozenset()
    assert huq_commutator_ideals(ideal(3, 2), ideal(3, 2)).support == {2}
    assert huq_bruteforce(ideal(3, 0, 1), ideal(3, 1, 2)).support == {1}
    assert huq_bruteforce(ideal(4, 0, 1), ideal(4, 2, 3)).support == frozenset()
    assert huq_bruteforce(ideal(2, 0, 1), ideal(2, 0, 1)).support == {0, 1}
    with pytest.raises(ResourceError):
        huq_bruteforce(ideal(9, 0), ideal(9, 1))
    with pytest.raises(DescriptorMismatch):
        huq_commutator_ideals(ideal(2, 0), ideal(3, 0))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_commutator_oracle(n):
    for a in supports(n):
        for b in supports(n):
            h, k = CoordinateIdeal(f"Z^{n}", a), CoordinateIdeal(f"Z^{n}", b)
            assert huq_commutator_ideals(h, k) == huq_bruteforce(h, k)


def test_ideal_lattice():
    assert [i.support for i in ideal_lattice(1)] == [frozenset(), frozenset({0})]
    assert len(ideal_lattice(0)) == 1 and distributivity_check(0).passed
    assert distributivity_check(3).samples == 8 ** 3 and distributivity_check(3).passed
    with pytest.raises(ResourceError):
        ideal_lattice(6)


def test_congruences():
    r = congruence_of(ideal(3, 0, 1))
    assert congruence_centralizer(r).ideal.support == {2}
    assert congruence_centralizer(congruence_of(ideal(3))).ideal.support == {0, 1, 2}
    assert congruence_centralizer(congruence_of(ideal(3, 0, 1, 2))).ideal.support == frozenset()
    assert ideal_of(r) == r.ideal
    d = as_descriptor("Z^3")
    rng = np.random.default_rng(3)
    pts = [d.elem(*map(int, rng.integers(-2, 3, 3))) for _ in range(25)]
    for a in pts:
        assert r.related(a, a)
        for b in pts:
            assert r.related(a, b) == r.related(b, a)
            assert r.related(a, b) == (a.coords[2] == b.coords[2])


def test_support_of():
    assert support_of("0,2") == {0, 2}
    assert support_of("{1}") == {1}
    assert support_of("") == frozenset()
    with pytest.raises(StructuralError):
        support_of("a,b")
