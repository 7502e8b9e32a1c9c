import itertools

import numpy as np
import pytest

from lgrp.core import as_descriptor
from lgrp.errors import PreconditionError, StructuralError, UnsupportedRepresentation
from lgrp.morphisms import NamedBuiltin, linear
from lgrp.sampling import SamplerConfig
from lgrp.subobjects import CoordinateIdeal, Generated, cyclic_subgroup, polar_test, whole
from lgrp.extensions import (
    PointSubobject, SplitExtension, closed_under_action_test, coherence_join_closure_test, make_lex_extension,
    make_product_extension, named_extension, non_faithfulness_witness, point_centralizer, polar_section_ideal_test,
    polar_section_subset, pt_product_cooperator_test, semidirect_join_matches, semidirect_view, split_extension_of,
    strong_proto_composite_test, trivial_extension, verify_phi_iso,
)

SMALL = SamplerConfig(samples=1000)


@pytest.fixture(scope="module")
def lex():
    return make_lex_extension(SMALL)


@pytest.fixture(scope="module")
def prod3():
    return split_extension_of("prod(Z^2,Z)", sampler=SMALL)


def supports(n):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


# ---- construction ----------------------------------------------------------

def test_lex_maps(lex):
    A = lex.total
    assert lex.p(A.elem(5, 3)) == lex.base.elem(3)
    assert lex.s(lex.base.elem(3)) == A.elem(0, 3)
    assert lex.k(lex.kernel.elem(4)) == A.elem(4, 0)
    assert all(r.passed for r in lex.reports)


def test_kernel_membership(lex):
    rows = np.array([[x, y] for x in range(-3, 4) for y in range(-3, 4)])
    ok, _ = lex.k.preimage_rows(rows)
    assert (ok == (lex.p.apply_rows(rows)[:, 0] == 0)).all()


def test_corrupted_section_is_rejected():
    Z, Z2 = as_descriptor("Z"), as_descriptor("Z^2")
    good = make_product_extension(SMALL)
    # s(b) = (-b, b) still splits p but does not preserve joins
    bad = SplitExtension(Z, Z2, Z, k=good.k, p=good.p, s=linear(Z, Z2, ((-1,), (1,)), "s"), name="bad")
    with pytest.raises(StructuralError, match="morphism:s"):
        bad.validate(SMALL)
    # s(b) = (b, b) is a legitimate section, so it is accepted
    SplitExtension(Z, Z2, Z, k=good.k, p=good.p, s=linear(Z, Z2, ((1,), (1,)), "s"), name="diag").validate(SMALL)


def test_wrong_maps_are_rejected():
    good = make_product_extension(SMALL)
    with pytest.raises(StructuralError):
        SplitExtension(good.kernel, good.total, good.base, good.k, good.p, good.k).validate(SMALL)
    with pytest.raises(UnsupportedRepresentation):
        split_extension_of("Z", sampler=SMALL)


def test_named_extensions():
    assert str(named_extension("lex", SMALL).total) == "lex(Z,Z)"
    assert named_extension("product", SMALL).total == as_descriptor("Z^2")
    e = named_extension("Z^4", SMALL)
    assert e.kernel == as_descriptor("Z^3") and e.base == as_descriptor("Z")


# ---- semidirect reconstruction ---------------------------------------------

def test_semidirect_examples(lex):
    v = semidirect_view(lex)
    K, B = lex.kernel, lex.base
    assert v.join((K.elem(5), B.elem(0)), (K.elem(-7), B.elem(1))) == (K.elem(-7), B.elem(1))
    assert v.mul((K.elem(3), B.elem(0)), (K.elem(4), B.elem(0))) == (K.elem(7), B.elem(0))
    assert v.phi((K.elem(9), B.elem(0))) == lex.k(K.elem(9))
    assert v.psi(lex.total.elem(-7, 1)) == (K.elem(-7), B.elem(1))


@pytest.mark.parametrize("name", ["lex", "product", "lex(Z^2,Z)", "Z^3"])
def test_phi_iso(name):
    e = named_extension(name, SMALL)
    assert verify_phi_iso(e, SMALL).passed
    assert semidirect_join_matches(e, SMALL).passed


def test_semidirect_rows_match_direct_lex(lex):
    rng = np.random.default_rng(5)
    a1, a2 = rng.integers(-9, 10, size=(500, 2)), rng.integers(-9, 10, size=(500, 2))
    v = semidirect_view(lex)
    assert (v.phi_rows(*v.mul_rows(*v.psi_rows(a1), *v.psi_rows(a2))) == a1 + a2).all()
    assert (v.phi_rows(*v.join_rows(*v.psi_rows(a1), *v.psi_rows(a2))) == lex.total.join_rows(a1, a2)).all()


# ---- non-faithfulness ------------------------------------------------------

def test_non_faithfulness():
    nf = non_faithfulness_witness(SMALL)
    assert nf.passed
    (_, _), (g2, f2) = nf.first, nf.second
    A = as_descriptor("lex(Z,Z)")
    assert g2(A.elem(5, 3)) == A.elem(5, 6)
    assert f2(as_descriptor("Z").elem(3)) == as_descriptor("Z").elem(6)
    assert nf.point.coords == (0, 1)
    assert [x.coords for x in nf.images] == [(0, 1), (0, 2)]
    assert nf.to_json()["differ_at"] == ["0", "1"]


# ---- polar of the kernel inside the section --------------------------------

def test_polar_section():
    prod = make_product_extension(SMALL)
    sub = polar_section_subset(prod)
    rows = np.array([[0, 5], [1, 0], [0, -2], [1, 1]])
    assert sub.member_rows(rows).tolist() == [1, 0, 1, 0]
    assert polar_section_ideal_test(prod, SMALL).passed
    lex = make_lex_extension(SMALL)
    # in lex order no nonzero (0, b) is orthogonal to every (x, 0)
    assert make_rows_member(polar_section_subset(lex), [[0, 0], [0, 1], [0, -3]]) == [1, 0, 0]
    assert polar_section_ideal_test(lex, SMALL).passed
    assert polar_section_ideal_test(trivial_extension("Z^2", SMALL), SMALL).passed


def make_rows_member(sub, rows):
    return sub.member_rows(np.array(rows)).tolist()


def test_lex_polar_brute_force(lex):
    A = lex.total
    pts = np.array([[x, y] for x in range(-4, 5) for y in range(-4, 5)])
    kx = np.array([[x, 0] for x in range(-4, 5)])
    expected = []
    for p in pts:
        rep = np.broadcast_to(p, kx.shape)
        abs_p, abs_k = A.join_rows(rep, -rep), A.join_rows(kx, -kx)
        orth = (A.meet_rows(abs_p, abs_k) == 0).all()
        expected.append(int(orth and p[0] == 0))
    assert polar_section_subset(lex).member_rows(pts).tolist() == expected


# ---- points: action closure, centralizers, cooperators ---------------------

def test_closed_under_action_examples(lex, prod3):
    evens = Generated("Z", [(2,)], predicate=lambda t: t[0] % 2 == 0)
    assert closed_under_action_test(PointSubobject(lex, evens), SMALL).passed
    diag = Generated("Z^2", [(1, 1)], predicate=lambda t: t[0] == t[1])
    assert closed_under_action_test(PointSubobject(prod3, diag), SMALL).passed
    # the l-subgroup generated by (1,-1) is all of Z^2, so use the plain cyclic subgroup
    anti = cyclic_subgroup("Z^2", (1, -1))
    r = closed_under_action_test(PointSubobject(prod3, anti), SMALL)
    assert not r.passed
    assert r.witness.kind in ("join", "positive")
    with pytest.raises(StructuralError):
        PointSubobject(lex, CoordinateIdeal("Z^2", frozenset({0})))


def test_point_centralizer_examples(prod3):
    ps = PointSubobject(prod3, CoordinateIdeal("Z^2", frozenset({0})))
    assert point_centralizer(ps).xbar.support == {1}
    assert point_centralizer(PointSubobject(prod3, CoordinateIdeal("Z^2", frozenset()))).xbar.support == {0, 1}
    assert point_centralizer(PointSubobject(prod3, whole("Z^2"))).xbar.support == frozenset()
    with pytest.raises(UnsupportedRepresentation):
        point_centralizer(PointSubobject(prod3, Generated("Z^2", [(1, 1)])))


@pytest.mark.parametrize("support", supports(3))
def test_centralizer_is_closed_under_action(support):
    e = named_extension("Z^4", SMALL)
    c = point_centralizer(PointSubobject(e, CoordinateIdeal("Z^3", support)))
    assert closed_under_action_test(c, SamplerConfig(samples=300)).passed


def test_cooperator_examples(prod3):
    def ps(*s):
        return PointSubobject(prod3, CoordinateIdeal("Z^2", frozenset(s)))
    assert pt_product_cooperator_test(ps(0), ps(1), SMALL).passed
    r = pt_product_cooperator_test(ps(0, 1), ps(1), SMALL)
    assert not r.passed and r.witness.kind == "join"
    assert pt_product_cooperator_test(ps(), ps(), SMALL).passed
    other = PointSubobject(make_product_extension(SMALL), CoordinateIdeal("Z", frozenset()))
    with pytest.raises(StructuralError):
        pt_product_cooperator_test(ps(0), other, SMALL)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cooperator_iff_orthogonal(n):
    e = named_extension(f"Z^{n + 1}", SMALL)
    s = SamplerConfig(samples=200)
    for a in supports(n):
        for b in supports(n):
            x, y = CoordinateIdeal(f"Z^{n}", a), CoordinateIdeal(f"Z^{n}", b)
            coop = pt_product_cooperator_test(PointSubobject(e, x), PointSubobject(e, y), s).passed
            assert coop == polar_test(x, y, s).passed == (not a & b), (a, b)


# ---- coherence -------------------------------------------------------------

def test_coherence_examples(lex, prod3):
    k, h = Generated("Z^2", [(1, 0)], box=8), Generated("Z^2", [(1, 1)], box=8)
    r = coherence_join_closure_test(prod3, k, h, SMALL)
    assert r.passed and r.inconclusive == 0
    k2, h3 = Generated("Z", [(2,)], box=8), Generated("Z", [(3,)], box=8)
    r = coherence_join_closure_test(lex, k2, h3, SMALL)
    assert r.passed and r.inconclusive == 0
    r = coherence_join_closure_test(lex, k2, k2, SMALL)
    assert r.passed


def test_coherence_precondition(prod3):
    anti = cyclic_subgroup("Z^2", (1, -1))
    with pytest.raises(PreconditionError):
        coherence_join_closure_test(prod3, anti, anti, SMALL)


# ---- strong protomodularity ------------------------------------------------

def test_strong_proto_examples():
    inner = split_extension_of("Z^2", sampler=SMALL)
    outer = split_extension_of("Z^3", sampler=SMALL)
    first = linear("Z", "Z^2", ((1,), (0,)), "m")
    assert strong_proto_composite_test(outer, inner, first, SMALL).passed
    lex_inner = split_extension_of("lex(Z,Z)", sampler=SMALL)
    lex_outer = split_extension_of("lex(Z^2,Z)", sampler=SMALL)
    assert strong_proto_composite_test(lex_outer, lex_inner, first, SMALL).passed
    diag = linear("Z", "Z^2", ((1,), (1,)), "diag")
    with pytest.raises(PreconditionError, match="not an ideal"):
        strong_proto_composite_test(outer, inner, diag, SMALL)
    with pytest.raises(PreconditionError):
        strong_proto_composite_test(lex_outer, split_extension_of("prod(Z,Z^2)", sampler=SMALL), first, SMALL)


def test_builtin_is_named():
    assert isinstance(make_lex_extension(SMALL).k, NamedBuiltin)
