"""Split extensions ``X --k--> A <--s-- --p--> B`` over concrete instances.

Everything here is evaluated inside the total algebra ``A``: mixed terms
such as ``k(x) s(b)`` or ``s(b)^-1 k(x) s(b)`` are computed there and pulled
back through ``k`` when a kernel element is needed.  All maps in play are
linear on coordinates, so bulk checks run on numpy rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Descriptor, Elem, Integers, Lex, Product, ZERO, as_descriptor, integers_power
from .errors import PreconditionError, StructuralError, UnsupportedRepresentation
from .laws import check_morphism
from .morphisms import Composite, CoordinateLinear, MorphismSpec, NamedBuiltin, scale, scale_top
from .reports import LawReport, Violation, encode
from .sampling import DEFAULT_SAMPLER, SamplerConfig, witness_key
from .subobjects import (
    CoordinateIdeal, Generated, PredicateSubset, Subalgebra, _ambient_corpus, _grid, as_rows, ideal_test, polar,
)

# share of base draws pinned to the identity in closure tests
BASE_IDENTITY_WEIGHT = 0.25


def _elem(d, row):
    return Elem(d, tuple(int(c) for c in row))


@dataclass(eq=False)
class SplitExtension:
    kernel: Descriptor
    total: Descriptor
    base: Descriptor
    k: MorphismSpec
    p: MorphismSpec
    s: MorphismSpec
    name: str = "extension"
    reports: list = field(default_factory=list, repr=False)

    def validate(self, sampler: SamplerConfig = DEFAULT_SAMPLER) -> "SplitExtension":
        """Sampled checks: k, p, s are morphisms, ``ps = id``, ``pk = 0``, ``ker p ⊆ im k``.

        Raises StructuralError naming the first failed check.
        """
        for f, dom, cod in ((self.k, self.kernel, self.total), (self.p, self.total, self.base),
                            (self.s, self.base, self.total)):
            if f.domain != dom or f.codomain != cod:
                raise StructuralError(f"{f} does not map {dom} -> {cod}")
        reports = [check_morphism(f, sampler) for f in (self.k, self.p, self.s)]
        reports.append(self._section_report(sampler))
        self.reports = reports
        bad = [r for r in reports if not r.passed]
        if bad:
            first = bad[0]
            raise StructuralError(
                f"{self.name}: {first.law} fails, e.g. {first.witness.to_json() if first.witness else ''}"
            )
        return self

    def _section_report(self, sampler):
        report = LawReport(str(self.total), "split", sampler.samples)
        rng = sampler.stream(f"split:{self.name}:{self.total}")
        b = rng.integers(-sampler.box, sampler.box, size=(sampler.samples, self.base.dimension), endpoint=True)
        x = rng.integers(-sampler.box, sampler.box, size=(sampler.samples, self.kernel.dimension), endpoint=True)
        a = rng.integers(-sampler.box, sampler.box, size=(sampler.samples, self.total.dimension), endpoint=True)
        B, K, A = self.base, self.kernel, self.total
        psb = self.p.apply_rows(self.s.apply_rows(b))
        _report_rows(report, "ps=id", _differs(psb, b), ((B, b),), (B, psb), (B, b))
        pkx = self.p.apply_rows(self.k.apply_rows(x))
        _report_rows(report, "pk=0", pkx.any(axis=1), ((K, x),), (B, pkx), (B, np.zeros_like(pkx)))
        # a s(p a)^-1 lies in ker p; it must come from the kernel
        ka = a - self.s.apply_rows(self.p.apply_rows(a))
        ok, _ = self.k.preimage_rows(ka)
        _report_rows(report, "exactness", ~ok, ((A, a),), (A, ka), (A, ka))
        return report.finalize()

    # row helpers used throughout
    def kernel_part(self, a):
        """``a s(p a)^-1`` pulled back to the kernel."""
        ok, pre = self.k.preimage_rows(a - self.s.apply_rows(self.p.apply_rows(a)))
        if not ok.all():
            raise StructuralError(f"{self.name}: kernel part outside the image of k")
        return pre

    def draw_base(self, rng, count, box):
        b = rng.integers(-box, box, size=(count, self.base.dimension), endpoint=True)
        b[rng.random(count) < BASE_IDENTITY_WEIGHT] = 0
        return b

    def __str__(self):
        return f"{self.name}: {self.kernel} -> {self.total} <-> {self.base}"


def _builtin(dom, cod, tag, params=(), name=""):
    return NamedBuiltin(dom, cod, tag, tuple(params), name=name)


def split_extension_of(total, name: str = "", sampler: SamplerConfig = DEFAULT_SAMPLER) -> SplitExtension:
    """The standard split extension with the given total algebra.

    ``lex(K, T)`` splits as ``K -> lex(K,T) <-> T``; ``prod(F1, ..., Fm)`` (and
    ``Z^n``) as the first ``m-1`` factors over the last one.
    """
    a = as_descriptor(total)
    if isinstance(a, Lex):
        kernel, base = a.kernel, a.top
    elif isinstance(a, Product) and len(a.factors) >= 2:
        first, last = a.factors[:-1], a.factors[-1]
        if len(first) == 1:
            kernel = first[0]
        elif all(isinstance(f, Integers) for f in first):
            kernel = integers_power(len(first))
        else:
            kernel = Product(first)
        base = last
    else:
        raise UnsupportedRepresentation(f"no standard splitting of {a}; use lex(K,T) or a product")
    kd = kernel.dimension
    ext = SplitExtension(
        kernel, a, base,
        k=_builtin(kernel, a, "embed", (0,), "i1"),
        p=_builtin(a, base, "project", (kd,), "p2"),
        s=_builtin(base, a, "embed", (kd,), "i2"),
        name=name or str(a),
    )
    return ext.validate(sampler)


def make_lex_extension(sampler: SamplerConfig = DEFAULT_SAMPLER) -> SplitExtension:
    """``Z -> lex(Z,Z) <-> Z`` with ``k = i1``, ``p = p2``, ``s = i2``."""
    return split_extension_of("lex(Z,Z)", "lex", sampler)


def make_product_extension(sampler: SamplerConfig = DEFAULT_SAMPLER) -> SplitExtension:
    """``Z -> Z x Z <-> Z``."""
    return split_extension_of("Z^2", "product", sampler)


def trivial_extension(kernel, sampler: SamplerConfig = DEFAULT_SAMPLER) -> SplitExtension:
    """``X -> X <-> 0``."""
    x = as_descriptor(kernel)
    ext = SplitExtension(
        x, x, ZERO,
        k=_builtin(x, x, "identity", (), "id"),
        p=_builtin(x, ZERO, "zero", (), "0"),
        s=_builtin(ZERO, x, "zero", (), "0"),
        name=f"trivial({x})",
    )
    return ext.validate(sampler)


def named_extension(name: str, sampler: SamplerConfig = DEFAULT_SAMPLER) -> SplitExtension:
    """``lex``, ``product``, or any descriptor accepted by ``split_extension_of``."""
    if name == "lex":
        return make_lex_extension(sampler)
    if name == "product":
        return make_product_extension(sampler)
    return split_extension_of(name, sampler=sampler)


class SemidirectView:
    """Pairs ``(x, b)`` with the semidirect product and join, evaluated inside ``A``."""

    def __init__(self, e: SplitExtension):
        self.e = e

    def phi_rows(self, x, b):
        return self.e.k.apply_rows(x) + self.e.s.apply_rows(b)

    def psi_rows(self, a):
        return self.e.kernel_part(a), self.e.p.apply_rows(a)

    def mul_rows(self, x1, b1, x2, b2):
        e = self.e
        sb1 = e.s.apply_rows(b1)
        # k1 b1 k2 b1^-1
        conj = e.k.apply_rows(x1) + sb1 + e.k.apply_rows(x2) - sb1
        ok, x = e.k.preimage_rows(conj)
        if not ok.all():
            raise StructuralError("conjugate left the kernel")
        return x, b1 + b2

    def join_rows(self, x1, b1, x2, b2):
        e, a = self.e, self.e.total
        left = e.k.apply_rows(x1) + e.s.apply_rows(b1)
        right = e.k.apply_rows(x2) + e.s.apply_rows(b2)
        top = a.join_rows(e.s.apply_rows(b1), e.s.apply_rows(b2))
        ok, x = e.k.preimage_rows(a.join_rows(left, right) - top)
        if not ok.all():
            raise StructuralError("join term left the kernel")
        return x, e.base.join_rows(b1, b2)

    # single-pair conveniences
    def _pair(self, pair):
        x, b = pair
        return as_rows([x.coords], x.desc.dimension), as_rows([b.coords], b.desc.dimension)

    def _out(self, x, b):
        return _elem(self.e.kernel, x[0]), _elem(self.e.base, b[0])

    def mul(self, u, v):
        return self._out(*self.mul_rows(*self._pair(u), *self._pair(v)))

    def join(self, u, v):
        return self._out(*self.join_rows(*self._pair(u), *self._pair(v)))

    def phi(self, u):
        return _elem(self.e.total, self.phi_rows(*self._pair(u))[0])

    def psi(self, a: Elem):
        x, b = self.psi_rows(as_rows([a.coords], a.desc.dimension))
        return self._out(x, b)


def semidirect_view(e: SplitExtension) -> SemidirectView:
    return SemidirectView(e)


def _report_rows(report, kind, mask, inputs, lhs, rhs):
    """Record rows in ``mask``; ``inputs`` are ``(descriptor, rows)`` pairs, ``lhs``/``rhs`` likewise."""
    report.collect(
        mask,
        lambda i: Violation(tuple(_elem(d, r[i]) for d, r in inputs), _elem(lhs[0], lhs[1][i]), _elem(rhs[0], rhs[1][i])),
        [[r for _, r in inputs]], kind,
    )


def _differs(a, b):
    return (a != b).any(axis=1)


def verify_phi_iso(e: SplitExtension, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """``phi(x, b) = k(x) s(b)`` is an isomorphism from the semidirect view onto ``A``.

    Checks product and join preservation, ``psi phi = id`` (hence injectivity)
    and ``phi psi = id`` with ``psi(a) = (a s(p a)^-1, p a)``.
    """
    v = SemidirectView(e)
    report = LawReport(e.name, "phi_iso", sampler.samples)
    rng = sampler.stream(f"phi_iso:{e.name}")
    n, box = sampler.samples, sampler.box
    kd, bd = e.kernel.dimension, e.base.dimension
    x1, x2 = (rng.integers(-box, box, size=(n, kd), endpoint=True) for _ in range(2))
    b1, b2 = (rng.integers(-box, box, size=(n, bd), endpoint=True) for _ in range(2))
    a = rng.integers(-box, box, size=(n, e.total.dimension), endpoint=True)
    K, B, A = e.kernel, e.base, e.total
    ins = ((K, x1), (B, b1), (K, x2), (B, b2))
    p1, p2 = v.phi_rows(x1, b1), v.phi_rows(x2, b2)
    lhs = v.phi_rows(*v.mul_rows(x1, b1, x2, b2))
    _report_rows(report, "product", _differs(lhs, p1 + p2), ins, (A, lhs), (A, p1 + p2))
    lhs, rhs = v.phi_rows(*v.join_rows(x1, b1, x2, b2)), A.join_rows(p1, p2)
    _report_rows(report, "join", _differs(lhs, rhs), ins, (A, lhs), (A, rhs))
    bx, bb = v.psi_rows(p1)
    back = np.concatenate([bx, bb], axis=1)
    orig = np.concatenate([x1, b1], axis=1)
    pair = Product((K, B)) if bd else K
    _report_rows(report, "psi_phi", _differs(back, orig), ins[:2], (pair, back), (pair, orig))
    round_trip = v.phi_rows(*v.psi_rows(a))
    _report_rows(report, "phi_psi", _differs(round_trip, a), ((A, a),), (A, round_trip), (A, a))
    return report.finalize()


def semidirect_join_matches(e: SplitExtension, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """The semidirect join of ``psi(a1)``, ``psi(a2)`` equals ``psi(a1 ∨ a2)``."""
    v = SemidirectView(e)
    report = LawReport(e.name, "semidirect_join", sampler.samples)
    rng = sampler.stream(f"semidirect_join:{e.name}")
    n, box, A = sampler.samples, sampler.box, e.total
    a1, a2 = (rng.integers(-box, box, size=(n, A.dimension), endpoint=True) for _ in range(2))
    lhs = v.phi_rows(*v.join_rows(*v.psi_rows(a1), *v.psi_rows(a2)))
    rhs = A.join_rows(a1, a2)
    _report_rows(report, "join", _differs(lhs, rhs), ((A, a1), (A, a2)), (A, lhs), (A, rhs))
    return report.finalize()


@dataclass(frozen=True)
class NonFaithfulness:
    first: tuple
    second: tuple
    reports: tuple
    point: Elem
    images: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports) and self.images[0] != self.images[1]

    def to_json(self):
        return {
            "pairs": [[g.name, f.name] for g, f in (self.first, self.second)],
            "checks": [r.to_json() for r in self.reports],
            "differ_at": encode(self.point),
            "images": [encode(x) for x in self.images],
        }


def _commuting_report(e, g, f, sampler):
    """``g i1 = i1``, ``p2 g = f p2`` and ``g i2 = i2 f`` on samples."""
    report = LawReport(e.name, f"commuting:{g.name},{f.name}", sampler.samples)
    rng = sampler.stream(f"commuting:{e.name}:{g.name}:{f.name}")
    n, box = sampler.samples, sampler.box
    x = rng.integers(-box, box, size=(n, e.kernel.dimension), endpoint=True)
    a = rng.integers(-box, box, size=(n, e.total.dimension), endpoint=True)
    b = rng.integers(-box, box, size=(n, e.base.dimension), endpoint=True)
    A, B, K = e.total, e.base, e.kernel
    lhs, rhs = g.apply_rows(e.k.apply_rows(x)), e.k.apply_rows(x)
    _report_rows(report, "g.k=k", _differs(lhs, rhs), ((K, x),), (A, lhs), (A, rhs))
    lhs, rhs = e.p.apply_rows(g.apply_rows(a)), f.apply_rows(e.p.apply_rows(a))
    _report_rows(report, "p.g=f.p", _differs(lhs, rhs), ((A, a),), (B, lhs), (B, rhs))
    lhs, rhs = g.apply_rows(e.s.apply_rows(b)), e.s.apply_rows(f.apply_rows(b))
    _report_rows(report, "g.s=s.f", _differs(lhs, rhs), ((B, b),), (A, lhs), (A, rhs))
    return report.finalize()


def non_faithfulness_witness(sampler: SamplerConfig = DEFAULT_SAMPLER) -> NonFaithfulness:
    """Two distinct endomorphisms ``(g1, f1)``, ``(g2, f2)`` of the lex split extension.

    ``g_n(x, y) = (x, n y)`` over ``f_n(y) = n y``.  Both pairs are checked to
    be morphisms of split extensions; the smallest input where ``g1`` and
    ``g2`` differ is returned alongside.
    """
    e = make_lex_extension(sampler)
    pairs = [(scale_top(e.total, n), scale(e.base, n)) for n in (1, 2)]
    reports = []
    for g, f in pairs:
        reports += [check_morphism(g, sampler), check_morphism(f, sampler), _commuting_report(e, g, f, sampler)]
    (g1, _), (g2, _) = pairs
    corpus = sorted(_ambient_corpus(e.total.dimension).tolist(), key=lambda r: witness_key([r]))
    point = next(tuple(r) for r in corpus if g1.apply_coords(tuple(r)) != g2.apply_coords(tuple(r)))
    pt = Elem(e.total, point)
    return NonFaithfulness(pairs[0], pairs[1], tuple(reports), pt, (g1(pt), g2(pt)))


def _orthogonal_rows(d, a, b):
    return (d.meet_rows(d.join_rows(a, -a), d.join_rows(b, -b)) == 0).all(axis=1)


def polar_section_subset(e: SplitExtension) -> PredicateSubset:
    """``s(B) ∩ k(X)^⊥`` as an exactly decided subset of ``A``.

    A polar is a subgroup, so orthogonality to ``k(X)`` only needs checking
    against the images of the kernel's coordinate unit vectors.
    """
    A, kd = e.total, e.kernel.dimension
    units = e.k.apply_rows(np.eye(kd, dtype=np.int64)) if kd else np.zeros((0, A.dimension), dtype=np.int64)

    def member_mask(rows):
        in_section = ~_differs(e.s.apply_rows(e.p.apply_rows(rows)), rows)
        orth = np.ones(len(rows), dtype=bool)
        for u in units:
            orth &= _orthogonal_rows(A, rows, np.broadcast_to(u, rows.shape))
        return in_section & orth

    def sampler(rng, count, box):
        cand = e.s.apply_rows(e.draw_base(rng, count, box))
        keep = cand[member_mask(cand)]
        if not len(keep):
            return np.zeros((count, A.dimension), dtype=np.int64)
        return keep[rng.integers(0, len(keep), size=count)]

    corpus = e.s.apply_rows(_ambient_corpus(e.base.dimension))
    corpus = corpus[member_mask(corpus)] if len(corpus) else corpus
    return PredicateSubset(A, member_mask, sampler, name=f"s(B)∩k(X)⊥ in {e.name}",
                           corpus=tuple(map(tuple, corpus.tolist())))


def polar_section_ideal_test(e: SplitExtension, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Ideal test (convexity and conjugation) for ``s(B) ∩ k(X)^⊥`` inside ``A``."""
    return ideal_test(polar_section_subset(e), sampler)


@dataclass(eq=False)
class PointSubobject:
    extension: SplitExtension
    xbar: Subalgebra

    def __post_init__(self):
        if self.xbar.ambient != self.extension.kernel:
            raise StructuralError(f"{self.xbar} is not a subalgebra of the kernel {self.extension.kernel}")

    def __str__(self):
        return f"{self.xbar} x {self.extension.base}"


def _pull_status(e, xbar, rows):
    """Membership of ``A``-rows in ``k(xbar)``: 1, 0 or -1 per row."""
    ok, pre = e.k.preimage_rows(rows)
    status = np.zeros(len(rows), dtype=np.int8)
    if ok.any():
        status[ok] = xbar.member_rows(pre[ok])
    return status


def _add_membership(report, e, status, inputs, values, kind):
    report.inconclusive += int((status == -1).sum())
    report.collect(
        status == 0,
        lambda i: Violation(tuple(_elem(d, r[i]) for d, r in inputs), _elem(e.total, values[i]), "not in k(X̄)"),
        [[r for _, r in inputs]], kind,
    )


def closed_under_action_test(ps: PointSubobject, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """``s(b)^-1 l s(b)``, ``(l1 b1 ∨ l2 b2)(b1 ∨ b2)^-1`` and ``(l b ∨ e)(b ∨ e)^-1`` land in X̄."""
    e, xbar = ps.extension, ps.xbar
    A, K, B = e.total, e.kernel, e.base
    report = LawReport(e.name, f"closed_under_action:{xbar}", 0)
    rng = sampler.stream(f"action:{e.name}:{xbar}")
    n, box = sampler.samples, sampler.box
    small_l = xbar.small()[:9]
    small_b = _ambient_corpus(B.dimension, 9)
    blocks = []
    if len(small_l):
        blocks.append(_grid(small_l, small_l, small_b, small_b))
    blocks.append([xbar.draw(rng, n, box), xbar.draw(rng, n, box), e.draw_base(rng, n, box), e.draw_base(rng, n, box)])
    for l1, l2, b1, b2 in blocks:
        report.samples += len(l1)
        kl1, kl2 = e.k.apply_rows(l1), e.k.apply_rows(l2)
        sb1, sb2 = e.s.apply_rows(b1), e.s.apply_rows(b2)
        zero = np.zeros_like(kl1)
        conj = -sb1 + kl1 + sb1
        _add_membership(report, e, _pull_status(e, xbar, conj), ((K, l1), (B, b1)), conj, "conjugation")
        mixed = A.join_rows(kl1 + sb1, kl2 + sb2) - A.join_rows(sb1, sb2)
        _add_membership(report, e, _pull_status(e, xbar, mixed), ((K, l1), (B, b1), (K, l2), (B, b2)), mixed, "join")
        single = A.join_rows(kl1 + sb1, zero) - A.join_rows(sb1, zero)
        _add_membership(report, e, _pull_status(e, xbar, single), ((K, l1), (B, b1)), single, "positive")
    return report.finalize()


def point_centralizer(ps: PointSubobject) -> PointSubobject:
    """The centralizer ``X̄^⊥ x B`` of a coordinate-ideal point subobject."""
    if not isinstance(ps.xbar, CoordinateIdeal):
        raise UnsupportedRepresentation(f"point centralizer needs a coordinate ideal, got {ps.xbar}")
    return PointSubobject(ps.extension, polar(ps.xbar))


def pt_product_cooperator_test(ps1: PointSubobject, ps2: PointSubobject,
                               sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Is ``(x, y) -> x s(p x)^-1 y`` a morphism on the fibered product over ``B``?

    Elements are ``x = k(x̄) s(b)``, ``y = k(ȳ) s(b)``.  Product and join
    preservation are checked on pairs of such elements.
    """
    if ps1.extension is not ps2.extension:
        raise StructuralError("point subobjects of different extensions")
    e = ps1.extension
    A, K, B = e.total, e.kernel, e.base
    report = LawReport(e.name, f"cooperator:{ps1.xbar}|{ps2.xbar}", 0)
    rng = sampler.stream(f"cooperator:{e.name}:{ps1.xbar}:{ps2.xbar}")
    n, box = sampler.samples, sampler.box
    blocks = []
    s1, s2 = ps1.xbar.small()[:9], ps2.xbar.small()[:9]
    if len(s1) and len(s2):
        sb = _ambient_corpus(B.dimension, 3)
        blocks.append(_grid(s1, s2, sb, s1, s2, sb))
    blocks.append([ps1.xbar.draw(rng, n, box), ps2.xbar.draw(rng, n, box), e.draw_base(rng, n, box),
                   ps1.xbar.draw(rng, n, box), ps2.xbar.draw(rng, n, box), e.draw_base(rng, n, box)])

    def coop(x, y):
        return x - e.s.apply_rows(e.p.apply_rows(x)) + y

    for xb, yb, b, xb2, yb2, b2 in blocks:
        report.samples += len(xb)
        sb, sb2 = e.s.apply_rows(b), e.s.apply_rows(b2)
        x, y = e.k.apply_rows(xb) + sb, e.k.apply_rows(yb) + sb
        x2, y2 = e.k.apply_rows(xb2) + sb2, e.k.apply_rows(yb2) + sb2
        ins = ((K, xb), (K, yb), (B, b), (K, xb2), (K, yb2), (B, b2))
        lhs, rhs = coop(x + x2, y + y2), coop(x, y) + coop(x2, y2)
        _report_rows(report, "product", _differs(lhs, rhs), ins, (A, lhs), (A, rhs))
        lhs, rhs = coop(A.join_rows(x, x2), A.join_rows(y, y2)), A.join_rows(coop(x, y), coop(x2, y2))
        _report_rows(report, "join", _differs(lhs, rhs), ins, (A, lhs), (A, rhs))
    return report.finalize()


def coherence_join_closure_test(e: SplitExtension, k: Generated, h: Generated,
                                sampler: SamplerConfig = DEFAULT_SAMPLER, join_box: int | None = None,
                                check_action: bool = True) -> LawReport:
    """Membership in ``K ∨ H`` of ``(k h b ∨ e)(b ∨ e)^-1`` and ``((k ∨ h) b ∨ (k ∧ h)^-1)(b ∨ e)^-1``.

    ``K ∨ H`` is generated by the union of the generators with box
    ``join_box`` (default: the sum of the boxes of K and H, which bounds both
    terms).  Only a definite no fails the report.
    """
    if not e.total.commutative:
        raise PreconditionError("coherence test needs a commutative total algebra")
    if check_action:
        for sub in (k, h):
            r = closed_under_action_test(PointSubobject(e, sub), sampler)
            if not r.passed and r.violations:
                raise PreconditionError(f"{sub} is not closed under the action", report=r)
    A, K, B = e.total, e.kernel, e.base
    kh = Generated(K, k.generators + h.generators, depth=k.depth, box=join_box or (k.box + h.box),
                   max_depth=max(k.max_depth, h.max_depth), name=f"{k}∨{h}")
    report = LawReport(e.name, f"coherence:{k}|{h}", sampler.samples)
    rng = sampler.stream(f"coherence:{e.name}:{k}:{h}")
    n, box = sampler.samples, sampler.box
    kk, hh, b = k.draw(rng, n, box), h.draw(rng, n, box), e.draw_base(rng, n, box)
    ka, ha, sb = e.k.apply_rows(kk), e.k.apply_rows(hh), e.s.apply_rows(b)
    zero = np.zeros_like(ka)
    sb_pos = A.join_rows(sb, zero)
    final = A.join_rows(ka + ha + sb, zero) - sb_pos
    middle = A.join_rows(A.join_rows(ka, ha) + sb, -A.meet_rows(ka, ha)) - sb_pos
    ins = ((K, kk), (K, hh), (B, b))
    for kind, value in (("final", final), ("intermediate", middle)):
        _add_membership(report, e, _pull_status(e, kh, value), ins, value, kind)
    report.samples = 2 * n
    return report.finalize()


def image_subset(m: MorphismSpec, source: Subalgebra | None = None) -> PredicateSubset:
    """``m(X)`` inside the codomain, decided exactly by solving for a preimage."""
    X, Y = m.domain, m.codomain

    def member(rows):
        ok, pre = m.preimage_rows(rows)
        if source is not None and ok.any():
            inside = np.zeros(len(rows), dtype=bool)
            inside[ok] = source.member_rows(pre[ok]) == 1
            ok = inside
        return ok

    def sampler(rng, count, box):
        base = source.draw(rng, count, box) if source is not None else \
            rng.integers(-box, box, size=(count, X.dimension), endpoint=True)
        return m.apply_rows(base)

    pool = source.small() if source is not None else _ambient_corpus(X.dimension)
    corpus = m.apply_rows(pool) if len(pool) else np.zeros((0, Y.dimension), dtype=np.int64)
    return PredicateSubset(Y, member, sampler, name=f"{m.name}(X)", corpus=tuple(map(tuple, corpus.tolist())))


def connecting_map(outer: SplitExtension, inner: SplitExtension, m: MorphismSpec) -> MorphismSpec:
    """``f(a) = l(m(x)) r(p a)`` where ``a = inner.k(x) inner.s(p a)``."""
    A, C = inner.total, outer.total
    eye = np.eye(A.dimension, dtype=np.int64)
    x = inner.kernel_part(eye)
    cols = outer.k.apply_rows(m.apply_rows(x)) + outer.s.apply_rows(inner.p.apply_rows(eye))
    return CoordinateLinear(A, C, tuple(map(tuple, cols.T.tolist())), name="f")


def strong_proto_composite_test(outer: SplitExtension, inner: SplitExtension, m: MorphismSpec,
                                sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Ideal test for the image of the inner kernel inside the outer total algebra.

    Preconditions (shared base, ``m(X)`` an ideal of ``Y``, a commuting
    connecting morphism) raise PreconditionError when they fail.
    """
    if inner.base != outer.base:
        raise PreconditionError(f"bases differ: {inner.base} vs {outer.base}")
    if m.domain != inner.kernel or m.codomain != outer.kernel:
        raise PreconditionError(f"{m} must map {inner.kernel} -> {outer.kernel}")
    pre = ideal_test(image_subset(m), sampler)
    if not pre.passed:
        raise PreconditionError(f"{m.name}(X) is not an ideal of {outer.kernel}", report=pre)
    f = connecting_map(outer, inner, m)
    checks = [check_morphism(f, sampler), _square_report(outer, inner, m, f, sampler)]
    for r in checks:
        if not r.passed:
            raise PreconditionError(f"connecting square fails: {r.law}", report=r)
    report = ideal_test(image_subset(Composite((m, outer.k))), sampler)
    report.law = f"strong_proto:{m.name}"
    return report


def _square_report(outer, inner, m, f, sampler):
    report = LawReport(f"{inner.name} -> {outer.name}", "square", sampler.samples)
    rng = sampler.stream(f"square:{inner.name}:{outer.name}")
    n, box = sampler.samples, sampler.box
    x = rng.integers(-box, box, size=(n, inner.kernel.dimension), endpoint=True)
    a = rng.integers(-box, box, size=(n, inner.total.dimension), endpoint=True)
    C, B = outer.total, outer.base
    lhs, rhs = f.apply_rows(inner.k.apply_rows(x)), outer.k.apply_rows(m.apply_rows(x))
    _report_rows(report, "f.k=l.m", _differs(lhs, rhs), ((inner.kernel, x),), (C, lhs), (C, rhs))
    lhs, rhs = outer.p.apply_rows(f.apply_rows(a)), inner.p.apply_rows(a)
    _report_rows(report, "q.f=p", _differs(lhs, rhs), ((inner.total, a),), (B, lhs), (B, rhs))
    return report.finalize()
