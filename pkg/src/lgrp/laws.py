"""Sampled verification of the defining laws and derived identities.

Each law is evaluated on batched coordinate rows and returns ``(lhs, rhs)``;
a law passes when the two sides agree exactly on every draw.
"""
from __future__ import annotations

import itertools

import numpy as np

from .core import Descriptor, Elem, as_descriptor
from .reports import LawReport, Violation
from .sampling import DEFAULT_SAMPLER, SamplerConfig, draw_tuples, witness_key


def _law_table(d: Descriptor):
    """Laws over batched rows; each returns ``(lhs, rhs)`` arrays (or tuples of them)."""
    join, meet, leq = d.join_rows, d.meet_rows, d.leq_rows

    def pos(x):
        return join(x, np.zeros_like(x))

    def neg(x):
        return meet(x, np.zeros_like(x))

    def same(a, b):
        return (a == b).all(axis=1)

    laws = [
        ("group_assoc", 3, lambda x, y, z: ((x + y) + z, x + (y + z))),
        ("group_unit", 1, lambda x: ((0 * x + x, x + 0 * x), (x, x))),
        ("group_inverse", 1, lambda x: ((x + -x, -x + x), (0 * x, 0 * x))),
        ("join_assoc", 3, lambda x, y, z: (join(join(x, y), z), join(x, join(y, z)))),
        ("join_comm", 2, lambda x, y: (join(x, y), join(y, x))),
        ("join_idem", 1, lambda x: (join(x, x), x)),
        ("meet_assoc", 3, lambda x, y, z: (meet(meet(x, y), z), meet(x, meet(y, z)))),
        ("meet_comm", 2, lambda x, y: (meet(x, y), meet(y, x))),
        ("meet_idem", 1, lambda x: (meet(x, x), x)),
        ("absorption", 2, lambda x, y: ((join(x, meet(x, y)), meet(x, join(x, y))), (x, x))),
        ("lg3_left", 3, lambda x, y, z: (x + join(y, z), join(x + y, x + z))),
        ("lg3_right", 3, lambda x, y, z: (join(x, y) + z, join(x + z, y + z))),
        ("lg3_meet_left", 3, lambda x, y, z: (x + meet(y, z), meet(x + y, x + z))),
        ("lg3_meet_right", 3, lambda x, y, z: (meet(x, y) + z, meet(x + z, y + z))),
        ("distributive_meet_over_join", 3,
         lambda x, y, z: (meet(x, join(y, z)), join(meet(x, y), meet(x, z)))),
        ("distributive_join_over_meet", 3,
         lambda x, y, z: (join(x, meet(y, z)), meet(join(x, y), join(x, z)))),
        ("order_join_meet", 2, lambda x, y: (same(join(x, y), y), same(meet(x, y), x))),
        ("translation_invariance", 3,
         lambda a, x, y: (leq(x, y), leq(a + x, a + y) & leq(x + a, y + a))),
        ("eq1", 4, lambda a, b, x, y: (a - meet(x, y) + b, join(a - x + b, a - y + b))),
        ("eq2", 2, lambda x, y: (x - meet(x, y) + y, join(x, y))),
        ("eq3", 2, lambda x, y: (x, join(x, y) - y + meet(x, y))),
        ("eq4", 1, lambda x: (x, pos(x) + neg(x))),
        ("eq5", 1, lambda x: (join(x, -x), pos(x) - neg(x))),
    ]
    if d.commutative:
        laws.append(("abelian_identity", 2, lambda x, y: (x + y, join(x, y) + meet(x, y))))
    return laws


LAW_IDS = [name for name, _, _ in _law_table(as_descriptor("Z"))]

# int64 is exact while every intermediate stays far below 2**63
_INT64_BOX = 2**40


def _mismatch(lhs, rhs):
    if isinstance(lhs, tuple):
        out = _mismatch(lhs[0], rhs[0])
        for l, r in zip(lhs[1:], rhs[1:]):
            out |= _mismatch(l, r)
        return out
    if lhs.ndim == 1:
        return lhs != rhs
    return (lhs != rhs).any(axis=1)


def _pick_row(value, i):
    if isinstance(value, tuple):
        return tuple(_pick_row(v, i) for v in value)
    row = value[i]
    return bool(row) if value.ndim == 1 else tuple(int(c) for c in row)


def law_suite(d, sampler: SamplerConfig = DEFAULT_SAMPLER, laws=None) -> list[LawReport]:
    """One report per law, each on ``sampler.samples`` fresh draws.

    Group operations are written additively on the batched rows; the
    lattice operations go through the descriptor (``meet`` derived).
    """
    d = as_descriptor(d)
    reports = []
    for name, arity, fn in _law_table(d):
        if laws is not None and name not in laws:
            continue
        report = LawReport(str(d), name, sampler.samples)
        args = _draw_block(sampler, f"law:{name}:{d}", arity, d.dimension)
        lhs, rhs = fn(*args)
        report.collect(
            _mismatch(lhs, rhs),
            lambda i: Violation(tuple(_elem(d, a[i]) for a in args), _wrap(d, _pick_row(lhs, i)), _wrap(d, _pick_row(rhs, i))),
            [args],
        )
        reports.append(report.finalize())
    return reports


def _wrap(d, value):
    if isinstance(value, tuple) and value and isinstance(value[0], tuple):
        return tuple(Elem(d, v) for v in value)
    if isinstance(value, tuple):
        return Elem(d, value)
    return value


def _draw_block(sampler, label, arity, dim):
    rng = sampler.stream(label)
    dtype = np.int64 if sampler.box <= _INT64_BOX else object
    block = rng.integers(-sampler.box, sampler.box, size=(arity, sampler.samples, dim), endpoint=True)
    return [block[i].astype(dtype) for i in range(arity)]


def _elem(d, row):
    return Elem(d, tuple(int(c) for c in row))


def check_morphism(f, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Group product and positive part preservation on samples.

    By the positive-part criterion these two together imply join
    preservation, so joins are not checked here.
    """
    dom, cod = f.domain, f.codomain
    report = LawReport(f"{dom} -> {cod}", f"morphism:{f.name}", sampler.samples)
    x, y = _draw_block(sampler, f"morphism:{f.name}:{dom}:{cod}", 2, dom.dimension)
    fx, fy = f.apply_rows(x), f.apply_rows(y)
    lhs, rhs = f.apply_rows(x + y), fx + fy
    report.collect(
        _mismatch(lhs, rhs),
        lambda i: Violation((_elem(dom, x[i]), _elem(dom, y[i])), _elem(cod, lhs[i]), _elem(cod, rhs[i])),
        [[x, y]], "product",
    )
    lhs = f.apply_rows(dom.join_rows(x, np.zeros_like(x)))
    rhs = cod.join_rows(fx, np.zeros_like(fx))
    report.collect(
        _mismatch(lhs, rhs),
        lambda i: Violation((_elem(dom, x[i]),), _elem(cod, lhs[i]), _elem(cod, rhs[i])),
        [[x]], "positive_part",
    )
    return report.finalize()


def check_join_preservation(f, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    dom, cod = f.domain, f.codomain
    report = LawReport(f"{dom} -> {cod}", f"join:{f.name}", sampler.samples)
    x, y = _draw_block(sampler, f"join:{f.name}:{dom}:{cod}", 2, dom.dimension)
    lhs = f.apply_rows(dom.join_rows(x, y))
    rhs = cod.join_rows(f.apply_rows(x), f.apply_rows(y))
    report.collect(
        _mismatch(lhs, rhs),
        lambda i: Violation((_elem(dom, x[i]), _elem(dom, y[i])), _elem(cod, lhs[i]), _elem(cod, rhs[i])),
        [[x, y]],
    )
    return report.finalize()


def internal_group_refuter(d, sampler: SamplerConfig = DEFAULT_SAMPLER):
    """Search for ``(a, b, c, d)`` where multiplication fails to preserve joins.

    Multiplication ``X × X -> X`` would have to be a morphism for ``X`` to
    carry an internal group structure.  Quadruples with coordinates in
    ``{0, 1}`` are scanned first (smallest first), then ``sampler.samples``
    random ones.  Returns ``(inputs, lhs, rhs)`` for the first violation, or None.
    """
    desc = as_descriptor(d)
    mul, join = desc.mul, desc.join
    dim = desc.dimension
    corpus = []
    if 4 * dim <= 12:
        corpus = sorted(itertools.product((0, 1), repeat=4 * dim), key=lambda r: witness_key([r]))
        corpus = [tuple(r[i * dim:(i + 1) * dim] for i in range(4)) for r in corpus]
    rng = sampler.stream(f"internal_group:{desc}")
    for quad in itertools.chain(corpus, draw_tuples(rng, dim, sampler.samples, 4, sampler.box)):
        a, b, c, e = quad
        lhs = mul(join(a, c), join(b, e))
        rhs = join(mul(a, b), mul(c, e))
        if lhs != rhs:
            return tuple(Elem(desc, v) for v in quad), Elem(desc, lhs), Elem(desc, rhs)
    return None


def check_maltsev(d, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """``p(x,x,z) = z`` and ``p(x,y,y) = x`` for ``p(x,y,z) = x y^-1 z``."""
    desc = as_descriptor(d)
    mul, inv = desc.mul, desc.inv
    report = LawReport(str(desc), "maltsev", sampler.samples)
    rng = sampler.stream(f"maltsev:{desc}")
    for x, y, z in draw_tuples(rng, desc.dimension, sampler.samples, 3, sampler.box):
        if mul(mul(x, inv(x)), z) != z:
            report.add(Violation(tuple(Elem(desc, v) for v in (x, z)), Elem(desc, mul(mul(x, inv(x)), z)), Elem(desc, z), "p(x,x,z)"))
        if mul(mul(x, inv(y)), y) != x:
            report.add(Violation(tuple(Elem(desc, v) for v in (x, y)), Elem(desc, mul(mul(x, inv(y)), y)), Elem(desc, x), "p(x,y,y)"))
    return report.finalize()
