"""Counterexample search for term identities."""
from __future__ import annotations

import itertools

import numpy as np

from ..core import Elem, as_descriptor
from ..reports import LawReport, Violation
from ..sampling import DEFAULT_SAMPLER, SamplerConfig, witness_key
from .parser import parse_term
from .terms import eval_rows, variables

# exhaustive corpus sizes tried before random sampling
_CORPUS_LIMIT = 6561


def _as_term(t):
    return parse_term(t) if isinstance(t, str) else t


def _corpus(width):
    """All coordinate vectors of length ``width`` in the largest small box that fits."""
    for radius in (2, 1):
        if (2 * radius + 1) ** width <= _CORPUS_LIMIT:
            values = range(-radius, radius + 1)
            return np.array(list(itertools.product(values, repeat=width)), dtype=np.int64).reshape(-1, width)
    return np.zeros((0, width), dtype=np.int64)


def _envs(names, d, block):
    dim = d.dimension
    return {n: block[:, i * dim:(i + 1) * dim] for i, n in enumerate(names)}


def refute_identity(lhs, rhs, d, sampler: SamplerConfig = DEFAULT_SAMPLER):
    """Search for an environment where ``lhs`` and ``rhs`` denote different elements.

    A small exhaustive box is scanned first, then ``sampler.samples`` random
    environments.  Among all counterexamples seen, the smallest under the
    witness order is returned as ``{name: Elem}``, so the answer does not
    depend on scan order.  ``None`` only means nothing was found.
    """
    lhs, rhs = _as_term(lhs), _as_term(rhs)
    d = as_descriptor(d)
    names = sorted(variables(lhs) | variables(rhs))
    if not names or d.dimension == 0:
        # closed terms (or the one-element group): a single evaluation decides
        env = {n: np.zeros((1, d.dimension), dtype=np.int64) for n in names or ["_"]}
        same = (eval_rows(lhs, env, d) == eval_rows(rhs, env, d)).all()
        return None if same else {n: d.identity() for n in names}
    width = len(names) * d.dimension
    rng = sampler.stream(f"refute:{d}")
    drawn = rng.integers(-sampler.box, sampler.box, size=(sampler.samples, width), endpoint=True)
    best = None
    for block in (_corpus(width), drawn):
        if not len(block):
            continue
        env = _envs(names, d, block)
        bad = (eval_rows(lhs, env, d) != eval_rows(rhs, env, d)).any(axis=1)
        for i in np.flatnonzero(bad).tolist():
            row = tuple(int(c) for c in block[i])
            key = witness_key([row])
            if best is None or key < best[0]:
                best = (key, row)
    if best is None:
        return None
    row = best[1]
    dim = d.dimension
    return {n: Elem(d, row[i * dim:(i + 1) * dim]) for i, n in enumerate(names)}


T1 = "x^-1 * y"
T = "x * z"


def check_protomodular_witness(d, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Check the one-term protomodularity witness ``t1(x,y) = x^-1 y``, ``t(x,z) = x z``.

    Verifies ``t(x, t1(x, y)) = y`` and ``t1(x, x) = e`` on samples.
    """
    d = as_descriptor(d)
    t1, t = parse_term(T1), parse_term(T)
    report = LawReport(str(d), "protomodular_witness", sampler.samples)
    rng = sampler.stream(f"protomodular:{d}")
    block = rng.integers(-sampler.box, sampler.box, size=(2, sampler.samples, d.dimension), endpoint=True)
    x, y = block[0], block[1]
    back = eval_rows(t, {"x": x, "z": eval_rows(t1, {"x": x, "y": y}, d)}, d)
    diag = eval_rows(t1, {"x": x, "y": x}, d)
    def el(row):
        return Elem(d, tuple(int(c) for c in row))

    report.collect((back != y).any(axis=1), lambda i: Violation((el(x[i]), el(y[i])), el(back[i]), el(y[i])),
                   [[x, y]], "t(x,t1(x,y))=y")
    report.collect(diag.any(axis=1), lambda i: Violation((el(x[i]),), el(diag[i]), d.identity()),
                   [[x]], "t1(x,x)=e")
    return report.finalize()


def identity_pairs() -> dict:
    """Named identities valid in every ℓ-group (the last one needs commutativity)."""
    return {
        "eq1": ("a * (x /\\ y)^-1 * b", "a * x^-1 * b \\/ a * y^-1 * b"),
        "eq2": ("x * (x /\\ y)^-1 * y", "x \\/ y"),
        "eq3": ("x", "(x \\/ y) * y^-1 * (x /\\ y)"),
        "eq4": ("x", "pos(x) * neg(x)"),
        "eq5": ("abs(x)", "pos(x) * neg(x)^-1"),
        "abelian": ("x * y", "(x \\/ y) * (x /\\ y)"),
    }
