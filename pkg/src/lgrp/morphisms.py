"""Evaluable maps between instances.

All maps in play act linearly on flattened coordinates, so each spec reduces
to an integer matrix (rows = codomain coordinates).  ``preimage`` inverts an
injective map exactly over the rationals and rejects non-integral or
out-of-image targets.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Descriptor, Elem, _check_desc, as_descriptor
from .errors import StructuralError


class MorphismSpec:
    domain: Descriptor
    codomain: Descriptor
    name: str = "f"

    def matrix(self) -> tuple:
        raise NotImplementedError

    def apply_coords(self, a: tuple) -> tuple:
        return tuple(sum(r * c for r, c in zip(row, a)) for row in self.matrix())

    def __call__(self, x: Elem) -> Elem:
        _check_desc(x, self.domain)
        return Elem(self.codomain, self.apply_coords(x.coords))

    def then(self, other: "MorphismSpec") -> "Composite":
        """``other ∘ self``."""
        return Composite((self, other))

    def preimage(self, y: Elem) -> Elem:
        _check_desc(y, self.codomain)
        sol = solve_exact(self.matrix(), y.coords, self.domain.dimension)
        if sol is None:
            raise StructuralError(f"{y} is not in the image of {self.name}")
        return Elem(self.domain, sol)

    def in_image(self, y: Elem) -> bool:
        return solve_exact(self.matrix(), y.coords, self.domain.dimension) is not None

    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        """Apply to a ``(count, domain.dimension)`` array of coordinates."""
        m = np.array(self.matrix(), dtype=rows.dtype).reshape(self.codomain.dimension, self.domain.dimension)
        return rows @ m.T

    def preimage_rows(self, rows: np.ndarray):
        """``(mask, pre)``: which rows lie in the image, and their preimages.

        Needs an integral left inverse (true for coordinate embeddings);
        otherwise falls back to exact row-by-row solving.
        """
        left = left_inverse(self.matrix(), self.domain.dimension)
        if left is not None:
            lm = np.array(left, dtype=rows.dtype).reshape(self.domain.dimension, self.codomain.dimension)
            pre = rows @ lm.T
            return (self.apply_rows(pre) == rows).all(axis=1), pre
        pre = np.zeros((len(rows), self.domain.dimension), dtype=rows.dtype)
        mask = np.zeros(len(rows), dtype=bool)
        for i, r in enumerate(rows.tolist()):
            sol = solve_exact(self.matrix(), r, self.domain.dimension)
            if sol is not None:
                mask[i] = True
                pre[i] = sol
        return mask, pre

    def __str__(self):
        return f"{self.name}: {self.domain} -> {self.codomain}"


@dataclass(frozen=True, eq=True)
class CoordinateLinear(MorphismSpec):
    domain: Descriptor
    codomain: Descriptor
    rows: tuple
    name: str = "f"

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "domain", as_descriptor(self.domain))
        object.__setattr__(self, "codomain", as_descriptor(self.codomain))
        if len(rows) != self.codomain.dimension or any(len(r) != self.domain.dimension for r in rows):
            raise StructuralError(
                f"matrix shape {len(rows)}x{len(rows[0]) if rows else self.domain.dimension} does not fit "
                f"{self.domain} -> {self.codomain}"
            )

    def matrix(self):
        return self.rows


def _scale(domain, codomain, n):
    d = domain.dimension
    return tuple(tuple(n if i == j else 0 for j in range(d)) for i in range(d))


def _scale_top(domain, codomain, n):
    # (x, y) -> (x, n y) on a lex extension: scale only the top block
    kd = domain.kernel.dimension
    d = domain.dimension
    return tuple(tuple((n if i >= kd else 1) if i == j else 0 for j in range(d)) for i in range(d))


def _identity(domain, codomain):
    return _scale(domain, codomain, 1)


def _zero(domain, codomain):
    return tuple((0,) * domain.dimension for _ in range(codomain.dimension))


def _embed(domain, codomain, offset=0):
    """Coordinate inclusion placing the domain block at ``offset``."""
    return tuple(
        tuple(1 if i - offset == j else 0 for j in range(domain.dimension)) for i in range(codomain.dimension)
    )


def _project(domain, codomain, offset=0):
    return tuple(
        tuple(1 if j - offset == i else 0 for j in range(domain.dimension)) for i in range(codomain.dimension)
    )


BUILTINS = {
    "scale": _scale,
    "scale_top": _scale_top,
    "identity": _identity,
    "zero": _zero,
    "embed": _embed,
    "project": _project,
}


@dataclass(frozen=True, eq=True)
class NamedBuiltin(MorphismSpec):
    domain: Descriptor
    codomain: Descriptor
    tag: str
    params: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "domain", as_descriptor(self.domain))
        object.__setattr__(self, "codomain", as_descriptor(self.codomain))
        if self.tag not in BUILTINS:
            raise StructuralError(f"unknown builtin morphism {self.tag!r}")
        if not self.name:
            args = ",".join(str(p) for p in self.params)
            object.__setattr__(self, "name", f"{self.tag}({args})" if args else self.tag)
        object.__setattr__(self, "_rows", BUILTINS[self.tag](self.domain, self.codomain, *self.params))

    def matrix(self):
        return self._rows


@dataclass(frozen=True, eq=True)
class Composite(MorphismSpec):
    """Maps applied left to right."""

    parts: tuple
    name: str = ""

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise StructuralError("empty composite")
        for f, g in zip(parts, parts[1:]):
            if f.codomain != g.domain:
                raise StructuralError(f"cannot compose {f} with {g}")
        object.__setattr__(self, "parts", parts)
        if not self.name:
            object.__setattr__(self, "name", " ; ".join(p.name for p in parts))
        rows = parts[0].matrix()
        for g in parts[1:]:
            rows = _matmul(g.matrix(), rows, parts[0].domain.dimension)
        object.__setattr__(self, "_rows", rows)

    @property
    def domain(self):
        return self.parts[0].domain

    @property
    def codomain(self):
        return self.parts[-1].codomain

    def matrix(self):
        return self._rows


def _matmul(a, b, inner_cols):
    return tuple(tuple(sum(a_row[k] * b[k][j] for k in range(len(b))) for j in range(inner_cols)) for a_row in a)


def solve_exact(rows, target, ncols):
    """Integer solution of ``rows @ x = target`` when it exists and is unique, else None."""
    m = len(rows)
    aug = [[Fraction(c) for c in rows[i]] + [Fraction(target[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(all(v == 0 for v in aug[i][:ncols]) and aug[i][ncols] != 0 for i in range(m)):
        return None
    if len(pivots) != ncols:
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][ncols]
    if any(v.denominator != 1 for v in sol):
        return None
    return tuple(int(v) for v in sol)


def left_inverse(rows, ncols):
    """Integer matrix ``L`` with ``L @ M = I``, or None if there is none of the simple kind.

    Uses ``(M^T M)^-1 M^T`` over the rationals; for coordinate embeddings this
    is integral.
    """
    m = len(rows)
    if ncols == 0:
        return ()
    gram = [[sum(Fraction(rows[k][i]) * rows[k][j] for k in range(m)) for j in range(ncols)] for i in range(ncols)]
    inv = _invert(gram)
    if inv is None:
        return None
    left = [[sum(inv[i][j] * rows[k][j] for j in range(ncols)) for k in range(m)] for i in range(ncols)]
    if any(v.denominator != 1 for row in left for v in row):
        return None
    return tuple(tuple(int(v) for v in row) for row in left)


def _invert(a):
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vc for vi, vc in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def linear(domain, codomain, rows, name="f") -> CoordinateLinear:
    return CoordinateLinear(as_descriptor(domain), as_descriptor(codomain), rows, name)


def scale(d, n: int) -> NamedBuiltin:
    """``x -> x^n``; written ``f_n(x) = nx`` additively."""
    d = as_descriptor(d)
    return NamedBuiltin(d, d, "scale", (n,), name=f"f_{n}")


def scale_top(d, n: int) -> NamedBuiltin:
    """``(x, y) -> (x, n y)`` on a lexicographic extension."""
    d = as_descriptor(d)
    return NamedBuiltin(d, d, "scale_top", (n,), name=f"g_{n}")
