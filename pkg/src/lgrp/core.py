"""Concrete lattice-ordered groups and their element-level operations.

Every instance is a finite tuple of Python integers.  The group structure is
coordinatewise addition in all provided instances, but the public surface is
multiplicative: ``mul``, ``inv``, ``identity``.  Only ``join`` is instance
specific; ``meet`` is always derived as ``inv(join(inv x, inv y))``.

Descriptors do the work on raw coordinate tuples (``d.join(a, b)`` etc.) so
that bulk checks can skip the ``Elem`` wrapper.  ``Elem`` is the checked,
user-facing value.
"""
from __future__ import annotations

import functools
import operator
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DescriptorMismatch, StructuralError

Coords = tuple


class Descriptor:
    """Base class for the four descriptor kinds."""

    dimension: int
    totally_ordered: bool
    # every provided instance has a commutative group reduct
    commutative = True
    coordinatewise = False

    # group structure: identical for all instances
    def mul(self, a: Coords, b: Coords) -> Coords:
        return tuple(map(operator.add, a, b))

    def inv(self, a: Coords) -> Coords:
        return tuple(map(operator.neg, a))

    def unit(self) -> Coords:
        return (0,) * self.dimension

    def join(self, a: Coords, b: Coords) -> Coords:
        raise NotImplementedError

    def meet(self, a: Coords, b: Coords) -> Coords:
        # derived; never specialised per instance
        return self.inv(self.join(self.inv(a), self.inv(b)))

    def leq(self, a: Coords, b: Coords) -> bool:
        return self.join(a, b) == b

    # batched forms over (count, dimension) integer arrays
    def join_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def meet_rows(self, a, b):
        return -self.join_rows(-a, -b)

    def leq_rows(self, a, b):
        return (self.join_rows(a, b) == b).all(axis=1)

    def elem(self, *coords) -> "Elem":
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        return Elem(self, tuple(int(c) for c in coords))

    def identity(self) -> "Elem":
        return Elem(self, self.unit())


@dataclass(frozen=True, eq=True, repr=False)
class Integers(Descriptor):
    dimension: int = field(default=1, init=False)
    totally_ordered: bool = field(default=True, init=False)
    coordinatewise = True

    def join(self, a, b):
        return a if a[0] >= b[0] else b

    def join_rows(self, a, b):
        return np.maximum(a, b)

    def __str__(self):
        return "Z"

    __repr__ = __str__


@dataclass(frozen=True, eq=True, repr=False)
class Product(Descriptor):
    factors: tuple = ()
    dimension: int = field(init=False, compare=False)
    totally_ordered: bool = field(init=False, compare=False)
    coordinatewise: bool = field(init=False, compare=False)

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "dimension", sum(f.dimension for f in factors))
        object.__setattr__(
            self, "totally_ordered", len(factors) == 0 or (len(factors) == 1 and factors[0].totally_ordered)
        )
        object.__setattr__(self, "coordinatewise", all(f.coordinatewise for f in factors))
        offsets, start = [], 0
        for f in factors:
            offsets.append((start, start + f.dimension))
            start += f.dimension
        object.__setattr__(self, "_slices", tuple(offsets))

    def join(self, a, b):
        if self.coordinatewise:
            return tuple(map(max, a, b))
        out = ()
        for f, (lo, hi) in zip(self.factors, self._slices):
            out += f.join(a[lo:hi], b[lo:hi])
        return out

    def join_rows(self, a, b):
        if self.coordinatewise:
            return np.maximum(a, b)
        parts = [f.join_rows(a[:, lo:hi], b[:, lo:hi]) for f, (lo, hi) in zip(self.factors, self._slices)]
        return np.concatenate(parts, axis=1) if parts else a.copy()

    def __str__(self):
        if len(self.factors) > 1 and all(isinstance(f, Integers) for f in self.factors):
            return f"Z^{len(self.factors)}"
        return "prod(" + ",".join(str(f) for f in self.factors) + ")"

    __repr__ = __str__


@dataclass(frozen=True, eq=True, repr=False)
class Lex(Descriptor):
    """Lexicographic extension: coordinates are kernel part then top part.

    ``(a, b) <= (c, d)`` iff ``b < d``, or ``b == d`` and ``a <= c``.
    """

    kernel: Descriptor
    top: Descriptor
    dimension: int = field(init=False, compare=False)
    totally_ordered: bool = field(init=False, compare=False)

    def __post_init__(self):
        if not self.top.totally_ordered:
            raise StructuralError(f"lex top factor must be totally ordered, got {self.top}")
        object.__setattr__(self, "dimension", self.kernel.dimension + self.top.dimension)
        object.__setattr__(self, "totally_ordered", self.kernel.totally_ordered)

    def join(self, a, b):
        kd = self.kernel.dimension
        ta, tb = a[kd:], b[kd:]
        if ta == tb:
            return self.kernel.join(a[:kd], b[:kd]) + ta
        # top is totally ordered, so the tops are comparable
        return b if self.top.join(ta, tb) == tb else a

    def join_rows(self, a, b):
        kd = self.kernel.dimension
        ta, tb = a[:, kd:], b[:, kd:]
        same_top = (ta == tb).all(axis=1)
        b_above = self.top.leq_rows(ta, tb)
        merged = np.concatenate([self.kernel.join_rows(a[:, :kd], b[:, :kd]), ta], axis=1)
        return np.where(same_top[:, None], merged, np.where(b_above[:, None], b, a))

    def __str__(self):
        return f"lex({self.kernel},{self.top})"

    __repr__ = __str__


@dataclass(frozen=True, eq=True, repr=False)
class Quotient(Descriptor):
    """``Z^n`` modulo the coordinate ideal on ``killed``; coordinates are the survivors."""

    base: Descriptor
    killed: frozenset = frozenset()
    dimension: int = field(init=False, compare=False)
    totally_ordered: bool = field(init=False, compare=False)
    coordinatewise = True

    def __post_init__(self):
        if not (isinstance(self.base, Integers)
                or isinstance(self.base, Product) and all(isinstance(f, Integers) for f in self.base.factors)):
            raise StructuralError(f"quotient base must be Z^n, got {self.base}")
        killed = frozenset(int(i) for i in self.killed)
        if not killed <= set(range(self.base.dimension)):
            raise StructuralError(f"killed support {sorted(killed)} outside 0..{self.base.dimension - 1}")
        object.__setattr__(self, "killed", killed)
        dim = self.base.dimension - len(killed)
        object.__setattr__(self, "dimension", dim)
        object.__setattr__(self, "totally_ordered", dim <= 1)
        object.__setattr__(self, "survivors", tuple(i for i in range(self.base.dimension) if i not in killed))

    def join(self, a, b):
        return tuple(map(max, a, b))

    def join_rows(self, a, b):
        return np.maximum(a, b)

    def project(self, x: "Elem") -> "Elem":
        """The quotient map ``Z^n -> Z^n / I``."""
        _check_desc(x, self.base)
        return Elem(self, tuple(x.coords[i] for i in self.survivors))

    def __str__(self):
        return f"quot({self.base},{{{','.join(str(i) for i in sorted(self.killed))}}})"

    __repr__ = __str__


def integers_power(n: int) -> Descriptor:
    """``Z^n``; ``Z^1`` is canonically ``Z``."""
    return Integers() if n == 1 else Product((Integers(),) * n)


ZERO = Product(())


@dataclass(frozen=True, slots=True)
class Elem:
    desc: Descriptor
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.desc.dimension:
            raise StructuralError(
                f"{self.desc} expects {self.desc.dimension} coordinates, got {len(self.coords)}"
            )

    def __mul__(self, other):
        return mul(self, other)

    def __or__(self, other):
        return join(self, other)

    def __and__(self, other):
        return meet(self, other)

    def __le__(self, other):
        return leq(self, other)

    def inv(self):
        return inv(self)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"Elem({self.desc}, {self})"


def _check_desc(x: Elem, d: Descriptor) -> None:
    if x.desc is not d and x.desc != d:
        raise DescriptorMismatch(f"element of {x.desc} used where {d} is expected")


def _same(x: Elem, y: Elem) -> Descriptor:
    if x.desc is not y.desc and x.desc != y.desc:
        raise DescriptorMismatch(f"cannot combine elements of {x.desc} and {y.desc}")
    return x.desc


def mul(x: Elem, y: Elem) -> Elem:
    d = _same(x, y)
    return Elem(d, d.mul(x.coords, y.coords))


def inv(x: Elem) -> Elem:
    return Elem(x.desc, x.desc.inv(x.coords))


def identity(d: Descriptor) -> Elem:
    return d.identity()


def join(x: Elem, y: Elem) -> Elem:
    d = _same(x, y)
    return Elem(d, d.join(x.coords, y.coords))


def meet(x: Elem, y: Elem) -> Elem:
    return inv(join(inv(x), inv(y)))


def leq(x: Elem, y: Elem) -> bool:
    return join(x, y) == y


def pos_part(x: Elem) -> Elem:
    return join(x, identity(x.desc))


def neg_part(x: Elem) -> Elem:
    return meet(x, identity(x.desc))


def abs_val(x: Elem) -> Elem:
    return join(x, inv(x))


def is_positive(x: Elem) -> bool:
    return leq(identity(x.desc), x)


def is_orthogonal(x: Elem, y: Elem) -> bool:
    """``|x| ∧ |y| = e``."""
    d = _same(x, y)
    return meet(abs_val(x), abs_val(y)).coords == d.unit()


def maltsev(x: Elem, y: Elem, z: Elem) -> Elem:
    return mul(mul(x, inv(y)), z)


# -- descriptor syntax -------------------------------------------------------

class _DescParser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def fail(self, what):
        raise StructuralError(f"bad instance descriptor {self.src!r} at offset {self.pos}: expected {what}")

    def skip(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def take(self, literal):
        self.skip()
        if self.src.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal):
        if not self.take(literal):
            self.fail(repr(literal))

    def number(self):
        self.skip()
        m = re.compile(r"\d+").match(self.src, self.pos)
        if not m:
            self.fail("an integer")
        self.pos = m.end()
        return int(m.group())

    def descriptor(self) -> Descriptor:
        self.skip()
        for name in ("prod", "lex", "quot"):
            m = re.compile(name + r"\s*\(").match(self.src, self.pos)
            if m:
                self.pos = m.end()
                return getattr(self, "_" + name)()
        if self.take("Z"):
            if self.take("^"):
                return integers_power(self.number())
            return Integers()
        self.fail("Z, Z^n, prod(...), lex(...) or quot(...)")

    def _prod(self):
        factors = []
        if not self.take(")"):
            factors.append(self.descriptor())
            while self.take(","):
                factors.append(self.descriptor())
            self.expect(")")
        return Product(tuple(factors))

    def _lex(self):
        kernel = self.descriptor()
        self.expect(",")
        top = self.descriptor()
        self.expect(")")
        return Lex(kernel, top)

    def _quot(self):
        base = self.descriptor()
        self.expect(",")
        self.expect("{")
        killed = []
        if not self.take("}"):
            killed.append(self.number())
            while self.take(","):
                killed.append(self.number())
            self.expect("}")
        self.expect(")")
        return Quotient(base, frozenset(killed))


@functools.lru_cache(maxsize=256)
def parse_descriptor(src: str) -> Descriptor:
    """Parse ``Z | Z^n | prod(D,...) | lex(D,D) | quot(Z^n,{i,...})``."""
    p = _DescParser(src)
    d = p.descriptor()
    p.skip()
    if p.pos != len(src):
        p.fail("end of input")
    return d


def as_descriptor(d) -> Descriptor:
    return parse_descriptor(d) if isinstance(d, str) else d


_ELEM = re.compile(r"^\s*\(?\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*\)?\s*$")


def parse_elem(src: str, d: Descriptor) -> Elem:
    """Parse ``(1,-2)``; a bare integer is accepted for one-dimensional instances."""
    m = _ELEM.match(src)
    if not m:
        raise StructuralError(f"bad element literal {src!r}")
    body = m.group(1)
    coords = tuple(int(c) for c in body.split(",")) if body else ()
    return Elem(d, coords)


def parse_elem_list(src: str, d: Descriptor) -> list[Elem]:
    """Semicolon-separated tuples, e.g. ``"(1,0);(0,0)"``."""
    return [parse_elem(part, d) for part in src.split(";") if part.strip()]


def elements(d: Descriptor, rows: Iterable[Sequence[int]]) -> list[Elem]:
    return [Elem(d, tuple(r)) for r in rows]
