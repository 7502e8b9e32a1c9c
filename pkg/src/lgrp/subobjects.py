"""Subalgebras, convexity and ideals, polars, Huq commutators and congruences.

Two representations are supported.  ``CoordinateIdeal`` is the exact one:
inside ``Z^n`` the elements supported on a fixed index set.  ``Generated``
is presented by generators and only known through a bounded closure, so
its membership answers are ``yes`` or ``inconclusive``; a test may add an
invariant predicate that the whole subalgebra is known to satisfy, and a
failed predicate is then a definite ``no``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Descriptor, Elem, Integers, Product, Quotient, as_descriptor, integers_power, is_orthogonal
from .errors import DescriptorMismatch, ResourceError, StructuralError, UnsupportedRepresentation
from .reports import LawReport, Violation
from .sampling import DEFAULT_SAMPLER, SamplerConfig, witness_key

YES, NO, INCONCLUSIVE = "yes", "no", "inconclusive"
_CODE = {1: YES, 0: NO, -1: INCONCLUSIVE}

DEFAULT_CLOSURE_BUDGET = 200_000
DEFAULT_MAX_DEPTH = 6
# pair evaluations per numpy batch inside a closure round
_CHUNK = 1 << 20


def as_rows(rows, dim: int) -> np.ndarray:
    """A list of coordinate tuples as a ``(len, dim)`` int64 array (dim may be 0)."""
    rows = list(rows) if not isinstance(rows, np.ndarray) else rows
    return np.array(rows, dtype=np.int64).reshape(len(rows), dim)


def is_integer_power(d: Descriptor) -> bool:
    """``Z`` or ``Z^n``: the ambients with exact coordinate ideals."""
    return isinstance(d, Integers) or (isinstance(d, Product) and all(isinstance(f, Integers) for f in d.factors))


class Subalgebra:
    ambient: Descriptor

    def member_rows(self, rows: np.ndarray) -> np.ndarray:
        """Per-row status: 1 yes, 0 definite no, -1 inconclusive."""
        raise NotImplementedError

    def draw(self, rng, count: int, box: int) -> np.ndarray:
        raise NotImplementedError

    def small(self) -> np.ndarray:
        """A few small members, used for the exhaustive part of the tests."""
        raise NotImplementedError

    def contains(self, x: Elem) -> str:
        if x.desc != self.ambient:
            raise DescriptorMismatch(f"element of {x.desc} tested against a subalgebra of {self.ambient}")
        return _CODE[int(self.member_rows(as_rows([x.coords], x.desc.dimension))[0])]


@dataclass(frozen=True)
class CoordinateIdeal(Subalgebra):
    ambient: Descriptor
    support: frozenset

    def __post_init__(self):
        d = as_descriptor(self.ambient)
        object.__setattr__(self, "ambient", d)
        object.__setattr__(self, "support", frozenset(int(i) for i in self.support))
        if not is_integer_power(d):
            raise UnsupportedRepresentation(f"coordinate ideals live in Z^n, not {d}")
        if any(not 0 <= i < d.dimension for i in self.support):
            raise StructuralError(f"support {sorted(self.support)} out of range for {d}")

    @property
    def off(self) -> list:
        return [i for i in range(self.ambient.dimension) if i not in self.support]

    def member_rows(self, rows):
        off = self.off
        if not off:
            return np.ones(len(rows), dtype=np.int8)
        return (rows[:, off] == 0).all(axis=1).astype(np.int8)

    def draw(self, rng, count, box):
        out = rng.integers(-box, box, size=(count, self.ambient.dimension), endpoint=True)
        out[:, self.off] = 0
        return out

    def small(self):
        n = self.ambient.dimension
        sup = sorted(self.support)
        vals = sorted((-1, 0, 1), key=abs)
        out = []
        for combo in itertools.product(vals, repeat=len(sup)):
            row = [0] * n
            for i, v in zip(sup, combo):
                row[i] = v
            out.append(tuple(row))
        out.sort(key=lambda r: witness_key([r]))
        return as_rows(out, n)

    def __str__(self):
        return "{" + ",".join(str(i) for i in sorted(self.support)) + "}"


@dataclass(eq=False)
class Generated(Subalgebra):
    """Subalgebra generated by ``generators``, seen through a bounded closure.

    ``predicate`` (on coordinate tuples) is an optional invariant known to
    hold on the whole subalgebra; it is checked on every closure computed.
    """

    ambient: Descriptor
    generators: tuple = ()
    depth: int = 3
    box: int = 16
    predicate: Optional[Callable] = None
    max_depth: int = DEFAULT_MAX_DEPTH
    budget: int = DEFAULT_CLOSURE_BUDGET
    name: str = ""
    _levels: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.ambient = as_descriptor(self.ambient)
        gens = []
        for g in self.generators:
            if isinstance(g, Elem):
                if g.desc != self.ambient:
                    raise DescriptorMismatch(f"generator {g} does not belong to {self.ambient}")
                g = g.coords
            gens.append(tuple(int(c) for c in g))
        self.generators = tuple(gens)
        if self.depth < 0 or self.max_depth < self.depth:
            raise StructuralError(f"closure depth {self.depth} must lie in [0, {self.max_depth}]")

    def closure_set(self, depth: Optional[int] = None) -> set:
        depth = self.depth if depth is None else depth
        if not self._levels:
            start = {self.ambient.unit(), *self.generators}
            self._check(start)
            self._levels.append((start, start))
        while len(self._levels) <= depth:
            self._levels.append(self._round(*self._levels[-1]))
        return self._levels[depth][0]

    def saturated(self, depth) -> bool:
        self.closure_set(depth)
        return not self._levels[depth][1]

    def _round(self, everything: set, new: set):
        if not new:
            return everything, new
        d, dim, box = self.ambient, self.ambient.dimension, self.box
        old = as_rows(sorted(everything), dim)
        fresh = as_rows(sorted(new), dim)
        found = [-fresh]
        step = max(1, _CHUNK // max(1, len(old)))
        for lo in range(0, len(fresh), step):
            a = np.repeat(fresh[lo:lo + step], len(old), axis=0)
            b = np.tile(old, (min(step, len(fresh) - lo), 1))
            # the group reduct is commutative in every provided instance, so one order suffices
            for c in (a + b, d.join_rows(a, b), d.meet_rows(a, b)):
                c = c[(np.abs(c) <= box).all(axis=1)] if dim else c
                found.append(np.unique(c, axis=0))
        cand = np.unique(np.concatenate(found), axis=0)
        added = {t for t in map(tuple, cand.tolist()) if t not in everything}
        total = everything | added
        if len(total) > self.budget:
            raise ResourceError(
                f"bounded closure of {self} grew past {self.budget} elements", budget=self.budget
            )
        self._check(added)
        return total, added

    def _check(self, items):
        if self.predicate is None:
            return
        for t in items:
            if not self.predicate(t):
                raise StructuralError(f"invariant predicate fails on closure element {t} of {self}")

    def member_rows(self, rows):
        out = np.full(len(rows), -1, dtype=np.int8)
        todo = list(range(len(rows)))
        keys = [tuple(r) for r in rows.tolist()]
        depth = self.depth
        while todo:
            have = self.closure_set(depth)
            todo = [i for i in todo if keys[i] not in have]
            if depth >= self.max_depth or self.saturated(depth):
                break
            depth += 1
        missing = set(todo)
        for i in range(len(rows)):
            if i not in missing:
                out[i] = 1
        if self.predicate is not None:
            for i in todo:
                if not self.predicate(keys[i]):
                    out[i] = 0
        return out

    def contains(self, x: Elem) -> str:
        # bounded closure alone never refutes membership
        status = super().contains(x)
        return INCONCLUSIVE if status == NO else status

    def members(self) -> list:
        return sorted(self.closure_set(), key=lambda t: witness_key([t]))

    def draw(self, rng, count, box):
        pool = as_rows(self.members(), self.ambient.dimension)
        return pool[rng.integers(0, len(pool), size=count)]

    def small(self):
        pool = [t for t in self.members() if all(abs(c) <= 2 for c in t)][:32]
        return as_rows(pool, self.ambient.dimension)

    def __str__(self):
        if self.name:
            return self.name
        return "Gen{" + ";".join("(" + ",".join(map(str, g)) + ")" for g in self.generators) + "}"


@dataclass(eq=False)
class PredicateSubset(Subalgebra):
    """A subset with exact membership and a caller-supplied sampler.

    ``mask`` maps a ``(count, dimension)`` array to a boolean array.
    """

    ambient: Descriptor
    mask: Callable
    sampler: Callable
    name: str = "subset"
    corpus: tuple = ()

    def member_rows(self, rows):
        return np.asarray(self.mask(rows), dtype=bool).astype(np.int8)

    def draw(self, rng, count, box):
        return as_rows(self.sampler(rng, count, box), self.ambient.dimension)

    def small(self):
        return as_rows(self.corpus, self.ambient.dimension)

    def __str__(self):
        return self.name


def cyclic_subgroup(ambient, generator) -> PredicateSubset:
    """The subgroup ``{g^n}`` with exact membership.

    Not a sublattice in general, which is what makes it useful as a
    negative example for closure tests.
    """
    d = as_descriptor(ambient)
    g = np.array(generator, dtype=np.int64).reshape(d.dimension)
    nz = np.flatnonzero(g)

    def mask(rows):
        if not len(nz):
            return ~rows.any(axis=1)
        i = nz[0]
        q, r = np.divmod(rows[:, i], g[i])
        return (r == 0) & (rows == q[:, None] * g[None, :]).all(axis=1)

    def sampler(rng, count, box):
        bound = max(1, box // max(1, int(np.abs(g).max(initial=1))))
        return rng.integers(-bound, bound, size=(count, 1), endpoint=True) * g[None, :]

    corpus = tuple(tuple(int(c) for c in n * g) for n in (0, 1, -1, 2, -2))
    return PredicateSubset(d, mask, sampler, name="<(" + ",".join(map(str, g.tolist())) + ")>", corpus=corpus)


def bounded_closure(s: Generated, depth: Optional[int] = None) -> frozenset:
    """Closure of generators and ``e`` under the four operations, bounded by depth and box."""
    return frozenset(Elem(s.ambient, t) for t in s.closure_set(depth))


def contains(s: Subalgebra, x: Elem) -> str:
    return s.contains(x)


def whole(d) -> Subalgebra:
    """The ambient algebra itself, as a subalgebra."""
    d = as_descriptor(d)
    if is_integer_power(d):
        return CoordinateIdeal(d, frozenset(range(d.dimension)))
    return PredicateSubset(
        d, lambda rows: np.ones(len(rows), dtype=bool),
        lambda rng, count, box: rng.integers(-box, box, size=(count, d.dimension), endpoint=True),
        name=str(d), corpus=tuple(itertools.product((0, 1, -1), repeat=d.dimension))[:27],
    )


def _ambient_corpus(dim, limit=27):
    vals = (0, 1, -1)
    rows = sorted(itertools.product(vals, repeat=dim), key=lambda r: witness_key([r]))[:limit]
    return as_rows(rows, dim)


def _grid(*blocks):
    """Cartesian product of row blocks, as one array per factor."""
    sizes = [len(b) for b in blocks]
    idx = np.indices(sizes).reshape(len(blocks), -1)
    return [b[i] for b, i in zip(blocks, idx)]


def _elem(d, row):
    return Elem(d, tuple(int(c) for c in row))


def _record(report, d, status, inputs, values, kind, groups):
    """Add violations for ``status == 0`` rows; count inconclusive ones."""
    report.inconclusive += int((status == -1).sum())
    report.collect(
        status == 0,
        lambda i: Violation(tuple(_elem(d, x[i]) for x in inputs), _elem(d, values[i]), "not a member"),
        groups, kind,
    )


def convexity_test(s: Subalgebra, sampler: SamplerConfig = DEFAULT_SAMPLER, *, report=None) -> LawReport:
    """Membership of ``(a1 x ∨ a2 y)(x ∨ y)^-1`` for a1, a2 in ``s``, x, y in the ambient.

    A small exhaustive block runs first, then ``sampler.samples`` random
    draws.  Witnesses are ordered by the offending element, then by the
    size of ``(x, y, a1, a2)``.
    """
    d = s.ambient
    report = report or LawReport(str(d), f"convexity:{s}", 0)
    rng = sampler.stream(f"convexity:{d}:{s}")
    small_a, small_x = s.small(), _ambient_corpus(d.dimension)
    blocks = []
    if len(small_a):
        blocks.append(_grid(small_a, small_a, small_x, small_x))
    n = sampler.samples
    blocks.append([
        s.draw(rng, n, sampler.box), s.draw(rng, n, sampler.box),
        rng.integers(-sampler.box, sampler.box, size=(n, d.dimension), endpoint=True),
        rng.integers(-sampler.box, sampler.box, size=(n, d.dimension), endpoint=True),
    ])
    for a1, a2, x, y in blocks:
        report.samples += len(a1)
        value = d.join_rows(a1 + x, a2 + y) - d.join_rows(x, y)
        status = s.member_rows(value)
        _record(
            report, d, status, (a1, a2, x, y), value, "convexity", [[value], [x, y, a1, a2]],
        )
    return report.finalize()


def ideal_test(s: Subalgebra, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Convexity term test plus closure under conjugation ``z^-1 a z``."""
    d = s.ambient
    report = LawReport(str(d), f"ideal:{s}", 0)
    convexity_test(s, sampler, report=report)
    rng = sampler.stream(f"conjugation:{d}:{s}")
    n = sampler.samples
    blocks = []
    if len(s.small()):
        blocks.append(_grid(s.small(), _ambient_corpus(d.dimension)))
    blocks.append([s.draw(rng, n, sampler.box), rng.integers(-sampler.box, sampler.box, size=(n, d.dimension), endpoint=True)])
    for a, z in blocks:
        report.samples += len(a)
        value = -z + a + z
        status = s.member_rows(value)
        _record(report, d, status, (a, z), value, "conjugation", [[value], [a, z]])
    return report.finalize()


def polar(s: Subalgebra) -> CoordinateIdeal:
    """Exact polar (the centralizer) of a coordinate ideal: the complementary support."""
    if not isinstance(s, CoordinateIdeal):
        raise UnsupportedRepresentation(f"exact polar needs a coordinate ideal, got {s}; use polar_test")
    return CoordinateIdeal(s.ambient, frozenset(range(s.ambient.dimension)) - s.support)


def polar_test(a: Subalgebra, b: Subalgebra, sampler: SamplerConfig = DEFAULT_SAMPLER) -> LawReport:
    """Sampled cooperation check between ``a`` and ``b``.

    Every non-orthogonal pair is a ``not_orthogonal`` violation.  An
    orthogonal pair where ``ab = ba`` or ``(ab)+ = a+ b+`` fails would
    contradict the orthogonality corollary and is a ``corollary_mismatch``.
    """
    if a.ambient != b.ambient:
        raise DescriptorMismatch(f"{a} and {b} live in different ambients")
    d = a.ambient
    report = LawReport(str(d), f"polar:{a}|{b}", 0)
    rng = sampler.stream(f"polar:{d}:{a}:{b}")
    n = sampler.samples
    blocks = []
    if len(a.small()) and len(b.small()):
        blocks.append(_grid(a.small(), b.small()))
    blocks.append([a.draw(rng, n, sampler.box), b.draw(rng, n, sampler.box)])
    zero = None
    for xa, xb in blocks:
        report.samples += len(xa)
        zero = np.zeros_like(xa)
        meet = d.meet_rows(d.join_rows(xa, -xa), d.join_rows(xb, -xb))
        orth = (meet == 0).all(axis=1)
        ab, ba = xa + xb, xb + xa
        commute = (ab == ba).all(axis=1)
        pos_ab = d.join_rows(ab, zero)
        pos_prod = d.join_rows(xa, zero) + d.join_rows(xb, zero)
        pos_ok = (pos_ab == pos_prod).all(axis=1)
        report.collect(
            ~orth, lambda i: Violation((_elem(d, xa[i]), _elem(d, xb[i])), _elem(d, meet[i]), d.identity()),
            [[xa, xb]], "not_orthogonal",
        )
        report.collect(
            orth & ~(commute & pos_ok),
            lambda i: Violation((_elem(d, xa[i]), _elem(d, xb[i])), _elem(d, pos_ab[i]), _elem(d, pos_prod[i])),
            [[xa, xb]], "corollary_mismatch",
        )
    return report.finalize()


def _same_space(h: CoordinateIdeal, k: CoordinateIdeal):
    if h.ambient != k.ambient:
        raise DescriptorMismatch(f"ideals of {h.ambient} and {k.ambient} cannot be compared")
    return h.ambient


def huq_commutator_ideals(h: CoordinateIdeal, k: CoordinateIdeal) -> CoordinateIdeal:
    """``[H, K] = H ∩ K`` for ideals."""
    return CoordinateIdeal(_same_space(h, k), h.support & k.support)


MAX_BRUTE_DIMENSION = 8


def _cooperate_mod(n, h, k, killed) -> bool:
    # images of the unit vectors in Z^n / N must be pairwise orthogonal;
    # polars are subgroups, so orthogonal generators give orthogonal subgroups
    q = Quotient(integers_power(n), frozenset(killed))
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    hs = [q.project(Elem(q.base, units[i])) for i in sorted(h)]
    ks = [q.project(Elem(q.base, units[i])) for i in sorted(k)]
    return all(is_orthogonal(x, y) for x in hs for y in ks)


def huq_bruteforce(h: CoordinateIdeal, k: CoordinateIdeal) -> CoordinateIdeal:
    """Smallest coordinate ideal N whose quotient makes the images of H and K cooperate.

    Enumerates all ``2^n`` coordinate ideals; intended as an oracle.
    """
    d = _same_space(h, k)
    n = d.dimension
    if n > MAX_BRUTE_DIMENSION:
        raise ResourceError(f"brute-force commutator limited to n <= {MAX_BRUTE_DIMENSION}, got {n}",
                            budget=MAX_BRUTE_DIMENSION)
    good = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)
            if _cooperate_mod(n, h.support, k.support, c)]
    minimal = [g for g in good if not any(o < g for o in good)]
    if len(minimal) != 1:
        raise StructuralError(f"no unique minimal cooperating ideal: {[sorted(m) for m in minimal]}")
    return CoordinateIdeal(d, minimal[0])


MAX_LATTICE_DIMENSION = 5


def ideal_lattice(n: int) -> list:
    """All ``2^n`` coordinate ideals of ``Z^n``, smallest first."""
    if not 0 <= n <= MAX_LATTICE_DIMENSION:
        raise ResourceError(f"ideal lattice enumeration limited to n <= {MAX_LATTICE_DIMENSION}, got {n}",
                            budget=MAX_LATTICE_DIMENSION)
    d = integers_power(n)
    return [CoordinateIdeal(d, frozenset(c)) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def ideal_join(s: CoordinateIdeal, t: CoordinateIdeal) -> CoordinateIdeal:
    # the product ST of two coordinate ideals is the ideal on the union of supports
    return CoordinateIdeal(_same_space(s, t), s.support | t.support)


def ideal_meet(s: CoordinateIdeal, t: CoordinateIdeal) -> CoordinateIdeal:
    return CoordinateIdeal(_same_space(s, t), s.support & t.support)


def distributivity_check(n: int) -> LawReport:
    """``S ∧ (T ∨ U) = (S ∧ T) ∨ (S ∧ U)`` over every triple of coordinate ideals."""
    ideals = ideal_lattice(n)
    report = LawReport(str(integers_power(n)), "ideal_distributivity", len(ideals) ** 3)
    for s, t, u in itertools.product(ideals, repeat=3):
        lhs = ideal_meet(s, ideal_join(t, u))
        rhs = ideal_join(ideal_meet(s, t), ideal_meet(s, u))
        if lhs != rhs:
            report.add(Violation((s.support, t.support, u.support), lhs.support, rhs.support,
                                 order=(len(s.support) + len(t.support) + len(u.support),)))
    return report.finalize()


@dataclass(frozen=True)
class CongruenceOnZn:
    """``x ≡ y`` iff ``x y^-1`` lies in the ideal."""

    ideal: CoordinateIdeal

    @property
    def ambient(self):
        return self.ideal.ambient

    def related(self, x: Elem, y: Elem) -> bool:
        if x.desc != self.ambient or y.desc != self.ambient:
            raise DescriptorMismatch(f"congruence on {self.ambient} applied to {x.desc}, {y.desc}")
        diff = tuple(a - b for a, b in zip(x.coords, y.coords))
        return self.ideal.contains(Elem(self.ambient, diff)) == YES

    def __str__(self):
        return f"cong{self.ideal}"


def congruence_of(ideal: CoordinateIdeal) -> CongruenceOnZn:
    return CongruenceOnZn(ideal)


def ideal_of(r: CongruenceOnZn) -> CoordinateIdeal:
    """``{x | x ≡ e}``."""
    return r.ideal


def congruence_centralizer(r: CongruenceOnZn) -> CongruenceOnZn:
    return CongruenceOnZn(polar(r.ideal))


def support_of(text: str) -> frozenset:
    """Parse ``"0,1"`` (or an empty string) into a support set."""
    parts = [p.strip() for p in text.replace("{", "").replace("}", "").split(",") if p.strip()]
    try:
        return frozenset(int(p) for p in parts)
    except ValueError:
        raise StructuralError(f"bad support list {text!r}") from None
