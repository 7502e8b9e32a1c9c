"""Join-of-meets-of-words normal form.

A normal form is a tuple of *meetands* read as a join; each meetand is a
tuple of group *words* read as a meet; a word is a tuple of
``(name, +1 | -1)`` letters, freely reduced.  Meetands and words are kept
sorted and duplicate free, which collapses syntactic repeats (``t \\/ t``)
but makes no claim of canonicity beyond that.

The rewriting uses only ℓ-group laws valid without commutativity: the
product distributes over joins and meets on both sides, inversion swaps
join and meet, and the lattice is distributive.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ResourceError
from .terms import Inv, Join, Meet, Mul, Term, Unit, Var, desugar

DEFAULT_NODE_BUDGET = 100_000

Word = tuple
Meetand = tuple


def reduce_word(letters) -> Word:
    out = []
    for letter in letters:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(w: Word) -> Word:
    return tuple((name, -exp) for name, exp in reversed(w))


def _meetand(words) -> Meetand:
    return tuple(sorted(set(words)))


def _join_of(meetands) -> tuple:
    return tuple(sorted(set(meetands)))


@dataclass(frozen=True)
class NormalForm:
    joinands: tuple

    def node_count(self) -> int:
        return _nodes(self.joinands)

    def words(self):
        for m in self.joinands:
            yield from m

    def to_term(self) -> Term:
        return _fold(Join, [_fold(Meet, [word_term(w) for w in m]) for m in self.joinands])

    def __str__(self):
        return " \\/ ".join(" /\\ ".join(render_word(w) for w in m) for m in self.joinands)

    def eval_rows(self, env: dict, d) -> np.ndarray:
        some = next(iter(env.values()))
        zero = np.zeros_like(some)
        out = None
        for m in self.joinands:
            acc = None
            for w in m:
                v = zero
                for name, exp in w:
                    v = v + env[name] if exp > 0 else v - env[name]
                acc = v if acc is None else d.meet_rows(acc, v)
            out = acc if out is None else d.join_rows(out, acc)
        return out


def _nodes(joinands) -> int:
    return sum(1 + sum(1 + len(w) for w in m) for m in joinands)


def _fold(cls, parts):
    out = parts[0]
    for p in parts[1:]:
        out = cls(out, p)
    return out


def word_term(w: Word) -> Term:
    if not w:
        return Unit()
    return _fold(Mul, [Var(n) if e > 0 else Inv(Var(n)) for n, e in w])


def render_word(w: Word) -> str:
    if not w:
        return "e"
    return " * ".join(n if e > 0 else f"{n}^-1" for n, e in w)


class _Normalizer:
    def __init__(self, budget):
        self.budget = budget

    def guard(self, estimate, what):
        if estimate > self.budget:
            raise ResourceError(
                f"normal form would need about {estimate} nodes while {what}, "
                f"over the node budget of {self.budget}",
                budget=self.budget,
            )

    def run(self, t):
        if isinstance(t, Unit):
            return ((((),),))
        if isinstance(t, Var):
            return ((((t.name, 1),),),)
        if isinstance(t, Join):
            out = _join_of(self.run(t.left) + self.run(t.right))
            self.guard(_nodes(out), "joining")
            return out
        if isinstance(t, Meet):
            a, b = self.run(t.left), self.run(t.right)
            self.guard(len(a) * len(b) * (_width(a) + _width(b)), "distributing a meet")
            return _join_of(_meetand(ma + mb) for ma in a for mb in b)
        if isinstance(t, Mul):
            a, b = self.run(t.left), self.run(t.right)
            est = sum(len(ma) * len(mb) for ma in a for mb in b) * (_longest(a) + _longest(b) + 1)
            self.guard(est, "distributing a product")
            return _join_of(
                _meetand(reduce_word(u + v) for u in ma for v in mb) for ma in a for mb in b
            )
        if isinstance(t, Inv):
            return self.invert(self.run(t.arg))
        raise TypeError(f"unexpected node {t!r}; desugar first")

    def invert(self, a):
        # (\/_i /\_j w_ij)^-1 = /\_i \/_j w_ij^-1, then distribute the meet of joins
        choices = math.prod(len(m) for m in a)
        self.guard(choices * (len(a) * (_longest(a) + 1) + 1), "inverting")
        inverted = [[invert_word(w) for w in m] for m in a]
        return _join_of(_meetand(pick) for pick in itertools.product(*inverted))


def _width(nf):
    return max((sum(1 + len(w) for w in m) for m in nf), default=0)


def _longest(nf):
    return max((len(w) for m in nf for w in m), default=0)


def normal_form(t: Term, budget: int = DEFAULT_NODE_BUDGET) -> NormalForm:
    """Rewrite ``t`` as a join of meets of freely reduced group words.

    Raises ResourceError when the result (or an intermediate) would exceed
    ``budget`` nodes.
    """
    n = _Normalizer(budget)
    return NormalForm(n.run(desugar(t)))
