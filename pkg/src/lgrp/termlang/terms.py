"""Term syntax trees, rendering, and evaluation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import core
from ..core import Descriptor, Elem
from ..errors import DescriptorMismatch, StructuralError


class Term:
    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Unit(Term):
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Inv(Term):
    arg: Term


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Abs(Term):
    arg: Term


@dataclass(frozen=True)
class Pos(Term):
    arg: Term


@dataclass(frozen=True)
class Neg(Term):
    arg: Term


BINARY = (Mul, Join, Meet)
SUGAR = {Abs: "abs", Pos: "pos", Neg: "neg"}


def desugar(t: Term) -> Term:
    """Replace ``abs``, ``pos`` and ``neg`` by their defining terms."""
    if isinstance(t, (Unit, Var)):
        return t
    if isinstance(t, BINARY):
        return type(t)(desugar(t.left), desugar(t.right))
    a = desugar(t.arg)
    if isinstance(t, Inv):
        return Inv(a)
    if isinstance(t, Abs):
        return Join(a, Inv(a))
    if isinstance(t, Pos):
        return Join(a, Unit())
    return Meet(a, Unit())


def variables(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Unit):
        return set()
    if isinstance(t, BINARY):
        return variables(t.left) | variables(t.right)
    return variables(t.arg)


def size(t: Term) -> int:
    if isinstance(t, (Unit, Var)):
        return 1
    if isinstance(t, BINARY):
        return 1 + size(t.left) + size(t.right)
    return 1 + size(t.arg)


# binding strength: join < meet < product < inverse < atom
_LEVEL = {Join: 1, Meet: 2, Mul: 3, Inv: 4}
_SYMBOL = {Join: " \\/ ", Meet: " /\\ ", Mul: " * "}


def _level(t):
    return _LEVEL.get(type(t), 5)


def render(t: Term) -> str:
    """Multiplicative surface syntax with as few parentheses as the grammar allows."""
    if isinstance(t, Unit):
        return "e"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Inv):
        # the grammar allows one ^-1 per atom, so a nested inverse needs brackets
        inner = render(t.arg)
        return (inner if _level(t.arg) == 5 else f"({inner})") + "^-1"
    if type(t) in SUGAR:
        return f"{SUGAR[type(t)]}({render(t.arg)})"
    lvl = _LEVEL[type(t)]
    left, right = render(t.left), render(t.right)
    if _level(t.left) < lvl:
        left = f"({left})"
    # left associative: an equal-strength right operand must be bracketed
    if _level(t.right) <= lvl:
        right = f"({right})"
    return left + _SYMBOL[type(t)] + right


def eval_term(t: Term, env: dict, d: Descriptor | str | None = None) -> Elem:
    """Denotation of ``t`` with variables bound by ``env`` (name -> Elem)."""
    if d is None:
        if not env:
            raise StructuralError("an instance is required to evaluate a closed term")
        d = next(iter(env.values())).desc
    d = core.as_descriptor(d)
    for name, value in env.items():
        if value.desc != d:
            raise DescriptorMismatch(f"variable {name} is bound in {value.desc}, not {d}")
    return _eval(t, env, d)


def _eval(t, env, d):
    if isinstance(t, Unit):
        return d.identity()
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise StructuralError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Mul):
        return core.mul(_eval(t.left, env, d), _eval(t.right, env, d))
    if isinstance(t, Join):
        return core.join(_eval(t.left, env, d), _eval(t.right, env, d))
    if isinstance(t, Meet):
        return core.meet(_eval(t.left, env, d), _eval(t.right, env, d))
    a = _eval(t.arg, env, d)
    if isinstance(t, Inv):
        return core.inv(a)
    if isinstance(t, Abs):
        return core.abs_val(a)
    if isinstance(t, Pos):
        return core.pos_part(a)
    return core.neg_part(a)


def eval_rows(t: Term, env: dict, d: Descriptor) -> np.ndarray:
    """Batched denotation: ``env`` maps names to ``(count, dimension)`` arrays."""
    if isinstance(t, Unit):
        some = next(iter(env.values()), None)
        if some is None:
            raise StructuralError("batched evaluation needs at least one bound variable")
        return np.zeros_like(some)
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise StructuralError(f"unbound variable {t.name!r}") from None
    if isinstance(t, BINARY):
        a, b = eval_rows(t.left, env, d), eval_rows(t.right, env, d)
        if isinstance(t, Mul):
            return a + b
        return d.join_rows(a, b) if isinstance(t, Join) else d.meet_rows(a, b)
    a = eval_rows(t.arg, env, d)
    if isinstance(t, Inv):
        return -a
    zero = np.zeros_like(a)
    if isinstance(t, Abs):
        return d.join_rows(a, -a)
    if isinstance(t, Pos):
        return d.join_rows(a, zero)
    return d.meet_rows(a, zero)


_KINDS = (Mul, Join, Meet, Inv, Abs, Pos, Neg)


def random_term(rng: np.random.Generator, depth: int, names=("x", "y", "z"), leaf_bias: float = 0.3) -> Term:
    """A random term of depth at most ``depth`` over ``names`` and ``e``."""
    if depth <= 0 or rng.random() < leaf_bias:
        k = int(rng.integers(0, len(names) + 1))
        return Unit() if k == len(names) else Var(names[k])
    cls = _KINDS[int(rng.integers(0, len(_KINDS)))]
    if cls in BINARY:
        return cls(random_term(rng, depth - 1, names, leaf_bias), random_term(rng, depth - 1, names, leaf_bias))
    return cls(random_term(rng, depth - 1, names, leaf_bias))
