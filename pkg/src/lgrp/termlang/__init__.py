"""ℓ-group terms: parsing, evaluation, normal forms and identity refutation."""
from .normal import DEFAULT_NODE_BUDGET, NormalForm, normal_form
from .parser import ParseError, parse_term, tokenize
from .refute import check_protomodular_witness, identity_pairs, refute_identity
from .terms import (
    Abs, Inv, Join, Meet, Mul, Neg, Pos, Term, Unit, Var,
    desugar, eval_rows, eval_term, random_term, render, size, variables,
)

__all__ = [
    "Abs", "Inv", "Join", "Meet", "Mul", "Neg", "Pos", "Term", "Unit", "Var",
    "DEFAULT_NODE_BUDGET", "NormalForm", "ParseError",
    "check_protomodular_witness", "desugar", "eval_rows", "eval_term", "identity_pairs",
    "normal_form", "parse_term", "random_term", "refute_identity", "render", "size", "tokenize", "variables",
]
