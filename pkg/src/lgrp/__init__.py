"""Executable checks for lattice-ordered groups on concrete integer instances.

The package is split into ``core`` (instances, elements, laws, morphisms),
``termlang`` (terms, normal forms, refutation), ``subobjects`` (ideals,
polars, commutators), ``extensions`` (split extensions and points) and
``cli`` (the ``lgrp`` command and the acceptance suites).
"""
from .core import (
    Descriptor, Elem, Integers, Lex, Product, Quotient, abs_val, as_descriptor, identity, integers_power,
    inv, is_orthogonal, join, leq, maltsev, meet, mul, neg_part, parse_descriptor, parse_elem, pos_part,
)
from .errors import (
    DescriptorMismatch, LGroupError, PreconditionError, ResourceError, StructuralError, UnsupportedRepresentation,
)
from .laws import check_join_preservation, check_maltsev, check_morphism, internal_group_refuter, law_suite
from .reports import LawReport, Violation
from .sampling import DEFAULT_SAMPLER, SamplerConfig

__version__ = "0.1.0"

__all__ = [
    "Descriptor", "Elem", "Integers", "Lex", "Product", "Quotient",
    "abs_val", "as_descriptor", "identity", "integers_power", "inv", "is_orthogonal", "join", "leq",
    "maltsev", "meet", "mul", "neg_part", "parse_descriptor", "parse_elem", "pos_part",
    "DescriptorMismatch", "LGroupError", "PreconditionError", "ResourceError", "StructuralError",
    "UnsupportedRepresentation",
    "check_join_preservation", "check_maltsev", "check_morphism", "internal_group_refuter", "law_suite",
    "LawReport", "Violation", "DEFAULT_SAMPLER", "SamplerConfig",
]
