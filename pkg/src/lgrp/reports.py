"""Law reports and their JSON form (integers always as decimal strings)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import Elem
from .sampling import rank_rows, witness_key

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

MAX_WITNESSES = 10


@dataclass(frozen=True)
class Violation:
    inputs: tuple
    lhs: object
    rhs: object
    kind: str = ""
    # optional explicit ordering key; defaults to the size of the inputs
    order: tuple = field(default=None, compare=False, repr=False)

    def sort_key(self):
        if self.order is not None:
            return (self.kind, self.order)
        return (self.kind, (witness_key([_coords(v) for v in self.inputs]),))

    def to_json(self):
        out = {"inputs": [encode(v) for v in self.inputs], "lhs": encode(self.lhs), "rhs": encode(self.rhs)}
        if self.kind:
            out["kind"] = self.kind
        return out


@dataclass
class LawReport:
    instance: str
    law: str
    samples: int = 0
    violations: list = field(default_factory=list)
    violation_count: int = 0
    inconclusive: int = 0

    @property
    def status(self) -> str:
        if self.violations:
            return FAIL
        if self.inconclusive:
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def witness(self):
        return self.violations[0] if self.violations else None

    def add(self, violation: Violation) -> None:
        self.violations.append(violation)
        self.violation_count += 1

    def collect(self, mask, build, groups, kind: str = "") -> None:
        """Record every row flagged in ``mask``, keeping only the smallest witnesses.

        ``groups`` lists the arrays whose rows define the witness order (one
        witness key per group); ``build(i)`` makes the Violation for row ``i``.
        """
        idx = np.flatnonzero(mask)
        if not len(idx):
            return
        self.violation_count += len(idx)
        sub = [[np.asarray(a)[idx] for a in g] for g in groups]
        for j in rank_rows(sub)[:MAX_WITNESSES].tolist():
            i = int(idx[j])
            order = tuple(witness_key([tuple(int(c) for c in np.asarray(a)[i].reshape(-1)) for a in g]) for g in groups)
            v = build(i)
            self.violations.append(Violation(v.inputs, v.lhs, v.rhs, v.kind or kind, order))

    def finalize(self) -> "LawReport":
        # canonical order makes the report independent of evaluation order
        self.violations = sorted(self.violations, key=Violation.sort_key)[:MAX_WITNESSES]
        return self

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "law": self.law,
            "samples": self.samples,
            "status": self.status,
            "violations": [v.to_json() for v in self.violations],
            "violation_count": self.violation_count,
            "inconclusive": self.inconclusive,
        }

    def dumps(self) -> str:
        return dumps(encode(self.to_json()))


def _coords(v):
    if isinstance(v, Elem):
        return v.coords
    if isinstance(v, tuple) and all(isinstance(c, int) for c in v):
        return v
    return ()


def encode(value):
    """JSON-ready form: integers become decimal strings, elements coordinate lists."""
    if isinstance(value, Elem):
        return [str(c) for c in value.coords]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [encode(v) for v in items]
    if hasattr(value, "to_json"):
        return value.to_json()
    return str(value)


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
