"""Acceptance suites: a manifest of named checks and a deterministic runner.

Each suite names a module, a check and its parameters, plus the status it is
expected to produce.  Counterexample suites expect ``fail-with-witness`` and
succeed by finding one.  The runner emits one JSON object per suite, in
manifest order, with integers written as decimal strings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import extensions as ext
from . import laws, subobjects
from .core import as_descriptor
from .errors import LGroupError, ResourceError, StructuralError
from .morphisms import linear
from .reports import dumps, encode
from .sampling import SamplerConfig
from .termlang import check_protomodular_witness, identity_pairs, normal_form, random_term, refute_identity
from .termlang.terms import eval_rows

PASS = "pass"
WITNESS = "fail-with-witness"
FAIL = "fail"
EXPECTED = (PASS, WITNESS)

EXIT_OK, EXIT_MISMATCH = 0, 1


@dataclass(frozen=True)
class SuiteEntry:
    suite_id: str
    module: str
    check: str
    params: dict = field(default_factory=dict)
    expected: str = PASS

    def to_json(self):
        return {"id": self.suite_id, "module": self.module, "check": self.check,
                "params": self.params, "expected": self.expected}


@dataclass(frozen=True)
class SuiteManifest:
    suites: tuple
    sampler: SamplerConfig = SamplerConfig()

    def __post_init__(self):
        ids = [s.suite_id for s in self.suites]
        dup = sorted({i for i in ids if ids.count(i) > 1})
        if dup:
            raise StructuralError(f"duplicate suite ids: {', '.join(dup)}")
        for s in self.suites:
            if s.expected not in EXPECTED:
                raise StructuralError(f"suite {s.suite_id}: expected status must be one of {EXPECTED}, got {s.expected!r}")
            if (s.module, s.check) not in RUNNERS:
                raise StructuralError(f"suite {s.suite_id}: unknown check {s.module}.{s.check}")

    def ids(self) -> list:
        return [s.suite_id for s in self.suites]

    def expect(self, suite_id: str, status: str) -> "SuiteManifest":
        """Copy with one suite's expected status replaced."""
        if suite_id not in self.ids():
            raise StructuralError(f"no suite named {suite_id!r}")
        return SuiteManifest(
            tuple(replace(s, expected=status) if s.suite_id == suite_id else s for s in self.suites), self.sampler
        )

    def only(self, ids) -> "SuiteManifest":
        unknown = sorted(set(ids) - set(self.ids()))
        if unknown:
            raise StructuralError(f"no suite named {', '.join(unknown)}")
        return SuiteManifest(tuple(s for s in self.suites if s.suite_id in ids), self.sampler)

    def to_json(self):
        s = self.sampler
        return {"sampler": {"seed": s.seed, "box": s.box, "samples": s.samples},
                "suites": [e.to_json() for e in self.suites]}

    @classmethod
    def from_json(cls, data: dict) -> "SuiteManifest":
        try:
            raw = data.get("sampler", {})
            sampler = SamplerConfig(int(raw.get("seed", 0)), int(raw.get("box", 16)), int(raw.get("samples", 10_000)))
            suites = tuple(
                SuiteEntry(e["id"], e["module"], e["check"], dict(e.get("params", {})), e.get("expected", PASS))
                for e in data["suites"]
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise StructuralError(f"malformed manifest: {exc}") from None
        return cls(suites, sampler)


@dataclass
class Outcome:
    observed: str
    checks: list
    witness: object = None


def _observe(reports, witness=None) -> Outcome:
    checks = [r.to_json() for r in reports]
    failing = [r for r in reports if not r.passed]
    if not failing:
        return Outcome(PASS, checks)
    found = next((r.witness for r in failing if r.witness is not None), witness)
    return Outcome(WITNESS if found is not None else FAIL, checks, found)


def _summary(name, ok, **extra):
    """A check result that is not a LawReport."""
    return {"check": name, "status": PASS if ok else FAIL, **extra}


def _from_summaries(items, witness=None) -> Outcome:
    ok = all(c["status"] == PASS for c in items)
    return Outcome(PASS if ok else (WITNESS if witness is not None else FAIL), items, None if ok else witness)


# ---- core ----------------------------------------------------------------

def run_laws(params, sampler):
    reports = []
    for inst in params["instances"]:
        reports += laws.law_suite(inst, sampler)
    return _observe(reports)


def _random_map(rng, monotone):
    n, m = (int(v) for v in rng.integers(1, 4, size=2))
    if monotone:
        # each output coordinate is a non-negative multiple of one input coordinate
        rows = np.zeros((m, n), dtype=np.int64)
        rows[np.arange(m), rng.integers(0, n, size=m)] = rng.integers(0, 4, size=m)
    else:
        rows = rng.integers(-2, 3, size=(m, n))
    return n, m, rows


def run_morphism_lemma(params, sampler):
    """Maps preserving product and positive part also preserve joins; the others do not."""
    want = int(params.get("maps", 20))
    rng = sampler.stream("suite:morphism_lemma")
    kept = {True: [], False: []}
    tries = 0
    while min(len(v) for v in kept.values()) < want:
        tries += 1
        if tries > 50 * want:
            raise ResourceError(f"could not draw {want} maps of each kind")
        n, m, rows = _random_map(rng, bool(rng.integers(0, 2)))
        f = linear(f"Z^{n}", f"Z^{m}", rows.tolist(), name=f"f{tries}")
        rep = laws.check_morphism(f, sampler)
        if rep.kinds() & {"product"}:
            continue
        good = rep.passed
        if len(kept[good]) < want:
            kept[good].append(f)
    checks, witness = [], None
    for good, maps in sorted(kept.items(), reverse=True):
        for f in maps:
            rep = laws.check_join_preservation(f, sampler)
            ok = rep.passed == good
            checks.append(_summary(f"join_preservation:{f.name}", ok, morphism=good, map=[list(r) for r in f.rows],
                                   join_status=rep.status, violation_count=rep.violation_count))
            if not ok and witness is None:
                witness = rep.witness or f.name
    return _from_summaries(checks, witness)


def run_internal_group(params, sampler):
    s = sampler.with_samples(min(sampler.samples, int(params.get("samples", 1000))))
    found = laws.internal_group_refuter(params["instance"], s)
    if found is None:
        return Outcome(PASS, [_summary("internal_group", True, instance=params["instance"])])
    inputs, lhs, rhs = found
    w = {"inputs": encode(inputs), "lhs": encode(lhs), "rhs": encode(rhs)}
    return Outcome(WITNESS, [_summary("internal_group", False, instance=params["instance"], witness=w)], w)


def run_determinism(params, sampler):
    inst = params.get("instance", "Z^2")
    first = [r.dumps() for r in laws.law_suite(inst, sampler)]
    second = [r.dumps() for r in laws.law_suite(inst, sampler)]
    return _from_summaries([_summary("repeat_law_suite", first == second, instance=inst, reports=len(first))])


# ---- termlang ------------------------------------------------------------

def run_normal_form(params, sampler):
    """Random terms agree with their normal forms; the named identities survive refutation."""
    d = as_descriptor(params.get("instance", "Z^2"))
    want, depth, envs = int(params.get("terms", 1000)), int(params.get("depth", 6)), int(params.get("envs", 100))
    rng = sampler.stream("suite:normal_form")
    names = ("x", "y", "z")
    done = skipped = bad = 0
    witness = None
    while done < want:
        t = random_term(rng, depth, names)
        try:
            nf = normal_form(t)
        except ResourceError:
            skipped += 1
            if skipped > want:
                raise
            continue
        done += 1
        env = {n: rng.integers(-sampler.box, sampler.box, size=(envs, d.dimension), endpoint=True) for n in names}
        differ = (eval_rows(t, env, d) != nf.eval_rows(env, d)).any(axis=1)
        if differ.any():
            bad += 1
            if witness is None:
                witness = {"term": str(t), "normal_form": str(nf)}
    checks = [_summary("nf_soundness", bad == 0, terms=done, skipped_over_budget=skipped, discrepancies=bad)]
    for name, (lhs, rhs) in identity_pairs().items():
        found = refute_identity(lhs, rhs, d, sampler)
        checks.append(_summary(f"identity:{name}", found is None, counterexample=encode(found)))
        if found is not None and witness is None:
            witness = {"identity": name, "env": encode(found)}
    return _from_summaries(checks, witness)


def run_protomodular(params, sampler):
    return _observe([check_protomodular_witness(inst, sampler) for inst in params["instances"]])


# ---- subobjects ----------------------------------------------------------

def _ideal(inst, support):
    return subobjects.CoordinateIdeal(inst, frozenset(support))


def _supports(n):
    return [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]


def run_convexity_ideals(params, sampler):
    inst = params.get("instance", "Z^3")
    n = as_descriptor(inst).dimension
    return _observe([subobjects.convexity_test(_ideal(inst, s), sampler) for s in _supports(n)])


def run_convexity_diagonal(params, sampler):
    d = as_descriptor(params.get("instance", "Z^2"))
    diag = subobjects.Generated(d, [(1,) * d.dimension], predicate=lambda t: len(set(t)) <= 1, name="diagonal")
    return _observe([subobjects.convexity_test(diag, sampler)])


def run_cooperation(params, sampler):
    """polar_test passes exactly on disjoint supports."""
    inst = params.get("instance", "Z^3")
    n = as_descriptor(inst).dimension
    checks, witness = [], None
    for a in _supports(n):
        for b in _supports(n):
            rep = subobjects.polar_test(_ideal(inst, a), _ideal(inst, b), sampler)
            disjoint = not (a & b)
            ok = rep.passed if disjoint else (rep.witness is not None)
            checks.append(_summary(f"polar:{sorted(a)}|{sorted(b)}", ok, disjoint=disjoint, polar_status=rep.status))
            if not ok and witness is None:
                witness = {"supports": [sorted(a), sorted(b)]}
    return _from_summaries(checks, witness)


def run_commutator(params, sampler):
    checks, witness = [], None
    for n in params.get("dimensions", [1, 2, 3, 4]):
        inst = f"Z^{n}"
        mismatches = 0
        for a in _supports(n):
            for b in _supports(n):
                h, k = _ideal(inst, a), _ideal(inst, b)
                fast, slow = subobjects.huq_commutator_ideals(h, k), subobjects.huq_bruteforce(h, k)
                if fast.support != slow.support:
                    mismatches += 1
                    witness = witness or {"h": sorted(a), "k": sorted(b), "formula": sorted(fast.support),
                                          "brute_force": sorted(slow.support)}
        checks.append(_summary(f"commutator:Z^{n}", mismatches == 0, pairs=4 ** n, mismatches=mismatches))
    return _from_summaries(checks, witness)


def run_distributivity(params, sampler):
    return _observe([subobjects.distributivity_check(n) for n in params.get("dimensions", [1, 2, 3, 4])])


# ---- extensions ----------------------------------------------------------

def run_semidirect(params, sampler):
    reports = []
    for name in params.get("extensions", ["lex", "product"]):
        e = ext.named_extension(name, sampler)
        reports += [ext.verify_phi_iso(e, sampler), ext.semidirect_join_matches(e, sampler)]
    return _observe(reports)


def run_non_faithfulness(params, sampler):
    """Two distinct morphisms of split extensions with the same source and target."""
    nf = ext.non_faithfulness_witness(sampler)
    w = nf.to_json()
    if nf.passed:
        return Outcome(WITNESS, [w], {"differ_at": w["differ_at"], "images": w["images"]})
    return Outcome(FAIL, [w])


def run_polar_section(params, sampler):
    reports = [ext.polar_section_ideal_test(ext.named_extension(n, sampler), sampler)
               for n in params.get("extensions", ["lex", "product"])]
    return _observe(reports)


def run_points(params, sampler):
    """Centralizers of coordinate-ideal points are closed, and cooperation matches orthogonality."""
    e = ext.named_extension(params.get("extension", "Z^4"), sampler)
    n = e.kernel.dimension
    checks, witness = [], None
    for sup in _supports(n):
        ps = ext.PointSubobject(e, _ideal(e.kernel, sup))
        cen = ext.point_centralizer(ps)
        closed = ext.closed_under_action_test(cen, sampler)
        coop = ext.pt_product_cooperator_test(ps, cen, sampler)
        polar = subobjects.polar_test(ps.xbar, cen.xbar, sampler)
        ok = closed.passed and coop.passed == polar.passed
        checks.append(_summary(f"centralizer:{sorted(sup)}", ok, centralizer=sorted(cen.xbar.support),
                               closed=closed.status, cooperator=coop.status, polar=polar.status))
        if not ok and witness is None:
            witness = closed.witness or coop.witness or {"xbar": sorted(sup)}
    return _from_summaries(checks, witness)


def _generated(d, gens, box, modulus=None):
    pred = None
    if modulus:
        pred = lambda t, m=modulus: all(c % m == 0 for c in t)  # noqa: E731
    return subobjects.Generated(d, [tuple(g) for g in gens], box=box, predicate=pred)


def run_coherence(params, sampler):
    e = ext.named_extension(params["extension"], sampler)
    box = int(params.get("box", 8))
    k = _generated(e.kernel, params["k"], box)
    h = _generated(e.kernel, params["h"], box)
    rep = ext.coherence_join_closure_test(e, k, h, sampler)
    limit = float(params.get("max_inconclusive", 0.05))
    rate = rep.inconclusive / max(1, rep.samples)
    out = _observe([rep])
    if not rep.violations:
        # only a definite no fails; a small share of undecided queries is tolerated
        out.observed = PASS if rate < limit else FAIL
    out.checks.append(_summary("inconclusive_rate", rate < limit, rate=f"{rate:.4f}", limit=str(limit)))
    return out


RUNNERS = {
    ("core", "laws"): run_laws,
    ("core", "morphism_lemma"): run_morphism_lemma,
    ("core", "internal_group"): run_internal_group,
    ("core", "determinism"): run_determinism,
    ("termlang", "normal_form"): run_normal_form,
    ("termlang", "protomodular"): run_protomodular,
    ("subobjects", "convexity_ideals"): run_convexity_ideals,
    ("subobjects", "convexity_diagonal"): run_convexity_diagonal,
    ("subobjects", "cooperation"): run_cooperation,
    ("subobjects", "commutator"): run_commutator,
    ("subobjects", "distributivity"): run_distributivity,
    ("extensions", "semidirect"): run_semidirect,
    ("extensions", "non_faithfulness"): run_non_faithfulness,
    ("extensions", "polar_section"): run_polar_section,
    ("extensions", "points"): run_points,
    ("extensions", "coherence"): run_coherence,
}

LAW_INSTANCES = ["Z", "Z^2", "Z^3", "lex(Z,Z)", "lex(Z^2,Z)", "quot(Z^3,{0})"]


def default_manifest(sampler: SamplerConfig = SamplerConfig()) -> SuiteManifest:
    """Every acceptance criterion as one or more suites."""
    S = SuiteEntry
    return SuiteManifest((
        S("laws", "core", "laws", {"instances": LAW_INSTANCES}),
        S("morphism_lemma", "core", "morphism_lemma", {"maps": 20}),
        S("convexity_ideals_Z3", "subobjects", "convexity_ideals", {"instance": "Z^3"}),
        S("convexity_diagonal_Z2", "subobjects", "convexity_diagonal", {"instance": "Z^2"}, WITNESS),
        S("cooperation_orthogonality_Z3", "subobjects", "cooperation", {"instance": "Z^3"}),
        S("commutator_oracle", "subobjects", "commutator", {"dimensions": [1, 2, 3, 4]}),
        S("ideal_distributivity", "subobjects", "distributivity", {"dimensions": [0, 1, 2, 3, 4]}),
        S("internal_group_Z", "core", "internal_group", {"instance": "Z", "samples": 1000}, WITNESS),
        S("internal_group_Z2", "core", "internal_group", {"instance": "Z^2", "samples": 1000}, WITNESS),
        S("semidirect_reconstruction", "extensions", "semidirect", {"extensions": ["lex", "product"]}),
        S("polar_section", "extensions", "polar_section", {"extensions": ["lex", "product"]}),
        S("non_faithfulness", "extensions", "non_faithfulness", {}, WITNESS),
        S("points_centralizers", "extensions", "points", {"extension": "Z^4"}),
        S("coherence_product", "extensions", "coherence",
          {"extension": "prod(Z^2,Z)", "k": [[1, 0]], "h": [[1, 1]], "box": 8}),
        S("coherence_lex", "extensions", "coherence", {"extension": "lex", "k": [[2]], "h": [[3]], "box": 8}),
        S("coherence_lex_equal", "extensions", "coherence", {"extension": "lex", "k": [[2]], "h": [[2]], "box": 8}),
        S("coherence_lex_Z2", "extensions", "coherence",
          {"extension": "lex(Z^2,Z)", "k": [[1, 0]], "h": [[1, 1]], "box": 8}),
        S("normal_form_soundness", "termlang", "normal_form", {"instance": "Z^2", "terms": 1000, "depth": 6, "envs": 100}),
        S("protomodular_witness", "termlang", "protomodular", {"instances": ["Z", "Z^2", "lex(Z,Z)"]}),
        S("determinism", "core", "determinism", {"instance": "Z^2"}),
    ), sampler)


def run_entry(entry: SuiteEntry, sampler: SamplerConfig) -> dict:
    """Run one suite; the result object never contains timings, so it is reproducible."""
    out = {"suite": entry.suite_id, "module": entry.module, "check": entry.check, "expected": entry.expected}
    try:
        res = RUNNERS[(entry.module, entry.check)](entry.params, sampler)
    except LGroupError as exc:
        out.update(observed="error", match=False, error=str(exc), exit_code=exc.exit_code)
        return out
    out.update(observed=res.observed, match=res.observed == entry.expected)
    if res.witness is not None:
        out["witness"] = res.witness.to_json() if hasattr(res.witness, "to_json") else res.witness
    out["checks"] = res.checks
    return out


def run_suite(manifest: SuiteManifest, emit=None) -> int:
    """Run every suite in manifest order; ``emit`` receives one NDJSON line per suite.

    Returns the exit code: 0 when every suite matches its expectation, 1 on
    a mismatch, or the error's own code (2 structural, 3 budget) when a
    suite could not run.
    """
    code = EXIT_OK
    for entry in manifest.suites:
        result = run_entry(entry, manifest.sampler)
        if emit is not None:
            emit(dumps(encode(result)))
        if "exit_code" in result:
            code = max(code, result["exit_code"])
        elif not result["match"]:
            code = max(code, EXIT_MISMATCH)
    return code


def load_manifest(path: str, sampler: SamplerConfig | None = None) -> SuiteManifest:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StructuralError(f"cannot read manifest {path}: {exc}") from None
    m = SuiteManifest.from_json(data)
    return m if sampler is None else SuiteManifest(m.suites, sampler)
