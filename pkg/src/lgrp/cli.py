"""Command-line entry point: ``lgrp <subcommand> ...``.

Exit codes: 0 success, 1 suite mismatch, 2 usage or structural error,
3 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import sys

from . import extensions as ext
from . import laws, subobjects
from .core import as_descriptor, parse_elem_list
from .errors import LGroupError, StructuralError
from .reports import dumps, encode
from .sampling import DEFAULT_BOX, DEFAULT_SAMPLES, DEFAULT_SEED, SamplerConfig
from .suite import EXPECTED, default_manifest, load_manifest, run_entry, SuiteManifest
from .termlang import DEFAULT_NODE_BUDGET, normal_form, parse_term, refute_identity

EXAMPLES = {
    "laws": [
        'lgrp laws --instance Z^2',
        'lgrp laws --instance "lex(Z,Z)" --law eq2 --law abelian_identity --json',
    ],
    "nf": [
        'lgrp nf "(x /\\ y)^-1"',
        'lgrp nf "abs(x) * y" --json',
    ],
    "refute": [
        'lgrp refute --lhs "x * y" --rhs "y * x" --instance Z^2',
        'lgrp refute --lhs "x \\/ y" --rhs "x * y" --instance Z --samples 1000 --seed 3',
    ],
    "polar": [
        'lgrp polar --instance Z^3 --support 0,1',
        'lgrp polar --instance Z^4 --support 2 --json',
    ],
    "commutator": [
        'lgrp commutator --instance Z^3 --h 0,1 --k 1,2',
        'lgrp commutator --instance Z^3 --h 0,1 --k 1,2 --brute-force --json',
    ],
    "ideals": [
        'lgrp ideals --instance Z^4 --check-distributive',
        'lgrp ideals --instance Z^2 --json',
    ],
    "extension": [
        'lgrp extension lex --verify',
        'lgrp extension product',
        'lgrp extension "prod(Z^2,Z)" --verify --json',
    ],
    "points": [
        'lgrp points --instance "prod(Z^2,Z)" --xbar 0 --centralizer',
        'lgrp points --instance Z^4 --xbar 0,2 --json',
    ],
    "coherence": [
        'lgrp coherence --k "(2)" --h "(3)" --extension lex',
        'lgrp coherence --k "(1,0)" --h "(1,1)" --extension "prod(Z^2,Z)" --json',
    ],
    "suite": [
        'lgrp suite --list',
        'lgrp suite --only laws,internal_group_Z --json',
        'lgrp suite --seed 42 --json',
    ],
}


def _epilog(name):
    return "examples:\n" + "\n".join(f"  {line}" for line in EXAMPLES[name])


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--instance", help="instance descriptor: Z | Z^n | prod(...) | lex(K,T) | quot(Z^n,{i,...})")
    p.add_argument("--samples", type=int, default=None, help=f"random samples per check (default {DEFAULT_SAMPLES})")
    p.add_argument("--seed", type=int, default=None, help=f"sampler seed (default {DEFAULT_SEED})")
    p.add_argument("--box", type=int, default=None, help=f"coordinate bound for samples (default {DEFAULT_BOX})")
    p.add_argument("--json", action="store_true", help="print JSON (integers as decimal strings)")
    return p


def _sampler(args, base: SamplerConfig | None = None) -> SamplerConfig:
    base = base or SamplerConfig()
    return SamplerConfig(
        base.seed if args.seed is None else args.seed,
        base.box if args.box is None else args.box,
        base.samples if args.samples is None else args.samples,
    )


def _instance(args, default):
    return as_descriptor(args.instance or default)


def _out(args, obj, text):
    print(dumps(encode(obj)) if args.json else text)


def _report_line(r):
    line = f"{r.law:40s} {r.status:12s} samples={r.samples} violations={r.violation_count}"
    if r.inconclusive:
        line += f" inconclusive={r.inconclusive}"
    if r.witness is not None:
        w = r.witness
        line += f"\n    witness {w.kind or ''} inputs={[str(v) for v in w.inputs]} lhs={w.lhs} rhs={w.rhs}"
    return line


def _print_reports(args, reports):
    for r in reports:
        print(r.dumps() if args.json else _report_line(r))


def _supports_json(s):
    return sorted(s.support) if hasattr(s, "support") else sorted(s)


# ---- subcommands ---------------------------------------------------------

def cmd_laws(args):
    d = _instance(args, "Z")
    _print_reports(args, laws.law_suite(d, _sampler(args), laws=args.law))
    return 0


def cmd_nf(args):
    t = parse_term(args.term)
    nf = normal_form(t, budget=args.budget)
    _out(args, {"term": str(t), "normal_form": str(nf), "nodes": nf.node_count()}, str(nf))
    return 0


def cmd_refute(args):
    d = _instance(args, "Z")
    lhs, rhs = parse_term(args.lhs), parse_term(args.rhs)
    found = refute_identity(lhs, rhs, d, _sampler(args))
    obj = {"instance": str(d), "lhs": str(lhs), "rhs": str(rhs), "refuted": found is not None,
           "counterexample": found}
    if found is None:
        text = f"no counterexample in {d}"
    else:
        text = "counterexample: " + ", ".join(f"{k} = {v}" for k, v in found.items())
    _out(args, obj, text)
    return 0


def cmd_polar(args):
    d = _instance(args, "Z^3")
    a = subobjects.CoordinateIdeal(d, subobjects.support_of(args.support))
    p = subobjects.polar(a)
    _out(args, {"instance": str(d), "support": _supports_json(a), "polar": _supports_json(p)},
         f"polar of {a} in {d}: {p}")
    return 0


def cmd_commutator(args):
    d = _instance(args, "Z^3")
    h = subobjects.CoordinateIdeal(d, subobjects.support_of(args.h))
    k = subobjects.CoordinateIdeal(d, subobjects.support_of(args.k))
    c = subobjects.huq_commutator_ideals(h, k)
    obj = {"instance": str(d), "h": _supports_json(h), "k": _supports_json(k), "commutator": _supports_json(c)}
    text = f"[{h}, {k}] = {c}"
    if args.brute_force:
        b = subobjects.huq_bruteforce(h, k)
        obj.update(brute_force=_supports_json(b), agree=b == c)
        text += f"\nbrute force: {b} ({'agrees' if b == c else 'DIFFERS'})"
    _out(args, obj, text)
    return 0


def cmd_ideals(args):
    d = _instance(args, "Z^3")
    if not subobjects.is_integer_power(d):
        raise StructuralError(f"ideal enumeration needs Z^n, got {d}")
    ideals = subobjects.ideal_lattice(d.dimension)
    obj = {"instance": str(d), "ideals": [_supports_json(i) for i in ideals]}
    lines = [f"{len(ideals)} coordinate ideals of {d}: " + " ".join(str(i) for i in ideals)]
    if args.check_distributive:
        r = subobjects.distributivity_check(d.dimension)
        obj["distributive"] = r.to_json()
        lines.append(_report_line(r))
    _out(args, obj, "\n".join(lines))
    return 0


def cmd_extension(args):
    s = _sampler(args)
    e = ext.named_extension(args.name, s)
    obj = {"extension": e.name, "kernel": str(e.kernel), "total": str(e.total), "base": str(e.base),
           "k": str(e.k), "p": str(e.p), "s": str(e.s)}
    lines = [f"{e.kernel} -> {e.total} <-> {e.base}", f"  {e.k}", f"  {e.p}", f"  {e.s}"]
    if args.verify:
        reports = [ext.verify_phi_iso(e, s), ext.semidirect_join_matches(e, s), ext.polar_section_ideal_test(e, s)]
        obj["checks"] = [r.to_json() for r in reports]
        lines += [_report_line(r) for r in reports]
        if args.name == "lex" or e.total == as_descriptor("lex(Z,Z)"):
            nf = ext.non_faithfulness_witness(s)
            obj["non_faithfulness"] = nf.to_json()
            lines.append(f"non-faithfulness: g1, g2 differ at {nf.point}: {nf.images[0]} vs {nf.images[1]} "
                         f"({'all commuting checks pass' if nf.passed else 'CHECKS FAIL'})")
    _out(args, obj, "\n".join(lines))
    return 0


def cmd_points(args):
    s = _sampler(args)
    e = ext.split_extension_of(args.instance or "prod(Z^2,Z)", sampler=s)
    ps = ext.PointSubobject(e, subobjects.CoordinateIdeal(e.kernel, subobjects.support_of(args.xbar)))
    r = ext.closed_under_action_test(ps, s)
    obj = {"extension": e.name, "kernel": str(e.kernel), "xbar": _supports_json(ps.xbar), "closed": r.to_json()}
    lines = [f"point {ps} of {e.name}", _report_line(r)]
    if args.centralizer:
        cen = ext.point_centralizer(ps)
        rc = ext.closed_under_action_test(cen, s)
        coop = ext.pt_product_cooperator_test(ps, cen, s)
        obj["centralizer"] = {"xbar": _supports_json(cen.xbar), "closed": rc.to_json(), "cooperator": coop.to_json()}
        lines += [f"centralizer {cen}", _report_line(rc), _report_line(coop)]
    _out(args, obj, "\n".join(lines))
    return 0


def cmd_coherence(args):
    s = _sampler(args)
    e = ext.named_extension(args.extension, s)
    k = subobjects.Generated(e.kernel, parse_elem_list(args.k, e.kernel), depth=args.depth, box=args.closure_box)
    h = subobjects.Generated(e.kernel, parse_elem_list(args.h, e.kernel), depth=args.depth, box=args.closure_box)
    r = ext.coherence_join_closure_test(e, k, h, s)
    _out(args, r.to_json(), _report_line(r))
    return 0


def cmd_suite(args):
    if args.manifest:
        m = load_manifest(args.manifest)
    else:
        m = default_manifest()
    m = SuiteManifest(m.suites, _sampler(args, m.sampler))
    if args.only:
        m = m.only([x.strip() for x in args.only.split(",") if x.strip()])
    for item in args.expect or []:
        sid, _, status = item.partition("=")
        m = m.expect(sid, status)
    if args.list:
        for e in m.suites:
            print(dumps(encode(e.to_json())) if args.json else f"{e.suite_id:30s} {e.module + '.' + e.check:30s} expect {e.expected}")
        return 0
    code, bad = 0, []
    for entry in m.suites:
        res = run_entry(entry, m.sampler)
        if args.json:
            print(dumps(encode(res)), flush=True)
        else:
            flag = "ok" if res["match"] else "MISMATCH"
            print(f"{flag:9s} {entry.suite_id:32s} observed {res['observed']}, expected {entry.expected}", flush=True)
        if "exit_code" in res:
            code = max(code, res["exit_code"])
            bad.append(f"{entry.suite_id}: {res['error']}")
        elif not res["match"]:
            code = max(code, 1)
            bad.append(f"{entry.suite_id}: observed {res['observed']}, expected {entry.expected}")
    if bad:
        print(f"{len(bad)} of {len(m.suites)} suites did not match:", file=sys.stderr)
        for line in bad:
            print(f"  {line}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="lgrp", description="Check lattice-ordered group constructions on concrete instances.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                           epilog=_epilog(name), formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = add("laws", cmd_laws, "run the law suite on an instance")
    p.add_argument("--law", action="append", choices=laws.LAW_IDS, help="only this law (repeatable)")

    p = add("nf", cmd_nf, "print the join-of-meets normal form of a term")
    p.add_argument("term")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="node budget (default %(default)s)")

    p = add("refute", cmd_refute, "search for a counterexample to lhs = rhs")
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)

    p = add("polar", cmd_polar, "polar of a coordinate ideal")
    p.add_argument("--support", required=True, help="comma-separated zero-based indices")

    p = add("commutator", cmd_commutator, "Huq commutator of two coordinate ideals")
    p.add_argument("--h", required=True, help="support of H")
    p.add_argument("--k", required=True, help="support of K")
    p.add_argument("--brute-force", action="store_true", help="also run the exhaustive oracle")

    p = add("ideals", cmd_ideals, "enumerate coordinate ideals of Z^n")
    p.add_argument("--check-distributive", action="store_true")

    p = add("extension", cmd_extension, "build and check a split extension")
    p.add_argument("name", help="lex, product, or a total descriptor such as prod(Z^2,Z)")
    p.add_argument("--verify", action="store_true",
                   help="semidirect reconstruction, polar-section ideal test, and for lex the non-faithfulness witness")

    p = add("points", cmd_points, "point subobjects of the standard splitting of --instance")
    p.add_argument("--xbar", required=True, help="support of the kernel ideal")
    p.add_argument("--centralizer", action="store_true")

    p = add("coherence", cmd_coherence, "join-closure test for K and H inside a split extension")
    p.add_argument("--k", required=True, help='generators, e.g. "(1,0);(0,1)"')
    p.add_argument("--h", required=True, help="generators of H")
    p.add_argument("--extension", default="lex")
    p.add_argument("--depth", type=int, default=3, help="initial closure depth (default %(default)s)")
    p.add_argument("--closure-box", type=int, default=8, help="coordinate bound inside closures (default %(default)s)")

    p = add("suite", cmd_suite, "run the acceptance suites (NDJSON with --json)")
    p.add_argument("--manifest", help="JSON manifest file (default: built-in)")
    p.add_argument("--only", help="comma-separated suite ids")
    p.add_argument("--expect", action="append", metavar="ID=STATUS",
                   help=f"override an expected status ({' or '.join(EXPECTED)})")
    p.add_argument("--list", action="store_true", help="list suites without running them")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except LGroupError as exc:
        print(f"lgrp: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
