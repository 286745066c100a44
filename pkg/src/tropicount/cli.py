"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 non-generic constraints, 3 a
failed plane equivalence check.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

from tropicount.combinatorics import CodimensionMismatch, Degree, InvalidDegree, enumerate_types, validate_degree
from tropicount.constraints import InvalidConstraints, parse_rational
from tropicount.multiplicity import (
    CountOptions,
    NonGenericConstraints,
    WrongDimension,
    check_2d_equivalence,
    count_tropical,
    kontsevich_oracle,
)
from tropicount.polyhedral import (
    Fan,
    IncompleteComplex,
    RayNotInFan,
    adapted_decomposition,
    asymptotic_fan,
    check_complex,
    contains_in_one_skeleton,
    integral_rescale,
)
from tropicount.problem import load_problem
from tropicount.solver import CurveSolution

EXIT_INVALID = 1
EXIT_NONGENERIC = 2
EXIT_MISMATCH = 3

_INVALID = (InvalidDegree, InvalidConstraints, CodimensionMismatch, WrongDimension, RayNotInFan,
            IncompleteComplex, KeyError, ValueError, OSError)


def _emit(obj, pretty: bool) -> None:
    print(json.dumps(obj, indent=2 if pretty else None))


def _overrides(pairs) -> dict:
    out = {}
    for p in pairs or []:
        k, _, v = p.partition("=")
        if not k or not v:
            raise ValueError(f"--set expects name=value, got {p!r}")
        out[k] = parse_rational(v)
        if out[k].denominator == 1:
            out[k] = int(out[k])
    return out


def _options(args, file_opts: dict) -> CountOptions:
    opts = CountOptions()
    opts.seed = file_opts.get("seed", opts.seed)
    opts.box = int(file_opts.get("box", opts.box))
    opts.denominator = int(file_opts.get("denominator", opts.denominator))
    opts.allow_resample = bool(file_opts.get("allow_resample", opts.allow_resample))
    opts.max_retries = int(file_opts.get("max_retries", opts.max_retries))
    opts.threads = int(file_opts.get("threads", opts.threads))
    opts.strict_audit = bool(file_opts.get("strict_audit", opts.strict_audit))
    if args.seed is not None:
        opts.seed = args.seed
    if args.box is not None:
        opts.box = args.box
    if args.no_resample:
        opts.allow_resample = False
    if args.threads is not None:
        opts.threads = args.threads
    return opts


def cmd_count(args) -> int:
    prob = load_problem(args.problem, _overrides(args.set))
    res = count_tropical(prob.degree, prob.constraints, _options(args, prob.options))
    if args.pretty:
        print(f"total {res.total} from {len(res.per_curve)} curve(s), attempts {res.attempts}")
        for c in res.per_curve:
            r = c.record
            print(f"  w={r.marked_weight} D={r.D_index} deltas={list(r.deltas)} -> {r.contribution}  {c.type.code().decode()}")
    else:
        _emit(res.to_json(), False)
    return 0


def _read_degree(path) -> Degree:
    with open(path) as fh:
        data = json.load(fh)
    return Degree.from_json(data.get("degree", data))


def cmd_types(args) -> int:
    d = _read_degree(args.degree)
    validate_degree(d)
    types = enumerate_types(d)
    codes = sorted(t.code().decode() for t in types)
    weights = Counter()
    for t in types:
        weights[t.inner_weight] += 1
    out = {
        "count": len(types),
        "e": d.e,
        "bounded_edges": d.e - 3,
        "inner_weights": {str(k): v for k, v in sorted(weights.items())},
        "codes": codes,
    }
    if args.pretty:
        print(f"{len(types)} type(s), e = {d.e}, {d.e - 3} bounded edge(s) each")
        for w, k in sorted(weights.items()):
            print(f"  inner weight {w}: {k}")
    else:
        _emit(out, False)
    return 0


def cmd_check2d(args) -> int:
    prob = load_problem(args.problem, _overrides(args.set))
    if prob.degree.n != 2 or any(a.dim for a in prob.constraints):
        raise WrongDimension("check2d needs point constraints in the plane")
    res = count_tropical(prob.degree, prob.constraints, _options(args, prob.options))
    rows = []
    for c in res.per_curve:
        eq = check_2d_equivalence(c.type, res.constraints_used)
        rows.append({"code": c.type.code().decode(), "lhs": eq.lhs, "rhs": eq.rhs, "equal": eq.equal})
    if args.pretty:
        for r in rows:
            print(f"{r['lhs']:>6} {r['rhs']:>6} {'ok' if r['equal'] else 'MISMATCH'}  {r['code']}")
        print(f"total {res.total}")
    else:
        _emit({"total": res.total, "rows": rows}, False)
    return 0 if all(r["equal"] for r in rows) else EXIT_MISMATCH


def _read_fan(data) -> Fan:
    n = int(data["n"])
    return Fan.from_rays(n, [[tuple(int(x) for x in r) for r in cone] for cone in data["cones"]])


def cmd_decompose(args) -> int:
    with open(args.file) as fh:
        data = json.load(fh)
    fan = _read_fan(data["fan"])
    curves = [CurveSolution.from_json(c) for c in data.get("curves", [])]
    extra = [[parse_rational(x) for x in p] for p in data.get("extra_points", [])]
    cx = adapted_decomposition(curves, fan, extra)
    skeleton = all(
        contains_in_one_skeleton(cx, *s.edge_segment(ei)) for s in curves for ei in range(len(s.type.edges))
    )
    out = {
        "complex": cx.to_json(),
        "checks": {
            "complex": check_complex(cx).ok,
            "skeleton_containment": skeleton,
            "asymptotic_fan_equal": asymptotic_fan(cx).same_cones(fan),
        },
        "rescale": integral_rescale(cx, curves),
    }
    if args.pretty:
        print(f"{len(cx.maximal_cells)} maximal cell(s), rescale factor {out['rescale']}")
        for k, v in out["checks"].items():
            print(f"  {k}: {v}")
    else:
        _emit(out, False)
    return 0 if all(out["checks"].values()) else EXIT_MISMATCH


def cmd_oracle(args) -> int:
    vals = kontsevich_oracle(args.dmax)
    if args.pretty:
        for d, v in enumerate(vals, 1):
            print(f"N_{d} = {v}")
    else:
        _emit(vals, False)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tropicount", description="Count rational tropical curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, counting=False):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
        g.add_argument("--pretty", dest="pretty", action="store_true", help="human-readable report")
        p.set_defaults(pretty=False)
        if counting:
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--box", type=int, default=None)
            p.add_argument("--no-resample", action="store_true")
            p.add_argument("--threads", type=int, default=None)
            p.add_argument("--set", action="append", metavar="NAME=VALUE", help="substitute a problem parameter")

    p = sub.add_parser("count", help="weighted count of curves for a problem file")
    p.add_argument("problem")
    common(p, True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("types", help="census of types of a degree")
    p.add_argument("degree")
    common(p)
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("check2d", help="plane multiplicity equivalence per curve")
    p.add_argument("problem")
    common(p, True)
    p.set_defaults(func=cmd_check2d)

    p = sub.add_parser("decompose", help="adapted polyhedral decomposition for curves and a fan")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("oracle", help="rational plane curve counts N_1..N_dmax")
    p.add_argument("dmax", type=int)
    common(p)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonGenericConstraints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONGENERIC
    except _INVALID as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
