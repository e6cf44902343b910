"""``icx`` command-line front end. Every subcommand prints one JSON document.

Exit codes: 0 success, 1 check failed (witness in the output), 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional

from . import generators
from .conjugate import (biconjugate_bruteforce, fenchel_check, integral_conjugate,
                        toland_singer_check)
from .core import INF, IntegralBox, format_rational, parse_rational
from .corpus import CorpusError, run_corpus
from .functions import (FN_OPS, FiniteFunction, apply_fn_op, convex_envelope_at, is_integrally_convex_2d,
                        is_integrally_convex_fn, local_convex_extension)
from .io import (InputError, dumps, instance_to_json, load_instance, parse_bounds, parse_vector,
                 rational_out)
from .minimize import beta, minimize_bruteforce, minimize_descent, minimize_scaling
from .sets import (SET_OPS, DiscreteSet, apply_set_op, box_integrality_probe, is_hole_free,
                   is_integrally_convex_set, local_hull_oracle)
from .subgrad import integral_subgradient, subdifferential_system


class UsageError(Exception):
    pass


def _load(path, kind):
    obj = load_instance(path)
    if not isinstance(obj, kind):
        want = {DiscreteSet: "set", FiniteFunction: "function"}.get(kind, "separable function")
        raise InputError(f"{path}: expected a {want}")
    return obj


def _params(text: Optional[str]) -> dict:
    if not text:
        return {}
    try:
        out = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--params is not valid JSON: {exc.msg}") from exc
    if not isinstance(out, dict):
        raise InputError("--params must be a JSON object")
    return out


def _pt(p):
    return None if p is None else list(p)


def _witness(verdict):
    w = verdict.witness
    if w is None:
        return None
    return [list(part) for part in w] if isinstance(w[0], tuple) else list(w)


def _check_dim(f, x, what="point"):
    if len(x) != f.dim:
        raise InputError(f"{what} has dimension {len(x)}, instance has {f.dim}")


# ---------------------------------------------------------------- handlers


def cmd_check_set(args):
    S = _load(args.file, DiscreteSet)
    ic, hf = is_integrally_convex_set(S), is_hole_free(S)
    out = {"integrally_convex": ic.ok, "witness": _witness(ic), "hole_free": hf.ok, "hole": _pt(hf.witness)}
    if args.oracle:
        oracle = local_hull_oracle(S)
        out["local_hull_oracle"] = {"integrally_convex": oracle.ok,
                                    "witness": None if oracle.witness is None else
                                    [list(oracle.witness[0]), [format_rational(c) for c in oracle.witness[1]]]}
    return out, 0 if ic.ok else 1


def cmd_set_op(args):
    S = _load(args.file, DiscreteSet)
    other = _load(args.other, DiscreteSet) if args.other else None
    return instance_to_json(apply_set_op(S, args.op, other, **_params(args.params))), 0


def cmd_boxtdi_probe(args):
    S = _load(args.file, DiscreteSet)
    probe = box_integrality_probe(S, args.alpha_max)
    if all(probe):
        msg = f"no violation found up to α={args.alpha_max}"
    else:
        msg = f"dilation α={probe.index(False) + 1} is not integrally convex: not box-TDI"
    return {"probe": probe, "message": msg}, 0 if all(probe) else 1


def cmd_check_fn(args):
    f = _load(args.file, FiniteFunction)
    if args.mode == "2d":
        verdict = is_integrally_convex_2d(f)
    else:
        verdict = is_integrally_convex_fn(f, "pairs_eq2" if args.mode == "eq2" else "pairs_ge2")
    return {"integrally_convex": verdict.ok, "mode": args.mode, "witness": _witness(verdict)}, \
        0 if verdict.ok else 1


def cmd_fn_op(args):
    f = _load(args.file, FiniteFunction)
    g = _load(args.other, FiniteFunction) if args.other else None
    return instance_to_json(apply_fn_op(f, args.op, g, **_params(args.params))), 0


def cmd_extend(args):
    f = _load(args.file, FiniteFunction)
    x = parse_vector(args.at)
    _check_dim(f, x)
    return {"at": [format_rational(c) for c in x],
            "local_extension": rational_out(local_convex_extension(f, x)),
            "convex_envelope": rational_out(convex_envelope_at(f, x))}, 0


def cmd_minimize(args):
    f = _load(args.file, FiniteFunction)
    start = parse_vector(args.start, integral=True) if args.start else None
    if start is not None:
        _check_dim(f, start, "start")
    if args.algorithm == "scaling":
        rep = minimize_scaling(f, start, check=not args.no_check)
    elif args.algorithm == "descent":
        rep = minimize_descent(f, start)
    else:
        rep = minimize_bruteforce(f)
    return {"algorithm": args.algorithm, "minimizer": list(rep.minimizer),
            "value": format_rational(rep.value), "evaluations": rep.evaluations,
            "phases": [{"alpha": a, "point": list(x)} for a, x in rep.phases]}, 0


def cmd_subgrad(args):
    f = _load(args.file, FiniteFunction)
    x = parse_vector(args.at, integral=True)
    _check_dim(f, x)
    box = None
    if args.box:
        box = IntegralBox(parse_bounds(args.box[0]), parse_bounds(args.box[1]))
        if box.dim != f.dim:
            raise InputError("box dimension does not match the function")
    trace = []
    p = integral_subgradient(f, x, box, trace)
    system = subdifferential_system(f, x, check=False)
    out = {"at": list(x), "subgradient": _pt(p),
           "system": [{"d": list(d), "rhs": format_rational(r)} for d, r in system.rows],
           "trace": [{"coordinate": l, "lo": rational_out(lo), "hi": rational_out(hi), "pick": pick}
                     for l, lo, hi, pick in trace],
           "verified": p is not None}
    return out, 0 if p is not None else 1


def cmd_conjugate(args):
    f = _load(args.file, FiniteFunction)
    p = parse_vector(args.at)
    _check_dim(f, p, "price")
    out = {"at": [format_rational(c) for c in p], "conjugate": rational_out(integral_conjugate(f, p))}
    if args.biconjugate:
        x = parse_vector(args.biconjugate, integral=True)
        _check_dim(f, x)
        out["biconjugate"] = {"at": list(x), "p_bound": args.p_bound,
                              "value": rational_out(biconjugate_bruteforce(f, x, args.p_bound))}
    return out, 0


def _report(rep):
    return {"primal": format_rational(rep.primal_opt), "primal_argmin": list(rep.primal_argmin),
            "dual": format_rational(rep.dual_opt), "dual_arg": list(rep.dual_arg),
            "gap": format_rational(rep.gap), "certificate": _pt(rep.certificate), "note": rep.note}


def cmd_fenchel(args):
    f = _load(args.f, FiniteFunction)
    psi = load_instance(args.psi)
    if isinstance(psi, DiscreteSet):
        raise InputError(f"{args.psi}: expected a function")
    rep = fenchel_check(f, psi, report_only=args.report_only, p_bound=args.p_bound)
    return _report(rep), 0 if rep.gap == 0 else 1


def cmd_toland_singer(args):
    g = _load(args.g, FiniteFunction)
    h = _load(args.h, FiniteFunction)
    rep = toland_singer_check(g, h, args.pbox)
    return _report(rep), 0 if rep.certificate is not None else 1


def cmd_gen(args):
    fam = args.family
    params = _params(args.params)
    rng = random.Random(args.seed)
    box = IntegralBox.cube(args.n, args.lo, args.hi)
    span = args.hi - args.lo + 1
    if fam == "random":
        f = generators.gen_random_ic(args.n, box, args.seed, cuts=params.get("cuts", True))
    elif fam == "separable":
        pieces = params.get("pieces") or [generators._random_convex(rng, span, 3) for _ in range(args.n)]
        f = generators.gen_separable([[_rational(v) for v in piece] for piece in pieces], box)
    elif fam == "ddquad":
        Q = params.get("Q") or _random_dd(rng, args.n)
        f = generators.gen_quadratic_dd(Q, box)
    elif fam == "twosep":
        specs = _twosep_specs(params, rng, args.n, span) if params else _random_twosep(rng, args.n, span)
        f = generators.gen_two_separable(specs, box)
    else:
        a = tuple(params.get("a", (2, 2)))
        cells = params.get("cells", [["M", "M"], ["L", "M"]])
        spec = generators.TriangulationSpec(a, tuple(tuple(col) for col in cells))
        f = generators.gen_triangulation_2d(spec)
    out = instance_to_json(f)
    out["metadata"] = f"family={fam} seed={args.seed}"
    return out, 0


def _rational(v):
    if isinstance(v, str) and v.lower() == "inf":
        return INF
    return parse_rational(v)


def _random_dd(rng, n):
    Q = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            Q[i][j] = Q[j][i] = rng.randint(-2, 2)
    for i in range(n):
        Q[i][i] = sum(abs(Q[i][j]) for j in range(n) if j != i) + rng.randint(0, 2)
    return Q


def _random_twosep(rng, n, span):
    specs = {"single": {i: generators._random_convex(rng, span, 2) for i in range(n)}, "diff": {}}
    for i in range(n):
        for j in range(i + 1, n):
            specs["diff"][(i, j)] = generators._random_convex(rng, 2 * span - 1, 2)
    return specs


def _twosep_specs(params, rng, n, span):
    def pairs(block):
        out = {}
        for key, vals in block.items():
            i, j = (int(t) for t in key.split(","))
            out[(i, j)] = [_rational(v) for v in vals]
        return out
    return {"single": {int(k): [_rational(v) for v in vals] for k, vals in params.get("single", {}).items()},
            "diff": pairs(params.get("diff", {})), "sum": pairs(params.get("sum", {}))}


def cmd_beta(args):
    if args.n < 1:
        raise InputError("n must be >= 1")
    return format_rational(beta(args.n)), 0


def cmd_corpus(args):
    results = run_corpus(args.dir)
    rows = [{"id": r.case_id, "ok": r.ok, "mismatches": r.mismatches, "error": r.error} for r in results]
    passed = sum(r.ok for r in results)
    return {"cases": rows, "passed": passed, "failed": len(results) - passed}, \
        0 if passed == len(results) else 1


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="icx", description="Integrally convex sets and functions on the integer lattice.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-set", help="integral convexity and hole-freeness of a set")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true", help="also run the local-hull oracle (slow)")
    p.set_defaults(func=cmd_check_set)

    p = sub.add_parser("set-op", help="apply a set operation")
    p.add_argument("file")
    p.add_argument("--op", required=True, choices=SET_OPS)
    p.add_argument("--params", help="JSON object of operation parameters")
    p.add_argument("--other", help="second operand for intersect/minkowski")
    p.set_defaults(func=cmd_set_op)

    p = sub.add_parser("boxtdi-probe", help="integral convexity of dilations alpha = 1..K")
    p.add_argument("file")
    p.add_argument("--alpha-max", type=int, required=True)
    p.set_defaults(func=cmd_boxtdi_probe)

    p = sub.add_parser("check-fn", help="integral convexity of a function")
    p.add_argument("file")
    p.add_argument("--mode", choices=("ge2", "eq2", "2d"), default="ge2")
    p.set_defaults(func=cmd_check_fn)

    p = sub.add_parser("fn-op", help="apply a function operation")
    p.add_argument("file")
    p.add_argument("--op", required=True, choices=FN_OPS)
    p.add_argument("--params", help="JSON object of operation parameters")
    p.add_argument("--other", help="second operand for direct_sum/add/convolve")
    p.set_defaults(func=cmd_fn_op)

    p = sub.add_parser("extend", help="local convex extension and convex envelope at a point")
    p.add_argument("file")
    p.add_argument("--at", required=True, help='rational point, e.g. "1/2,1"')
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("minimize", help="minimize a function")
    p.add_argument("file")
    p.add_argument("--algorithm", choices=("scaling", "descent", "brute"), default="scaling")
    p.add_argument("--start", help="integer start point (default: lexicographically smallest)")
    p.add_argument("--no-check", action="store_true", help="skip the integral convexity pre-check")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("subgrad", help="integral subgradient at a point")
    p.add_argument("file")
    p.add_argument("--at", required=True)
    p.add_argument("--box", nargs=2, metavar=("LOWER", "UPPER"),
                   help="""bounds as JSON arrays, e.g. '[-1, "-inf"]' '[2, 3]'""")
    p.set_defaults(func=cmd_subgrad)

    p = sub.add_parser("conjugate", help="integral conjugate at a price vector")
    p.add_argument("file")
    p.add_argument("--at", required=True)
    p.add_argument("--biconjugate", metavar="X", help="also evaluate the biconjugate at X")
    p.add_argument("--p-bound", type=int, default=8, help="price box for --biconjugate")
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("fenchel", help="Fenchel-type min-max check")
    p.add_argument("f")
    p.add_argument("psi")
    p.add_argument("--report-only", action="store_true")
    p.add_argument("--p-bound", type=int)
    p.set_defaults(func=cmd_fenchel)

    p = sub.add_parser("toland-singer", help="inf(g - h) against inf(h* - g*)")
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("--pbox", type=int)
    p.set_defaults(func=cmd_toland_singer)

    p = sub.add_parser("gen", help="generate a certified instance")
    p.add_argument("--family", required=True, choices=("separable", "ddquad", "twosep", "triangulation", "random"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--lo", type=int, default=-3)
    p.add_argument("--hi", type=int, default=3)
    p.add_argument("--params", help="JSON object of family parameters")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("beta", help="proximity constant beta_n")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("corpus", help="run the regression corpus")
    p.add_argument("--dir", help="corpus directory (default: bundled)")
    p.set_defaults(func=cmd_corpus)
    return parser


def run(argv=None) -> tuple[int, str]:
    """Execute a command; returns (exit code, stdout text). Errors go to stderr."""
    try:
        args = build_parser().parse_args(argv)
        payload, code = args.func(args)
    except (UsageError, InputError, CorpusError, ValueError, KeyError) as exc:
        print(f"icx: error: {exc}", file=sys.stderr)
        return 2, ""
    except SystemExit as exc:  # --help
        return int(exc.code or 0), ""
    return code, dumps(payload)


def main(argv=None) -> int:
    code, text = run(argv)
    if text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
