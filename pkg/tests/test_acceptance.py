"""Acceptance suite: nine criteria, each reported as one PASS/FAIL line.

Run with pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``. Every comparison is exact.
"""

import math
import random
import sys
from fractions import Fraction
from functools import cache

import pytest

from icx.conjugate import (SeparableFunction, biconjugacy_certify, biconjugate_values,
                           default_price_bound, fenchel_check, integral_conjugate, separable_conjugate,
                           set_minmax)
from icx.core import INF, IntegralBox, dot
from icx.corpus import run_corpus
from icx.functions import apply_fn_op, is_integrally_convex_2d, is_integrally_convex_fn
from icx.generators import gen_random_ic, gen_separable, perturb_non_ic
from icx.minimize import (alpha_descent, alpha_local_minimizers, argmin_set, beta, beta_bound,
                          distance_to_set, linf_diameter, minimize_bruteforce, minimize_scaling)
from icx.sets import (DiscreteSet, apply_set_op, box_integrality_probe, is_hole_free,
                      is_integrally_convex_set, local_hull_oracle)
from icx.subgrad import boxed_feasible, in_subdifferential, integral_subgradient, subdifferential_system

RESULTS: dict[int, tuple[bool, str]] = {}


def record(criterion: int, failures: list, summary: str):
    ok = not failures
    RESULTS[criterion] = (ok, summary if ok else f"{len(failures)} failure(s), first: {failures[0]}")
    assert ok, failures[:5]


def status_lines() -> list[str]:
    return [f"criterion {k}: {'PASS' if ok else 'FAIL'} ({msg})" for k, (ok, msg) in sorted(RESULTS.items())]


# ---------------------------------------------------------------- instances


def _random_box(rng, n, half_max):
    lo = [-rng.randint(1, half_max) for _ in range(n)]
    hi = [rng.randint(1, half_max) for _ in range(n)]
    return IntegralBox(tuple(lo), tuple(hi))


@cache
def scaling_instances():
    """50 IC instances, n in {2, 3}, boxes inside [-8, 8]^n; every fifth uses the whole box uncut."""
    rng = random.Random(3)
    out = []
    for k in range(50):
        n = 2 if k % 2 == 0 else 3
        if k % 5 == 0:
            out.append(gen_random_ic(n, IntegralBox.cube(n, -8, 8), seed=1000 + k, cuts=False))
        else:
            out.append(gen_random_ic(n, _random_box(rng, n, 8), seed=1000 + k))
    return out


@cache
def small_ic_instances():
    """50 small integer-valued IC instances used by the duality criteria."""
    rng = random.Random(5)
    out = []
    for k in range(50):
        n = 2 if k % 2 == 0 else 3
        box = _random_box(rng, n, 3 if n == 2 else 2)
        out.append(gen_random_ic(n, box, seed=2000 + k))
    return out


@cache
def mixed_instances():
    """50 IC instances and 50 perturbations that are not IC, all small enough for the oracle."""
    rng = random.Random(7)
    ic, bad = [], []
    seed = 3000
    while len(ic) < 50:
        n = 2 if len(ic) % 2 == 0 else 3
        f = gen_random_ic(n, _random_box(rng, n, 2 if n == 2 else 1), seed=seed)
        seed += 1
        g = perturb_non_ic(f, seed)
        if g is None:
            continue
        ic.append(f)
        bad.append(g)
    return ic, bad


def _concave_piece(rng, lo, hi):
    slopes = sorted((rng.randint(-4, 4) for _ in range(hi - lo)), reverse=True)
    vals = [rng.randint(-3, 3)]
    for s in slopes:
        vals.append(vals[-1] + s)
    return lo, vals


# ---------------------------------------------------------------- criteria


def test_criterion_1_corpus():
    failures = [(r.case_id, r.error or r.mismatches) for r in run_corpus() if not r.ok]
    record(1, failures, "every corpus case matches")


def test_criterion_2_beta_table():
    want = [Fraction(2), Fraction(5), Fraction(27, 2), Fraction(83, 2), Fraction(585, 4), Fraction(586)]
    failures = [(n, beta(n), w) for n, w in zip(range(2, 8), want) if beta(n) != w]
    failures += [(n, beta(n), beta_bound(n)) for n in range(3, 11) if not beta(n) <= beta_bound(n)]
    record(2, failures, "beta(2..7) exact, bound holds for n=3..10")


def test_criterion_3_scaling_matches_brute_force():
    failures = []
    for idx, f in enumerate(scaling_instances()):
        rep = minimize_scaling(f)
        truth = minimize_bruteforce(f).value
        k_inf = linf_diameter(f.domain)
        phases = max(0, math.ceil(math.log2(k_inf))) + 1 if k_inf > 0 else 1
        limit = (12 * beta(f.dim)) ** f.dim * phases
        if rep.value != truth:
            failures.append((idx, "value", rep.value, truth))
        if len(rep.phases) != phases:
            failures.append((idx, "phases", len(rep.phases), phases))
        if rep.evaluations > limit:
            failures.append((idx, "evaluations", rep.evaluations, limit))
    record(3, failures, "50 instances: value, phase count and evaluation bound")


def test_criterion_4_checkers_agree():
    ic, bad = mixed_instances()
    failures = []
    for idx, f in enumerate(ic + bad):
        verdicts = [bool(is_integrally_convex_fn(f, "pairs_ge2")), bool(is_integrally_convex_fn(f, "pairs_eq2"))]
        if f.dim == 2:
            verdicts.append(bool(is_integrally_convex_2d(f)))
        expected = idx < len(ic)
        if any(v != expected for v in verdicts):
            failures.append((idx, "function", verdicts, expected))
        dom = f.domain
        mid, oracle = bool(is_integrally_convex_set(dom)), bool(local_hull_oracle(dom))
        if mid != oracle:
            failures.append((idx, "set", mid, oracle))
    rng = random.Random(11)
    for k in range(50):
        n = 2 + k % 2
        cube = list(IntegralBox((0,) * n, (2,) * n).points())
        S = DiscreteSet.of(rng.sample(cube, rng.randint(1, min(10, len(cube)))), n)
        mid, oracle = bool(is_integrally_convex_set(S)), bool(local_hull_oracle(S))
        if mid != oracle:
            failures.append((f"set{k}", mid, oracle))
    record(4, failures, "100 functions and 150 sets: all checkers agree")


def test_criterion_5_subgradients():
    rng = random.Random(13)
    failures = []
    for idx, f in enumerate(small_ic_instances()):
        for x, v in f.table.items():
            p = integral_subgradient(f, x)
            if p is None or not in_subdifferential(f, x, p):
                failures.append((idx, x, "subgradient", p))
            elif v + integral_conjugate(f, p) != dot(p, x):
                failures.append((idx, x, "fenchel-young", p))
        pts = list(f.table)
        passed = tries = 0
        while passed < 20 and tries < 400:
            tries += 1
            x = rng.choice(pts)
            if tries % 2:
                centre = integral_subgradient(f, x)
                lo = [c - rng.randint(0, 2) if rng.random() < 0.8 else -INF for c in centre]
                hi = [c + rng.randint(0, 2) if rng.random() < 0.8 else INF for c in centre]
            else:
                lo = [rng.randint(-6, 4) for _ in range(f.dim)]
                hi = [a + rng.randint(0, 4) for a in lo]
            box = IntegralBox(tuple(lo), tuple(hi))
            if not boxed_feasible(subdifferential_system(f, x, box)):
                continue
            passed += 1
            p = integral_subgradient(f, x, box)
            if p is None or not box.contains(p) or not in_subdifferential(f, x, p):
                failures.append((idx, x, "boxed", box, p))
        if passed < 20:
            failures.append((idx, "only", passed, "feasible boxes"))
    record(5, failures, "50 instances: every point certified, 20 feasible boxes each")


def test_criterion_6_biconjugacy():
    rng = random.Random(17)
    failures = []
    for idx, f in enumerate(small_ic_instances()):
        rep = biconjugacy_certify(f)
        if not rep.certified:
            failures.append((idx, rep.failures))
            continue
        bound = max([default_price_bound(f)] + [abs(c) for p in rep.subgradients.values() for c in p])
        spots = rng.sample(list(f.table), min(10, len(f.table)))
        for x, got in zip(spots, biconjugate_values(f, spots, bound)):
            if got != f(x):
                failures.append((idx, x, got, f(x)))
    record(6, failures, "50 instances certified, 10 brute-force spot checks each")


def test_criterion_7_fenchel():
    rng = random.Random(19)
    failures = []
    pool = small_ic_instances()
    made = 0
    for idx, f in enumerate(pool):
        if made == 30:
            break
        box = f.domain.bounding_box()
        pieces = []
        for lo, hi in zip(box.lower, box.upper):
            a = rng.randint(lo, hi)
            pieces.append(_concave_piece(rng, a, rng.randint(a, hi)))
        psi = SeparableFunction.of(pieces, "concave")
        if all(psi(x) == -INF for x in f.table):
            continue
        made += 1
        primal = min(v - psi(x) for x, v in f.table.items() if psi(x) != -INF)
        rep = fenchel_check(f, psi)
        p = rep.certificate
        if rep.gap != 0 or p is None or rep.primal_opt != primal:
            failures.append((idx, "gap", rep.gap, p))
        elif not all(isinstance(c, int) for c in p):
            failures.append((idx, "non-integer certificate", p))
        elif separable_conjugate(psi, p)[0] - integral_conjugate(f, p) != primal:
            failures.append((idx, "dual at certificate"))
    if made < 30:
        failures.append(("only", made, "pairs"))
    for k in range(10):
        S = argmin_set(pool[k]) if k % 2 else pool[k].domain
        pieces = []
        for lo, hi in zip(S.bounding_box().lower, S.bounding_box().upper):
            a, b = rng.randint(0, 2), rng.randint(-3, 3)
            pieces.append((lo - 1, [a * t * t + b * t for t in range(lo - 1, hi + 2)]))
        phi = SeparableFunction.of(pieces, "convex")
        primal, dual, rep = set_minmax(S, phi, default_price_bound(phi.to_function()) + 1)
        if not primal == dual == rep.primal_opt == min(phi(x) for x in S.points):
            failures.append((f"set{k}", primal, dual))
    record(7, failures, "30 Fenchel pairs with integer certificates, 10 set min-max instances")


def test_criterion_8_proximity():
    rng = random.Random(23)
    failures = []
    for idx, f in enumerate(scaling_instances()[:20]):
        target = argmin_set(f)
        for alpha in (2, 4):
            limit = beta(f.dim) * (alpha - 1)
            found = set(alpha_local_minimizers(f, alpha))
            found |= {alpha_descent(f, rng.choice(list(f.table)), alpha) for _ in range(5)}
            for x in sorted(found):
                if distance_to_set(x, target) > limit:
                    failures.append((idx, alpha, x, distance_to_set(x, target), limit))
    record(8, failures, "20 instances, alpha in {2, 4}: every alpha-local minimizer within bound")


def _set_ops(S, rng):
    n = S.dim
    coords = sorted(rng.sample(range(n), rng.randint(1, n)))
    fixed = [rng.randint(-1, 1) for _ in range(n - len(coords))]
    lo = [rng.randint(-1, 1) for _ in range(n)]
    cell = DiscreteSet.of(IntegralBox(tuple(lo), tuple(c + 1 for c in lo)).points(), n)
    ops = {
        "shift": apply_set_op(S, "shift", b=[rng.randint(-3, 3) for _ in range(n)]),
        "invert": apply_set_op(S, "invert", signs=[rng.choice((1, -1)) for _ in range(n)]),
        "permute": apply_set_op(S, "permute", perm=rng.sample(range(n), n)),
        "project": apply_set_op(S, "project", coords=coords),
        "restrict": apply_set_op(S, "restrict", coords=coords, fixed=fixed),
        "minkowski-box": apply_set_op(S, "minkowski", cell),
        "intersect-box": apply_set_op(S, "intersect", cell),
        "split": apply_set_op(S, "split", parts=[[0, n]] + [[i] for i in range(1, n)],
                              lower=[-9] * (n + 1), upper=[9] * (n + 1)),
    }
    if n == 2:
        ops["scale"] = apply_set_op(S, "scale", alpha=2)
    return ops


def _fn_ops(f, rng):
    n = f.dim
    coords = sorted(rng.sample(range(n), rng.randint(1, n)))
    fixed = [rng.randint(-1, 1) for _ in range(n - len(coords))]
    coeffs = [(rng.randint(0, 2), rng.randint(-2, 2)) for _ in range(n)]
    phi = gen_separable([[a * (k - 2) ** 2 + b * k for k in range(5)] for a, b in coeffs], [(-2, 2)] * n)
    ops = {
        "shift": apply_fn_op(f, "shift", b=[rng.randint(-3, 3) for _ in range(n)]),
        "invert": apply_fn_op(f, "invert", signs=[rng.choice((1, -1)) for _ in range(n)]),
        "permute": apply_fn_op(f, "permute", perm=rng.sample(range(n), n)),
        "project": apply_fn_op(f, "project", coords=coords),
        "restrict": apply_fn_op(f, "restrict", coords=coords, fixed=fixed),
        "value-scale": apply_fn_op(f, "value_scale", a="3/2", b=[rng.randint(-3, 3) for _ in range(n)],
                                   c="-1/3"),
        "add-separable": apply_fn_op(f, "add", phi),
        "convolve-separable": apply_fn_op(f, "convolve", phi),
    }
    if n == 2:
        ops["scale"] = apply_fn_op(f, "scale", alpha=2)
        ops["dilate"] = apply_fn_op(f, "dilate", alpha=2)
    return ops


def _counterexamples():
    """The five documented failures: (name, inputs IC?, result IC?) with the expected witness check."""
    out = []
    pts = []
    for x1 in range(5):
        for x2 in range(3):
            for x3 in range(3):
                if (x3 == 0 and x2 <= 1 and 0 <= x1 - x2 <= 3) or (x3 == 1 and x2 <= x1 <= 4) \
                        or (x3 == 2 and 1 <= x1 - x2 <= 3 and x1 <= 4):
                    pts.append((x1, x2, x3))
    S = DiscreteSet.of(pts)
    T = apply_set_op(S, "scale", alpha=2)
    out.append(("scaling", bool(is_integrally_convex_set(S)),
                T.points == ((0, 0, 0), (1, 0, 0), (1, 0, 1), (2, 1, 1)) and not is_integrally_convex_set(T)))
    S = DiscreteSet.of([(0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 0), (1, 1, 0, 1)])
    T = apply_set_op(S, "aggregate", parts=[[0, 2], [1, 3]])
    out.append(("aggregation", bool(is_integrally_convex_set(S)),
                T.points == ((0, 1), (1, 0), (1, 2), (2, 1)) and not is_integrally_convex_set(T)))
    S1 = DiscreteSet.of([(0, 0, 0), (0, 1, 1), (1, 1, 0), (1, 2, 1)])
    S2 = DiscreteSet.of([(0, 0, 0), (0, 1, 0), (1, 1, 1), (1, 2, 1)])
    v = is_integrally_convex_set(apply_set_op(S1, "intersect", S2))
    out.append(("intersection", bool(is_integrally_convex_set(S1)) and bool(is_integrally_convex_set(S2)),
                not v and v.witness == ((0, 0, 0), (1, 2, 1))))
    S1, S2 = DiscreteSet.of([(0, 0), (1, 1)]), DiscreteSet.of([(1, 0), (0, 1)])
    hf = is_hole_free(apply_set_op(S1, "minkowski", S2))
    out.append(("minkowski", bool(is_integrally_convex_set(S1)) and bool(is_integrally_convex_set(S2)),
                not hf and hf.witness == (1, 1)))
    S = DiscreteSet.of([(1, 1, 0, 0), (0, 1, 1, 0), (1, 0, 1, 0), (0, 0, 0, 1)])
    out.append(("dilation", bool(is_integrally_convex_set(S)), box_integrality_probe(S, 2) == [True, False]))
    return out


def test_criterion_9_preservation():
    rng = random.Random(29)
    failures = []
    ic, _ = mixed_instances()
    for idx, f in enumerate(ic[:30]):
        for name, T in _set_ops(f.domain, rng).items():
            if not T.empty and not is_integrally_convex_set(T):
                failures.append((idx, "set", name))
        for name, g in _fn_ops(f, rng).items():
            if not g.empty and not is_integrally_convex_fn(g):
                failures.append((idx, "function", name))
    for name, inputs_ok, fails_as_stated in _counterexamples():
        if not (inputs_ok and fails_as_stated):
            failures.append(("counterexample", name, inputs_ok, fails_as_stated))
    record(9, failures, "preservation on 30 instances, five counterexamples fail as documented")


if __name__ == "__main__":
    # the conftest hook prints the PASS/FAIL lines
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
