import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icx.core import IntegralBox
from icx.functions import FiniteFunction
from icx.generators import gen_quadratic_dd, gen_separable
from icx.minimize import (alpha_descent, alpha_local_minimizers, argmin_set, beta, beta_bound,
                          box_barrier_check, directions, distance_to_set, is_local_min, linf_diameter,
                          minimize_bruteforce, minimize_descent, minimize_scaling, steepest_descent)
from icx.sets import is_integrally_convex_set
from strategies import ic_functions

BOWL = FiniteFunction.tabulate(lambda a, b: a * a + b * b, IntegralBox.cube(2, -2, 2).points(), 2)


def _three_dim():
    rows = {(0, 0): (0, 1, 1), (1, 0): (3, 0, 3)}
    return FiniteFunction.of({(a, b, c): rows[(0, 0) if b == c else (1, 0)][a]
                              for a in range(3) for b in (0, 1) for c in (0, 1)})


def test_beta_table():
    assert [beta(n) for n in range(1, 8)] == [1, 2, 5, Fraction(27, 2), Fraction(83, 2),
                                             Fraction(585, 4), 586]


@pytest.mark.parametrize("n", range(3, 11))
def test_beta_closed_form_bound(n):
    assert beta(n) <= beta_bound(n) == Fraction(math.factorial(n + 1), 2 ** (n - 1))


def test_beta_rejects_zero():
    with pytest.raises(ValueError):
        beta(0)


def test_direction_order_puts_zero_first():
    d = directions(2)
    assert len(d) == 9 and d[0] == (0, 0) and d[1] == (0, 1) and d[2] == (0, -1)


def test_local_min_on_bowl():
    assert is_local_min(BOWL, (0, 0))
    v = is_local_min(BOWL, (1, 0))
    assert not v and v.witness == (-1, 0)


def test_local_min_of_three_dim_example():
    assert is_local_min(_three_dim(), (1, 1, 0))
    assert argmin_set(_three_dim()).points == ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))


def test_local_min_outside_domain():
    with pytest.raises(ValueError):
        is_local_min(BOWL, (5, 5))


def test_descent_on_line():
    f = FiniteFunction.tabulate(lambda x: x * x, [(k,) for k in range(-5, 6)], 1)
    assert steepest_descent(f, (5,)) == (0,)
    assert steepest_descent(f, (0,)) == (0,)


def test_scaling_on_large_separable():
    f = gen_separable([lambda k: (k - 17) ** 2, lambda k: abs(k - 40)], [(0, 64), (0, 64)])
    rep = minimize_scaling(f, (64, 64))
    assert rep.minimizer == (17, 40) and rep.value == 0
    assert len(rep.phases) == 7 and [a for a, _ in rep.phases] == [64, 32, 16, 8, 4, 2, 1]


def test_scaling_on_singleton():
    f = FiniteFunction.of({(3, 4): 7})
    rep = minimize_scaling(f)
    assert rep.minimizer == (3, 4) and len(rep.phases) == 1 and rep.evaluations > 0


def test_scaling_on_quadratic_cube():
    Q = [[3, -1, 1], [-1, 2, 0], [1, 0, 2]]
    base = gen_quadratic_dd(Q, IntegralBox.cube(3, -8, 8))
    # a linear tilt moves the minimizer off the origin
    f = FiniteFunction.of({x: v - 7 * x[0] + 5 * x[2] for x, v in base.table.items()})
    assert minimize_scaling(f).value == minimize_bruteforce(f).value


def test_scaling_rejects_non_convex():
    f = FiniteFunction.tabulate(lambda a, b: abs(2 * a - b), IntegralBox((0, 0), (1, 2)).points(), 2)
    with pytest.raises(ValueError):
        minimize_scaling(f)


def test_argmin_of_constant_is_everything():
    f = FiniteFunction.of({x: 0 for x in IntegralBox.cube(2, 0, 2).points()})
    assert len(argmin_set(f)) == 9


def test_box_barrier_reduces_to_local_min():
    for x in [(0, 0), (1, 0), (-1, 1)]:
        lower, upper = [c - 1 for c in x], [c + 1 for c in x]
        assert box_barrier_check(BOWL, x, lower, upper) == bool(is_local_min(BOWL, x))


def test_box_barrier_separable_three_dim():
    f = gen_separable([lambda k: k * k, lambda k: abs(k), lambda k: 2 * k * k + k], IntegralBox.cube(3, -3, 3))
    assert box_barrier_check(f, (0, 0, 0), (-2, -2, -2), (2, 2, 2))


def test_box_barrier_false_for_shifted_instance():
    f = gen_separable([lambda k: (k - 2) ** 2, lambda k: k * k], IntegralBox.cube(2, -3, 3))
    assert not box_barrier_check(f, (0, 0), (-2, -2), (2, 2))


def test_box_barrier_precondition():
    with pytest.raises(ValueError):
        box_barrier_check(BOWL, (0, 0), (0, -1), (1, 1))


# ---- properties over generated instances

@given(ic_functions(lo=-3, hi=3))
def test_scaling_matches_brute_force(f):
    rep = minimize_scaling(f)
    brute = minimize_bruteforce(f)
    assert rep.value == brute.value == f(rep.minimizer)
    spread = linf_diameter(f.domain)
    assert len(rep.phases) == (math.ceil(math.log2(spread)) if spread > 1 else 0) + 1


@given(ic_functions())
def test_local_min_iff_global_min(f):
    low = f.min_value()
    for x, v in f.table.items():
        assert bool(is_local_min(f, x)) == (v == low)


@given(ic_functions())
def test_descent_finds_a_minimizer(f):
    rep = minimize_descent(f)
    assert rep.value == f.min_value()


@given(ic_functions(), st.data())
def test_argmin_sets_are_convex(f, data):
    assert is_integrally_convex_set(argmin_set(f))
    for _ in range(3):
        p = [Fraction(data.draw(st.integers(-6, 6)), data.draw(st.integers(1, 3))) for _ in range(f.dim)]
        tilted = FiniteFunction.of({x: v - sum(a * b for a, b in zip(p, x)) for x, v in f.table.items()})
        assert is_integrally_convex_set(argmin_set(tilted))


@settings(max_examples=20)
@given(ic_functions(dim=2, lo=-4, hi=4), st.sampled_from([2, 4]))
def test_proximity_of_alpha_local_minimizers(f, alpha):
    best = argmin_set(f)
    for x in alpha_local_minimizers(f, alpha):
        assert distance_to_set(x, best) <= beta(f.dim) * (alpha - 1)
    start = next(iter(f.table))
    assert distance_to_set(alpha_descent(f, start, alpha), best) <= beta(f.dim) * (alpha - 1)
