"""Local optimality, box barriers, proximity constants and scaling minimization."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .core import INF, linf
from .functions import FiniteFunction
from .sets import DiscreteSet, Verdict


@dataclass(frozen=True)
class MinimizeReport:
    minimizer: tuple[int, ...]
    value: Fraction
    evaluations: int
    phases: tuple[tuple[int, tuple[int, ...]], ...]  # (alpha, point reached in that phase)


@lru_cache(maxsize=None)
def directions(n: int) -> tuple[tuple[int, ...], ...]:
    """{-1,0,1}^n in the tie-break order: lexicographic with 0 < +1 < -1 per coordinate."""
    return tuple(itertools.product((0, 1, -1), repeat=n))


def _add(x, d, scale=1):
    return tuple(a + scale * b for a, b in zip(x, d))


def _require_in_domain(f: FiniteFunction, x):
    if len(x) != f.dim:
        raise ValueError(f"point has dimension {len(x)}, function has {f.dim}")
    if tuple(x) not in f:
        raise ValueError(f"point {tuple(x)} is not in the domain")


def _best_step(evaluate: Callable, z, n: int, stride: int = 1):
    """Steepest step from z: (direction, value); the zero direction wins ties."""
    best_d, best_v = None, None
    for d in directions(n):
        v = evaluate(_add(z, d, stride))
        if best_v is None or v < best_v:
            best_d, best_v = d, v
    return best_d, best_v


def is_local_min(f: FiniteFunction, x: Sequence[int]) -> Verdict:
    """No d in {-1,0,1}^n improves f(x); otherwise the witness is the steepest improving d."""
    _require_in_domain(f, x)
    d, _ = _best_step(f, tuple(x), f.dim)
    if any(d):
        return Verdict(False, d)
    return Verdict(True)


def _descend(evaluate: Callable, z0, n: int, stride: int = 1):
    z = tuple(z0)
    while True:
        d, _ = _best_step(evaluate, z, n, stride)
        if not any(d):
            return z
        z = _add(z, d, stride)


def steepest_descent(f: FiniteFunction, z0: Sequence[int]) -> tuple[int, ...]:
    _require_in_domain(f, z0)
    return _descend(f, z0, f.dim)


def alpha_descent(f: FiniteFunction, z0: Sequence[int], alpha: int) -> tuple[int, ...]:
    """Steepest descent with steps alpha*d; ends at an alpha-local minimizer."""
    _require_in_domain(f, z0)
    return _descend(f, z0, f.dim, alpha)


def alpha_local_minimizers(f: FiniteFunction, alpha: int) -> list[tuple[int, ...]]:
    """Every domain point that no step alpha*d improves, by exhaustive scan."""
    out = []
    for x, v in f.table.items():
        if all(f(_add(x, d, alpha)) >= v for d in directions(f.dim)):
            out.append(x)
    return out


@lru_cache(maxsize=None)
def beta(n: int) -> Fraction:
    """Proximity constant: beta_1 = 1, beta_2 = 2, beta_n = (n+1)/2 * beta_{n-1} + 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return Fraction(1)
    if n == 2:
        return Fraction(2)
    return Fraction(n + 1, 2) * beta(n - 1) + 1


def beta_bound(n: int) -> Fraction:
    """Closed-form upper bound (n+1)!/2^(n-1) on beta_n, valid for n >= 3."""
    return Fraction(math.factorial(n + 1), 2 ** (n - 1))


def linf_diameter(S: DiscreteSet) -> int:
    box = S.bounding_box()
    return max(h - l for l, h in zip(box.lower, box.upper))


def minimize_scaling(f: FiniteFunction, x0: Optional[Sequence[int]] = None,
                     check: bool = True) -> MinimizeReport:
    """Proximity-scaling minimization of an integrally convex function.

    Each phase runs steepest descent on y -> f(x + alpha*y) restricted to
    ||alpha*y||_inf <= beta_n (2 alpha - 1), then halves alpha. Evaluations
    count table lookups inside the window.
    """
    if f.empty:
        raise ValueError("cannot minimize a function with empty domain")
    if check and not f.ic_verdict:
        raise ValueError("function is not integrally convex")
    x = tuple(x0) if x0 is not None else next(iter(f.table))
    _require_in_domain(f, x)
    n = f.dim
    spread = linf_diameter(f.domain)
    alpha = 1 if spread <= 1 else 1 << (spread - 1).bit_length()
    count = 0
    phases = []
    b = beta(n)
    while True:
        radius = b * (2 * alpha - 1)

        def restricted(y, alpha=alpha, radius=radius, base=x):
            nonlocal count
            if alpha * max(abs(c) for c in y) > radius:
                return INF
            count += 1
            return f(_add(base, y, alpha))

        y = _descend(restricted, (0,) * n, n)
        x = _add(x, y, alpha)
        phases.append((alpha, x))
        if alpha == 1:
            break
        alpha //= 2
    return MinimizeReport(x, f(x), count, tuple(phases))


def minimize_descent(f: FiniteFunction, x0: Optional[Sequence[int]] = None) -> MinimizeReport:
    count = 0

    def counted(y):
        nonlocal count
        count += 1
        return f(y)

    x = tuple(x0) if x0 is not None else next(iter(f.table))
    _require_in_domain(f, x)
    z = _descend(counted, x, f.dim)
    return MinimizeReport(z, f(z), count, ((1, z),))


def minimize_bruteforce(f: FiniteFunction) -> MinimizeReport:
    if f.empty:
        raise ValueError("cannot minimize a function with empty domain")
    best = min(f.table, key=lambda x: (f.table[x], x))
    return MinimizeReport(best, f.table[best], len(f.table), ())


def argmin_set(f: FiniteFunction) -> DiscreteSet:
    if f.empty:
        raise ValueError("argmin of a function with empty domain")
    low = f.min_value()
    return DiscreteSet(f.dim, tuple(x for x, v in f.table.items() if v == low))


def distance_to_set(x: Sequence[int], S: DiscreteSet) -> int:
    return min(linf(x, y) for y in S.points)


def box_barrier_check(f: FiniteFunction, xhat: Sequence[int], lower: Sequence, upper: Sequence,
                      check: bool = True) -> bool:
    """Whether f(xhat) <= f(y) on the walls of the box lower <= y <= upper.

    The open box lower < x < upper must contain xhat. For integrally convex
    f a True answer means f(xhat) <= f(z) for every domain point z outside
    the open box; that consequence is re-verified by brute force here.
    """
    xhat = tuple(xhat)
    _require_in_domain(f, xhat)
    if len(lower) != f.dim or len(upper) != f.dim:
        raise ValueError("box bounds must match the dimension")
    for i, (lo, c, hi) in enumerate(zip(lower, xhat, upper)):
        if not lo < c < hi:
            raise ValueError(f"coordinate {i}: need lower < xhat < upper")
    if check and not f.ic_verdict:
        raise ValueError("function is not integrally convex")
    base = f(xhat)

    def on_wall(y):
        inside = all(lo <= c <= hi for lo, c, hi in zip(lower, y, upper))
        return inside and any(c == lo or c == hi for lo, c, hi in zip(lower, y, upper))

    result = all(v >= base for y, v in f.table.items() if on_wall(y))
    if result:
        for z, v in f.table.items():
            outside = not all(lo < c < hi for lo, c, hi in zip(lower, z, upper))
            if outside and v < base:
                raise RuntimeError(f"box barrier contradicted at {z}; input is not integrally convex")
    return result
