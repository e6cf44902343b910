"""Subdifferential systems and integral subgradients of integrally convex functions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import INF, IntegralBox, dot, lp_solve
from .functions import FiniteFunction


@dataclass(frozen=True)
class SubdiffSystem:
    """Rows <d, p> <= f(x+d) - f(x) for the nonzero d in {-1,0,1}^n with x+d in the domain."""

    base_point: tuple[int, ...]
    rows: tuple[tuple[tuple[int, ...], Fraction], ...]
    box: Optional[IntegralBox] = None

    @property
    def dim(self) -> int:
        return len(self.base_point)

    def contains(self, p: Sequence) -> bool:
        if self.box is not None and not self.box.contains(p):
            return False
        return all(dot(d, p) <= rhs for d, rhs in self.rows)


def _unit_directions(n: int):
    return [d for d in itertools.product((-1, 0, 1), repeat=n) if any(d)]


def subdifferential_system(f: FiniteFunction, x: Sequence[int], box: Optional[IntegralBox] = None,
                           check: bool = True) -> SubdiffSystem:
    """The local inequality system at x; it describes the subdifferential when f is integrally convex."""
    x = tuple(x)
    if x not in f:
        raise ValueError(f"point {x} is not in the domain")
    if box is not None and box.dim != f.dim:
        raise ValueError("box dimension does not match the function")
    if check and not f.ic_verdict:
        raise ValueError("function is not integrally convex")
    fx = f(x)
    rows = []
    for d in _unit_directions(f.dim):
        v = f(tuple(a + b for a, b in zip(x, d)))
        if v != INF:
            rows.append((d, v - fx))
    return SubdiffSystem(x, tuple(rows), box)


def in_subdifferential(f: FiniteFunction, x: Sequence[int], p: Sequence) -> bool:
    """Full definition: f(y) - f(x) >= <p, y - x> for every y in the domain."""
    x = tuple(x)
    fx = f(x)
    if fx == INF:
        return False
    px = dot(p, x)
    return all(v - fx >= dot(p, y) - px for y, v in f.table.items())


def projection_interval(sys: SubdiffSystem, l: int, fixed: Sequence = ()):
    """Feasible range (lo, hi) of p_l once p_{l+1}, ..., p_{n-1} are fixed.

    Without a box this reads only the rows with d_j = 0 for j < l, which is
    exact for integrally convex functions. With a box the projection of the
    boxed system is computed by two LPs, since clipping the unboxed interval
    would ignore how the box constrains the earlier coordinates. An empty
    range is returned as lo > hi. Endpoints may be -inf/+inf.
    """
    n = sys.dim
    if not 0 <= l < n:
        raise ValueError("coordinate index out of range")
    fixed = tuple(Fraction(v) for v in fixed)
    if len(fixed) != n - 1 - l:
        raise ValueError(f"expected {n - 1 - l} fixed values")
    if sys.box is not None:
        return _boxed_interval(sys, l, fixed)
    lo, hi = -INF, INF
    for d, rhs in sys.rows:
        if any(d[:l]):
            continue
        slack = rhs - sum((c * v for c, v in zip(d[l + 1:], fixed)), Fraction(0))
        if d[l] == 1:
            hi = min(hi, slack)
        elif d[l] == -1:
            lo = max(lo, -slack)
        elif slack < 0:
            return INF, -INF
    return lo, hi


def _boxed_interval(sys: SubdiffSystem, l: int, fixed):
    box = sys.box
    if not all(lo <= v <= hi for lo, v, hi in zip(box.lower[l + 1:], fixed, box.upper[l + 1:])):
        return INF, -INF
    k = l + 1  # free variables p_0..p_l
    ineqs = []
    for d, rhs in sys.rows:
        slack = rhs - sum((c * v for c, v in zip(d[k:], fixed)), Fraction(0))
        ineqs.append((list(d[:k]), slack))
    for j in range(k):
        unit = [0] * k
        unit[j] = 1
        if box.upper[j] != INF:
            ineqs.append((unit, box.upper[j]))
        if box.lower[j] != -INF:
            ineqs.append(([-u for u in unit], -box.lower[j]))
    target = [0] * l + [1]
    free = [False] * k
    low = lp_solve(target, (), ineqs, free)
    if low.status == "infeasible":
        return INF, -INF
    high = lp_solve(target, (), ineqs, free, maximize=True)
    lo = low.value if low.optimal else -INF
    hi = high.value if high.optimal else INF
    return lo, hi


def boxed_feasible(sys: SubdiffSystem) -> bool:
    """LP check that the system (with its box, if any) has a solution."""
    n = sys.dim
    ineqs = [(list(d), rhs) for d, rhs in sys.rows]
    if sys.box is not None:
        for j in range(n):
            unit = [0] * n
            unit[j] = 1
            if sys.box.upper[j] != INF:
                ineqs.append((unit, sys.box.upper[j]))
            if sys.box.lower[j] != -INF:
                ineqs.append(([-u for u in unit], -sys.box.lower[j]))
    return lp_solve([0] * n, (), ineqs, [False] * n).status != "infeasible"


def _pick_integer(lo, hi) -> int:
    if lo != -INF:
        return math.ceil(lo)
    if hi != INF:
        return math.floor(hi)
    return 0


def integral_subgradient(f: FiniteFunction, x: Sequence[int], box: Optional[IntegralBox] = None,
                         trace: Optional[list] = None) -> Optional[tuple[int, ...]]:
    """An integer p in the subdifferential of f at x (and in ``box`` if given).

    Coordinates are fixed from the last to the first: each takes the
    smallest integer of its projection interval (the largest if unbounded
    below, 0 if unbounded both ways). The result is verified against the
    full definition before it is returned. Returns None when the function is
    not integrally convex and the construction fails; raises RuntimeError if
    it fails on an integrally convex one. ``trace`` collects per-coordinate
    records (index, lo, hi, choice).
    """
    if not f.integer_valued:
        raise ValueError("integral subgradients need an integer-valued function")
    x = tuple(x)
    if x not in f:
        raise ValueError(f"point {x} is not in the domain")
    ic = bool(f.ic_verdict)
    sys = subdifferential_system(f, x, box, check=False)
    if box is not None and not boxed_feasible(sys):
        raise ValueError("the box does not meet the subdifferential")

    def fail(reason):
        if ic:
            raise RuntimeError(f"integral subgradient construction failed at {x}: {reason}")
        return None

    chosen: list[int] = []
    for l in range(f.dim - 1, -1, -1):
        lo, hi = projection_interval(sys, l, chosen)
        if lo > hi:
            return fail(f"empty interval for coordinate {l}")
        pick = _pick_integer(lo, hi)
        if trace is not None:
            trace.append((l, lo, hi, pick))
        if pick > hi or pick < lo:
            return fail(f"no integer in the interval for coordinate {l}")
        chosen.insert(0, pick)
    p = tuple(chosen)
    if box is not None and not box.contains(p):
        return fail("result left the box")
    if not in_subdifferential(f, x, p):
        return fail("result violates the subgradient inequality")
    return p
