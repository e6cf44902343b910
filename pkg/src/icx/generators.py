"""Certified instance generators."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from .core import INF, IntegralBox
from .functions import FiniteFunction, is_integrally_convex_2d, is_integrally_convex_fn

Univariate = Union[Callable[[int], object], Sequence]


def _as_box(box) -> IntegralBox:
    if isinstance(box, IntegralBox):
        if not box.is_finite():
            raise ValueError("generators need a finite box")
        return box
    lower, upper = zip(*box)
    return IntegralBox(tuple(lower), tuple(upper))


def check_univariate_convex(values: Sequence, label: str = "piece") -> None:
    """Finite values must sit on one interval and satisfy v[k-1] + v[k+1] >= 2 v[k] there."""
    finite = [i for i, v in enumerate(values) if v != INF]
    if not finite:
        raise ValueError(f"{label} is +inf everywhere")
    if finite != list(range(finite[0], finite[-1] + 1)):
        raise ValueError(f"{label} has a gap in its domain")
    for k in range(finite[0] + 1, finite[-1]):
        if values[k - 1] + values[k + 1] < 2 * values[k]:
            raise ValueError(f"{label} is not discrete convex at position {k}")


def _table(fn: Univariate, lo: int, hi: int, label: str) -> dict[int, object]:
    if callable(fn):
        vals = [fn(k) for k in range(lo, hi + 1)]
    else:
        vals = list(fn)
        if len(vals) != hi - lo + 1:
            raise ValueError(f"{label} needs {hi - lo + 1} values")
    vals = [v if v == INF else Fraction(v) for v in vals]
    check_univariate_convex(vals, label)
    return dict(zip(range(lo, hi + 1), vals))


def _tabulate(box: IntegralBox, value: Callable) -> FiniteFunction:
    pairs = []
    for x in box.points():
        v = value(x)
        if v != INF:
            pairs.append((x, v))
    if not pairs:
        raise ValueError("generated function has empty domain")
    return FiniteFunction.of(pairs, box.dim)


def gen_separable(phis: Sequence[Univariate], box) -> FiniteFunction:
    """Sum of univariate discrete convex pieces on a box.

    A piece is a callable on integers or the list of its values over the
    box interval; +inf entries restrict the domain.
    """
    box = _as_box(box)
    if len(phis) != box.dim:
        raise ValueError("need one piece per coordinate")
    tabs = [_table(fn, lo, hi, f"phi[{i}]")
            for i, (fn, lo, hi) in enumerate(zip(phis, box.lower, box.upper))]

    def value(x):
        parts = [t[c] for t, c in zip(tabs, x)]
        return INF if INF in parts else sum(parts, Fraction(0))

    return _tabulate(box, value)


def check_diagonally_dominant(Q: Sequence[Sequence[int]]) -> None:
    n = len(Q)
    if any(len(row) != n for row in Q):
        raise ValueError("Q must be square")
    for i in range(n):
        for j in range(n):
            if Q[i][j] != Q[j][i]:
                raise ValueError("Q must be symmetric")
        off = sum(abs(Q[i][j]) for j in range(n) if j != i)
        if Q[i][i] < off:
            raise ValueError(f"row {i}: diagonal {Q[i][i]} < off-diagonal sum {off}")


def gen_quadratic_dd(Q: Sequence[Sequence[int]], box) -> FiniteFunction:
    """x^T Q x on a box, for symmetric diagonally dominant Q with nonnegative diagonal."""
    check_diagonally_dominant(Q)
    box = _as_box(box)
    if box.dim != len(Q):
        raise ValueError("box and Q dimensions differ")
    n = len(Q)
    return _tabulate(box, lambda x: sum(Q[i][j] * x[i] * x[j] for i in range(n) for j in range(n)))


def gen_two_separable(specs: Mapping, box) -> FiniteFunction:
    """sum phi_i(x_i) + sum phi_ij(x_i - x_j) + sum psi_ij(x_i + x_j) on a box.

    ``specs`` has optional keys "single" ({i: piece}), "diff" and "sum"
    ({(i, j): piece}). Every piece is validated as discrete convex over the
    range its argument takes on the box.
    """
    box = _as_box(box)
    n = box.dim
    lo, hi = box.lower, box.upper
    single = {int(i): _table(fn, lo[int(i)], hi[int(i)], f"single[{i}]")
              for i, fn in specs.get("single", {}).items()}
    diff, total = {}, {}
    for (i, j), fn in specs.get("diff", {}).items():
        _pair_ok(i, j, n)
        diff[(i, j)] = _table(fn, lo[i] - hi[j], hi[i] - lo[j], f"diff[{i},{j}]")
    for (i, j), fn in specs.get("sum", {}).items():
        _pair_ok(i, j, n)
        total[(i, j)] = _table(fn, lo[i] + lo[j], hi[i] + hi[j], f"sum[{i},{j}]")

    def value(x):
        parts = [t[x[i]] for i, t in single.items()]
        parts += [t[x[i] - x[j]] for (i, j), t in diff.items()]
        parts += [t[x[i] + x[j]] for (i, j), t in total.items()]
        return INF if INF in parts else sum(parts, Fraction(0))

    return _tabulate(box, value)


def _pair_ok(i, j, n):
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise ValueError(f"bad coordinate pair ({i}, {j})")


# ---------------------------------------------------------- triangulation


@dataclass(frozen=True)
class TriangulationSpec:
    """Grid of unit cells on [0, a1] x [0, a2]; cell_types[i][j] tags the cell with corner (i, j)."""

    a: tuple[int, int]
    cell_types: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        a1, a2 = self.a
        if a1 < 1 or a2 < 1:
            raise ValueError("grid sizes must be positive")
        if len(self.cell_types) != a1 or any(len(col) != a2 for col in self.cell_types):
            raise ValueError("cell_types must be an a1 x a2 grid")
        if any(t not in ("M", "L") for col in self.cell_types for t in col):
            raise ValueError("cell types must be 'M' or 'L'")


def triangulation_offset(spec: TriangulationSpec) -> FiniteFunction:
    """g(x) = (#M cells inside [0, x]) - (#L cells inside [0, x])."""
    a1, a2 = spec.a

    def g(x1, x2):
        count = 0
        for i in range(x1):
            for j in range(x2):
                count += 1 if spec.cell_types[i][j] == "M" else -1
        return count

    return FiniteFunction.tabulate(g, IntegralBox((0, 0), (a1, a2)).points(), 2)


def gen_triangulation_2d(spec: TriangulationSpec) -> FiniteFunction:
    """A (x1^2 + x2^2) + g(x) with A = a1 + a2; certified by the two-dimensional test."""
    a1, a2 = spec.a
    weight = a1 + a2
    g = triangulation_offset(spec)
    f = FiniteFunction.of({x: weight * (x[0] ** 2 + x[1] ** 2) + v for x, v in g.table.items()})
    if not is_integrally_convex_2d(f):
        raise RuntimeError("triangulation instance failed certification")
    if cell_signs(f, spec.a) != tuple(tuple(1 if t == "M" else -1 for t in col)
                                      for col in spec.cell_types):
        raise RuntimeError("cell signs do not match the requested types")
    return f


def cell_signs(f: FiniteFunction, a: tuple[int, int]) -> tuple[tuple[int, ...], ...]:
    """f(i,j) + f(i+1,j+1) - f(i+1,j) - f(i,j+1) per unit cell."""
    return tuple(tuple(int(f((i, j)) + f((i + 1, j + 1)) - f((i + 1, j)) - f((i, j + 1)))
                       for j in range(a[1])) for i in range(a[0]))


# ----------------------------------------------------------------- random


def _random_convex(rng: random.Random, length: int, slope: int) -> list[int]:
    slopes = sorted(rng.randint(-slope, slope) for _ in range(length - 1))
    vals = [rng.randint(-3, 3)]
    for s in slopes:
        vals.append(vals[-1] + s)
    return vals


def gen_random_ic(n: int, box, seed: int, cuts: bool = True) -> FiniteFunction:
    """Random integer-valued integrally convex function, deterministic in ``seed``.

    x^T Q x with random diagonally dominant Q, plus a random separable
    convex part and a random linear term. With ``cuts`` the domain is also
    trimmed by random bounds on some x_i - x_j and x_i + x_j; everything stays
    in the 2-separable convex class. The result is certified before return.
    """
    box = _as_box(box)
    if box.dim != n:
        raise ValueError("box dimension differs from n")
    rng = random.Random(seed)
    Q = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            Q[i][j] = Q[j][i] = rng.randint(-2, 2)
    for i in range(n):
        Q[i][i] = sum(abs(Q[i][j]) for j in range(n) if j != i) + rng.randint(0, 2)
    seps = [_random_convex(rng, hi - lo + 1, 3) for lo, hi in zip(box.lower, box.upper)]
    linear = [rng.randint(-3, 3) for _ in range(n)]
    centre = [(lo + hi) // 2 for lo, hi in zip(box.lower, box.upper)]
    limits = []
    if cuts:
        for i in range(n):
            for j in range(i + 1, n):
                for sign in (1, -1):
                    if rng.random() < 0.35:
                        mid = centre[i] + sign * centre[j]
                        limits.append((i, j, sign, mid - rng.randint(0, 3), mid + rng.randint(0, 3)))

    def value(x):
        for i, j, sign, lo, hi in limits:
            if not lo <= x[i] + sign * x[j] <= hi:
                return INF
        quad = sum(Q[i][j] * x[i] * x[j] for i in range(n) for j in range(n))
        sep = sum(s[c - lo] for s, c, lo in zip(seps, x, box.lower))
        return quad + sep + sum(c * v for c, v in zip(linear, x))

    f = _tabulate(box, value)
    if not is_integrally_convex_fn(f):
        raise RuntimeError(f"random instance failed certification (seed {seed})")
    return f


def perturb_non_ic(f: FiniteFunction, seed: int, max_tries: int = 50) -> Optional[FiniteFunction]:
    """Break integral convexity by raising one value or punching one hole.

    Returns None if no attempt breaks it (tiny domains).
    """
    rng = random.Random(seed)
    pts = list(f.table)
    spread = max(f.table.values()) - min(f.table.values()) + 1
    for _ in range(max_tries):
        x = rng.choice(pts)
        table = dict(f.table)
        if rng.random() < 0.5:
            table[x] = table[x] + spread
        else:
            del table[x]
            if not table:
                continue
        g = FiniteFunction(f.dim, table, f.integer_valued)
        if not is_integrally_convex_fn(g):
            return g
    return None
