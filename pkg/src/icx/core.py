"""Exact rational arithmetic, lattice geometry and a small exact LP solver.

Points of Z^n are plain tuples of ints, points of Q^n tuples of Fractions.
Plus infinity is ``math.inf``; it is only ever compared, never combined
with finite values arithmetically.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

INF = math.inf

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a Python int/Fraction into a Fraction.

    Floats and decimal strings are rejected: they are not exact.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m:
            num = int(m.group(1))
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise ValueError(f"zero denominator: {value!r}")
            return Fraction(num, den)
    raise ValueError(f"malformed rational: {value!r}")


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_lattice_point(coords: Iterable) -> tuple[int, ...]:
    out = []
    for c in coords:
        q = parse_rational(c)
        if q.denominator != 1:
            raise ValueError(f"non-integral coordinate {format_rational(q)}")
        out.append(int(q))
    if not out:
        raise ValueError("empty point")
    return tuple(out)


def as_rational_vector(coords: Iterable) -> tuple[Fraction, ...]:
    out = tuple(parse_rational(c) for c in coords)
    if not out:
        raise ValueError("empty vector")
    return out


def dot(p: Sequence, x: Sequence):
    return sum((a * b for a, b in zip(p, x)), 0)


def linf(x: Sequence, y: Sequence):
    return max(abs(a - b) for a, b in zip(x, y))


@dataclass(frozen=True)
class IntegralBox:
    """Box [lower, upper] of Z^n; a bound may be -inf/+inf."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("box bounds differ in length")
        for lo, hi in zip(self.lower, self.upper):
            for b in (lo, hi):
                if not (b in (INF, -INF) or (isinstance(b, int) and not isinstance(b, bool))):
                    raise ValueError(f"box bound must be an integer or infinite: {b!r}")
            if lo > hi:
                raise ValueError(f"empty box coordinate: {lo} > {hi}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, x: Sequence) -> bool:
        return all(lo <= c <= hi for lo, c, hi in zip(self.lower, x, self.upper))

    def is_finite(self) -> bool:
        return all(abs(b) != INF for b in self.lower + self.upper)

    def points(self):
        """Lattice points in lexicographic order (finite boxes only)."""
        if not self.is_finite():
            raise ValueError("cannot enumerate an unbounded box")
        return itertools.product(*(range(lo, hi + 1) for lo, hi in zip(self.lower, self.upper)))

    @classmethod
    def cube(cls, n: int, lo: int, hi: int) -> "IntegralBox":
        return cls((lo,) * n, (hi,) * n)


def integral_neighborhood(x: Sequence) -> list[tuple[int, ...]]:
    """All z in Z^n with floor(x_i) <= z_i <= ceil(x_i), in lexicographic order."""
    ranges = []
    for c in x:
        c = Fraction(c)
        lo, hi = math.floor(c), math.ceil(c)
        ranges.append((lo,) if lo == hi else (lo, hi))
    return list(itertools.product(*ranges))


def bounding_box(points: Iterable[Sequence[int]]) -> IntegralBox:
    pts = list(points)
    if not pts:
        raise ValueError("bounding box of an empty point set")
    cols = list(zip(*pts))
    return IntegralBox(tuple(min(c) for c in cols), tuple(max(c) for c in cols))


# ---------------------------------------------------------------- exact LP


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    x: Optional[tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _pivot(tab, basis, r, c):
    row = tab[r]
    piv = row[c]
    if piv != 1:
        inv = 1 / piv
        row = [v * inv if v else v for v in row]
        tab[r] = row
    nz = [j for j, v in enumerate(row) if v]
    for i, other in enumerate(tab):
        if i == r:
            continue
        f = other[c]
        if f:
            for j in nz:
                other[j] -= f * row[j]
    basis[r] = c


def _simplex(tab, basis, cost, allowed):
    """Minimize cost over the tableau with Bland's rule. Returns False if unbounded."""
    m = len(tab)
    rhs = len(tab[0]) - 1 if tab else 0
    while True:
        # reduced costs of the allowed columns, entering = lowest index with a negative one
        entering = -1
        for j in allowed:
            rc = cost[j]
            for i in range(m):
                a = tab[i][j]
                if a:
                    rc -= cost[basis[i]] * a
            if rc < 0:
                entering = j
                break
        if entering < 0:
            return True
        best_row, best_ratio = -1, None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][rhs] / a
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[best_row])):
                    best_row, best_ratio = i, ratio
        if best_row < 0:
            return False
        _pivot(tab, basis, best_row, entering)


def lp_solve(objective: Sequence, equalities: Sequence = (), inequalities: Sequence = (),
             nonneg: Optional[Sequence[bool]] = None, maximize: bool = False) -> LPResult:
    """Solve an LP exactly over the rationals.

    ``equalities`` and ``inequalities`` are sequences of ``(coeffs, rhs)``
    pairs meaning ``coeffs . x == rhs`` and ``coeffs . x <= rhs``.
    ``nonneg[j]`` says whether variable j is sign-restricted (default: all are).
    Pivoting uses Bland's rule with lowest-index ties, so results are
    reproducible.
    """
    n = len(objective)
    if nonneg is None:
        nonneg = [True] * n
    if len(nonneg) != n:
        raise ValueError("nonneg flags do not match the number of variables")
    for coeffs, _ in list(equalities) + list(inequalities):
        if len(coeffs) != n:
            raise ValueError("constraint row has the wrong length")

    # column layout: x_j (or x_j+, x_j-), then slacks, then artificials
    cols = []
    for j in range(n):
        cols.append((j, 1))
        if not nonneg[j]:
            cols.append((j, -1))
    n_struct = len(cols)
    n_slack = len(inequalities)
    rows = [(list(c), Fraction(b), None) for c, b in equalities]
    rows += [(list(c), Fraction(b), k) for k, (c, b) in enumerate(inequalities)]
    m = len(rows)
    width = n_struct + n_slack + m + 1

    tab = []
    for i, (coeffs, b, slack) in enumerate(rows):
        line = [Fraction(0)] * width
        for k, (j, sign) in enumerate(cols):
            line[k] = Fraction(coeffs[j]) * sign
        if slack is not None:
            line[n_struct + slack] = Fraction(1)
        line[-1] = b
        if b < 0:
            line = [-v for v in line]
        line[n_struct + n_slack + i] = Fraction(1)
        tab.append(line)
    basis = [n_struct + n_slack + i for i in range(m)]
    first_art = n_struct + n_slack

    cost1 = [Fraction(0)] * first_art + [Fraction(1)] * m
    _simplex(tab, basis, cost1, range(width - 1))
    if sum((tab[i][-1] for i in range(m) if basis[i] >= first_art), Fraction(0)) > 0:
        return LPResult("infeasible")

    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tab):
        if basis[i] >= first_art:
            col = next((j for j in range(first_art) if tab[i][j]), -1)
            if col < 0:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, basis, i, col)
        i += 1

    sense = -1 if maximize else 1
    cost2 = [Fraction(0)] * width
    for k, (j, sign) in enumerate(cols):
        cost2[k] = Fraction(objective[j]) * sign * sense
    if not _simplex(tab, basis, cost2, range(first_art)):
        return LPResult("unbounded")

    values = [Fraction(0)] * width
    for i, b in enumerate(basis):
        values[b] = tab[i][-1]
    x = [Fraction(0)] * n
    for k, (j, sign) in enumerate(cols):
        x[j] += values[k] * sign
    value = sum((Fraction(objective[j]) * x[j] for j in range(n)), Fraction(0))
    return LPResult("optimal", value, tuple(x))


def hull_membership(x: Sequence, points: Sequence[Sequence[int]]) -> Optional[tuple[Fraction, ...]]:
    """Convex-combination weights expressing x over ``points``, or None."""
    pts = list(points)
    if not pts:
        return None
    n = len(x)
    if any(len(p) != n for p in pts):
        raise ValueError("dimension mismatch in hull membership")
    eqs = [([p[i] for p in pts], Fraction(x[i])) for i in range(n)]
    eqs.append(([1] * len(pts), Fraction(1)))
    res = lp_solve([0] * len(pts), eqs)
    return res.x if res.optimal else None


# ------------------------------------------------ cube-centre representations


def _unique_solution(columns: list[tuple[int, ...]], rhs: tuple[Fraction, ...]):
    """Solve sum_k w_k columns[k] = rhs exactly; None unless the columns are independent and consistent."""
    rows = len(rhs)
    k = len(columns)
    mat = [[Fraction(columns[c][r]) for c in range(k)] + [rhs[r]] for r in range(rows)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, rows) if mat[i][c]), None)
        if p is None:
            return None
        mat[r], mat[p] = mat[p], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
    if any(mat[i][-1] for i in range(r, rows)):
        return None
    return tuple(mat[i][-1] for i in range(k))


@lru_cache(maxsize=None)
def cube_center_vertices(k: int) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
    """Vertices of the polytope of convex weights on {0,1}^k whose barycentre is (1/2,...,1/2).

    Corner c is indexed by the integer whose bit t is coordinate t. Each
    vertex is returned as a tuple of (corner, weight) pairs with positive
    weights, sorted by corner. Any local convex extension at a cube centre
    is a minimum over these vertices whose support lies in the domain.
    """
    if k == 0:
        return (((0, Fraction(1)),),)
    corners = list(range(1 << k))
    cols = {c: tuple((c >> t) & 1 for t in range(k)) + (1,) for c in corners}
    rhs = (Fraction(1, 2),) * k + (Fraction(1),)
    found = []
    for size in range(1, k + 2):
        for support in itertools.combinations(corners, size):
            w = _unique_solution([cols[c] for c in support], rhs)
            if w is not None and all(v > 0 for v in w):
                found.append(tuple(zip(support, w)))
    return tuple(found)
