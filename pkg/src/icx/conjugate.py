"""Integral conjugates, biconjugacy, Fenchel-type min-max reports and Toland-Singer checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .core import INF, IntegralBox, dot, parse_rational
from .functions import FiniteFunction
from .sets import DiscreteSet
from .subgrad import integral_subgradient


def integral_conjugate(f: FiniteFunction, p: Sequence) -> Fraction:
    """max over the domain of <p, y> - f(y)."""
    if len(p) != f.dim:
        raise ValueError("price vector has the wrong dimension")
    if f.empty:
        raise ValueError("conjugate of a function with empty domain")
    return max(dot(p, y) - v for y, v in f.table.items())


def price_grid(n: int, bound: int) -> np.ndarray:
    """All integer vectors of [-bound, bound]^n in lexicographic order."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    return np.stack(np.meshgrid(*[axis] * n, indexing="ij"), axis=-1).reshape(-1, n)


def conjugate_values(f: FiniteFunction, prices: np.ndarray) -> list[Fraction]:
    """Integral conjugate at every integer price row, through the grid kernel."""
    if f.empty:
        raise ValueError("conjugate of a function with empty domain")
    points, scaled, scale = f.arrays
    nums = kernels.conjugate_numerators(points, scaled, scale, prices)
    return [Fraction(int(v), scale) for v in nums]


def biconjugate_bruteforce(f: FiniteFunction, x: Sequence[int], p_bound: int) -> Fraction:
    """max over integer p in [-p_bound, p_bound]^n of <p, x> - f*(p).

    A lower bound on the biconjugate at x; exact once the box holds a
    maximizing price.
    """
    return biconjugate_values(f, [x], p_bound)[0]


def biconjugate_values(f: FiniteFunction, xs: Sequence[Sequence[int]], p_bound: int) -> list[Fraction]:
    """``biconjugate_bruteforce`` at several points, sharing one conjugate grid."""
    if p_bound < 1:
        raise ValueError("p_bound must be >= 1")
    if any(len(x) != f.dim for x in xs):
        raise ValueError("point has the wrong dimension")
    if f.empty:
        raise ValueError("conjugate of a function with empty domain")
    points, scaled, scale = f.arrays
    prices = price_grid(f.dim, p_bound)
    nums = kernels.conjugate_numerators(points, scaled, scale, prices)
    # same max-plus shape with the roles of prices and points swapped
    query = np.array([list(x) for x in xs], dtype=np.int64).reshape(-1, f.dim)
    if nums.dtype != np.int64:
        query = query.astype(object)
    out = kernels.conjugate_numerators(prices, nums, scale, query)
    return [Fraction(int(v), scale) for v in out]


@dataclass(frozen=True)
class BiconjugacyReport:
    certified: bool
    subgradients: dict = field(repr=False)
    failures: tuple = ()


def biconjugacy_certify(f: FiniteFunction) -> BiconjugacyReport:
    """Certify f** = f on the domain by producing an integral subgradient at every point."""
    if not f.integer_valued:
        raise ValueError("biconjugacy certification needs an integer-valued function")
    found, failed = {}, []
    for x in f.table:
        p = integral_subgradient(f, x)
        if p is None:
            failed.append(x)
        else:
            found[x] = p
    return BiconjugacyReport(not failed, found, tuple(failed))


# ------------------------------------------------------ separable functions


@dataclass(frozen=True)
class SeparableFunction:
    """Sum of univariate pieces; piece i is defined on lo_i, ..., lo_i + len(values_i) - 1.

    ``kind`` is "convex" or "concave". Outside the domain a convex function is
    +inf and a concave one -inf.
    """

    pieces: tuple[tuple[int, tuple[Fraction, ...]], ...]
    kind: str = "concave"

    def __post_init__(self):
        if self.kind not in ("convex", "concave"):
            raise ValueError("kind must be 'convex' or 'concave'")
        if not self.pieces:
            raise ValueError("need at least one coordinate")
        sign = 1 if self.kind == "convex" else -1
        for i, (_, vals) in enumerate(self.pieces):
            if not vals:
                raise ValueError(f"piece {i} has an empty interval")
            for k in range(1, len(vals) - 1):
                if sign * (vals[k - 1] + vals[k + 1] - 2 * vals[k]) < 0:
                    raise ValueError(f"piece {i} is not discrete {self.kind} at offset {k}")

    @classmethod
    def of(cls, pieces, kind: str = "concave") -> "SeparableFunction":
        """``pieces``: sequence of (lo, values) with values rational-like."""
        return cls(tuple((int(lo), tuple(parse_rational(v) for v in vals)) for lo, vals in pieces), kind)

    @classmethod
    def from_callables(cls, fns, box: IntegralBox, kind: str = "concave") -> "SeparableFunction":
        return cls.of([(lo, [fn(k) for k in range(lo, hi + 1)])
                       for fn, lo, hi in zip(fns, box.lower, box.upper)], kind)

    @property
    def dim(self) -> int:
        return len(self.pieces)

    @property
    def integer_valued(self) -> bool:
        return all(v.denominator == 1 for _, vals in self.pieces for v in vals)

    def piece(self, i: int, k: int):
        lo, vals = self.pieces[i]
        if lo <= k < lo + len(vals):
            return vals[k - lo]
        return None

    def box(self) -> IntegralBox:
        return IntegralBox(tuple(lo for lo, _ in self.pieces),
                           tuple(lo + len(v) - 1 for lo, v in self.pieces))

    def __call__(self, x):
        total = Fraction(0)
        for i, k in enumerate(x):
            v = self.piece(i, k)
            if v is None:
                return INF if self.kind == "convex" else -INF
            total += v
        return total

    def negate(self) -> "SeparableFunction":
        flipped = "concave" if self.kind == "convex" else "convex"
        return SeparableFunction(tuple((lo, tuple(-v for v in vals)) for lo, vals in self.pieces), flipped)

    def to_function(self) -> FiniteFunction:
        return FiniteFunction.tabulate(lambda *x: self(x), self.box().points(), self.dim)


def separable_conjugate(psi: SeparableFunction, p: Sequence) -> tuple[Fraction, list[Fraction]]:
    """Coordinatewise conjugate and its parts.

    Concave pieces give min_k (k l - psi_i(k)); convex pieces give
    max_k (k l - phi_i(k)).
    """
    if len(p) != psi.dim:
        raise ValueError("price vector has the wrong dimension")
    pick = min if psi.kind == "concave" else max
    parts = []
    for (lo, vals), l in zip(psi.pieces, p):
        l = Fraction(l)
        parts.append(pick(k * l - v for k, v in enumerate(vals, start=lo)))
    return sum(parts, Fraction(0)), parts


# ------------------------------------------------------------------ duality


@dataclass(frozen=True)
class DualityReport:
    """Both sides of a min-max relation.

    ``gap`` is the nonnegative difference between the two sides (primal
    minus dual for Fenchel-type reports, dual minus primal for Toland-Singer).
    """

    primal_opt: Fraction
    primal_argmin: tuple[int, ...]
    dual_opt: Fraction
    dual_arg: tuple
    gap: Fraction
    certificate: Optional[tuple[int, ...]] = None
    note: str = ""


Concave = Union[SeparableFunction, FiniteFunction]


def _concave_value(g: Concave, x):
    if isinstance(g, SeparableFunction):
        return g(x)
    v = g(x)
    return -INF if v == INF else v


def _primal(f: FiniteFunction, g: Concave):
    best, arg = None, None
    for x, v in f.table.items():
        w = _concave_value(g, x)
        if w == -INF:
            continue
        val = v - w
        if best is None or val < best:
            best, arg = val, x
    if best is None:
        raise ValueError("the two domains do not intersect")
    return best, arg


def _concave_table(g: Concave) -> FiniteFunction:
    return g.to_function() if isinstance(g, SeparableFunction) else g


def concave_conjugate_values(g: Concave, prices: np.ndarray) -> list[Fraction]:
    """min over dom g of <p, x> - g(x) for every price row."""
    neg = FiniteFunction(g.dim, {x: -v for x, v in _concave_table(g).table.items()})
    return [-c for c in conjugate_values(neg, -prices)]


def default_price_bound(*fns: FiniteFunction) -> int:
    """Largest |f(x) - f(y)| over domain neighbours (l_inf distance 1) of the given functions."""
    top = 0
    for f in fns:
        for x, v in f.table.items():
            for d in itertools.product((-1, 0, 1), repeat=f.dim):
                w = f(tuple(a + b for a, b in zip(x, d)))
                if w != INF:
                    top = max(top, abs(w - v))
    return math.ceil(top)


def fenchel_check(f: FiniteFunction, psi: Concave, report_only: bool = False,
                  p_bound: Optional[int] = None) -> DualityReport:
    """min (f - psi) against max over integer p of psi°(p) - f*(p).

    Certificate mode (default) needs an integer-valued integrally convex f and
    an integer-valued separable concave psi. The dual value is taken at the
    integral subgradient of f at the primal minimizer lying in the
    superdifferential box of psi there; the report carries that price as the
    certificate. ``report_only`` drops the preconditions and maximizes the
    dual over the price box [-p_bound, p_bound]^n; it never certifies.
    """
    if psi.dim != f.dim:
        raise ValueError("dimension mismatch")
    if f.empty:
        raise ValueError("function has empty domain")
    primal, x_star = _primal(f, psi)
    if report_only:
        bound = default_price_bound(f, _concave_table(psi)) if p_bound is None else p_bound
        prices = price_grid(f.dim, bound)
        lower = concave_conjugate_values(psi, prices)
        upper = conjugate_values(f, prices)
        best, arg = None, None
        for p, a, b in zip(prices.tolist(), lower, upper):
            if best is None or a - b > best:
                best, arg = a - b, tuple(p)
        return DualityReport(primal, x_star, best, arg, primal - best, None,
                             f"dual maximized over the price box [-{bound}, {bound}]^{f.dim}")
    if not isinstance(psi, SeparableFunction) or psi.kind != "concave":
        raise ValueError("certificate mode needs a separable concave psi; use report_only")
    if not f.integer_valued or not psi.integer_valued:
        raise ValueError("certificate mode needs integer values; use report_only")
    if not f.ic_verdict:
        raise ValueError("certificate mode needs an integrally convex f; use report_only")
    lower, upper = [], []
    for i, k in enumerate(x_star):
        here, right, left = psi.piece(i, k), psi.piece(i, k + 1), psi.piece(i, k - 1)
        lower.append(-INF if right is None else int(right - here))
        upper.append(INF if left is None else int(here - left))
    box = IntegralBox(tuple(lower), tuple(upper))
    try:
        p_star = integral_subgradient(f, x_star, box)
    except ValueError as exc:
        raise RuntimeError(f"no subgradient in the superdifferential box at {x_star}") from exc
    if p_star is None:
        raise RuntimeError(f"certificate construction failed at {x_star}")
    dual = separable_conjugate(psi, p_star)[0] - integral_conjugate(f, p_star)
    if dual != primal:
        raise RuntimeError(f"certificate {p_star} gives {dual}, primal is {primal}")
    return DualityReport(primal, x_star, dual, p_star, primal - dual, p_star,
                         "certified by an integral subgradient")


def set_minmax(S: DiscreteSet, phi: SeparableFunction, p_bound: int):
    """min of a separable convex phi over an integrally convex S, and its dual.

    Returns (primal, dual over the price box, certified report). The dual is
    max over p of min_{y in S} <p, y> - phi*(p).
    """
    if phi.kind != "convex":
        raise ValueError("phi must be separable convex")
    report = fenchel_check(FiniteFunction.indicator(S), phi.negate())
    prices = price_grid(S.dim, p_bound)
    support = conjugate_values(FiniteFunction.indicator(S), -prices)
    best = None
    for p, s in zip(prices.tolist(), support):
        val = -s - separable_conjugate(phi, p)[0]
        if best is None or val > best:
            best = val
    return report.primal_opt, best, report


def toland_singer_check(g: FiniteFunction, h: FiniteFunction,
                        p_bound: Optional[int] = None) -> DualityReport:
    """inf (g - h) against inf over the price box of h*(p) - g*(p).

    h must be integer-valued and integrally convex, and dom g inside dom h.
    The default price box uses the largest neighbour difference of h.
    """
    if g.dim != h.dim:
        raise ValueError("dimension mismatch")
    if g.empty or h.empty:
        raise ValueError("functions must have nonempty domains")
    if not h.integer_valued:
        raise ValueError("h must be integer-valued")
    if not h.ic_verdict:
        raise ValueError("h must be integrally convex")
    outside = [x for x in g.table if x not in h]
    if outside:
        raise ValueError(f"dom g is not contained in dom h (e.g. {outside[0]})")
    primal, x_star = None, None
    for x, v in g.table.items():
        val = v - h.table[x]
        if primal is None or val < primal:
            primal, x_star = val, x
    bound = default_price_bound(h) if p_bound is None else p_bound
    prices = price_grid(g.dim, bound)
    hc = conjugate_values(h, prices)
    gc = conjugate_values(g, prices)
    dual, arg = None, None
    for p, a, b in zip(prices.tolist(), hc, gc):
        if dual is None or a - b < dual:
            dual, arg = a - b, tuple(p)
    attained = dual == primal
    note = "attained in the price box" if attained else "no certificate in box"
    return DualityReport(primal, x_star, dual, arg, dual - primal, arg if attained else None, note)
