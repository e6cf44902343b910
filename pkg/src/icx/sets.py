"""Finite subsets of Z^n: hole-freeness, integral convexity, set operations, dilation probe."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import kernels
from .core import (INF, IntegralBox, bounding_box, hull_membership, integral_neighborhood,
                   linf)


@dataclass(frozen=True)
class DiscreteSet:
    """A finite set of lattice points, stored sorted and deduplicated.

    An empty set is allowed only as an explicit result of an operation
    (``empty`` is then True); checks reject it.
    """

    dim: int
    points: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for p in self.points:
            if len(p) != self.dim:
                raise ValueError(f"point {p} does not have dimension {self.dim}")

    @classmethod
    def of(cls, points: Iterable[Sequence[int]], dim: Optional[int] = None) -> "DiscreteSet":
        pts = sorted({tuple(int(c) for c in p) for p in points})
        if dim is None:
            if not pts:
                raise ValueError("dimension of an empty set must be given")
            dim = len(pts[0])
        return cls(dim, tuple(pts))

    @property
    def empty(self) -> bool:
        return not self.points

    def __contains__(self, x) -> bool:
        return tuple(x) in self._lookup

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.points)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    def bounding_box(self) -> IntegralBox:
        return bounding_box(self.points)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check; ``witness`` explains a failure."""

    ok: bool
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def _require_nonempty(S: DiscreteSet):
    if S.empty:
        raise ValueError("operation needs a nonempty set")


def in_hull(x: Sequence, S: DiscreteSet) -> bool:
    return hull_membership(x, S.points) is not None


def is_hole_free(S: DiscreteSet) -> Verdict:
    """S equals the lattice points of its convex hull; witness is the smallest hole."""
    _require_nonempty(S)
    for z in S.bounding_box().points():
        if z not in S and in_hull(z, S):
            return Verdict(False, z)
    return Verdict(True)


def is_integrally_convex_set(S: DiscreteSet) -> Verdict:
    """Midpoint criterion over pairs at l_inf distance >= 2; witness is the smallest bad pair."""
    _require_nonempty(S)
    table = {p: Fraction(0) for p in S.points}
    return Verdict(*_midpoint_scan(table, S.dim, eq2_only=False))


def _midpoint_scan(table, dim: int, eq2_only: bool):
    if dim <= kernels.MAX_FAST_K:
        pair = kernels.midpoint_violation(kernels.dense_grid(table, dim), eq2_only)
        return (True, None) if pair is None else (False, pair)
    return _midpoint_scan_lp(table, eq2_only)


def _midpoint_scan_lp(table, eq2_only: bool):
    # general dimension: one LP per pair, lexicographic pair order
    from .functions import _extension_lp  # local import avoids a cycle

    pts = sorted(table)
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            dist = linf(x, y)
            if dist < 2 or (eq2_only and dist != 2):
                continue
            mid = tuple(Fraction(a + b, 2) for a, b in zip(x, y))
            val = _extension_lp(table, mid)
            if val == INF or 2 * val > table[x] + table[y]:
                return False, (x, y)
    return True, None


def local_hull_oracle(S: DiscreteSet) -> Verdict:
    """Brute-force local-hull condition on the half-integer grid of the bounding box.

    For every half-integer grid point x and every half-integer z in the
    closed cell conv(N(x)), z in conv(S) must imply z in conv(S cap N(x)).
    Independent of the midpoint tables: it only uses LP hull membership.
    Witness: (x, z).
    """
    _require_nonempty(S)
    box = S.bounding_box()
    axes = [[Fraction(k, 2) for k in range(2 * lo, 2 * hi + 1)] for lo, hi in zip(box.lower, box.upper)]
    member = {}

    def in_conv_s(z):
        if z not in member:
            member[z] = in_hull(z, S)
        return member[z]

    for x in itertools.product(*axes):
        cell = integral_neighborhood(x)
        local = [y for y in cell if y in S]
        cell_axes = [sorted({Fraction(y[i]) for y in cell} | {x[i]}) for i in range(S.dim)]
        cell_axes = [ax if len(ax) == 1 else [ax[0], (ax[0] + ax[-1]) / 2, ax[-1]] for ax in cell_axes]
        for z in itertools.product(*cell_axes):
            if in_conv_s(z) and hull_membership(z, local) is None:
                return Verdict(False, (x, z))
    return Verdict(True)


# ------------------------------------------------------------- operations


SET_OPS = ("shift", "invert", "permute", "scale", "dilate", "restrict", "project", "split",
           "aggregate", "intersect", "minkowski")


def apply_set_op(S: DiscreteSet, op: str, other: Optional[DiscreteSet] = None, **params) -> DiscreteSet:
    """Apply one of ``SET_OPS``. Coordinates are 0-based.

    shift(b): S - b (origin shift to b).  invert(signs): x_i -> signs_i * x_i.
    permute(perm): y_i = x_{perm[i]}.  scale(alpha): {y : alpha*y in S}.
    dilate(alpha): (alpha conv S) cap Z^n.  restrict(coords, fixed): fix the
    other coordinates to ``fixed`` and keep ``coords``.  project(coords):
    keep ``coords``.  split(parts, lower, upper): coordinate i splits into
    the new coordinates in ``parts[i]``, intersected with the box
    [lower, upper] of the new space.  aggregate(parts): y_j = sum of x_i
    over parts[j].  intersect/minkowski take ``other``.
    """
    if op not in SET_OPS:
        raise ValueError(f"unknown set operation {op!r}")
    n = S.dim
    pts = S.points
    if op == "shift":
        b = _vector(params, "b", n)
        return DiscreteSet.of((tuple(x - c for x, c in zip(p, b)) for p in pts), n)
    if op == "invert":
        signs = _vector(params, "signs", n)
        if any(s not in (1, -1) for s in signs):
            raise ValueError("inversion signs must be +1 or -1")
        return DiscreteSet.of((tuple(x * s for x, s in zip(p, signs)) for p in pts), n)
    if op == "permute":
        perm = _vector(params, "perm", n)
        if sorted(perm) != list(range(n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        return DiscreteSet.of((tuple(p[j] for j in perm) for p in pts), n)
    if op == "scale":
        alpha = _factor(params)
        return DiscreteSet.of((tuple(x // alpha for x in p) for p in pts
                               if all(x % alpha == 0 for x in p)), n)
    if op == "dilate":
        alpha = _factor(params)
        _require_nonempty(S)
        return dilate_set(S, alpha)
    if op == "restrict":
        coords = _coords(params, n)
        fixed = _vector(params, "fixed", n - len(coords))
        rest = [i for i in range(n) if i not in coords]
        keep = (tuple(p[i] for i in coords) for p in pts
                if all(p[i] == v for i, v in zip(rest, fixed)))
        return DiscreteSet.of(keep, len(coords))
    if op == "project":
        coords = _coords(params, n)
        return DiscreteSet.of((tuple(p[i] for i in coords) for p in pts), len(coords))
    if op == "split":
        return _split_set(S, params)
    if op == "aggregate":
        parts = _partition(params, n)
        return DiscreteSet.of((tuple(sum(p[i] for i in part) for part in parts) for p in pts),
                              len(parts))
    if other is None:
        raise ValueError(f"{op} needs a second set")
    if other.dim != n:
        raise ValueError("dimension mismatch between the two sets")
    if op == "intersect":
        return DiscreteSet.of((p for p in pts if p in other), n)
    return DiscreteSet.of((tuple(a + b for a, b in zip(p, q)) for p in pts for q in other.points), n)


def dilate_set(S: DiscreteSet, alpha: int) -> DiscreteSet:
    """(alpha * conv S) cap Z^n by bounding-box scan and hull membership."""
    scaled = [tuple(alpha * c for c in p) for p in S.points]
    box = bounding_box(scaled)
    scaled_set = DiscreteSet.of(scaled, S.dim)
    keep = [z for z in box.points() if z in scaled_set or hull_membership(z, scaled) is not None]
    return DiscreteSet.of(keep, S.dim)


def _split_set(S: DiscreteSet, params) -> DiscreteSet:
    parts = params.get("parts")
    if parts is None or len(parts) != S.dim:
        raise ValueError("split needs one part per coordinate")
    m = sum(len(part) for part in parts)
    if sorted(j for part in parts for j in part) != list(range(m)):
        raise ValueError("split parts must cover the new coordinates 0..m-1 exactly once")
    lower = _vector(params, "lower", m)
    upper = _vector(params, "upper", m)
    box = IntegralBox(tuple(lower), tuple(upper))
    keep = [y for y in box.points()
            if tuple(sum(y[j] for j in part) for part in parts) in S]
    return DiscreteSet.of(keep, m)


def _vector(params, key, n):
    v = params.get(key)
    if v is None or len(v) != n:
        raise ValueError(f"parameter {key!r} must have length {n}")
    return [int(c) for c in v]


def _factor(params) -> int:
    alpha = params.get("alpha")
    if not isinstance(alpha, int) or isinstance(alpha, bool) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    return alpha


def _coords(params, n):
    coords = [int(c) for c in params.get("coords", ())]
    if not coords or len(set(coords)) != len(coords) or any(not 0 <= c < n for c in coords):
        raise ValueError("coords must be distinct indices in range")
    return sorted(coords)


def _partition(params, n):
    parts = [list(map(int, part)) for part in params.get("parts", ())]
    flat = sorted(i for part in parts for i in part)
    if flat != list(range(n)) or any(not part for part in parts):
        raise ValueError("parts must partition the coordinates 0..n-1 into nonempty blocks")
    return parts


# -------------------------------------------------------------- probing


def box_integrality_probe(S: DiscreteSet, alpha_max: int) -> list[bool]:
    """For alpha = 1..alpha_max, whether (alpha conv S) cap Z^n is integrally convex.

    A False entry shows conv(S) is not box-TDI; all True proves nothing
    beyond alpha_max.
    """
    if alpha_max < 1:
        raise ValueError("alpha_max must be >= 1")
    if not is_integrally_convex_set(S):
        raise ValueError("input set not integrally convex")
    return [bool(is_integrally_convex_set(dilate_set(S, a))) for a in range(1, alpha_max + 1)]
