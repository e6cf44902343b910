"""Dense-grid kernels for the two hot loops: midpoint pair scans and conjugate grids.

Both have a numba implementation and a pure-numpy one. ``ICX_BACKEND=numpy``
forces the numpy path; the numba path is the default when numba imports.
Exactness is kept by scaling rational values to integers by their common
denominator; when the scaled values could overflow int64 the numpy path runs
on Python-int object arrays instead.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import cube_center_vertices

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

# numba probes TBB first and warns when the installed one is too old; it then
# falls back to another threading layer on its own
warnings.filterwarnings("ignore", message="The TBB threading layer requires")

MAX_FAST_K = 4  # cube-centre tables are precomputed up to this many odd coordinates
_INT64_SAFE = 1 << 40
_BIG = 1 << 62


def backend() -> str:
    choice = os.environ.get("ICX_BACKEND", "").strip().lower()
    if choice == "numpy" or numba is None:
        return "numpy"
    return "numba"


def _apply_thread_cap():
    cap = os.environ.get("ICX_THREADS")
    if numba is None or not cap:
        return
    try:
        n = max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS))
    except ValueError:
        return
    numba.set_num_threads(n)


# ------------------------------------------------------------------ grids


@dataclass(frozen=True)
class DenseGrid:
    """A finite table laid out on its bounding box in C order.

    ``values[i] / scale`` is the value at flat index i when ``mask[i]``.
    Flat order coincides with lexicographic order of the lattice points.
    """

    origin: tuple[int, ...]
    shape: tuple[int, ...]
    mask: np.ndarray
    values: np.ndarray
    scale: int

    @property
    def exact_int64(self) -> bool:
        return self.values.dtype == np.int64

    def point(self, flat: int) -> tuple[int, ...]:
        idx = np.unravel_index(flat, self.shape)
        return tuple(int(o + i) for o, i in zip(self.origin, idx))


def dense_grid(table: Mapping[tuple[int, ...], Fraction], dim: int) -> DenseGrid:
    pts = list(table)
    lo = tuple(min(p[i] for p in pts) for i in range(dim))
    hi = tuple(max(p[i] for p in pts) for i in range(dim))
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    scale = 1
    for v in table.values():
        scale = math.lcm(scale, Fraction(v).denominator)
    ints = {p: int(Fraction(v) * scale) for p, v in table.items()}
    big = max((abs(v) for v in ints.values()), default=0) >= _INT64_SAFE
    size = math.prod(shape)
    mask = np.zeros(size, dtype=np.bool_)
    values = np.zeros(size, dtype=object if big else np.int64)
    strides = _strides(shape)
    for p, v in ints.items():
        flat = sum((c - o) * s for c, o, s in zip(p, lo, strides))
        mask[flat] = True
        values[flat] = v
    return DenseGrid(lo, shape, mask, values, scale)


def _strides(shape: Sequence[int]) -> tuple[int, ...]:
    out = []
    acc = 1
    for s in reversed(shape):
        out.append(acc)
        acc *= s
    return tuple(reversed(out))


@lru_cache(maxsize=None)
def center_tables(max_k: int):
    """Integer weight tables for cube-centre vertices, padded for numba.

    Returns (weights[k, v, corner], counts[k], denominators[k]).
    """
    verts = [cube_center_vertices(k) for k in range(max_k + 1)]
    vmax = max(len(v) for v in verts)
    weights = np.zeros((max_k + 1, vmax, 1 << max_k), dtype=np.int64)
    counts = np.zeros(max_k + 1, dtype=np.int64)
    dens = np.zeros(max_k + 1, dtype=np.int64)
    for k, vs in enumerate(verts):
        den = 1
        for v in vs:
            for _, w in v:
                den = math.lcm(den, w.denominator)
        dens[k] = den
        counts[k] = len(vs)
        for j, v in enumerate(vs):
            for corner, w in v:
                weights[k, j, corner] = int(w * den)
    return weights, counts, dens


# ------------------------------------------------------- midpoint scanning


def midpoint_violation(grid: DenseGrid, eq2_only: bool = False, force: Optional[str] = None):
    """Lexicographically smallest pair (x, y), x < y, violating the midpoint inequality.

    The inequality is f~((x+y)/2) <= (f(x)+f(y))/2 over pairs with
    ||x-y||_inf >= 2 (exactly 2 when ``eq2_only``). An all-zero grid turns it
    into the set midpoint criterion. Returns None when no pair violates.
    """
    n = len(grid.shape)
    if n > MAX_FAST_K:
        raise ValueError(f"dense midpoint scan supports dimension <= {MAX_FAST_K}")
    which = force or backend()
    if which == "numba" and grid.exact_int64 and numba is not None:
        pair = _scan_numba(grid, eq2_only)
    else:
        pair = _scan_numpy(grid, eq2_only)
    if pair is None:
        return None
    return grid.point(pair[0]), grid.point(pair[1])


def _scan_numba(grid: DenseGrid, eq2_only: bool):
    _apply_thread_cap()
    n = len(grid.shape)
    weights, counts, dens = center_tables(n)
    strides = np.array(_strides(grid.shape), dtype=np.int64)
    flat_ids = np.flatnonzero(grid.mask).astype(np.int64)
    coords = np.stack(np.unravel_index(flat_ids, grid.shape), axis=1).astype(np.int64)
    first = _pair_scan_nb(flat_ids, coords, grid.mask, grid.values, strides,
                          weights, counts, dens, eq2_only)
    hits = np.flatnonzero(first >= 0)
    if hits.size == 0:
        return None
    i = int(hits[0])
    return int(flat_ids[i]), int(flat_ids[first[i]])


if numba is not None:

    @njit(parallel=True, cache=True)
    def _pair_scan_nb(flat_ids, coords, mask, vals, strides, weights, counts, dens, eq2_only):
        m = flat_ids.shape[0]
        n = coords.shape[1]
        first = np.full(m, -1, dtype=np.int64)
        for a in prange(m):
            odd = np.empty(n, dtype=np.int64)
            for b in range(a + 1, m):
                dist = 0
                base = 0
                k = 0
                for t in range(n):
                    d = coords[b, t] - coords[a, t]
                    ad = d if d >= 0 else -d
                    if ad > dist:
                        dist = ad
                    base += (coords[a, t] + (d // 2)) * strides[t]
                    if d % 2 != 0:
                        odd[k] = t
                        k += 1
                if dist < 2 or (eq2_only and dist != 2):
                    continue
                best = 0
                found = False
                for v in range(counts[k]):
                    ok = True
                    acc = 0
                    for c in range(1 << k):
                        w = weights[k, v, c]
                        if w == 0:
                            continue
                        flat = base
                        for t in range(k):
                            if (c >> t) & 1:
                                flat += strides[odd[t]]
                        if not mask[flat]:
                            ok = False
                            break
                        acc += w * vals[flat]
                    if ok and (not found or acc < best):
                        best = acc
                        found = True
                total = vals[flat_ids[a]] + vals[flat_ids[b]]
                if not found or 2 * best > dens[k] * total:
                    first[a] = b
                    break
        return first


def _scan_numpy(grid: DenseGrid, eq2_only: bool):
    n = len(grid.shape)
    weights, counts, dens = center_tables(n)
    mask = grid.mask.reshape(grid.shape)
    vals = grid.values.reshape(grid.shape)
    filler = _BIG if grid.exact_int64 else _object_ceiling(vals)
    best_pair = None
    for d in itertools.product(*(range(-(s - 1), s) for s in grid.shape)):
        nz = next((c for c in d if c), 0)
        if nz <= 0:
            continue
        dist = max(abs(c) for c in d)
        if dist < 2 or (eq2_only and dist != 2):
            continue
        xs = tuple(slice(max(0, -c), s - max(0, c)) for c, s in zip(d, grid.shape))
        ys = tuple(slice(sl.start + c, sl.stop + c) for sl, c in zip(xs, d))
        both = mask[xs] & mask[ys]
        if not both.any():
            continue
        odd = [t for t, c in enumerate(d) if c % 2]
        k = len(odd)
        half = [c // 2 for c in d]

        def corner(c):
            off = list(half)
            for t, axis in enumerate(odd):
                off[axis] += (c >> t) & 1
            return tuple(slice(sl.start + o, sl.stop + o) for sl, o in zip(xs, off))

        corners = {c: corner(c) for c in range(1 << k)}
        feasible_any = np.zeros(both.shape, dtype=np.bool_)
        best = None
        for v in range(counts[k]):
            feas = both.copy()
            acc = None
            for c in range(1 << k):
                w = int(weights[k, v, c])
                if not w:
                    continue
                sl = corners[c]
                feas &= mask[sl]
                term = vals[sl] * w
                acc = term if acc is None else acc + term
            if not feas.any():
                continue
            cand = np.where(feas, acc, filler)
            best = cand if best is None else np.minimum(best, cand)
            feasible_any |= feas
        total = vals[xs] + vals[ys]
        viol = both & ~feasible_any
        if best is not None:
            viol |= feasible_any & (2 * best > int(dens[k]) * total)
        hit = np.flatnonzero(viol)
        if hit.size == 0:
            continue
        local = np.unravel_index(int(hit[0]), viol.shape)
        x = tuple(int(sl.start + i) for sl, i in zip(xs, local))
        y = tuple(a + c for a, c in zip(x, d))
        if best_pair is None or (x, y) < best_pair:
            best_pair = (x, y)
    if best_pair is None:
        return None
    strides = _strides(grid.shape)
    flat = lambda p: sum(a * s for a, s in zip(p, strides))  # noqa: E731
    return flat(best_pair[0]), flat(best_pair[1])


def _object_ceiling(vals):
    top = max((abs(int(v)) for v in vals.flat), default=0)
    return 1 << (top.bit_length() + 8)


# ------------------------------------------------------- conjugate grids


def conjugate_numerators(points: np.ndarray, scaled: np.ndarray, scale: int, prices: np.ndarray,
                         force: Optional[str] = None) -> np.ndarray:
    """For every price row p return max_y scale*<p,y> - scaled[y].

    Dividing by ``scale`` gives the integral conjugate at p.
    """
    which = force or backend()
    safe = (scaled.dtype == np.int64 and prices.dtype == np.int64
            and _fits(points, scaled, scale, prices))
    if which == "numba" and safe and numba is not None:
        _apply_thread_cap()
        return _conj_nb(points, scaled, np.int64(scale), prices)
    if safe:
        return (prices @ points.T * scale - scaled[None, :]).max(axis=1)
    pts = points.astype(object)
    prs = prices.astype(object)
    return (prs.dot(pts.T) * scale - scaled.astype(object)[None, :]).max(axis=1)


def _fits(points, scaled, scale, prices) -> bool:
    if points.size == 0 or prices.size == 0:
        return True
    reach = int(np.abs(points).max()) * int(np.abs(prices).max()) * points.shape[1] * scale
    top = int(np.abs(scaled).max()) if scaled.size else 0
    return reach + top < _INT64_SAFE


if numba is not None:

    @njit(parallel=True, cache=True)
    def _conj_nb(points, scaled, scale, prices):
        m = prices.shape[0]
        size = points.shape[0]
        n = points.shape[1]
        out = np.empty(m, dtype=np.int64)
        for a in prange(m):
            best = 0
            for b in range(size):
                acc = 0
                for t in range(n):
                    acc += prices[a, t] * points[b, t]
                val = acc * scale - scaled[b]
                if b == 0 or val > best:
                    best = val
            out[a] = best
        return out
