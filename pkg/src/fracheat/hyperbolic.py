"""Upper-half-space hyperbolic geometry on sampled space-time sets.

Points are (x, v) with x on the torus and v > 0 a scale;

    rho((x, v), (u, w)) = arccosh(1 + (d(x, u)^2 + (v - w)^2) / (2 v w))

with d the torus distance. Sets are boolean masks over (time sample, grid
point). The workhorse is the exact hyperbolic distance field: rho < R is
algebraically equivalent to

    d(x, u)^2 < (cosh R - 1) 2 v w - (v - w)^2,

so one spatial distance transform per time row turns every neighborhood,
inclusion, and radius sweep into thresholding, with no search over R.

Measures: mu uses dx dt/t, realized exactly by the log-uniform time grid with
weight (log 2)/per_octave per sample. The Carleson functional integrates the
same density over boxes I x (0, side(I)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import PeriodicGrid
from .heat import TimeGrid

__all__ = [
    "rho",
    "SpaceTimeSet",
    "row_distance_fields",
    "hyperbolic_distance_field",
    "neighborhood",
    "mu_measure",
    "carleson_M",
    "property_I_check",
]


def _torus_dist_1d(a, b):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def rho(p, q) -> float:
    """Hyperbolic distance between p = (x, v) and q = (u, w); spatial parts
    are scalars (dim 1) or pairs (dim 2), scales must be positive."""
    x, v = p
    u, w = q
    if not (v > 0 and w > 0):
        raise ValidationError("scale coordinates must be > 0")
    if np.isscalar(x) or isinstance(x, float):
        d2 = float(_torus_dist_1d(x, u)) ** 2
    else:
        dx = _torus_dist_1d(x[0], u[0])
        dy = _torus_dist_1d(x[1], u[1])
        d2 = float(dx * dx + dy * dy)
    arg = 1.0 + (d2 + (v - w) ** 2) / (2.0 * v * w)
    return float(np.arccosh(arg))


@dataclass(frozen=True)
class SpaceTimeSet:
    """Boolean occupancy over (time row, grid point)."""

    grid: PeriodicGrid
    times: TimeGrid
    mask: np.ndarray

    def __post_init__(self):
        expect = (self.times.row_count,) + self.grid.shape
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != expect:
            raise ValidationError(f"mask shape {m.shape} != {expect}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def empty(cls, grid: PeriodicGrid, times: TimeGrid) -> "SpaceTimeSet":
        return cls(grid, times, np.zeros((times.row_count,) + grid.shape, dtype=bool))

    def _check_same(self, other: "SpaceTimeSet"):
        if self.grid != other.grid or self.times != other.times:
            raise ValidationError("sets live on different grids")

    def __or__(self, other: "SpaceTimeSet") -> "SpaceTimeSet":
        self._check_same(other)
        return SpaceTimeSet(self.grid, self.times, self.mask | other.mask)

    def __and__(self, other: "SpaceTimeSet") -> "SpaceTimeSet":
        self._check_same(other)
        return SpaceTimeSet(self.grid, self.times, self.mask & other.mask)

    def is_empty(self) -> bool:
        return not bool(self.mask.any())

    def count(self) -> int:
        return int(self.mask.sum())

    def octave_restrict(self, j: int) -> "SpaceTimeSet":
        out = np.zeros_like(self.mask)
        sl = self.times.octave_rows(j)
        out[sl] = self.mask[sl]
        return SpaceTimeSet(self.grid, self.times, out)

    def contains(self, other: "SpaceTimeSet") -> bool:
        self._check_same(other)
        return bool(np.all(self.mask | ~other.mask))


def _row_dist_1d(row: np.ndarray) -> np.ndarray:
    """Torus distance from every grid point to the nearest True of the row."""
    N = row.shape[0]
    pos = np.flatnonzero(row)
    if pos.size == 0:
        return np.full(N, np.inf)
    if pos.size == N:
        return np.zeros(N)
    pts = pos / N
    x = np.arange(N) / N
    idx = np.searchsorted(pts, x)
    right = pts[idx % pos.size]
    left = pts[(idx - 1) % pos.size]
    return np.minimum(_torus_dist_1d(x, right), _torus_dist_1d(x, left))


def _row_dist_2d(row: np.ndarray) -> np.ndarray:
    from scipy.ndimage import distance_transform_edt

    N = row.shape[0]
    if not row.any():
        return np.full(row.shape, np.inf)
    tiled = np.tile(~row, (3, 3))
    d = distance_transform_edt(tiled)[N:2 * N, N:2 * N]
    return d / N


def row_distance_fields(A: SpaceTimeSet) -> np.ndarray:
    """Per-time-row spatial (torus) distance transform of the mask."""
    rows = A.mask.reshape(A.mask.shape[0], *A.grid.shape)
    if A.grid.dim == 1:
        return np.stack([_row_dist_1d(r) for r in rows])
    return np.stack([_row_dist_2d(r) for r in rows])


def hyperbolic_distance_field(A: SpaceTimeSet) -> np.ndarray:
    """rho((x, t_i), A) at every space-time sample; inf for empty A.

    min over source rows m of arccosh(1 + [dist_m(x)^2 + (t_i - t_m)^2] /
    (2 t_i t_m)), using the per-row spatial transforms. arccosh is applied
    once at the end since the inner argument is monotone in it.
    """
    ts = A.times.samples()
    R = len(ts)
    X = int(np.prod(A.grid.shape))
    occupied = np.flatnonzero(A.mask.reshape(R, -1).any(axis=1))
    if occupied.size == 0:
        return np.full((R,) + A.grid.shape, np.inf)
    rows = A.mask.reshape((R,) + A.grid.shape)
    if A.grid.dim == 1:
        dist = np.stack([_row_dist_1d(rows[m]) for m in occupied])
    else:
        dist = np.stack([_row_dist_2d(rows[m]) for m in occupied])
    flat = dist.reshape(occupied.size, -1) ** 2  # (m_occ, X)
    tm = ts[occupied]
    out = np.empty((R, X))
    for i in range(R):
        ti = ts[i]
        arg = (flat + ((ti - tm) ** 2)[:, None]) / (2.0 * ti * tm)[:, None]
        out[i] = np.min(arg, axis=0)
    out = np.arccosh(1.0 + np.maximum(out, 0.0))
    return out.reshape((R,) + A.grid.shape)


def neighborhood(A: SpaceTimeSet, R: float, field: np.ndarray | None = None) -> SpaceTimeSet:
    """Open hyperbolic R-neighborhood of A, exact on the sample set.

    Pass a precomputed hyperbolic_distance_field to sweep many radii for one
    transform cost.
    """
    if not (R > 0):
        raise ValidationError("R must be > 0")
    if field is None:
        field = hyperbolic_distance_field(A)
    return SpaceTimeSet(A.grid, A.times, field < R)


def mu_measure(A: SpaceTimeSet) -> float:
    """Integral of dx dt/t over the set: count x cell volume x log-weight."""
    return A.count() * A.grid.cell_volume * A.times.weight


def _octave_theta(A: SpaceTimeSet) -> np.ndarray:
    """Column mass per octave: int 1_A dt/t restricted to each octave."""
    J, M = A.times.octaves, A.times.per_octave
    flat = A.mask.reshape(J, M, -1)
    return flat.sum(axis=1) * A.times.weight


def carleson_M(A: SpaceTimeSet) -> float:
    """max over dyadic boxes I of (1/|I|) int_I int_0^{side(I)} 1_A dt/t dx.

    Box side 2^-l corresponds to octaves j >= l on the time grid, exactly.
    Levels run over 0..octaves-1; the level count is capped so a box always
    contains at least one grid cell per axis.
    """
    g, tg = A.grid, A.times
    theta = _octave_theta(A)  # (J, X)
    suffix = np.cumsum(theta[::-1], axis=0)[::-1]  # suffix[l] = sum_{j>=l}
    best = 0.0
    max_level = min(tg.octaves, int(math.log2(g.size)) + 1)
    for l in range(max_level):
        S = suffix[l].reshape(g.shape)
        nb = 2 ** l
        if g.dim == 1:
            blocks = S.reshape(nb, g.size // nb)
            means = blocks.mean(axis=1)
        else:
            b = g.size // nb
            blocks = S.reshape(nb, b, nb, b)
            means = blocks.mean(axis=(1, 3))
        best = max(best, float(means.max()))
    return best


def _circular_window_sums(row: np.ndarray, k: int) -> np.ndarray:
    """Sum of row over the window of half-width k (2k+1 cells) at each center."""
    N = row.shape[0]
    if 2 * k + 1 >= N:
        return np.full(N, float(row.sum()))
    tripled = np.concatenate([row, row, row]).astype(float)
    c = np.concatenate([[0.0], np.cumsum(tripled)])
    i = np.arange(N) + N  # centers in the middle copy
    return c[i + k + 1] - c[i - k]


def property_I_check(A: SpaceTimeSet, delta: float, delta_prime: float) -> dict:
    """Interior-density check: every point of A must see at least a delta_prime
    fraction of its hyperbolic delta-ball covered by A (Lebesgue dx dt weights).

    The time grid resolves the ball only when delta spans at least two rows,
    so delta < 2 log(2)/per_octave is rejected as under-resolved.
    """
    if not (0 < delta < 0.1) or not (0 < delta_prime < 0.1):
        raise ValidationError("delta and delta_prime must lie in (0, 1/10)")
    min_delta = 2 * math.log(2.0) / A.times.per_octave
    if delta < min_delta:
        raise ValidationError(
            f"delta = {delta} under-resolved: need >= {min_delta:.4f} "
            f"(two time rows) at per_octave = {A.times.per_octave}")
    if A.grid.dim != 1:
        raise ValidationError("density check is one-dimensional")
    ts = A.times.samples()
    N = A.grid.size
    coshm1 = math.cosh(delta) - 1.0
    w = A.times.weight
    worst = math.inf
    worst_at = None
    rows_with = np.flatnonzero(A.mask.any(axis=1))
    for r in rows_with:
        tr = ts[r]
        thr2 = coshm1 * 2.0 * tr * ts - (tr - ts) ** 2
        ball = 0.0
        inter = np.zeros(N)
        for m in np.flatnonzero(thr2 > 0):
            k = int(math.ceil(thr2[m] ** 0.5 * N)) - 1  # strict d < thr, d = j/N
            k = max(k, 0)
            cells = min(2 * k + 1, N)
            wt = (1.0 / N) * ts[m] * w  # dx dt weight of one sample
            ball += cells * wt
            inter += _circular_window_sums(A.mask[m].astype(float), k) * wt
        centers = np.flatnonzero(A.mask[r])
        ratios = inter[centers] / ball
        i = int(np.argmin(ratios))
        if ratios[i] < worst:
            worst = float(ratios[i])
            worst_at = (int(r), int(centers[i]))
    if worst_at is None:
        return {"holds": True, "min_ratio": math.inf, "argmin": None, "empty": True}
    return {"holds": bool(worst >= delta_prime), "min_ratio": worst,
            "argmin": worst_at, "empty": False}
