"""Periodized Daubechies wavelets, sequence lattices, and the smoothness norm.

The discrete transform is the folded (circular) filter cascade, which stays
exactly orthogonal at every even length: folding the quadrature-mirror
autocorrelation onto Z_n only aliases lags that are nonzero multiples of n,
where it vanishes. The pyramid therefore runs to a single scaling coefficient.

Filters are derived at first use by spectral factorization of the Daubechies
polynomial P(y) = sum_{k<K} C(K-1+k, k) y^k in 60-digit arithmetic: roots in
y are mapped to z by z^2 - (2-4y) z + 1 = 0 (inside-disc choice), and
h(z) = sqrt(2) ((1+z)/2)^K prod (z - z_i)/(1 - z_i). No table is baked in;
the DB2 closed form and moment annihilation serve as independent oracles.

Normalization: a discrete coefficient c relates to the continuum pairing
<f, psi> of the sample interpolant by <f, psi> ~= c / sqrt(total points),
so coefficient energy equals the squared L^2 norm on the torus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .grid import PeriodicGrid, SampledFunction

__all__ = [
    "WaveletSystem",
    "WaveletCoeffs",
    "DyadicCube",
    "LatticeSpec",
    "dwt",
    "idwt",
    "lattice_norm",
    "lambda_X_norm",
    "v0_set",
    "doubling_probe",
]

_LATTICE_KINDS = ("lq_Lp", "Lp_lq", "F_inf_q", "lq_Lp_tau", "Lp_tau_lq")


@lru_cache(maxsize=16)
def _daubechies_lowpass(K: int) -> np.ndarray:
    import mpmath as mp

    with mp.workdps(60):
        if K == 1:
            h = [mp.sqrt(2) / 2, mp.sqrt(2) / 2]
        else:
            pcoef = [mp.binomial(K - 1 + k, k) for k in range(K)]
            ys = mp.polyroots(list(reversed(pcoef)), maxsteps=300, extraprec=120)
            h = [mp.sqrt(2)]
            for _ in range(K):
                h = _poly_mul(h, [mp.mpf(1) / 2, mp.mpf(1) / 2])
            for y in ys:
                b = 2 - 4 * y
                disc = mp.sqrt(b * b - 4)
                z1, z2 = (b + disc) / 2, (b - disc) / 2
                z = z1 if abs(z1) < 1 else z2
                h = _poly_mul(h, [-z / (1 - z), 1 / (1 - z)])
        out = np.array([float(mp.re(c)) for c in h])[::-1].copy()  # extremal-phase orientation
        worst_im = max(abs(mp.im(c)) for c in h)
        if worst_im > mp.mpf("1e-30"):
            raise ValidationError(f"filter factorization left imaginary residue {worst_im}")
    if abs(out.sum() - math.sqrt(2)) > 1e-12 or abs((out ** 2).sum() - 1) > 1e-12:
        raise ValidationError("filter normalization failed")
    return out


def _poly_mul(a, b):
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


@dataclass(frozen=True)
class WaveletSystem:
    """Daubechies system with filter_order vanishing moments (2..10);
    levels=None transforms to full depth (single scaling coefficient)."""

    filter_order: int = 4
    levels: int | None = None

    def __post_init__(self):
        if not (2 <= self.filter_order <= 10):
            raise ValidationError("filter_order must be in 2..10")
        if self.levels is not None and self.levels < 1:
            raise ValidationError("levels must be >= 1")

    @property
    def taps(self) -> int:
        return 2 * self.filter_order

    @property
    def lowpass(self) -> np.ndarray:
        return _daubechies_lowpass(self.filter_order)

    @property
    def highpass(self) -> np.ndarray:
        h = self.lowpass
        return ((-1.0) ** np.arange(self.taps)) * h[::-1]

    def depth_for(self, grid: PeriodicGrid) -> int:
        full = int(math.log2(grid.size))
        lv = full if self.levels is None else self.levels
        if lv > full:
            raise ValidationError(f"levels {lv} exceed grid depth {full}")
        return lv


@dataclass(frozen=True)
class DyadicCube:
    """Cube of side 2^-level at position pos (one index per axis)."""

    dim: int
    level: int
    pos: tuple

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError("dim must be 1 or 2")
        if self.level < 0:
            raise ValidationError("level must be >= 0")
        p = tuple(int(v) for v in (self.pos if hasattr(self.pos, "__len__") else (self.pos,)))
        if len(p) != self.dim or any(not (0 <= v < 2 ** self.level) for v in p):
            raise ValidationError("cube position out of range")
        object.__setattr__(self, "pos", p)

    @property
    def volume(self) -> float:
        return 2.0 ** (-self.level * self.dim)

    def slices(self, grid: PeriodicGrid):
        w = grid.size // (2 ** self.level)
        if w < 1:
            raise ValidationError("cube below grid resolution")
        return tuple(slice(v * w, (v + 1) * w) for v in self.pos)


# ---------------------------------------------------------------------------
# transform
# ---------------------------------------------------------------------------


def _step_last(a: np.ndarray, h: np.ndarray, g: np.ndarray):
    n = a.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(h))[None, :]) % n
    gathered = a[..., idx]
    return gathered @ h, gathered @ g


def _unstep_last(ca: np.ndarray, cd: np.ndarray, h: np.ndarray, g: np.ndarray):
    n = 2 * ca.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(h))[None, :]) % n
    out = np.zeros(ca.shape[:-1] + (n,))
    contrib = ca[..., :, None] * h + cd[..., :, None] * g
    lead = ca.shape[:-1]
    flat_out = out.reshape(-1, n)
    flat_c = contrib.reshape(-1, *idx.shape)
    for r in range(flat_out.shape[0]):
        np.add.at(flat_out[r], idx.ravel(), flat_c[r].ravel())
    return flat_out.reshape(lead + (n,))


@dataclass
class WaveletCoeffs:
    """Pyramid output. details[j] holds the level-j coefficients (cube side
    2^-j): shape (2^j,) for dim 1, (3, 2^j, 2^j) for dim 2 in band order
    (LH, HL, HH). scaling sits at approx_level (0 for a full-depth pyramid).
    Discrete normalization; continuum pairings are these over sqrt(npoints)."""

    grid: PeriodicGrid
    system: WaveletSystem
    approx_level: int
    scaling: np.ndarray
    details: list = field(default_factory=list)

    @property
    def continuum_factor(self) -> float:
        return self.grid.npoints ** -0.5

    def energy(self) -> float:
        """Continuum-normalized energy; equals the interpolant's squared L^2 norm."""
        tot = float((self.scaling ** 2).sum())
        for d in self.details[self.approx_level:]:
            tot += float((d ** 2).sum())
        return tot / self.grid.npoints

    def copy(self) -> "WaveletCoeffs":
        return WaveletCoeffs(self.grid, self.system, self.approx_level,
                             self.scaling.copy(), [d.copy() for d in self.details])

    @classmethod
    def zeros(cls, grid: PeriodicGrid, system: WaveletSystem) -> "WaveletCoeffs":
        lv = system.depth_for(grid)
        full = int(math.log2(grid.size))
        a0 = full - lv
        if grid.dim == 1:
            scaling = np.zeros(2 ** a0)
            details = [np.zeros(2 ** j) for j in range(full)]
        else:
            scaling = np.zeros((2 ** a0, 2 ** a0))
            details = [np.zeros((3, 2 ** j, 2 ** j)) for j in range(full)]
        return cls(grid, system, a0, scaling, details)


def dwt(f: SampledFunction, sys: WaveletSystem) -> WaveletCoeffs:
    h, g = sys.lowpass, sys.highpass
    lv = sys.depth_for(f.grid)
    full = int(math.log2(f.grid.size))
    out = WaveletCoeffs.zeros(f.grid, sys)
    a = f.values.copy()
    if f.grid.dim == 1:
        for j in range(full - 1, full - lv - 1, -1):
            a, d = _step_last(a, h, g)
            out.details[j] = d
    else:
        for j in range(full - 1, full - lv - 1, -1):
            ar, dr = _step_last(a, h, g)
            aa, da = _step_last(np.swapaxes(ar, -1, -2), h, g)
            ad, dd = _step_last(np.swapaxes(dr, -1, -2), h, g)
            a = np.swapaxes(aa, -1, -2)
            out.details[j] = np.stack([
                np.swapaxes(ad, -1, -2),   # LH: detail along x, smooth along y
                np.swapaxes(da, -1, -2),   # HL
                np.swapaxes(dd, -1, -2),   # HH
            ])
    out.scaling = a
    return out


def idwt(coeffs: WaveletCoeffs) -> SampledFunction:
    sys = coeffs.system
    h, g = sys.lowpass, sys.highpass
    full = int(math.log2(coeffs.grid.size))
    a = coeffs.scaling.copy()
    if coeffs.grid.dim == 1:
        for j in range(coeffs.approx_level, full):
            a = _unstep_last(a, coeffs.details[j], h, g)
    else:
        for j in range(coeffs.approx_level, full):
            lh, hl, hh = coeffs.details[j]
            # column synthesis pairs smooth-x bands (LL, HL) and detail-x bands (LH, HH)
            ar = _unstep_last(np.swapaxes(a, -1, -2), np.swapaxes(hl, -1, -2), h, g)
            dr = _unstep_last(np.swapaxes(lh, -1, -2), np.swapaxes(hh, -1, -2), h, g)
            a = _unstep_last(np.swapaxes(ar, -1, -2), np.swapaxes(dr, -1, -2), h, g)
    return SampledFunction(coeffs.grid, a)


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeSpec:
    """Quasi-normed lattice of nonnegative function sequences.

    kinds: lq_Lp (sum over j of L^p norms, l^q), Lp_lq (pointwise l^q then
    L^p), F_inf_q (sup over dyadic cubes of the averaged tail q-sum),
    lq_Lp_tau and Lp_tau_lq (Morrey-type sups over cubes with |Q|^-tau weight
    and the j >= level(Q) truncation). theta is the doubling exponent carried
    for Assumption-style probes.
    """

    kind: str
    p: float
    q: float
    tau: float = 0.0
    theta: float = 1.0

    def __post_init__(self):
        if self.kind not in _LATTICE_KINDS:
            raise ValidationError(f"kind must be one of {_LATTICE_KINDS}")
        if not (self.p > 0) or not (self.q > 0):
            raise ValidationError("p and q must be positive (inf allowed)")
        if self.kind == "F_inf_q" and not math.isinf(self.p):
            raise ValidationError("F_inf_q fixes p = inf")
        if self.kind in ("lq_Lp_tau", "Lp_tau_lq"):
            cap = 0.0 if math.isinf(self.p) else 1.0 / self.p
            if not (0 <= self.tau < cap or (self.tau == 0 and math.isinf(self.p))):
                raise ValidationError(f"tau must lie in [0, 1/p) = [0, {cap})")
        elif self.tau != 0:
            raise ValidationError(f"kind {self.kind} takes no tau")
        if not (self.theta > 0):
            raise ValidationError("theta must be > 0")


def _as_stack(seq, grid: PeriodicGrid) -> np.ndarray:
    arrs = [np.asarray(a, dtype=float) for a in seq]
    if not arrs:
        raise ValidationError("empty sequence")
    for a in arrs:
        if a.shape != grid.shape:
            raise ValidationError(f"sequence entry shape {a.shape} != grid {grid.shape}")
        if np.any(a < 0):
            raise ValidationError("lattice entries must be nonnegative")
    return np.stack(arrs)


def _lp_full(stack: np.ndarray, p: float, cell: float) -> np.ndarray:
    flat = stack.reshape(stack.shape[0], -1)
    if math.isinf(p):
        return flat.max(axis=1, initial=0.0)
    return (np.sum(flat ** p, axis=1) * cell) ** (1.0 / p)


def _lq(vec: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(vec.max(initial=0.0))
    return float(np.sum(vec ** q) ** (1.0 / q))


def _cube_reduce(arr: np.ndarray, grid: PeriodicGrid, level: int, how: str) -> np.ndarray:
    """Per-cube mean/max/sum of a grid function at the given dyadic level."""
    nb = 2 ** level
    if grid.dim == 1:
        blocks = arr.reshape(nb, grid.size // nb)
        ax = (1,)
    else:
        b = grid.size // nb
        blocks = arr.reshape(nb, b, nb, b)
        ax = (1, 3)
    if how == "mean":
        return blocks.mean(axis=ax)
    if how == "max":
        return blocks.max(axis=ax)
    return blocks.sum(axis=ax)


def lattice_norm(seq, spec: LatticeSpec, grid: PeriodicGrid | None = None) -> float:
    """Evaluate the lattice quasi-norm of a finite sequence of nonnegative
    grid functions (list of arrays or a stacked array)."""
    if grid is None:
        first = np.asarray(seq[0])
        size = first.shape[0]
        grid = PeriodicGrid(first.ndim, size)
    stack = _as_stack(seq, grid)
    J = stack.shape[0]
    cell = grid.cell_volume
    n = grid.dim
    max_level = int(math.log2(grid.size))

    if spec.kind == "lq_Lp":
        return _lq(_lp_full(stack, spec.p, cell), spec.q)

    if spec.kind == "Lp_lq":
        if math.isinf(spec.q):
            point = stack.max(axis=0)
        else:
            point = np.sum(stack ** spec.q, axis=0) ** (1.0 / spec.q)
        return float(_lp_full(point[None], spec.p, cell)[0])

    if spec.kind == "F_inf_q":
        best = 0.0
        for l in range(0, min(J, max_level + 1)):
            tail = stack[l:]
            if math.isinf(spec.q):
                point = tail.max(axis=0)
                best = max(best, float(_cube_reduce(point, grid, l, "max").max()))
            else:
                point = np.sum(tail ** spec.q, axis=0)
                means = _cube_reduce(point, grid, l, "mean")
                best = max(best, float(means.max()) ** (1.0 / spec.q))
        return best

    # Morrey-type kinds: sup over cubes Q of |Q|^-tau x truncated norm
    best = 0.0
    for l in range(0, min(J, max_level + 1)):
        wQ = 2.0 ** (l * n * spec.tau)  # |Q|^-tau
        tail = stack[l:]
        if spec.kind == "lq_Lp_tau":
            # per-cube L^p of each g_j, then l^q over j >= l, per cube
            percube = []
            for gj in tail:
                if math.isinf(spec.p):
                    percube.append(_cube_reduce(gj, grid, l, "max"))
                else:
                    sums = _cube_reduce(gj ** spec.p, grid, l, "sum") * cell
                    percube.append(sums ** (1.0 / spec.p))
            pc = np.stack(percube)
            if math.isinf(spec.q):
                vals = pc.max(axis=0)
            else:
                vals = np.sum(pc ** spec.q, axis=0) ** (1.0 / spec.q)
        else:  # Lp_tau_lq
            if math.isinf(spec.q):
                point = tail.max(axis=0)
            else:
                point = np.sum(tail ** spec.q, axis=0) ** (1.0 / spec.q)
            if math.isinf(spec.p):
                vals = _cube_reduce(point, grid, l, "max")
            else:
                vals = (_cube_reduce(point ** spec.p, grid, l, "sum") * cell) ** (1.0 / spec.p)
        best = max(best, wQ * float(vals.max()))
    return best


# ---------------------------------------------------------------------------
# smoothness norm, V0, doubling probe
# ---------------------------------------------------------------------------


def _detail_indicator_grids(coeffs: WaveletCoeffs, s: float) -> np.ndarray:
    """Sequence g_j = sum over level-j cubes of 2^{j(s+n/2)} |<f,psi>| 1_I,
    with the scaling block folded into its own level's slot."""
    g = coeffs.grid
    n = g.dim
    full = int(math.log2(g.size))
    cf = coeffs.continuum_factor
    out = np.zeros((full,) + g.shape)
    for j in range(coeffs.approx_level, full):
        w = 2.0 ** (j * (s + n / 2))
        rep = g.size // (2 ** j)
        if n == 1:
            lvl = np.repeat(np.abs(coeffs.details[j]) * cf * w, rep)
        else:
            band = np.abs(coeffs.details[j]).sum(axis=0) * cf * w
            lvl = np.repeat(np.repeat(band, rep, axis=0), rep, axis=1)
        out[j] += lvl
    a0 = coeffs.approx_level
    w = 2.0 ** (a0 * (s + n / 2))
    rep = g.size // (2 ** a0)
    if n == 1:
        out[a0] += np.repeat(np.abs(coeffs.scaling) * cf * w, rep)
    else:
        out[a0] += np.repeat(np.repeat(np.abs(coeffs.scaling) * cf * w, rep, axis=0),
                             rep, axis=1)
    return out


def lambda_X_norm(f: SampledFunction, s: float, sys: WaveletSystem,
                  spec: LatticeSpec) -> float:
    """Wavelet-side smoothness norm: lattice norm of the weighted
    cube-indicator sequence |I|^{-s/n-1/2} |<f,psi>| 1_I."""
    if not (s > 0):
        raise ValidationError("s must be > 0")
    seq = _detail_indicator_grids(dwt(f, sys), s)
    return lattice_norm(seq, spec, grid=f.grid)


def v0_set(f: SampledFunction, sys: WaveletSystem, eps: float) -> set:
    """Cubes at the pyramid's coarsest level whose (continuum-normalized)
    scaling coefficient exceeds eps in absolute value."""
    if not (eps > 0):
        raise ValidationError("eps must be > 0")
    c = dwt(f, sys)
    mags = np.abs(c.scaling) * c.continuum_factor
    out = set()
    lv = c.approx_level
    if f.grid.dim == 1:
        for i in np.flatnonzero(mags > eps):
            out.add(DyadicCube(1, lv, (int(i),)))
    else:
        for i, k in zip(*np.nonzero(mags > eps)):
            out.add(DyadicCube(2, lv, (int(i), int(k))))
    return out


def doubling_probe(spec: LatticeSpec, trials: int = 100, seed: int = 0,
                   size: int = 1024, slots: int = 8) -> float:
    """Empirical doubling constant: worst ratio of lattice norms of
    {[sum_k 1_{2B_kj}]^theta}_j against {[sum_k 1_{B_kj}]^theta}_j over random
    half-open cell-aligned ball (interval) families on the torus.

    Note the indicator of a single ball is invariant under the theta power,
    so a one-ball family measures pure volume doubling, (|2B|/|B|)^{1/p} for
    kind lq_Lp; stacked overlapping families exercise theta.
    """
    if math.isinf(spec.p):
        raise ValidationError("doubling probe targets finite p")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    grid = PeriodicGrid(1, size)
    theta = spec.theta
    worst = 1.0
    for _ in range(trials):
        base = np.zeros((slots, size))
        dbl = np.zeros((slots, size))
        any_ball = False
        for j in range(slots):
            for _k in range(rng.integers(0, 3)):
                any_ball = True
                half = int(rng.integers(1, size // 8))
                c = int(rng.integers(0, size))
                idx = (c + np.arange(-half, half)) % size
                base[j, idx] += 1.0
                idx2 = (c + np.arange(-2 * half, 2 * half)) % size
                dbl[j, idx2] += 1.0
        if not any_ball:
            continue
        denom = lattice_norm(base ** theta, spec, grid=grid)
        if denom == 0:
            continue
        worst = max(worst, lattice_norm(dbl ** theta, spec, grid=grid) / denom)
    return float(worst)
