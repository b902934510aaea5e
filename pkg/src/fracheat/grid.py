"""Periodic grids, sampled functions, and the exact spectral engine.

All functions live on the unit torus [0,1)^n sampled on a uniform grid of
N points per axis (N a power of two). Test functions are band-limited, so
every operator implemented as a Fourier multiplier (semigroups, fractional
Laplacians, differences, shifts, ball averages) is exact up to roundoff;
discretization error never enters through this layer.

Frequency convention: integer frequencies k in [-N/2, N/2), stored in numpy
FFT order, with multiplier argument xi = k so |2 pi xi| = 2 pi |k|.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "PeriodicGrid",
    "SampledFunction",
    "Spectrum",
    "to_spectrum",
    "from_spectrum",
    "apply_multiplier",
    "shift_eval",
]


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on the unit torus [0,1)^dim."""

    dim: int
    size: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError(f"dim must be 1 or 2, got {self.dim}")
        if self.size < 8 or not _is_pow2(self.size):
            raise ValidationError(f"size must be a power of two >= 8, got {self.size}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.size

    @property
    def shape(self) -> tuple:
        return (self.size,) * self.dim

    @property
    def npoints(self) -> int:
        return self.size ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    def axis_points(self) -> np.ndarray:
        return np.arange(self.size) / self.size

    def points(self):
        """Coordinate arrays; a single vector for dim=1, a meshgrid pair for dim=2."""
        x = self.axis_points()
        if self.dim == 1:
            return x
        return np.meshgrid(x, x, indexing="ij")

    def freqs(self):
        """Integer frequency grid(s) in FFT order; one array per axis for dim=2."""
        k = np.fft.fftfreq(self.size, d=1.0 / self.size).astype(np.int64)
        if self.dim == 1:
            return k
        return np.meshgrid(k, k, indexing="ij")

    def freq_magnitude(self) -> np.ndarray:
        """|k| on the FFT-ordered frequency grid."""
        if self.dim == 1:
            return np.abs(self.freqs()).astype(float)
        kx, ky = self.freqs()
        return np.sqrt(kx.astype(float) ** 2 + ky.astype(float) ** 2)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SampledFunction:
    """Real-valued function sampled on a PeriodicGrid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValidationError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("values must be finite")
        object.__setattr__(self, "values", _freeze(v))

    def sup_norm(self, refine: int = 1) -> float:
        """Max of |f| on the grid; refine > 1 samples the trig interpolant
        on a refine-times finer grid (sup of the interpolant can exceed the
        grid max, so inequality tests pass refine=4)."""
        if refine == 1:
            return float(np.max(np.abs(self.values)))
        return float(np.max(np.abs(resample(self, refine).values)))

    def __add__(self, other):
        if isinstance(other, SampledFunction):
            if other.grid != self.grid:
                raise ValidationError("grid mismatch")
            return SampledFunction(self.grid, self.values + other.values)
        return SampledFunction(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, SampledFunction):
            if other.grid != self.grid:
                raise ValidationError("grid mismatch")
            return SampledFunction(self.grid, self.values - other.values)
        return SampledFunction(self.grid, self.values - other)

    def __mul__(self, scalar):
        return SampledFunction(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)


@dataclass(frozen=True)
class Spectrum:
    """Discrete Fourier coefficients of a SampledFunction, FFT order.

    coeffs(k) = (1/N^dim) sum_x f(x) e^{-2 pi i k.x}, so a pure mode
    sin(2 pi x) has coeffs(+-1) = -+ i/2.
    """

    grid: PeriodicGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise ValidationError(f"coeffs shape {c.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "coeffs", _freeze(c))


def to_spectrum(f: SampledFunction) -> Spectrum:
    return Spectrum(f.grid, np.fft.fftn(f.values) / f.grid.npoints)


def from_spectrum(F: Spectrum, require_real: bool = True) -> SampledFunction:
    v = np.fft.ifftn(F.coeffs * F.grid.npoints)
    if require_real:
        scale = max(float(np.max(np.abs(v))), 1e-300)
        resid = float(np.max(np.abs(v.imag)))
        if resid > 1e-9 * scale:
            raise ValidationError(
                f"spectrum does not represent a real function (imag residue {resid:.3e})"
            )
    return SampledFunction(F.grid, v.real)


def _as_multiplier_array(grid: PeriodicGrid, m) -> np.ndarray:
    if callable(m):
        if grid.dim == 1:
            arr = m(grid.freqs())
        else:
            arr = m(*grid.freqs())
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != grid.shape:
            arr = np.broadcast_to(arr, grid.shape).astype(complex)
        return arr
    arr = np.asarray(m, dtype=complex)
    if arr.shape != grid.shape:
        raise ValidationError(f"multiplier shape {arr.shape} != grid shape {grid.shape}")
    return arr


def _hermitian_defect(grid: PeriodicGrid, arr: np.ndarray) -> float:
    # m(-k) == conj(m(k)); in FFT order the -k entry of axis index i>0 is N-i.
    rev = arr
    for ax in range(grid.dim):
        rev = np.roll(np.flip(rev, axis=ax), 1, axis=ax)
    return float(np.max(np.abs(arr - np.conj(rev))))


def nyquist_realize(grid: PeriodicGrid, m) -> np.ndarray:
    """Project the unpaired Nyquist bins (any axis frequency -N/2) of a
    multiplier onto their real part, the cosine-interpolation convention of
    shift_eval. No-op wherever the multiplier is already Hermitian."""
    arr = _as_multiplier_array(grid, m).copy()
    N = grid.size
    for ax in range(grid.dim):
        sl = [slice(None)] * grid.dim
        sl[ax] = N // 2
        arr[tuple(sl)] = arr[tuple(sl)].real
    return arr


def apply_multiplier(F: Spectrum, m, real_output: bool = False) -> Spectrum:
    """Pointwise multiply the spectrum by m(k).

    m is either a callable on the integer frequency grid(s) or a precomputed
    FFT-ordered array. With real_output=True a non-Hermitian multiplier is
    rejected instead of silently producing a complex function.
    """
    arr = _as_multiplier_array(F.grid, m)
    if real_output:
        scale = max(float(np.max(np.abs(arr))), 1e-300)
        defect = _hermitian_defect(F.grid, arr)
        if defect > 1e-12 * scale:
            raise ValidationError(
                f"multiplier is not Hermitian (defect {defect:.3e}) but real output requested"
            )
    return Spectrum(F.grid, arr * F.coeffs)


def _shift_phase_axis(N: int, h: float) -> np.ndarray:
    """Phase multiplier e^{2 pi i k h} along one axis, with the unpaired
    Nyquist bin k=-N/2 replaced by cos(pi N h): on the grid the shifted
    interpolant of the Nyquist mode is cos-projected, which keeps shifts of
    real data exactly real."""
    k = np.fft.fftfreq(N, d=1.0 / N).astype(np.int64)
    ph = np.exp(2j * np.pi * k * h)
    ph[N // 2] = np.cos(2 * np.pi * (N // 2) * h)
    return ph


def shift_eval(f: SampledFunction, h) -> SampledFunction:
    """Trigonometric interpolant of f evaluated at x + h on the grid."""
    g = f.grid
    hv = np.atleast_1d(np.asarray(h, dtype=float))
    if hv.size != g.dim:
        raise ValidationError(f"shift has {hv.size} components, grid dim is {g.dim}")
    if np.any(np.abs(hv) >= 1.0):
        raise ValidationError("|h| must be < 1 componentwise")
    F = to_spectrum(f)
    if g.dim == 1:
        ph = _shift_phase_axis(g.size, hv[0])
    else:
        ph = np.multiply.outer(_shift_phase_axis(g.size, hv[0]), _shift_phase_axis(g.size, hv[1]))
    return from_spectrum(Spectrum(g, F.coeffs * ph))


def _pad_axis(C: np.ndarray, axis: int, N: int, M: int) -> np.ndarray:
    """Zero-pad FFT coefficients along one axis from N to M bins, splitting
    the unpaired Nyquist coefficient onto the +-N/2 bins of the fine grid."""
    shape = list(C.shape)
    shape[axis] = M
    out = np.zeros(shape, dtype=complex)
    src = np.moveaxis(C, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    dst[: N // 2] = src[: N // 2]
    dst[M - N // 2 + 1 :] = src[N // 2 + 1 :]
    dst[N // 2] = 0.5 * src[N // 2]
    dst[M - N // 2] += 0.5 * src[N // 2]
    return out


def resample(f: SampledFunction, refine: int) -> SampledFunction:
    """Exact trig-interpolant resampling onto a refine-times finer grid."""
    if refine < 1 or int(refine) != refine:
        raise ValidationError("refine must be a positive integer")
    if refine == 1:
        return f
    g = f.grid
    N, M = g.size, g.size * int(refine)
    C = np.fft.fftn(f.values)
    for ax in range(g.dim):
        C = _pad_axis(C, ax, N, M)
    fine = np.fft.ifftn(C) * refine ** g.dim
    return SampledFunction(PeriodicGrid(g.dim, M), fine.real)
