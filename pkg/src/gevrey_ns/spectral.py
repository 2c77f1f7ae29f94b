"""
Fourier representation of real fields on the periodic box [0, 2*pi)^3.

Coefficients follow ``u(x) = sum_xi uhat(xi) exp(i xi.x)`` so that
``sum |uhat|^2`` equals the mean square of ``u`` (unit-weight Parseval).
Arrays are stored in numpy FFT ordering: a scalar field is an ``(N, N, N)``
complex array, a vector field is ``(3, N, N, N)``.  Wavevector components
run over ``[-N/2, N/2 - 1]``.

Fields are plain numpy arrays; the grid is recovered from the trailing
shape, so every operation here is a pure function of its array inputs.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

__all__ = [
    "FrequencyGrid",
    "NumericalFailure",
    "make_grid",
    "grid_of",
    "to_physical",
    "to_spectral",
    "reflect",
    "is_hermitian",
    "hermitian_part",
    "dealias",
    "pad_spectrum",
    "truncate_spectrum",
    "leray_project",
    "heat_propagate",
    "gradient",
    "divergence",
    "laplacian",
    "differential",
    "divergence_residual",
    "product",
    "bilinear_term",
    "nonlinear_term",
    "convolve_oracle",
    "random_field",
    "random_divergence_free_field",
    "taylor_green",
    "single_mode_shear",
]


class NumericalFailure(ArithmeticError):
    """Raised when a nonlinear evaluation produces non-finite values."""


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GEVREY_NS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Integer wavevector lattice of an ``N**3`` periodic grid."""

    N: int
    k: np.ndarray  # (3, N, N, N) integer wavevectors
    k2: np.ndarray  # |xi|^2
    kmag: np.ndarray  # |xi|
    dealias_mask: np.ndarray  # 2/3 rule, per component
    paired: np.ndarray  # True where -xi is also on the lattice

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.N, self.N, self.N)

    @property
    def npoints(self) -> int:
        return self.N**3

    def index_of(self, xi) -> tuple[int, int, int]:
        """Array index of an integer wavevector."""
        xi = tuple(int(c) for c in xi)
        half = self.N // 2
        if any(c < -half or c >= half for c in xi):
            raise ValueError(f"wavevector {xi} outside lattice of N={self.N}")
        return tuple(c % self.N for c in xi)


@functools.lru_cache(maxsize=16)
def make_grid(N: int) -> FrequencyGrid:
    """Lattice and 2/3-rule mask for ``N`` modes per axis (``N`` even, >= 4)."""
    if isinstance(N, bool) or int(N) != N:
        raise ValueError(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 4 or N % 2:
        raise ValueError(f"N must be even and >= 4, got {N}")
    k1 = np.fft.fftfreq(N, d=1.0 / N).round().astype(np.int64)
    k = np.stack(np.meshgrid(k1, k1, k1, indexing="ij"))
    k2 = (k**2).sum(axis=0).astype(float)
    # strict form of |xi_i| <= N/3: identical for N not divisible by 3,
    # and keeps quadratic products alias-free when it is
    keep = 3 * np.abs(k1) < N
    mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    inrange = k1 != -N // 2
    paired = inrange[:, None, None] & inrange[None, :, None] & inrange[None, None, :]
    for arr in (k, k2, mask, paired):
        arr.setflags(write=False)
    kmag = np.sqrt(k2)
    kmag.setflags(write=False)
    return FrequencyGrid(N=N, k=k, k2=k2, kmag=kmag, dealias_mask=mask, paired=paired)


def grid_of(f: np.ndarray) -> FrequencyGrid:
    """Grid matching the trailing ``(N, N, N)`` shape of a field."""
    shape = np.shape(f)
    if len(shape) < 3 or not (shape[-1] == shape[-2] == shape[-3]):
        raise ValueError(f"expected trailing (N, N, N) axes, got shape {shape}")
    return make_grid(shape[-1])


def _same_grid(*fields: np.ndarray) -> FrequencyGrid:
    grids = {np.shape(f)[-1] for f in fields}
    if len(grids) != 1:
        raise ValueError(f"fields live on different grids: N in {sorted(grids)}")
    return grid_of(fields[0])


_AXES = (-3, -2, -1)


def to_spectral(u: np.ndarray) -> np.ndarray:
    """Physical samples on the uniform grid -> Fourier coefficients."""
    N = np.shape(u)[-1]
    return scipy.fft.fftn(u, axes=_AXES, workers=_workers()) / N**3


def to_physical(fhat: np.ndarray) -> np.ndarray:
    """Fourier coefficients -> real physical samples (imaginary residue dropped)."""
    N = np.shape(fhat)[-1]
    return scipy.fft.ifftn(fhat, axes=_AXES, workers=_workers()).real * N**3


def reflect(f: np.ndarray) -> np.ndarray:
    """Array whose entry at ``xi`` is ``f(-xi)`` (lattice indices mod N)."""
    return np.roll(np.flip(f, axis=_AXES), 1, axis=_AXES)


def hermitian_part(f: np.ndarray) -> np.ndarray:
    """Closest Hermitian-symmetric field; unpaired Nyquist planes are zeroed."""
    grid = grid_of(f)
    return np.where(grid.paired, 0.5 * (f + np.conj(reflect(f))), 0.0)


def is_hermitian(f: np.ndarray, rtol: float = 1e-12) -> bool:
    grid = grid_of(f)
    scale = max(np.abs(f).max(initial=0.0), np.finfo(float).tiny)
    gap = np.abs(f - np.conj(reflect(f)))[..., grid.paired]
    return bool(gap.max(initial=0.0) <= rtol * scale)


def dealias(f: np.ndarray) -> np.ndarray:
    return np.where(grid_of(f).dealias_mask, f, 0.0)


def pad_spectrum(f: np.ndarray, M: int) -> np.ndarray:
    """Embed coefficients of an N-grid field into the larger M-grid (same wavevectors)."""
    N = np.shape(f)[-1]
    if M < N or M % 2:
        raise ValueError(f"cannot pad N={N} to M={M}")
    if M == N:
        return np.array(f, copy=True)
    centred = np.fft.fftshift(f, axes=_AXES)
    out = np.zeros(np.shape(f)[:-3] + (M, M, M), dtype=complex)
    lo = (M - N) // 2
    out[..., lo:lo + N, lo:lo + N, lo:lo + N] = centred
    return np.fft.ifftshift(out, axes=_AXES)


def truncate_spectrum(f: np.ndarray, N: int) -> np.ndarray:
    """Restrict an M-grid field to the wavevectors of the N-grid."""
    M = np.shape(f)[-1]
    if N > M or N % 2:
        raise ValueError(f"cannot truncate M={M} to N={N}")
    centred = np.fft.fftshift(f, axes=_AXES)
    lo = (M - N) // 2
    return np.fft.ifftshift(centred[..., lo:lo + N, lo:lo + N, lo:lo + N], axes=_AXES)


def leray_project(f: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto divergence-free, mean-free vector fields."""
    grid = grid_of(f)
    k2 = np.where(grid.k2 == 0, 1.0, grid.k2)
    kdotf = (grid.k * f).sum(axis=0)
    out = f - grid.k * (kdotf / k2)
    out[:, 0, 0, 0] = 0.0
    return out


def heat_propagate(f: np.ndarray, nu: float, t: float) -> np.ndarray:
    """Apply the heat semigroup ``exp(nu t Laplacian)`` mode by mode."""
    if t < 0:
        raise ValueError(f"heat semigroup needs t >= 0, got {t}")
    if nu <= 0:
        raise ValueError(f"viscosity must be > 0, got {nu}")
    return f * np.exp(-nu * t * grid_of(f).k2)


def gradient(f: np.ndarray) -> np.ndarray:
    """Scalar ``(N,N,N)`` -> vector; vector ``(3,N,N,N)`` -> ``(3,3,N,N,N)`` with ``[j, i] = d_j f_i``."""
    grid = grid_of(f)
    ik = 1j * grid.k
    if np.ndim(f) == 3:
        return ik * f
    return ik[:, None] * f[None]


def divergence(f: np.ndarray) -> np.ndarray:
    """Contract the leading component axis with ``i xi``."""
    grid = grid_of(f)
    if np.shape(f)[0] != 3:
        raise ValueError("divergence needs a leading component axis of length 3")
    return (1j * grid.k.reshape((3,) + (1,) * (np.ndim(f) - 4) + grid.shape) * f).sum(axis=0)


def laplacian(f: np.ndarray) -> np.ndarray:
    return -grid_of(f).k2 * f


def differential(f: np.ndarray, kind: str) -> np.ndarray:
    ops = {"gradient": gradient, "divergence": divergence, "laplacian": laplacian}
    try:
        return ops[kind](f)
    except KeyError:
        raise ValueError(f"unknown differential kind {kind!r}") from None


def divergence_residual(u: np.ndarray) -> float:
    """Largest ``|xi . uhat| / (|xi| |uhat|)`` over modes with nonzero coefficient."""
    grid = grid_of(u)
    mag = np.sqrt((np.abs(u) ** 2).sum(axis=0))
    kdotu = np.abs((grid.k * u).sum(axis=0))
    scale = mag.max(initial=0.0)
    live = (mag > 1e-300) & (grid.k2 > 0) & (mag > 1e-14 * scale)
    if not live.any():
        return 0.0
    return float((kdotu[live] / (grid.kmag[live] * mag[live])).max())


def _check_finite(arr: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NumericalFailure(f"non-finite values in {what}")
    return arr


def product(f: np.ndarray, g: np.ndarray, exact: bool = False) -> np.ndarray:
    """Coefficients of the pointwise product of two scalar fields.

    ``exact=False``: pseudo-spectral product on the same grid with the 2/3 mask
    applied to the result.  ``exact=True``: zero-pad to ``2N`` first, so the
    full lattice convolution is returned on the ``2N`` grid without aliasing.
    """
    grid = _same_grid(f, g)
    if exact:
        M = 2 * grid.N
        f, g = pad_spectrum(f, M), pad_spectrum(g, M)
    with np.errstate(over="ignore", invalid="ignore"):
        pq = to_physical(f) * to_physical(g)
    out = to_spectral(_check_finite(pq, "pointwise product"))
    return out if exact else dealias(out)


def bilinear_term(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``P div(u (x) v)`` with component ``i = sum_j d_j (u_j v_i)``, dealiased."""
    grid = _same_grid(u, v)
    up = to_physical(dealias(u))
    vp = up if v is u else to_physical(dealias(v))
    out = np.zeros((3,) + grid.shape, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(3):
            for j in range(3):
                pq = _check_finite(up[j] * vp[i], "nonlinear product")
                out[i] += 1j * grid.k[j] * to_spectral(pq)
    return leray_project(dealias(out))


def nonlinear_term(u: np.ndarray) -> np.ndarray:
    """``P div(u (x) u)``; the Navier-Stokes right-hand side is ``nu Lap u - nonlinear_term(u)``."""
    return bilinear_term(u, u)


def convolve_oracle(f: np.ndarray, g: np.ndarray, full: bool = False) -> np.ndarray:
    """Direct lattice convolution ``h(xi) = sum_eta f(xi - eta) g(eta)``.

    O(N^6); meant for N <= 16.  With ``full=False`` the result is cut back to
    the input lattice; with ``full=True`` it is returned on the ``2N`` grid,
    which holds every wavevector of the sum.
    """
    grid = _same_grid(f, g)
    if np.ndim(f) != 3 or np.ndim(g) != 3:
        raise ValueError("convolve_oracle works on scalar fields")
    N = grid.N
    F = np.fft.fftshift(f)
    G = np.fft.fftshift(g)
    out = np.zeros((2 * N - 1,) * 3, dtype=complex)
    for j0, j1, j2 in zip(*np.nonzero(G)):
        out[j0:j0 + N, j1:j1 + N, j2:j2 + N] += G[j0, j1, j2] * F
    if full:
        centred = np.zeros((2 * N,) * 3, dtype=complex)
        centred[: 2 * N - 1, : 2 * N - 1, : 2 * N - 1] = out
        return np.fft.ifftshift(centred)
    lo = N // 2
    return np.fft.ifftshift(out[lo:lo + N, lo:lo + N, lo:lo + N])


def _as_grid(grid) -> FrequencyGrid:
    return grid if isinstance(grid, FrequencyGrid) else make_grid(grid)


def random_field(grid, spectrum_slope: float, band, seed: int, components: int = 1,
                 n_modes: int | None = None) -> np.ndarray:
    """Hermitian, mean-free random field with envelope ``|xi|**spectrum_slope`` on ``kmin <= |xi| <= kmax``.

    Coefficients are drawn in a canonical wavevector order, so one seed gives
    the same trigonometric polynomial on every grid that contains the band.
    ``n_modes`` keeps only that many randomly chosen wavevector pairs.
    """
    grid = _as_grid(grid)
    kmin, kmax = map(float, band)
    if not (1 <= kmin <= kmax):
        raise ValueError(f"band must satisfy 1 <= kmin <= kmax, got {band}")
    if kmax > grid.N / 3 + 1e-12:
        raise ValueError(f"kmax={kmax} exceeds N/3={grid.N / 3:.4g}")
    inband = (grid.kmag >= kmin) & (grid.kmag <= kmax) & grid.dealias_mask
    pts = np.argwhere(inband)
    if len(pts) == 0:
        raise ValueError(f"no lattice points with {kmin} <= |xi| <= {kmax}")
    xi = grid.k[:, pts[:, 0], pts[:, 1], pts[:, 2]].T
    order = np.lexsort(xi.T[::-1])
    pts, xi = pts[order], xi[order]
    rng = np.random.default_rng(seed)
    shape = (components, len(pts))
    coef = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    coef *= np.linalg.norm(xi, axis=1) ** spectrum_slope
    if n_modes is not None:
        # one representative per +/- pair, the lexicographically positive one
        positive = np.array([tuple(x) > (0, 0, 0) for x in xi])
        reps = np.flatnonzero(positive)
        chosen = rng.choice(reps, size=min(n_modes, len(reps)), replace=False)
        keep = np.zeros(len(pts), dtype=bool)
        keep[chosen] = True
        coef *= keep
    out = np.zeros((components,) + grid.shape, dtype=complex)
    out[:, pts[:, 0], pts[:, 1], pts[:, 2]] = coef
    if n_modes is not None:
        out = out + np.conj(reflect(out))  # chosen modes have no partner drawn
    out = hermitian_part(out)
    out[:, 0, 0, 0] = 0.0
    return out[0] if components == 1 else out


def random_divergence_free_field(grid, spectrum_slope: float, band, seed: int,
                                 n_modes: int | None = None) -> np.ndarray:
    """Random solenoidal velocity field; see :func:`random_field`."""
    u = leray_project(random_field(grid, spectrum_slope, band, seed, components=3, n_modes=n_modes))
    if not np.any(u):
        raise ValueError("band produced an empty field after projection")
    return u


def taylor_green(grid, amplitude: float = 1.0) -> np.ndarray:
    """``amplitude * (sin x1 cos x2, -cos x1 sin x2, 0)``; its nonlinearity is a pure gradient."""
    grid = _as_grid(grid)
    x = 2 * np.pi * np.arange(grid.N) / grid.N
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    u = np.zeros((3,) + grid.shape)
    u[0] = (np.sin(X1) * np.cos(X2))[:, :, None]
    u[1] = (-np.cos(X1) * np.sin(X2))[:, :, None]
    return amplitude * to_spectral(u)


def single_mode_shear(grid, amplitude: float = 1.0) -> np.ndarray:
    """``(0, 0, 2 amplitude cos x1)``: coefficients ``amplitude`` at ``+/- e1`` in component 3."""
    grid = _as_grid(grid)
    u = np.zeros((3,) + grid.shape, dtype=complex)
    u[2][grid.index_of((1, 0, 0))] = amplitude
    u[2][grid.index_of((-1, 0, 0))] = amplitude
    return u
