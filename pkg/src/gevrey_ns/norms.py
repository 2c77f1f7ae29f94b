"""
Sobolev, Sobolev-Gevrey and weighted Fourier-L1 norms on the frequency lattice.

Every squared Hilbert norm is ``sum_xi w(xi) |fhat(xi)|^2`` for a radial
weight ``w``; vector fields add the squares of their components.  Homogeneous
kinds drop the ``xi = 0`` mode.  The Gevrey factor is
``exp(a |xi|**(1/sigma))`` and enters the Hilbert weights squared.

Kinds accepted by :func:`norm` and :func:`inner_product`:

``l2``          sum |f|^2
``hs``          (1 + |xi|^2)^s
``hs_dot``      |xi|^(2s)
``gevrey``      (1 + |xi|^2)^s exp(2a|xi|^(1/sigma))
``gevrey_dot``  |xi|^(2s) exp(2a|xi|^(1/sigma))
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .params import GevreyParams
from .spectral import _same_grid, grid_of

__all__ = [
    "KINDS",
    "NormReport",
    "NORM_REPORT_FIELDS",
    "gevrey_weight",
    "spectral_weight",
    "norm",
    "inner_product",
    "coefficient_magnitude",
    "fourier_l1_weighted",
    "norm_report",
]

KINDS = ("l2", "hs", "hs_dot", "gevrey", "gevrey_dot")


def gevrey_weight(xi, a: float, sigma: float):
    """``exp(a |xi|**(1/sigma))`` for a wavevector (last axis of length 3) or a magnitude."""
    if a < 0 or sigma < 1:
        raise ValueError(f"need a >= 0 and sigma >= 1, got a={a}, sigma={sigma}")
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi, axis=-1) if xi.ndim and xi.shape[-1] == 3 else np.abs(xi)
    return np.exp(a * r ** (1.0 / sigma))


def _homogeneous_power(kmag: np.ndarray, p: float) -> np.ndarray:
    out = np.zeros_like(kmag)
    nz = kmag > 0
    out[nz] = kmag[nz] ** p
    return out


def spectral_weight(grid, kind: str, s: float = 1.0, a: float = 0.0, sigma: float = 1.0) -> np.ndarray:
    """Weight array ``w`` with ``norm(f, kind)**2 == sum(w * |f|**2)``."""
    kmag = grid.kmag
    if kind == "l2":
        return np.ones_like(kmag)
    if kind == "hs":
        return (1.0 + grid.k2) ** s
    if kind == "hs_dot":
        return _homogeneous_power(kmag, 2 * s)
    gev = np.exp(2 * a * kmag ** (1.0 / sigma))
    if kind == "gevrey":
        return (1.0 + grid.k2) ** s * gev
    if kind == "gevrey_dot":
        return _homogeneous_power(kmag, 2 * s) * gev
    raise ValueError(f"unknown norm kind {kind!r}; expected one of {KINDS}")


def _weight_for(f, kind, params, s):
    if kind in ("gevrey", "gevrey_dot") and params is None:
        raise ValueError(f"kind {kind!r} needs GevreyParams")
    if s is None:
        s = params.s if params is not None else 1.0
    a = params.a if params is not None else 0.0
    sigma = params.sigma if params is not None else 1.0
    return spectral_weight(grid_of(f), kind, s=s, a=a, sigma=sigma)


def _sq_modulus(f: np.ndarray) -> np.ndarray:
    sq = np.abs(f) ** 2
    return sq.sum(axis=0) if sq.ndim == 4 else sq


def norm(f: np.ndarray, kind: str = "l2", params: GevreyParams | None = None,
         s: float | None = None) -> float:
    """Norm of a scalar or vector field; ``s`` overrides ``params.s``."""
    w = _weight_for(f, kind, params, s)
    return float(np.sqrt((w * _sq_modulus(f)).sum()))


def inner_product(f: np.ndarray, g: np.ndarray, kind: str = "l2",
                  params: GevreyParams | None = None, s: float | None = None) -> float:
    """Real inner product whose diagonal is ``norm(f, kind)**2``."""
    _same_grid(f, g)
    if np.shape(f) != np.shape(g):
        raise ValueError(f"shape mismatch {np.shape(f)} vs {np.shape(g)}")
    w = _weight_for(f, kind, params, s)
    prod = (f * np.conj(g)).real
    if prod.ndim == 4:
        prod = prod.sum(axis=0)
    return float((w * prod).sum())


def coefficient_magnitude(f: np.ndarray) -> np.ndarray:
    """``|fhat(xi)|``; Euclidean length of the coefficient triple for vector fields."""
    return np.sqrt(_sq_modulus(f))


def fourier_l1_weighted(f: np.ndarray, radius: float, sigma: float) -> float:
    """``sum_xi exp(radius |xi|**(1/sigma)) |fhat(xi)|``."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if sigma < 1:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    grid = grid_of(f)
    w = np.exp(radius * grid.kmag ** (1.0 / sigma))
    return float((w * coefficient_magnitude(f)).sum())


@dataclass(frozen=True)
class NormReport:
    """All norms of one field at one time (``hs_dot`` uses ``s``)."""

    l2: float
    h1_dot: float
    hs_dot: float
    h1_gevrey_dot: float
    h1_gevrey: float
    fourier_l1_weighted: float
    fourier_l1: float
    grad_l2: float
    s: float

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    def row(self) -> list[float]:
        return [getattr(self, name) for name in NORM_REPORT_FIELDS]


NORM_REPORT_FIELDS = tuple(f.name for f in fields(NormReport))


def norm_report(u: np.ndarray, params: GevreyParams) -> NormReport:
    """Weighted L1 uses radius ``a / sigma``."""
    h1 = norm(u, "hs_dot", s=1.0)
    grad = norm(np.asarray([g for g in _gradient_components(u)]), "l2") if np.ndim(u) == 4 else h1
    return NormReport(
        l2=norm(u, "l2"),
        h1_dot=h1,
        hs_dot=norm(u, "hs_dot", s=params.s),
        h1_gevrey_dot=norm(u, "gevrey_dot", params, s=1.0),
        h1_gevrey=norm(u, "gevrey", params, s=1.0),
        fourier_l1_weighted=fourier_l1_weighted(u, params.a / params.sigma, params.sigma),
        fourier_l1=fourier_l1_weighted(u, 0.0, 1.0),
        grad_l2=grad,
        s=float(params.s),
    )


def _gradient_components(u):
    # d_j u_i for all (i, j); sum of squares equals the H1-dot norm squared
    grid = grid_of(u)
    for i in range(3):
        for j in range(3):
            yield 1j * grid.k[j] * u[i]
