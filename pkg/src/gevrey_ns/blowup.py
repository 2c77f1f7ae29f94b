"""
Quantitative diagnostics around finite-time blow-up, evaluated on smooth runs.

No computed trajectory blows up, so everything here is a monitor or a
certificate: the energy identity ledger, guaranteed-existence horizons from
the Fourier-L1 lower bounds, the Gronwall bound on the Hdot^1_{a,sigma} norm,
the explicit constants of the exponential-type lower bound and a
least-squares fit of that envelope (diagnostic only).

Functions working on trajectories also accept the plain norm series, which
is what the ``monitor`` command reads back from CSV.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad
from scipy.optimize import minimize_scalar
from scipy.special import gammainc, gammaln

from .inequalities import m_bound
from .norms import fourier_l1_weighted, norm
from .params import GevreyParams

__all__ = [
    "GRONWALL_C",
    "EnergyLedger",
    "HorizonReport",
    "EnvelopeParams",
    "ConstantReport",
    "ProfileFit",
    "energy_residuals",
    "energy_ledger",
    "horizon",
    "horizon_series",
    "horizon_consistency",
    "trajectory_consistency",
    "c_a_sigma",
    "h_function",
    "infimum_B",
    "envelope_constants",
    "envelope",
    "chain_lower_bound",
    "fit_profile",
]

# Gronwall constant of the Hdot^1_{a,sigma} monitor: 2 * 32**2 from the product
# estimate's factor 16 doubled by Young's inequality, squared, and doubled again.
GRONWALL_C = 64.0**2


# ---------------------------------------------------------------------------
# energy identity


@dataclass(frozen=True)
class EnergyLedger:
    times: np.ndarray
    residuals: np.ndarray  # |u(t)|^2 + 2 nu int |grad u|^2 - |u0|^2
    max_relative: float

    def as_dict(self) -> dict:
        return {"times": self.times.tolist(), "residuals": self.residuals.tolist(),
                "max_relative": self.max_relative}


def energy_residuals(times, l2, grad_l2, nu: float) -> EnergyLedger:
    """Energy identity residual per sample, time integral by the trapezoid rule on the nodes."""
    times = np.asarray(times, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    grad_l2 = np.asarray(grad_l2, dtype=float)
    if len(times) < 2:
        raise ValueError("energy ledger needs at least two samples")
    dissipated = cumulative_trapezoid(grad_l2**2, times, initial=0.0)
    e0 = l2[0] ** 2
    r = l2**2 + 2.0 * nu * dissipated - e0
    rel = float(np.abs(r).max() / e0) if e0 > 0 else float(np.abs(r).max())
    return EnergyLedger(times, r, rel)


def energy_ledger(traj) -> EnergyLedger:
    reports = traj.norm_reports()
    return energy_residuals(traj.times, [r.l2 for r in reports], [r.grad_l2 for r in reports],
                            traj.params.nu)


# ---------------------------------------------------------------------------
# guaranteed-existence horizons


def _horizon_from(l1: float, nu: float) -> float:
    return math.inf if l1 == 0.0 else nu / (2.0 * l1 * l1)


@dataclass(frozen=True)
class HorizonReport:
    """Fourier-L1 norms at time ``t`` and the existence time each one guarantees beyond ``t``."""

    t: float
    l1_weighted: float
    l1_plain: float
    horizon_weighted: float
    horizon_plain: float

    @classmethod
    def from_norms(cls, t, l1_weighted, l1_plain, nu) -> "HorizonReport":
        return cls(float(t), float(l1_weighted), float(l1_plain),
                   _horizon_from(l1_weighted, nu), _horizon_from(l1_plain, nu))

    def as_dict(self) -> dict:
        return asdict(self)


def horizon(u: np.ndarray, params: GevreyParams, t: float = 0.0) -> HorizonReport:
    """Weighted norm at radius ``a / sigma``; a zero field has infinite horizons."""
    weighted = fourier_l1_weighted(u, params.a / params.sigma, params.sigma)
    plain = fourier_l1_weighted(u, 0.0, 1.0)
    return HorizonReport.from_norms(t, weighted, plain, params.nu)


def horizon_series(times, l1_weighted, l1_plain, nu: float) -> list[HorizonReport]:
    return [HorizonReport.from_norms(t, w, p, nu) for t, w, p in zip(times, l1_weighted, l1_plain)]


def horizon_consistency(times, l1_weighted, h1_gevrey_dot, nu: float, *,
                        l1_plain=None, failure_time: float | None = None,
                        c: float = GRONWALL_C) -> dict:
    """Check a computed trajectory against the horizon and Gronwall bounds.

    Existence: a run that failed at ``failure_time`` contradicts any sample
    whose horizon reaches past it; a smooth run cannot.  Gronwall: for every
    pair ``t_i <= t_j``,
    ``|u(t_j)|^2 <= |u(t_i)|^2 exp(c/nu int_{t_i}^{t_j} L1w^2)`` in Hdot^1_{a,sigma}.
    """
    times = np.asarray(times, dtype=float)
    lw = np.asarray(l1_weighted, dtype=float)
    hn = np.asarray(h1_gevrey_dot, dtype=float)
    n = len(times)
    hw = np.array([_horizon_from(x, nu) for x in lw])
    out = {"samples": n, "c": c, "nu": nu, "failure_time": failure_time}
    if failure_time is None:
        out["horizon_contradictions"] = 0
    else:
        out["horizon_contradictions"] = int(np.sum(times + hw > failure_time))
    if l1_plain is not None:
        hp = np.array([_horizon_from(x, nu) for x in np.asarray(l1_plain, dtype=float)])
        out["weighted_le_plain"] = bool(np.all(hw <= hp * (1 + 1e-12)))
    if n < 2:
        out.update(gronwall_pass=True, gronwall_worst_log_margin=0.0, gronwall_pairs=0)
    else:
        integral = cumulative_trapezoid(lw**2, times, initial=0.0)
        # log(rhs/lhs) for all i <= j; upper triangle only
        with np.errstate(divide="ignore"):
            logh = 2.0 * np.log(hn)
        margin = logh[:, None] + (c / nu) * (integral[None, :] - integral[:, None]) - logh[None, :]
        iu = np.triu_indices(n, k=1)
        vals = margin[iu]
        vals = vals[np.isfinite(vals)] if np.any(hn == 0) else vals
        worst = float(vals.min()) if vals.size else 0.0
        out.update(gronwall_pass=bool(worst >= -1e-12), gronwall_worst_log_margin=worst,
                   gronwall_pairs=int(len(iu[0])))
    out["pass"] = out["horizon_contradictions"] == 0 and out["gronwall_pass"] and out.get("weighted_le_plain", True)
    return out


def trajectory_consistency(traj, c: float = GRONWALL_C) -> dict:
    """:func:`horizon_consistency` evaluated on the states of a :class:`~gevrey_ns.mild.Trajectory`."""
    reports = traj.norm_reports()
    return horizon_consistency(traj.times, [r.fourier_l1_weighted for r in reports],
                               [r.h1_gevrey_dot for r in reports], traj.params.nu,
                               l1_plain=[r.fourier_l1 for r in reports],
                               failure_time=traj.failure_time, c=c)


# ---------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class ConstantReport:
    """``c_{a,sigma}^2`` by quadrature next to the two candidate closed forms."""

    a: float
    sigma: float
    b: float
    quadrature: float
    quadrature_step_change: float
    scipy_quad: float
    closed_form_neg_sigma: float
    closed_form_sigma_minus_2: float
    matches_neg_sigma: bool
    matches_sigma_minus_2: bool

    @property
    def value(self) -> float:
        return self.quadrature

    def as_dict(self) -> dict:
        return asdict(self)


def _log_window(b: float, sigma: float, drop: float = 50.0):
    # int_0^inf exp(-b r^(1/sigma)) dr with r = exp(x); the log-integrand
    # x - b exp(x/sigma) peaks at sigma log(sigma/b) and is cut where it has
    # fallen by more than ``drop``
    peak = sigma * math.log(sigma / b)
    fpeak = peak - sigma
    hi = peak
    while hi - b * math.exp(hi / sigma) > fpeak - drop:
        hi += sigma
    return peak - drop - 10.0, hi, fpeak


def _log_trapezoid(b: float, sigma: float, step: float) -> float:
    lo, hi, fpeak = _log_window(b, sigma)
    n = int(math.ceil((hi - lo) / step))
    x = lo + step * np.arange(n + 1)
    f = np.exp(x - b * np.exp(x / sigma) - fpeak)
    return float(np.trapezoid(f, dx=step) * math.exp(fpeak))


def c_a_sigma(a: float, sigma: float, step: float = 0.05, rtol: float = 1e-6) -> ConstantReport:
    """``c^2 = 4 pi int_0^inf exp(-b r^(1/sigma)) dr`` with ``b = 2a(1/sqrt(sigma) - 1/sigma)``.

    The substitution ``z = b r^(1/sigma)`` gives ``4 pi sigma b^-sigma Gamma(sigma)``;
    the form ``4 pi sigma b^(sigma-2) Gamma(sigma)`` is reported alongside and
    flagged when it disagrees with the quadrature.
    """
    if not sigma > 1:
        raise ValueError(f"c_a_sigma needs sigma > 1 (the integral diverges at sigma = 1), got {sigma}")
    if not a > 0:
        raise ValueError(f"c_a_sigma needs a > 0, got {a}")
    b = 2.0 * a * (1.0 / math.sqrt(sigma) - 1.0 / sigma)
    coarse = _log_trapezoid(b, sigma, step)
    fine = _log_trapezoid(b, sigma, step / 2)
    value = 4.0 * math.pi * fine
    lo, hi, fpeak = _log_window(b, sigma)
    ref, _ = quad(lambda x: math.exp(x - b * math.exp(x / sigma) - fpeak), lo, hi,
                  epsabs=0.0, epsrel=1e-12, limit=500)
    ref *= math.exp(fpeak)
    neg_sigma = 4.0 * math.pi * sigma * math.exp(-sigma * math.log(b) + math.lgamma(sigma))
    sigma_minus_2 = 4.0 * math.pi * sigma * math.exp((sigma - 2.0) * math.log(b) + math.lgamma(sigma))
    return ConstantReport(
        a=a, sigma=sigma, b=b, quadrature=value,
        quadrature_step_change=abs(fine - coarse) / fine,
        scipy_quad=4.0 * math.pi * ref,
        closed_form_neg_sigma=neg_sigma, closed_form_sigma_minus_2=sigma_minus_2,
        matches_neg_sigma=abs(value - neg_sigma) <= rtol * neg_sigma,
        matches_sigma_minus_2=abs(value - sigma_minus_2) <= rtol * sigma_minus_2)


def _check_order(m: int) -> int:
    if int(m) != m or m < 2:
        raise ValueError(f"sigma0_twice must be an integer >= 2, got {m}")
    return int(m)


def h_function(z, sigma0_twice: int):
    """``h(z) = (e^z - sum_{k<=m} z^k/k!) / (z^(m+1) e^(z/2))`` with ``m = sigma0_twice``.

    Small ``z`` uses the tail series ``e^(-z/2) sum_j z^j/(m+1+j)!``; large ``z``
    uses ``e^z - sum = e^z P(m+1, z)`` with the regularized incomplete gamma,
    evaluated in logs.
    """
    m = _check_order(sigma0_twice)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise ValueError("h is defined for finite z > 0")
    out = np.empty_like(z)
    small = z < max(1.0, 2.0 * (m + 1))
    zs = z[small]
    if zs.size:
        term = np.full_like(zs, math.exp(-gammaln(m + 2)))
        acc = term.copy()
        for j in range(1, 400):
            term = term * zs / (m + 1 + j)
            acc += term
            if np.all(term <= 1e-17 * acc):
                break
        out[small] = acc * np.exp(-zs / 2)
    zl = z[~small]
    if zl.size:
        with np.errstate(over="ignore"):
            out[~small] = np.exp(zl / 2 - (m + 1) * np.log(zl) + np.log(gammainc(m + 1, zl)))
    return out if out.ndim else float(out)


def infimum_B(sigma0_twice: int) -> dict:
    """``inf_{z>0} h(z)``: log-grid scan on ``log z`` in ``[-20, 20]``, then golden section."""
    m = _check_order(sigma0_twice)
    logz = np.linspace(-20.0, 20.0, 4001)
    vals = h_function(np.exp(logz), m)
    i = int(np.argmin(vals))
    if i == 0 or i == len(logz) - 1:
        raise ArithmeticError("minimum of h not bracketed on log z in [-20, 20]")
    res = minimize_scalar(lambda x: float(h_function(math.exp(x), m)), method="golden",
                          bracket=(logz[i - 1], logz[i], logz[i + 1]), options={"xtol": 1e-12})
    B = min(float(res.fun), float(vals[i]))
    return {"B": B, "argmin": math.exp(res.x), "limit_at_zero": math.exp(-gammaln(m + 2)),
            "sigma0_twice": m}


@dataclass(frozen=True)
class EnvelopeParams:
    sigma0_twice: int
    C1: float
    C2: float
    c1: float
    c2: float
    B: float
    M2: float

    def __post_init__(self):
        for name in ("C1", "C2", "c1", "c2", "B", "M2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")

    def as_dict(self) -> dict:
        return asdict(self)


def envelope_constants(u0_l2: float, params: GevreyParams, M2: float | None = None) -> EnvelopeParams:
    """Constants of the exponential-type lower bound.

    ``C1 = (nu/2 M^-2 |u0|)^(2/3)``, ``C2 = (nu/2 M^-2 |u0|^2)^(1/(3 sigma))``,
    ``c1 = B C1 (2a C2)^(m+1)``, ``c2 = C2`` with ``M = M(2)`` and ``m = floor(2 sigma)``.
    """
    params.require_strict_index()
    if not u0_l2 > 0:
        raise ValueError(f"|u0|_L2 must be > 0, got {u0_l2}")
    M2 = m_bound(2.0)["M"] if M2 is None else M2
    m = params.sigma0_twice
    base = 0.5 * params.nu * M2**-2
    C1 = (base * u0_l2) ** (2.0 / 3.0)
    C2 = (base * u0_l2**2) ** (1.0 / (3.0 * params.sigma))
    B = infimum_B(m)["B"]
    c1 = B * C1 * (2.0 * params.a * C2) ** (m + 1)
    return EnvelopeParams(sigma0_twice=m, C1=float(C1), C2=float(C2), c1=float(c1), c2=float(C2),
                          B=float(B), M2=float(M2))


def _check_before(t, Tstar):
    t = np.asarray(t, dtype=float)
    if np.any(t >= Tstar) or np.any(t < 0):
        raise ValueError(f"need 0 <= t < Tstar={Tstar}")
    return t


def _log_envelope(t, Tstar, ep: EnvelopeParams, params: GevreyParams):
    gap = Tstar - t
    power = (ep.sigma0_twice + 1) / (3.0 * params.sigma) + 1.0 / 3.0
    return math.log(ep.c1) - power * np.log(gap) + params.a * ep.c2 * gap ** (-1.0 / (3.0 * params.sigma))


def envelope(t, Tstar: float, ep: EnvelopeParams, params: GevreyParams):
    """``c1 / (T*-t)^((m+1)/(3 sigma) + 1/3) * exp(a c2 / (T*-t)^(1/(3 sigma)))``."""
    t = _check_before(t, Tstar)
    out = np.exp(_log_envelope(t, Tstar, ep, params))
    return out if out.ndim else float(out)


def chain_lower_bound(t, Tstar: float, k: int, ep: EnvelopeParams, params: GevreyParams):
    """Lower bound ``C1/(T*-t)^(2/3) (C2/(T*-t)^(1/(3 sigma)))^k`` for ``|u(t)|^2`` in Hdot^(1+k/(2 sigma)).

    Only meaningful for ``k >= 2 sigma``, where the Fourier-L1 interpolation uses ``delta >= 2``.
    """
    if k < 2 * params.sigma:
        raise ValueError(f"chain bound needs k >= 2 sigma = {2 * params.sigma}, got {k}")
    gap = Tstar - _check_before(t, Tstar)
    out = ep.C1 * gap ** (-2.0 / 3.0) * (ep.C2 * gap ** (-1.0 / (3.0 * params.sigma))) ** k
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# envelope fit (diagnostic only)


@dataclass(frozen=True)
class ProfileFit:
    """Least-squares fit of ``log |u|`` to ``log scale + log envelope(t; T*)``. Diagnostic only."""

    status: str  # "ok" or "no-fit"
    Tstar: float
    scale: float
    residual: float
    samples: int
    note: str = "diagnostic only: smooth data carries no blow-up time"

    def as_dict(self) -> dict:
        return asdict(self)


def _no_fit(n, why):
    return ProfileFit("no-fit", math.nan, math.nan, math.nan, n, note=f"diagnostic only: {why}")


def fit_profile(times, norms, ep: EnvelopeParams, params: GevreyParams,
                horizon_span: tuple[float, float] = (1e-6, 1e3)) -> ProfileFit:
    """Fit ``T*`` and a scale factor; ``T* - t_last`` is searched on ``horizon_span`` times the data span.

    For each ``T*`` the optimal log-scale is the mean log-misfit, so the outer
    problem is one-dimensional: log-grid scan, then golden section.
    """
    t = np.asarray(times, dtype=float)
    y = np.log(np.asarray(norms, dtype=float))
    n = len(t)
    if n < 8:
        return _no_fit(n, "need at least 8 samples")
    if not np.all(np.isfinite(y)) or np.polyfit(t, y, 1)[0] <= 0 or y[-1] <= y[0]:
        return _no_fit(n, "norm is not growing")
    span = t[-1] - t[0]

    def cost(log_gap):
        Tstar = t[-1] + span * math.exp(log_gap)
        r = y - _log_envelope(t, Tstar, ep, params)
        r = r - r.mean()
        return float(r @ r)

    grid = np.linspace(math.log(horizon_span[0]), math.log(horizon_span[1]), 2001)
    costs = np.array([cost(g) for g in grid])
    i = int(np.argmin(costs))
    if 0 < i < len(grid) - 1:
        res = minimize_scalar(cost, method="golden", bracket=(grid[i - 1], grid[i], grid[i + 1]),
                              options={"xtol": 1e-14})
        best = res.x if res.fun <= costs[i] else grid[i]
    else:
        best = grid[i]
    Tstar = t[-1] + span * math.exp(best)
    log_scale = float(np.mean(y - _log_envelope(t, Tstar, ep, params)))
    return ProfileFit("ok", float(Tstar), math.exp(log_scale), math.sqrt(cost(best) / n), n)
