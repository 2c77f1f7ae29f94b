"""
Mild (integral) formulation ``u = exp(nu t Lap) u0 + B(u, u)`` with

    B(u, v)(t) = -int_0^t exp(nu (t - tau) Lap) P div(u (x) v)(tau) dtau.

The Duhamel integral is evaluated per mode with the integrand interpolated
piecewise-linearly between time nodes and the exponential kernel integrated
exactly on each interval, which removes the stiffness of the heat kernel
near ``tau = t``.  Picard iteration solves the fixed point on a window; the
smallness certificate ``4 c0 |y| < 1`` decides which windows are covered by
the contraction argument.  :func:`continue_until` chains certified windows,
and :func:`timestep_integrate` is an integrating-factor RK4 for long runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .norms import norm, norm_report
from .params import GevreyParams
from .spectral import NumericalFailure, bilinear_term, dealias, grid_of, leray_project

__all__ = [
    "K_DEFAULT",
    "Trajectory",
    "Certificate",
    "PicardTrace",
    "WindowPolicy",
    "interval_weights",
    "duhamel_path",
    "duhamel_bilinear",
    "heat_trajectory",
    "smallness_certificate",
    "certified_time",
    "picard_solve",
    "timestep_integrate",
    "continue_until",
]

log = logging.getLogger(__name__)

# Smoothing constant used by the certificate: twice the largest ratio
# measured by inequalities.calibrate_smoothing_constant() on its default
# fixtures (0.1786 -> 0.36).  tests/test_mild.py re-derives it.
K_DEFAULT = 0.36


@dataclass
class Trajectory:
    """Time-stamped spectral velocity states; ``states[i]`` is the field at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray
    params: GevreyParams
    status: str = "ok"
    failure_time: float | None = None
    windows: list = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states)
        if self.times.ndim != 1 or len(self.times) != len(self.states):
            raise ValueError("need one state per time")
        if len(self.times) and self.times[0] != 0.0:
            raise ValueError("trajectories start at t = 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @classmethod
    def constant(cls, u: np.ndarray, times, params: GevreyParams) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        return cls(times, np.broadcast_to(u, (len(times),) + u.shape), params)

    def norm_reports(self):
        return [norm_report(u, self.params) for u in self.states]

    def sup_norm(self, kind: str = "gevrey", s: float = 1.0) -> float:
        return max(norm(u, kind, self.params, s=s) for u in self.states)


def _phi0(x):
    # (1 - exp(-x)) / x
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0
    out[nz] = -np.expm1(-x[nz]) / x[nz]
    return out


_PHI1_SERIES = [(-1) ** m * (m + 1) / math.factorial(m + 2) for m in range(14)]


def _phi1(x):
    # (1 - exp(-x) (1 + x)) / x^2, series below 0.1 to avoid cancellation
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 0.1
    xs = x[small]
    acc = np.zeros_like(xs)
    for c in reversed(_PHI1_SERIES):
        acc = acc * xs + c
    out[small] = acc
    xl = x[~small]
    out[~small] = (1.0 - np.exp(-xl) * (1.0 + xl)) / xl**2
    return out


def interval_weights(lam: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``(w0, w1)`` with

    ``int_a^b exp(-lam (b - tau)) g(tau) dtau = w0 g(a) + w1 g(b)``

    exactly for ``g`` linear on ``[a, b]``, ``h = b - a``.
    """
    x = lam * h
    e1 = h * _phi1(x)
    return e1, h * _phi0(x) - e1


def _shared_nodes(u: Trajectory, v: Trajectory) -> np.ndarray:
    if len(u.times) != len(v.times) or not np.array_equal(u.times, v.times):
        raise ValueError("Duhamel operator needs trajectories on the same time nodes")
    if u.params.nu != v.params.nu:
        raise ValueError("trajectories carry different viscosities")
    return u.times


def _forcing(u_state, v_state):
    return -bilinear_term(u_state, v_state)


def _forcing_at(u: Trajectory, v: Trajectory):
    """Node-indexed forcing; evaluated once when both trajectories are time-constant views."""
    if u.states.strides[0] == 0 and v.states.strides[0] == 0:
        g = _forcing(u.states[0], v.states[0])
        return lambda j: g
    return lambda j: _forcing(u.states[j], v.states[j])


def duhamel_path(u: Trajectory, v: Trajectory) -> np.ndarray:
    """``B(u, v)`` at every node of the shared time grid."""
    times = _shared_nodes(u, v)
    lam = u.params.nu * grid_of(u.states[0]).k2
    out = np.zeros(u.states.shape, dtype=complex)
    forcing = _forcing_at(u, v)
    g_prev = forcing(0)
    cache = {}
    for j in range(1, len(times)):
        h = times[j] - times[j - 1]
        key = round(h, 15)
        if key not in cache:
            cache[key] = (np.exp(-lam * h),) + interval_weights(lam, h)
        decay, w0, w1 = cache[key]
        g = forcing(j)
        out[j] = decay * out[j - 1] + w0 * g_prev + w1 * g
        g_prev = g
    return np.array([leray_project(dealias(b)) for b in out])


def duhamel_bilinear(u: Trajectory, v: Trajectory, t: float) -> np.ndarray:
    """``B(u, v)(t)`` for any ``0 <= t <= times[-1]``."""
    times = _shared_nodes(u, v)
    if t < 0 or t > times[-1] * (1 + 1e-14):
        raise ValueError(f"t={t} outside [0, {times[-1]}]")
    lam = u.params.nu * grid_of(u.states[0]).k2
    acc = np.zeros(u.states.shape[1:], dtype=complex)
    forcing = _forcing_at(u, v)
    g_prev = forcing(0)
    for j in range(1, len(times)):
        a, b = times[j - 1], times[j]
        if a >= t:
            break
        g_next = forcing(j)
        if b > t:
            theta = (t - a) / (b - a)
            g_next = g_prev + theta * (g_next - g_prev)
            b = t
        w0, w1 = interval_weights(lam, b - a)
        acc = np.exp(-lam * (b - a)) * acc + w0 * g_prev + w1 * g_next
        g_prev = g_next
    return leray_project(dealias(acc))


def heat_trajectory(u0: np.ndarray, times, params: GevreyParams) -> Trajectory:
    times = np.asarray(times, dtype=float)
    k2 = grid_of(u0).k2
    states = np.exp(-params.nu * times[:, None, None, None, None] * k2) * u0
    return Trajectory(times, states, params)


@dataclass(frozen=True)
class Certificate:
    """Contraction data for one window: ``holds`` iff ``4 c0 |y| < 1``."""

    T: float
    c0: float
    y_norm: float
    product: float
    holds: bool
    K: float

    def as_dict(self) -> dict:
        return {"T": self.T, "c0": self.c0, "y_norm": self.y_norm,
                "product": self.product, "holds": self.holds, "K": self.K}


def _c0(T: float, params: GevreyParams, K: float) -> float:
    nu = params.nu
    scaling = nu**-0.75 * T**0.25 + nu**-0.25 * T**0.75
    return K * scaling * math.sqrt(2.0 * (math.exp(2 * params.a) + 1.0))


def smallness_certificate(u0: np.ndarray, T: float, params: GevreyParams,
                          K: float | None = None) -> Certificate:
    """``c0`` from the two smoothing estimates combined through the norm equivalence.

    ``|y|`` is the H^1_{a,sigma} norm of ``u0``: the heat semigroup does not
    increase it, so it is also the sup over the window.
    """
    if T <= 0:
        raise ValueError(f"window length must be > 0, got {T}")
    K = K_DEFAULT if K is None else K
    c0 = _c0(T, params, K)
    y = norm(u0, "gevrey", params, s=1.0)
    prod = 4.0 * c0 * y
    return Certificate(T=T, c0=c0, y_norm=y, product=prod, holds=prod < 1.0, K=K)


def certified_time(u0: np.ndarray, params: GevreyParams, K: float | None = None,
                   T_max: float = 1e6) -> float:
    """Largest ``T <= T_max`` with ``4 c0(T) |y| <= 1`` (bisection; ``c0`` increases with ``T``)."""
    K = K_DEFAULT if K is None else K
    y = norm(u0, "gevrey", params, s=1.0)
    if y == 0.0 or 4.0 * _c0(T_max, params, K) * y < 1.0:
        return T_max

    def excess(logT):
        return math.log(4.0 * _c0(math.exp(logT), params, K) * y)

    lo = math.log(T_max) - 200.0
    if excess(lo) >= 0:
        return 0.0
    return math.exp(brentq(excess, lo, math.log(T_max), xtol=1e-13, rtol=1e-13))


@dataclass
class PicardTrace:
    iterate_norms: list
    deltas: list
    converged: bool
    certificate: Certificate
    status: str = "converged"
    residual: float = float("nan")
    tol: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.deltas)

    @property
    def bound_holds(self) -> bool:
        """Every iterate obeys ``|x_n| <= 2 |y|`` (sup over nodes)."""
        y = self.iterate_norms[0]
        return all(x <= 2.0 * y * (1 + 1e-12) for x in self.iterate_norms)

    def contraction_factors(self, floor: float | None = None) -> np.ndarray:
        """Ratios of successive deltas while both stay above the rounding floor."""
        d = np.asarray(self.deltas)
        if floor is None:
            floor = 1e-13 * max(self.iterate_norms[0], 1e-300)
        ok = (d[:-1] > floor) & (d[1:] > floor)
        return d[1:][ok] / d[:-1][ok]

    def as_dict(self) -> dict:
        return {
            "iterate_norms": list(map(float, self.iterate_norms)),
            "deltas": list(map(float, self.deltas)),
            "converged": self.converged,
            "status": self.status,
            "residual": float(self.residual),
            "tol": self.tol,
            "bound_holds": self.bound_holds,
            "certificate": self.certificate.as_dict(),
        }


def _sup_norm(states, params) -> float:
    return max(norm(u, "gevrey", params, s=1.0) for u in states)


def picard_solve(u0: np.ndarray, T: float, params: GevreyParams, nodes: int = 33,
                 tol: float = 1e-12, max_iter: int = 60,
                 K: float | None = None) -> tuple[Trajectory, PicardTrace]:
    """Iterate ``x <- y + B(x, x)`` on ``nodes`` uniform times in ``[0, T]``.

    Stops when the sup-over-nodes H^1_{a,sigma} change drops to ``tol``.
    Running out of iterations is reported through ``trace.status``
    (``"diverged"``), not raised.
    """
    if nodes < 2:
        raise ValueError("need at least two time nodes")
    times = np.linspace(0.0, T, nodes)
    y = heat_trajectory(u0, times, params)
    cert = smallness_certificate(u0, T, params, K)
    x = y
    trace = PicardTrace([_sup_norm(y.states, params)], [], False, cert, status="diverged", tol=tol)
    ceiling = 1e8 * max(trace.iterate_norms[0], 1.0)
    try:
        for _ in range(max_iter):
            new = Trajectory(times, y.states + duhamel_path(x, x), params)
            delta = _sup_norm(new.states - x.states, params)
            trace.deltas.append(delta)
            trace.iterate_norms.append(_sup_norm(new.states, params))
            x = new
            if not math.isfinite(delta) or trace.iterate_norms[-1] > ceiling:
                break
            if delta <= tol:
                trace.converged = True
                trace.status = "converged"
                break
    except NumericalFailure as exc:
        log.warning("Picard iteration failed: %s", exc)
        trace.status = "failed"
    if trace.converged:
        trace.residual = _sup_norm(x.states - y.states - duhamel_path(x, x), params)
    x.status = trace.status
    return x, trace


def _lawson_rk4_step(u, h, nu, k2):
    half = np.exp(-nu * k2 * h / 2)
    full = half * half
    k1 = _forcing(u, u)
    k2_ = _forcing(half * (u + 0.5 * h * k1), half * (u + 0.5 * h * k1))
    mid = half * u + 0.5 * h * k2_
    k3 = _forcing(mid, mid)
    end = full * u + h * half * k3
    k4 = _forcing(end, end)
    out = full * u + (h / 6.0) * (full * k1 + 2.0 * half * (k2_ + k3) + k4)
    return leray_project(dealias(out))


def timestep_integrate(u0: np.ndarray, T: float, dt: float, params: GevreyParams,
                       save_every: int = 1) -> Trajectory:
    """Integrating-factor RK4 in ``v = exp(nu t |xi|^2) uhat`` with ``ceil(T/dt)`` equal steps.

    A non-finite state truncates the trajectory and sets ``status="failed"``.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    k2 = grid_of(u0).k2
    u = leray_project(dealias(u0))
    times, states = [0.0], [u]
    if T == 0:
        return Trajectory(times, states, params)
    nsteps = max(1, math.ceil(T / dt - 1e-9))
    h = T / nsteps
    status, failed_at = "ok", None
    for n in range(1, nsteps + 1):
        try:
            u = _lawson_rk4_step(u, h, params.nu, k2)
            if not np.all(np.isfinite(u)):
                raise NumericalFailure("non-finite state")
        except NumericalFailure:
            status, failed_at = "failed", n * h
            break
        if n % save_every == 0 or n == nsteps:
            times.append(n * h)
            states.append(u)
    return Trajectory(times, np.array(states), params, status=status, failure_time=failed_at)


@dataclass(frozen=True)
class WindowPolicy:
    """How :func:`continue_until` sizes windows.

    Each window is ``safety * certified_time`` capped by ``max_window``;
    continuation stops once that falls below ``floor``.
    """

    max_window: float = 1.0
    floor: float = 1e-6
    safety: float = 0.9
    nodes: int = 33
    tol: float = 1e-12
    max_iter: int = 60
    max_windows: int = 100_000
    K: float | None = None
    keep: str = "endpoints"  # or "all"
    threshold_kind: str = "gevrey"


def continue_until(u0: np.ndarray, params: GevreyParams, time_budget: float | None = None,
                   norm_threshold: float | None = None,
                   policy: WindowPolicy | None = None) -> Trajectory:
    """Chain certified Picard windows, restarting from each window's endpoint.

    Stops at the time budget, when the norm ``policy.threshold_kind`` crosses
    ``norm_threshold`` (either direction), or with status
    ``"uncertified-continuation"`` when the certified window falls below
    ``policy.floor``.
    """
    policy = policy or WindowPolicy()
    if time_budget is None and norm_threshold is None:
        raise ValueError("give a time budget, a norm threshold, or both")
    budget = math.inf if time_budget is None else float(time_budget)
    if budget < 0:
        raise ValueError("time budget must be >= 0")

    def level(u):
        return norm(u, policy.threshold_kind, params, s=1.0)

    side = None if norm_threshold is None else level(u0) > norm_threshold
    t, u = 0.0, u0
    times, states, windows = [0.0], [u0], []
    status = "budget"
    while t < budget * (1 - 1e-14):
        if len(windows) >= policy.max_windows:
            status = "window-limit"
            break
        remaining = budget - t
        w = min(policy.safety * certified_time(u, params, policy.K), policy.max_window, remaining)
        if w < policy.floor and w < remaining:
            status = "uncertified-continuation"
            break
        traj, trace = picard_solve(u, w, params, nodes=policy.nodes, tol=policy.tol,
                                   max_iter=policy.max_iter, K=policy.K)
        windows.append({"t0": t, "trace": trace})
        if not trace.converged:
            status = f"picard-{trace.status}"
            break
        crossed = False
        last = len(traj) - 1
        for i in range(1, last + 1):
            crossed = side is not None and (level(traj.states[i]) > norm_threshold) != side
            if crossed or i == last or policy.keep == "all":
                times.append(t + traj.times[i])
                states.append(traj.states[i])
            if crossed:
                break
        if crossed:
            status = "threshold"
            break
        t += w
        u = traj.final
    out = Trajectory(times, np.array(states), params, status=status)
    out.windows = windows
    return out
