"""
Executable versions of the functional inequalities behind the well-posedness
and blow-up estimates.

Each ``check_*`` returns an :class:`InequalityVerdict` (LHS, RHS, ratio and a
pass flag with tolerance ``RATIO_TOL``).  Pointwise checks accept batches and
report the worst element.  Estimates whose constant is only known to exist
are checked against a caller-supplied constant; the raw ratio with constant 1
is kept in ``witness["empirical_constant"]`` so sweeps can track it.

Quadratic products in these checks are exact lattice convolutions (either
:func:`~gevrey_ns.spectral.convolve_oracle` or a zero-padded transform), so
no dealiasing enters the ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .norms import coefficient_magnitude, fourier_l1_weighted, norm
from .params import GevreyParams
from .spectral import _same_grid, convolve_oracle, make_grid, product, random_field

__all__ = [
    "RATIO_TOL",
    "DEFAULT_CAP",
    "InequalityVerdict",
    "SweepSummary",
    "exact_product",
    "check_product_sobolev",
    "cdelta",
    "cdelta_limit",
    "m_bound",
    "check_l1_interpolation",
    "check_m_bound",
    "check_gevrey_product",
    "check_triangle_gevrey",
    "check_elementary",
    "embedding_exponent",
    "embedding_constants",
    "check_embedding",
    "check_l2_product",
    "check_norm_equivalence",
    "check_bilinear_smoothing",
    "smoothing_fixture",
    "smoothing_exponents",
    "calibrate_smoothing_constant",
    "SUITES",
    "run_suite",
]

RATIO_TOL = 1e-9
DEFAULT_CAP = 64.0


@dataclass
class InequalityVerdict:
    name: str
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    witness: dict = field(default_factory=dict)

    @classmethod
    def from_sides(cls, name: str, lhs: float, rhs: float, **witness) -> "InequalityVerdict":
        lhs, rhs = float(lhs), float(rhs)
        if lhs == 0.0:
            ratio = 0.0
        elif rhs == 0.0:
            ratio = math.inf
        else:
            ratio = lhs / rhs
        return cls(name, lhs, rhs, ratio, bool(ratio <= 1.0 + RATIO_TOL), witness)

    @classmethod
    def from_arrays(cls, name: str, lhs, rhs, **witness) -> "InequalityVerdict":
        """Worst element of a batch of pointwise comparisons."""
        lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(lhs == 0, 0.0, np.where(rhs == 0, np.inf, lhs / rhs))
        i = int(np.argmax(ratio))
        witness = dict(witness, index=i, count=int(lhs.size))
        return cls.from_sides(name, lhs.flat[i], rhs.flat[i], **witness)

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "pass": self.passed, "witness": self.witness}


def exact_product(f: np.ndarray, g: np.ndarray, method: str = "transform") -> np.ndarray:
    """Full product of two scalar fields on the ``2N`` grid."""
    if method == "oracle":
        return convolve_oracle(f, g, full=True)
    if method == "transform":
        return product(f, g, exact=True)
    raise ValueError(f"unknown product method {method!r}")


def _require_scalar(*fs):
    for f in fs:
        if np.ndim(f) != 3:
            raise ValueError("this check takes scalar fields (N, N, N)")


def check_product_sobolev(f, g, s: float, t: float, form: str = "symmetric",
                          C: float = 1.0) -> InequalityVerdict:
    """``|fg|_{Hdot^{s+t-3/2}}`` against the two-sided (symmetric) or one-sided (asymmetric) product law."""
    _require_scalar(f, g)
    _same_grid(f, g)
    if not (s < 1.5 and s + t > 0):
        raise ValueError(f"product law needs s < 3/2 and s + t > 0, got s={s}, t={t}")
    if form == "asymmetric" and not t < 1.5:
        raise ValueError(f"asymmetric form also needs t < 3/2, got t={t}")
    if form not in ("symmetric", "asymmetric"):
        raise ValueError(f"unknown form {form!r}")
    lhs = norm(exact_product(f, g), "hs_dot", s=s + t - 1.5)
    raw = norm(f, "hs_dot", s=s) * norm(g, "hs_dot", s=t)
    if form == "symmetric":
        raw += norm(f, "hs_dot", s=t) * norm(g, "hs_dot", s=s)
    return InequalityVerdict.from_sides(
        "product_sobolev", lhs, C * raw, s=s, t=t, form=form, C=C,
        empirical_constant=lhs / raw if raw else 0.0)


def cdelta(delta: float) -> float:
    """Interpolation constant of the Fourier-L1 bound; needs ``delta > 3/2``."""
    if not delta > 1.5:
        raise ValueError(f"C_delta needs delta > 3/2, got {delta}")
    x = 2.0 * delta / 3.0 - 1.0
    e = 3.0 / (4.0 * delta)
    return 2.0 * math.sqrt(math.pi / 3.0) * (x**e + x ** (-1.0 + e))


def cdelta_limit() -> float:
    """``lim C_delta`` as ``delta -> inf``: the first term tends to 1, the second to 0."""
    return 2.0 * math.sqrt(math.pi / 3.0)


def _cdelta_tail_bound(delta_max: float) -> float:
    # for delta >= delta_max >= 3e/2: x**(3/4delta) <= (2delta/3)**(3/4delta), decreasing,
    # and x**(-1 + 3/4delta) <= x**(-1/2), decreasing
    if delta_max < 1.5 * math.e:
        raise ValueError("tail bound needs delta_max >= 3e/2")
    y = 2.0 * delta_max / 3.0
    return cdelta_limit() * (y ** (3.0 / (4.0 * delta_max)) + (y - 1.0) ** -0.5)


def m_bound(delta0: float, delta_max: float = 100.0, samples: int = 20001) -> dict:
    """Uniform bound ``M(delta0) >= C_delta`` for all ``delta >= delta0``.

    Sup of ``C_delta`` over a geometric grid on ``[delta0, delta_max]`` (refined
    around the maximiser), combined with a monotone tail bound beyond
    ``delta_max``.
    """
    if not delta0 > 1.5:
        raise ValueError(f"M(delta0) needs delta0 > 3/2, got {delta0}")
    delta_max = max(delta_max, 1.5 * math.e, 2 * delta0)
    grid = np.geomspace(delta0, delta_max, samples)
    vals = np.array([cdelta(d) for d in grid])
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, samples - 1)]
    fine = np.linspace(lo, hi, 2001)
    sup = max(vals.max(), max(cdelta(d) for d in fine))
    tail = _cdelta_tail_bound(delta_max)
    return {"M": max(sup, tail), "grid_sup": sup, "argmax": float(fine[np.argmax([cdelta(d) for d in fine])]),
            "tail_bound": tail, "delta_max": delta_max}


def check_l1_interpolation(f, delta: float) -> InequalityVerdict:
    """``sum |fhat| <= C_delta |f|_{L2}^{1-3/(2delta)} |f|_{Hdot^delta}^{3/(2delta)}`` for mean-free ``f``."""
    c = cdelta(delta)
    if np.any(np.asarray(f)[..., 0, 0, 0] != 0):
        raise ValueError("L1 interpolation check needs a mean-free field")
    lhs = coefficient_magnitude(f).sum()
    theta = 3.0 / (2.0 * delta)
    l2 = norm(f, "l2")
    rhs = c * l2 ** (1 - theta) * norm(f, "hs_dot", s=delta) ** theta if l2 else 0.0
    return InequalityVerdict.from_sides("l1_interpolation", lhs, rhs, delta=delta, C_delta=c)


def check_m_bound(delta0: float, deltas) -> InequalityVerdict:
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if np.any(deltas < delta0):
        raise ValueError("every sampled delta must be >= delta0")
    mb = m_bound(delta0, delta_max=max(100.0, float(deltas.max())))
    worst = max(cdelta(d) for d in deltas)
    return InequalityVerdict.from_sides("m_bound", worst, mb["M"], delta0=delta0, M=mb["M"],
                                        samples=int(deltas.size))


def check_gevrey_product(f, g, params: GevreyParams, method: str = "oracle") -> InequalityVerdict:
    """``|fg|_{Hdot^1_{a,sigma}} <= 16 (L1w(f) |g| + L1w(g) |f|)`` with ``L1w`` at radius ``a/sigma``.

    Vector fields are checked component by component; the worst pair is reported.
    """
    grid = _same_grid(f, g)
    if method == "oracle" and grid.N > 16:
        raise ValueError("oracle product limited to N <= 16; pass method='transform'")
    if np.ndim(f) == 4 or np.ndim(g) == 4:
        fs = f if np.ndim(f) == 4 else [f]
        gs = g if np.ndim(g) == 4 else [g]
        worst = [check_gevrey_product(fi, gj, params, method) for fi in fs for gj in gs]
        return max(worst, key=lambda v: v.ratio)
    lhs = norm(exact_product(f, g, method), "gevrey_dot", params, s=1.0)
    r = params.a / params.sigma
    rhs = 16.0 * (fourier_l1_weighted(f, r, params.sigma) * norm(g, "gevrey_dot", params, s=1.0)
                  + fourier_l1_weighted(g, r, params.sigma) * norm(f, "gevrey_dot", params, s=1.0))
    return InequalityVerdict.from_sides("gevrey_product", lhs, rhs, a=params.a, sigma=params.sigma,
                                        method=method)


def check_triangle_gevrey(xi, eta, sigma: float) -> InequalityVerdict:
    """``|xi|^(1/s) <= max(|xi-eta|,|eta|)^(1/s) + (1/s) min(|xi-eta|,|eta|)^(1/s)``, batched over leading axes."""
    if sigma < 1:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    p = 1.0 / sigma
    d = np.linalg.norm(xi - eta, axis=-1)
    e = np.linalg.norm(eta, axis=-1)
    lhs = np.linalg.norm(xi, axis=-1) ** p
    rhs = np.maximum(d, e) ** p + p * np.minimum(d, e) ** p
    return InequalityVerdict.from_arrays("triangle_gevrey", lhs, rhs, sigma=sigma)


def check_elementary(b, theta) -> InequalityVerdict:
    """``(1+b)^theta <= 1 + theta b^theta`` on ``[0,1]^2``; ``0 * b**0`` counts as 0."""
    b = np.asarray(b, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any((b < 0) | (b > 1) | (theta < 0) | (theta > 1)):
        raise ValueError("b and theta must lie in [0, 1]")
    lhs = (1.0 + b) ** theta
    rhs = 1.0 + np.where(theta == 0, 0.0, theta * b**theta)
    return InequalityVerdict.from_arrays("elementary", lhs, rhs)


def embedding_exponent(s: float, sigma: float) -> int:
    """Largest integer ``k0`` with ``k0 / (2 sigma) <= s - 1``."""
    if s < 1:
        raise ValueError(f"embedding needs s >= 1, got {s}")
    return int(math.floor(2.0 * sigma * (s - 1.0) + 1e-12))


def embedding_constants(s: float, a: float, sigma: float) -> dict:
    """Squared embedding constants for ``|f|_{Hdot^s} <= c |f|_{Hdot^1_{a,sigma}}``.

    ``chain``: what the termwise chain actually gives, ``(k0+1)! (2a+1) / (2a)^(k0+1)``.
    ``doubled_chain``: twice that, the value used for verdicts.
    ``factorial_form``: ``2 (k0+1)! / (2a)^k0``, reported for comparison only.
    """
    k0 = embedding_exponent(s, sigma)
    chain = math.factorial(k0 + 1) * (2 * a + 1) / (2 * a) ** (k0 + 1)
    return {"k0": k0, "chain": chain, "doubled_chain": 2 * chain,
            "factorial_form": 2 * math.factorial(k0 + 1) / (2 * a) ** k0}


def check_embedding(f, s: float, params: GevreyParams) -> InequalityVerdict:
    consts = embedding_constants(s, params.a, params.sigma)
    lhs = norm(f, "hs_dot", s=s)
    rhs = math.sqrt(consts["doubled_chain"]) * norm(f, "gevrey_dot", params, s=1.0)
    factorial_rhs = math.sqrt(consts["factorial_form"]) * norm(f, "gevrey_dot", params, s=1.0)
    return InequalityVerdict.from_sides(
        "embedding", lhs, rhs, s=s, a=params.a, sigma=params.sigma, k0=consts["k0"],
        c2=consts["doubled_chain"], factorial_form_c2=consts["factorial_form"],
        factorial_form_ratio=lhs / factorial_rhs if factorial_rhs else 0.0)


def check_l2_product(f, g, params: GevreyParams, cap: float = DEFAULT_CAP) -> InequalityVerdict:
    """``|fg|_{L2} <= C (|f|_{Hdot^1_{a,sigma}} |g|_{L2} + |g|_{Hdot^1_{a,sigma}} |f|_{L2})`` with ``C = cap``."""
    _require_scalar(f, g)
    _same_grid(f, g)
    lhs = norm(exact_product(f, g), "l2")
    raw = (norm(f, "gevrey_dot", params, s=1.0) * norm(g, "l2")
           + norm(g, "gevrey_dot", params, s=1.0) * norm(f, "l2"))
    return InequalityVerdict.from_sides("l2_product", lhs, cap * raw, a=params.a, sigma=params.sigma,
                                        cap=cap, empirical_constant=lhs / raw if raw else 0.0)


def check_norm_equivalence(f, params: GevreyParams) -> tuple[InequalityVerdict, InequalityVerdict]:
    """Both halves of ``|f|^2_{H1as} <= 2(e^2a+1)(|f|^2_L2 + |f|^2_{Hdot1as}) <= 4(e^2a+1)|f|^2_{H1as}``."""
    full = norm(f, "gevrey", params, s=1.0) ** 2
    split = norm(f, "l2") ** 2 + norm(f, "gevrey_dot", params, s=1.0) ** 2
    k = math.exp(2 * params.a) + 1.0
    wit = {"a": params.a, "sigma": params.sigma}
    return (InequalityVerdict.from_sides("norm_equivalence_upper", full, 2 * k * split, **wit),
            InequalityVerdict.from_sides("norm_equivalence_lower", 2 * k * split, 4 * k * full, **wit))


def check_bilinear_smoothing(u, v, params: GevreyParams, T: float, nodes: int = 9,
                             c: float = 1.0) -> tuple[InequalityVerdict, InequalityVerdict]:
    """Smoothing estimates for ``B(u, v)(T)`` with time-constant ``u``, ``v``.

    Returns the Hdot^1_{a,sigma} verdict (scale ``nu^-3/4 T^1/4``) and the L2
    verdict (scale ``nu^-1/4 T^3/4``), both with constant ``c``.
    """
    from .mild import Trajectory, duhamel_bilinear

    if T <= 0:
        raise ValueError(f"T must be > 0, got {T}")
    times = np.linspace(0.0, T, nodes)
    B = duhamel_bilinear(Trajectory.constant(u, times, params), Trajectory.constant(v, times, params), T)
    uv = norm(u, "gevrey_dot", params, s=1.0) * norm(v, "gevrey_dot", params, s=1.0)
    nu = params.nu
    b_h1 = norm(B, "gevrey_dot", params, s=1.0)
    b_l2 = norm(B, "l2")
    raw_h1 = nu**-0.75 * T**0.25 * uv
    raw_l2 = nu**-0.25 * T**0.75 * uv
    wit = {"T": T, "nu": nu, "a": params.a, "sigma": params.sigma, "c": c}
    return (InequalityVerdict.from_sides("bilinear_smoothing_h1", b_h1, c * raw_h1,
                                         empirical_constant=b_h1 / raw_h1 if raw_h1 else 0.0, **wit),
            InequalityVerdict.from_sides("bilinear_smoothing_l2", b_l2, c * raw_l2,
                                         empirical_constant=b_l2 / raw_l2 if raw_l2 else 0.0, **wit))


def calibrate_smoothing_constant(N: int = 16, seeds=range(6), Ts=(1e-3, 1e-2, 1e-1, 1.0),
                                 params: GevreyParams | None = None) -> float:
    """Largest smoothing ratio over random solenoidal fixtures, both estimates, all ``T``."""
    from .spectral import random_divergence_free_field

    params = params or GevreyParams(a=0.1, sigma=1.5, nu=1.0)
    worst = 0.0
    for seed in seeds:
        slope = (-3.0, -2.0, -1.0)[seed % 3]
        u = random_divergence_free_field(N, slope, (1, N / 3), seed)
        for T in Ts:
            for v in check_bilinear_smoothing(u, u, params, T):
                worst = max(worst, v.witness["empirical_constant"])
    return worst


def smoothing_fixture(N: int = 128, seed: int = 1, carrier: float = 10.0) -> np.ndarray:
    """Taylor-Green carrier plus a unit-L2 solenoidal field with ``|xi|**-2`` coefficients.

    The carrier's self-interaction is a pure gradient, so the projected forcing
    comes from carrier/rough cross terms and its shell spectrum stays nearly
    flat across the band: the regime where both smoothing estimates are sharp in ``T``.
    """
    from .spectral import random_divergence_free_field, taylor_green

    rough = random_divergence_free_field(N, -2.0, (1, N / 3), seed)
    return carrier * taylor_green(N) + rough / norm(rough, "l2")


def smoothing_exponents(u, params: GevreyParams, Ts=None) -> dict:
    """Least-squares slopes of ``log |B(u,u)(T)|`` against ``log T`` for both norms.

    ``u`` is held constant in time, so the forcing is constant and the
    piecewise-linear Duhamel rule is exact on any node set.
    """
    from .mild import Trajectory, duhamel_path

    Ts = np.geomspace(1e-2, 1.0, 9) if Ts is None else np.asarray(Ts, dtype=float)
    traj = Trajectory.constant(u, np.concatenate([[0.0], Ts]), params)
    Bs = duhamel_path(traj, traj)[1:]
    h1 = [norm(B, "gevrey_dot", params, s=1.0) for B in Bs]
    l2 = [norm(B, "l2") for B in Bs]
    logT = np.log(Ts)
    return {"T": Ts.tolist(), "h1": h1, "l2": l2,
            "h1_exponent": float(np.polyfit(logT, np.log(h1), 1)[0]),
            "l2_exponent": float(np.polyfit(logT, np.log(l2), 1)[0])}


# ---------------------------------------------------------------------------
# randomized sweeps


@dataclass
class SweepSummary:
    name: str
    N: int
    trials: int
    max_ratio: float
    passed: bool
    worst: dict
    empirical_constant: float | None = None

    def as_dict(self) -> dict:
        return {"name": self.name, "N": self.N, "trials": self.trials, "max_ratio": self.max_ratio,
                "pass": self.passed, "empirical_constant": self.empirical_constant,
                "worst": self.worst}


def _trial_field(N: int, seed: int, band=None, sparse: bool = True) -> np.ndarray:
    rng = np.random.default_rng([seed, 1])
    slope = rng.uniform(-3.0, 0.5)
    kmax = band[1] if band else rng.uniform(1.5, N / 3)
    n_modes = int(rng.integers(1, 5)) if sparse and rng.random() < 0.25 else None
    return random_field(N, slope, (1.0, kmax), seed, n_modes=n_modes)


def _pick_params(seed: int, a_choices=(0.1, 0.5, 1.0, 2.0), sigma_choices=(1.0, 1.2, 1.5, 2.0, 3.0)):
    rng = np.random.default_rng([seed, 2])
    return GevreyParams(a=float(rng.choice(a_choices)), sigma=float(rng.choice(sigma_choices)))


def _summarize(name, N, verdicts, cap=None) -> SweepSummary:
    worst = max(verdicts, key=lambda v: v.ratio)
    if cap is None:
        return SweepSummary(name, N, len(verdicts), worst.ratio, all(v.passed for v in verdicts),
                            worst.as_dict())
    emp = max(v.witness["empirical_constant"] for v in verdicts)
    return SweepSummary(name, N, len(verdicts), worst.ratio, bool(emp <= cap), worst.as_dict(), emp)


_STABLE_BAND = (1.0, 2.5)


def _suite_product_sobolev(N, trials, seed0, cap=DEFAULT_CAP):
    out = []
    for i in range(trials):
        seed = seed0 + i
        f = _trial_field(N, 2 * seed, band=_STABLE_BAND)
        g = _trial_field(N, 2 * seed + 1, band=_STABLE_BAND)
        v = check_product_sobolev(f, g, 1.0, 1.0, form="asymmetric", C=cap)
        v.witness["seed"] = seed
        out.append(v)
    return _summarize("product_sobolev", N, out, cap=cap)


def _suite_l2_product(N, trials, seed0, cap=DEFAULT_CAP):
    out = []
    for i in range(trials):
        seed = seed0 + i
        f = _trial_field(N, 2 * seed, band=_STABLE_BAND)
        g = _trial_field(N, 2 * seed + 1, band=_STABLE_BAND)
        v = check_l2_product(f, g, _pick_params(seed), cap=cap)
        v.witness["seed"] = seed
        out.append(v)
    return _summarize("l2_product", N, out, cap=cap)


def _suite_l1_interpolation(N, trials, seed0):
    deltas = (1.6, 2.0, 3.0, 5.0)
    out = []
    for i in range(trials):
        seed = seed0 + i
        v = check_l1_interpolation(_trial_field(N, seed), deltas[i % 4])
        v.witness["seed"] = seed
        out.append(v)
    return _summarize("l1_interpolation", N, out)


def _suite_m_bound(N, trials, seed0):
    rng = np.random.default_rng(seed0)
    v = check_m_bound(2.0, 2.0 + rng.exponential(20.0, size=trials))
    return _summarize("m_bound", N, [v])


def _suite_gevrey_product(N, trials, seed0):
    combos = [(a, s) for a in (0.1, 1.0) for s in (1.0, 1.5, 2.0)]
    out = []
    for i in range(trials):
        seed = seed0 + i
        a, sigma = combos[i % len(combos)]
        f = _trial_field(N, 2 * seed)
        g = _trial_field(N, 2 * seed + 1)
        v = check_gevrey_product(f, g, GevreyParams(a=a, sigma=sigma),
                                 method="oracle" if N <= 8 else "transform")
        v.witness["seed"] = seed
        out.append(v)
    return _summarize("gevrey_product", N, out)


def _suite_triangle(N, trials, seed0, batch=1000):
    sigmas = (1.0, 1.2, 2.0, 3.0)
    half = N // 2
    out = []
    for i in range(trials):
        rng = np.random.default_rng([seed0 + i, 3])
        xi = rng.integers(-half, half, size=(batch, 3))
        eta = rng.integers(-half, half, size=(batch, 3))
        v = check_triangle_gevrey(xi, eta, sigmas[i % 4])
        v.witness["seed"] = seed0 + i
        out.append(v)
    return _summarize("triangle_gevrey", N, out)


def _suite_elementary(N, trials, seed0, batch=1000):
    out = []
    for i in range(trials):
        rng = np.random.default_rng([seed0 + i, 4])
        v = check_elementary(rng.random(batch), rng.random(batch))
        v.witness["seed"] = seed0 + i
        out.append(v)
    return _summarize("elementary", N, out)


def _suite_embedding(N, trials, seed0):
    out = []
    for i in range(trials):
        seed = seed0 + i
        rng = np.random.default_rng([seed, 5])
        s = float(rng.uniform(1.0, 3.0))
        v = check_embedding(_trial_field(N, seed), s, _pick_params(seed))
        v.witness["seed"] = seed
        out.append(v)
    return _summarize("embedding", N, out)


def _suite_norm_equivalence(N, trials, seed0):
    out = []
    for i in range(trials):
        seed = seed0 + i
        params = GevreyParams(a=(0.1, 1.0, 2.0)[i % 3], sigma=_pick_params(seed).sigma)
        for v in check_norm_equivalence(_trial_field(N, seed), params):
            v.witness["seed"] = seed
            out.append(v)
    summary = _summarize("norm_equivalence", N, out)
    summary.trials = trials
    return summary


SUITES = {
    "product_sobolev": _suite_product_sobolev,
    "l1_interpolation": _suite_l1_interpolation,
    "m_bound": _suite_m_bound,
    "gevrey_product": _suite_gevrey_product,
    "triangle_gevrey": _suite_triangle,
    "elementary": _suite_elementary,
    "embedding": _suite_embedding,
    "l2_product": _suite_l2_product,
    "norm_equivalence": _suite_norm_equivalence,
}


def run_suite(name: str, N: int, trials: int, seed: int = 0) -> SweepSummary:
    """Run one named randomized sweep; every trial is reproducible from ``seed + i``."""
    make_grid(N)
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return suite(N, trials, seed)
