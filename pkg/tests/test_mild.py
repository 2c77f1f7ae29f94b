import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from gevrey_ns.inequalities import calibrate_smoothing_constant
from gevrey_ns.mild import (K_DEFAULT, Trajectory, WindowPolicy, certified_time, continue_until,
                            duhamel_bilinear, duhamel_path, heat_trajectory, interval_weights,
                            picard_solve, smallness_certificate, timestep_integrate)
from gevrey_ns.norms import norm
from gevrey_ns.params import GevreyParams
from gevrey_ns.spectral import (bilinear_term, dealias, divergence_residual, grid_of, is_hermitian,
                                leray_project, single_mode_shear, taylor_green)

from conftest import velocity


def sup_rel(a, b):
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


# ---------------------------------------------------------------------------
# Duhamel operator


def test_interval_weights_integrate_linear_functions_exactly():
    lam = np.array([0.0, 0.3, 5.0, 400.0])
    h = 0.7
    w0, w1 = interval_weights(lam, h)
    # g = 1 and g = tau - a, integrated against exp(-lam (h - s)) on [0, h]
    for i, l in enumerate(lam):
        if l == 0:
            one, ramp = h, h**2 / 2
        else:
            one = -math.expm1(-l * h) / l
            ramp = h / l - one / l
        assert w0[i] + w1[i] == pytest.approx(one, rel=1e-12)
        assert w1[i] * h == pytest.approx(ramp, rel=1e-12)
    # the small-lam branch joins the lam = 0 limit continuously
    tiny = interval_weights(np.array([0.0, 1e-9]), h)
    assert np.allclose(tiny[0][0], tiny[0][1], rtol=1e-8) and np.allclose(tiny[1][0], tiny[1][1], rtol=1e-8)


def test_zero_second_argument_gives_zero(params):
    times = np.linspace(0, 0.5, 5)
    u = heat_trajectory(velocity(8, 1), times, params)
    z = Trajectory.constant(np.zeros_like(u.states[0]), times, params)
    assert not np.any(duhamel_path(u, z))
    assert not np.any(duhamel_bilinear(u, z, 0.3))


def test_constant_forcing_closed_form(params):
    # frozen u: the integrand is constant in tau, so each mode picks up (1 - e^{-lam t}) / lam
    u = velocity(16, 2, slope=-1.0)
    t = 0.37
    traj = Trajectory.constant(u, [0.0, 0.1, t], params)
    g = -bilinear_term(u, u)
    lam = params.nu * grid_of(u).k2
    with np.errstate(divide="ignore", invalid="ignore"):
        weight = np.where(lam > 0, -np.expm1(-lam * t) / lam, t)
    expected = leray_project(dealias(weight * g))
    assert sup_rel(duhamel_bilinear(traj, traj, t), expected) < 1e-12
    assert sup_rel(duhamel_path(traj, traj)[-1], expected) < 1e-12


def test_degenerate_kernel_reduces_to_trapezoid():
    p = GevreyParams(a=0.1, sigma=1.5, nu=1e-14)
    times = np.linspace(0, 1, 11)
    u0 = velocity(8, 3)
    # time-dependent states: u(t) = (1 + t^2) u0
    states = (1 + times**2)[:, None, None, None, None] * u0
    traj = Trajectory(times, states, p)
    g = np.array([-bilinear_term(s, s) for s in states])
    expected = leray_project(dealias(trapezoid(g, times, axis=0)))
    assert sup_rel(duhamel_bilinear(traj, traj, 1.0), expected) < 1e-8


def test_path_matches_pointwise_evaluation(params):
    times = np.linspace(0, 0.4, 9)
    traj = heat_trajectory(velocity(8, 4), times, params)
    path = duhamel_path(traj, traj)
    for j in (0, 3, 8):
        assert sup_rel(duhamel_bilinear(traj, traj, times[j]), path[j]) < 1e-12
    assert not np.any(path[0])


def test_off_node_time_interpolates(params):
    times = np.linspace(0, 0.4, 5)
    traj = Trajectory.constant(velocity(8, 5), times, params)
    # constant forcing: interpolation is exact, so an off-node value equals a node value on a shifted grid
    off = duhamel_bilinear(traj, traj, 0.25)
    on = duhamel_bilinear(Trajectory.constant(traj.states[0], [0.0, 0.25], params),
                          Trajectory.constant(traj.states[0], [0.0, 0.25], params), 0.25)
    assert sup_rel(off, on) < 1e-12


def test_node_refinement_is_second_order():
    p = GevreyParams(a=0.1, sigma=1.5, nu=0.5)
    u0 = velocity(8, 6, slope=-1.0)

    def at_T(nodes):
        traj = heat_trajectory(u0, np.linspace(0, 1.0, nodes), p)
        return duhamel_bilinear(traj, traj, 1.0)

    ref = at_T(513)
    errs = [np.abs(at_T(n) - ref).max() for n in (9, 17, 33)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 1.8) & (orders < 2.2)), orders


def test_duhamel_rejects_mismatched_nodes(params):
    u = velocity(8, 0)
    a = Trajectory.constant(u, [0.0, 0.5, 1.0], params)
    b = Trajectory.constant(u, [0.0, 0.4, 1.0], params)
    with pytest.raises(ValueError):
        duhamel_path(a, b)
    with pytest.raises(ValueError):
        duhamel_bilinear(a, a, 1.5)


def test_trajectory_validation(params):
    u = velocity(8, 0)
    with pytest.raises(ValueError):
        Trajectory([0.1, 0.2], [u, u], params)
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [u, u], params)
    with pytest.raises(ValueError):
        Trajectory([0.0], [u, u], params)


# ---------------------------------------------------------------------------
# heat semigroup and certificate


@given(st.integers(0, 10_000), st.floats(0.01, 3.0), st.floats(1.0, 3.0))
def test_heat_is_nonexpansive_on_gevrey_h1(seed, a, sigma):
    p = GevreyParams(a=a, sigma=sigma, nu=0.3)
    traj = heat_trajectory(velocity(8, seed), np.linspace(0, 2, 7), p)
    n = [norm(u, "gevrey", p, s=1.0) for u in traj.states]
    assert np.all(np.diff(n) <= 1e-15 * n[0])


def test_certificate_formula(params):
    u0 = taylor_green(16)
    T = 0.01
    c = smallness_certificate(u0, T, params)
    c0 = K_DEFAULT * (T**0.25 + T**0.75) * math.sqrt(2 * (math.exp(0.2) + 1))
    assert c.c0 == pytest.approx(c0, rel=1e-14)
    assert c.y_norm == pytest.approx(norm(u0, "gevrey", params, s=1.0))
    assert c.product == pytest.approx(4 * c0 * c.y_norm)
    assert c.holds is (c.product < 1)
    with pytest.raises(ValueError):
        smallness_certificate(u0, 0.0, params)


def test_certificate_small_time_and_zero_data(params):
    u0 = velocity(16, 1) * 50
    assert not smallness_certificate(u0, 1.0, params).holds
    assert smallness_certificate(u0, 1e-16, params).holds
    z = np.zeros_like(u0)
    assert all(smallness_certificate(z, T, params).holds for T in (1e-3, 1.0, 1e6))


def test_certified_time_taylor_green_regression(params):
    T = certified_time(taylor_green(16), params)
    assert T == pytest.approx(0.0025935365615197, rel=1e-9)
    assert smallness_certificate(taylor_green(16), 0.999 * T, params).holds
    assert not smallness_certificate(taylor_green(16), 1.001 * T, params).holds


def test_default_constant_is_twice_calibration():
    assert 2 * calibrate_smoothing_constant() <= K_DEFAULT


# ---------------------------------------------------------------------------
# Picard


def test_picard_shear_is_heat_decay():
    p = GevreyParams(a=0.1, sigma=1.5, nu=0.7)
    u0 = single_mode_shear(16)
    traj, trace = picard_solve(u0, 0.5, p, nodes=9)
    assert trace.converged and trace.iterations == 1
    exact = np.exp(-p.nu * traj.times)[:, None, None, None, None] * u0
    assert np.abs(traj.states - exact).max() < 1e-10


def test_picard_taylor_green_exact(params):
    u0 = taylor_green(16)
    T = 0.9 * certified_time(u0, params)
    traj, trace = picard_solve(u0, T, params)
    assert trace.converged and trace.certificate.holds
    exact = np.exp(-2 * params.nu * traj.times)[:, None, None, None, None] * u0
    assert np.abs(traj.states - exact).max() < 1e-6


def test_picard_zero_data(params):
    z = np.zeros((3, 8, 8, 8), dtype=complex)
    traj, trace = picard_solve(z, 1.0, params, nodes=5)
    assert trace.converged and not np.any(traj.states)


def test_picard_random_contract(params):
    u0 = velocity(16, 7, kmax=5)
    u0 = u0 * (0.2 / norm(u0, "gevrey", params, s=1.0))
    T = min(0.9 * certified_time(u0, params), 1.0)
    traj, trace = picard_solve(u0, T, params, nodes=17)
    assert trace.converged and trace.certificate.holds
    assert trace.residual <= 2 * trace.tol
    assert trace.bound_holds
    factors = trace.contraction_factors()
    assert factors.size and factors.max() <= trace.certificate.product * 1.1
    for u in traj.states:
        assert is_hermitian(u) and divergence_residual(u) < 1e-10
    d = trace.as_dict()
    assert d["converged"] and d["certificate"]["holds"]


def test_picard_reports_divergence_without_raising(params):
    u0 = velocity(8, 2) * 1e3
    traj, trace = picard_solve(u0, 1.0, params, nodes=5, max_iter=3)
    assert not trace.converged
    assert trace.status in ("diverged", "failed")
    assert traj.status == trace.status


def test_picard_needs_two_nodes(params):
    with pytest.raises(ValueError):
        picard_solve(taylor_green(8), 0.1, params, nodes=1)


# ---------------------------------------------------------------------------
# time stepping


def test_timestep_shear_exact():
    p = GevreyParams(a=0.1, sigma=1.5, nu=0.3)
    u0 = single_mode_shear(16)
    traj = timestep_integrate(u0, 2.0, 0.1, p)
    exact = np.exp(-p.nu * traj.times)[:, None, None, None, None] * u0
    assert len(traj) == 21
    assert np.abs(traj.states - exact).max() < 1e-12


def test_timestep_single_large_step(params):
    u0 = velocity(8, 3)
    traj = timestep_integrate(u0, 0.1, 1.0, params)
    assert np.allclose(traj.times, [0.0, 0.1])
    assert is_hermitian(traj.final) and divergence_residual(traj.final) < 1e-10


def test_timestep_save_every_and_zero_time(params):
    u0 = velocity(8, 3)
    traj = timestep_integrate(u0, 1.0, 0.1, params, save_every=3)
    assert np.allclose(traj.times, [0, 0.3, 0.6, 0.9, 1.0])
    assert len(timestep_integrate(u0, 0.0, 0.1, params)) == 1
    with pytest.raises(ValueError):
        timestep_integrate(u0, 1.0, 0.0, params)


def test_timestep_marks_overflow(params):
    traj = timestep_integrate(velocity(8, 1) * 1e200, 1.0, 0.1, params)
    assert traj.status == "failed"
    assert traj.failure_time == pytest.approx(0.1)
    assert len(traj) == 1


def test_timestep_fourth_order():
    p = GevreyParams(a=0.1, sigma=1.5, nu=0.05)
    u0 = velocity(8, 3, slope=-1.0, kmax=2.5, l2=1.0)
    ref = timestep_integrate(u0, 1.0, 1 / 320, p).final
    errs = [np.abs(timestep_integrate(u0, 1.0, dt, p).final - ref).max() for dt in (0.1, 0.05)]
    assert 12 <= errs[0] / errs[1] <= 20


def test_timestep_agrees_with_picard(params):
    u0 = velocity(8, 9, l2=0.5)
    T = min(0.9 * certified_time(u0, params), 0.5)
    picard, trace = picard_solve(u0, T, params, nodes=65)
    stepped = timestep_integrate(u0, T, T / 64, params)
    assert trace.converged
    assert sup_rel(stepped.final, picard.final) < 1e-5


# ---------------------------------------------------------------------------
# continuation


def test_continue_heat_only_reaches_budget():
    p = GevreyParams(a=0.1, sigma=1.5, nu=1.0)
    u0 = single_mode_shear(8, 0.01)
    traj = continue_until(u0, p, time_budget=1.0, policy=WindowPolicy(max_window=0.25, nodes=5))
    assert traj.status == "budget"
    assert traj.times[-1] == pytest.approx(1.0)
    starts = [w["t0"] for w in traj.windows]
    assert np.allclose(np.diff(starts), 0.25)
    assert np.abs(traj.final - math.exp(-1.0) * u0).max() < 1e-12


def test_continue_taylor_green_threshold():
    p = GevreyParams(a=0.1, sigma=1.5, nu=1.0)
    u0 = taylor_green(16, 0.1)
    start = norm(u0, "gevrey", p, s=1.0)
    policy = WindowPolicy(max_window=0.05, nodes=9, keep="all")
    traj = continue_until(u0, p, norm_threshold=start / 2, policy=policy)
    assert traj.status == "threshold"
    assert traj.times[-1] == pytest.approx(math.log(2) / 2, abs=0.05 / 8)
    assert norm(traj.final, "gevrey", p, s=1.0) <= start / 2


def test_continue_zero_budget(params):
    u0 = taylor_green(8)
    traj = continue_until(u0, params, time_budget=0.0)
    assert len(traj) == 1 and traj.status == "budget"
    assert np.array_equal(traj.final, u0)


def test_continue_reports_uncertified():
    p = GevreyParams(a=0.1, sigma=1.5, nu=1.0)
    traj = continue_until(velocity(8, 1) * 1e4, p, time_budget=1.0,
                          policy=WindowPolicy(floor=1e-3))
    assert traj.status == "uncertified-continuation"
    assert len(traj) == 1 and traj.windows == []


def test_continue_needs_a_stop_rule(params):
    with pytest.raises(ValueError):
        continue_until(taylor_green(8), params)
