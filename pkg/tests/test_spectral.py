import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gevrey_ns.norms import inner_product, norm
from gevrey_ns.spectral import (NumericalFailure, bilinear_term, convolve_oracle, dealias, differential,
                                divergence, divergence_residual, gradient, heat_propagate, hermitian_part,
                                is_hermitian, laplacian, leray_project, make_grid, nonlinear_term,
                                pad_spectrum, product, random_divergence_free_field, random_field,
                                single_mode_shear, taylor_green, to_physical, to_spectral,
                                truncate_spectrum)

from conftest import scalar_field, velocity

seeds = st.integers(0, 10_000)


def rel(a, b):
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


# ---------------------------------------------------------------------------
# grid


def test_grid_n4_lattice():
    g = make_grid(4)
    assert g.k.shape == (3, 4, 4, 4)
    assert g.npoints == 64
    assert set(np.unique(g.k)) == {-2, -1, 0, 1}


def test_grid_n8_dealias_keeps_two():
    g = make_grid(8)
    kept = np.unique(np.abs(g.k[0][g.dealias_mask]))
    assert set(kept) == {0, 1, 2}


@pytest.mark.parametrize("N", [6, 12, 16])
def test_mask_symmetric_and_keeps_mean(N):
    g = make_grid(N)
    flipped = np.roll(np.flip(g.dealias_mask), 1, axis=(0, 1, 2))
    assert np.array_equal(flipped, g.dealias_mask)
    assert g.dealias_mask[0, 0, 0]


def test_mask_alias_free_when_divisible_by_three():
    # N=12: kept |xi_i| <= 3, so products reach 6 = N/2 and wrap onto -6, outside the mask
    g = make_grid(12)
    assert np.abs(g.k[0][g.dealias_mask]).max() == 3


@pytest.mark.parametrize("N", [3, 5, 2, 0, 7.5, True])
def test_grid_rejects_bad_sizes(N):
    with pytest.raises(ValueError):
        make_grid(N)


def test_index_of_round_trip(grid8):
    for xi in [(0, 0, 0), (-4, 3, 1), (2, -1, -3)]:
        idx = grid8.index_of(xi)
        assert tuple(grid8.k[(slice(None),) + idx]) == xi
    with pytest.raises(ValueError):
        grid8.index_of((4, 0, 0))


# ---------------------------------------------------------------------------
# transforms and symmetry


@pytest.mark.parametrize("N", [4, 8, 16, 32, 64])
def test_physical_round_trip(N):
    rng = np.random.default_rng(N)
    u = rng.standard_normal((N, N, N))
    assert rel(to_physical(to_spectral(u)), u) < 1e-12


def test_single_mode_convention():
    u = single_mode_shear(8)
    phys = to_physical(u)
    x = 2 * np.pi * np.arange(8) / 8
    assert np.allclose(phys[2], 2 * np.cos(x)[:, None, None] * np.ones((8, 8, 8)), atol=1e-14)


def test_parseval_rms_and_box_integral():
    # sum |uhat|^2 is the mean square; the box integral carries (2 pi)^3 on top
    u = single_mode_shear(16)
    phys = to_physical(u)
    mean_square = (phys**2).sum(axis=0).mean()
    assert norm(u) ** 2 == pytest.approx(mean_square, rel=1e-14)
    box_integral = mean_square * (2 * np.pi) ** 3
    assert math.sqrt(box_integral) == pytest.approx((2 * np.pi) ** 1.5 * norm(u), rel=1e-14)


@given(seeds)
def test_random_fields_are_hermitian_and_real(seed):
    f = scalar_field(8, seed)
    assert is_hermitian(f)
    assert np.abs(np.fft.ifftn(f).imag).max() < 1e-14
    assert f[0, 0, 0] == 0


def test_hermitian_part_is_projection():
    rng = np.random.default_rng(0)
    f = rng.standard_normal((8, 8, 8)) + 1j * rng.standard_normal((8, 8, 8))
    h = hermitian_part(f)
    assert is_hermitian(h)
    assert rel(hermitian_part(h), h) < 1e-15


# ---------------------------------------------------------------------------
# Leray projector


@given(seeds)
def test_leray_kills_gradients(seed):
    phi = scalar_field(16, seed)
    assert np.abs(leray_project(gradient(phi))).max() < 1e-14 * max(np.abs(gradient(phi)).max(), 1)


@given(seeds)
def test_leray_fixes_solenoidal_fields(seed):
    u = velocity(16, seed)
    assert rel(leray_project(u), u) < 1e-12


@given(seeds, seeds)
def test_leray_idempotent_and_self_adjoint(s1, s2):
    f = random_field(8, -1.0, (1, 8 / 3), s1, components=3)
    g = random_field(8, -1.0, (1, 8 / 3), s2, components=3)
    pf = leray_project(f)
    assert rel(leray_project(pf), pf) < 1e-12
    lhs, rhs = inner_product(pf, g), inner_product(f, leray_project(g))
    assert abs(lhs - rhs) <= 1e-12 * norm(f) * norm(g)


def test_leray_zeroes_mean():
    f = np.zeros((3, 8, 8, 8), dtype=complex)
    f[:, 0, 0, 0] = 1.0
    assert not np.any(leray_project(f))


# ---------------------------------------------------------------------------
# heat semigroup and derivatives


def test_heat_identity_at_zero(grid8):
    f = scalar_field(8, 1)
    assert np.array_equal(heat_propagate(f, 1.0, 0.0), f)


def test_heat_single_mode():
    u = single_mode_shear(8)
    out = heat_propagate(u, 1.0, 1.0)
    assert out[2][1, 0, 0] == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_heat_long_time_limit():
    f = scalar_field(8, 2)
    f[0, 0, 0] = 3.0
    out = heat_propagate(f, 1.0, 1e3)
    assert out[0, 0, 0] == 3.0
    assert np.abs(out).sum() == pytest.approx(3.0)


@given(st.floats(0, 2), st.floats(0, 2))
def test_heat_semigroup_law(t1, t2):
    f = scalar_field(8, 3)
    a = heat_propagate(heat_propagate(f, 0.7, t1), 0.7, t2)
    b = heat_propagate(f, 0.7, t1 + t2)
    assert rel(a, b) < 1e-13


def test_heat_rejects_negative_time():
    with pytest.raises(ValueError):
        heat_propagate(scalar_field(8, 0), 1.0, -1e-3)


def test_differential_examples():
    const = np.zeros((8, 8, 8), dtype=complex)
    const[0, 0, 0] = 5.0
    assert not np.any(differential(const, "gradient"))
    assert not np.any(differential(single_mode_shear(8), "divergence"))
    mode = np.zeros((8, 8, 8), dtype=complex)
    mode[1, 1, 0] = 1.0
    assert differential(mode, "laplacian")[1, 1, 0] == -2.0
    with pytest.raises(ValueError):
        differential(mode, "curl")


def test_gradient_matches_finite_differences():
    f = scalar_field(32, 5, slope=-3.0, kmax=4)
    g = to_physical(gradient(f))
    phys = to_physical(f)
    h = 2 * np.pi / 32
    fd = (np.roll(phys, -1, axis=0) - np.roll(phys, 1, axis=0)) / (2 * h)
    assert np.abs(g[0] - fd).max() < 0.02 * np.abs(g[0]).max()
    assert rel(divergence(gradient(f)), laplacian(f)) < 1e-13


def test_divergence_residual_of_solenoidal_field():
    assert divergence_residual(velocity(16, 4)) < 1e-10
    assert divergence_residual(gradient(scalar_field(16, 4))) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# products and nonlinear term


def test_convolution_identity():
    f = scalar_field(8, 6)
    delta = np.zeros_like(f)
    delta[0, 0, 0] = 1.0
    assert rel(convolve_oracle(f, delta), f) < 1e-15


def test_convolution_of_two_modes(grid8):
    f = np.zeros((8, 8, 8), dtype=complex)
    g = np.zeros_like(f)
    f[grid8.index_of((1, 0, -1))] = 2.0
    g[grid8.index_of((0, 2, 1))] = 3j
    h = convolve_oracle(f, g)
    assert h[grid8.index_of((1, 2, 0))] == 6j
    assert np.count_nonzero(h) == 1


def test_convolution_rejects_mismatched_grids():
    with pytest.raises(ValueError):
        convolve_oracle(scalar_field(8, 0), scalar_field(16, 0))


@given(seeds)
def test_transform_product_matches_oracle(seed):
    f, g = scalar_field(8, seed), scalar_field(8, seed + 1)
    oracle = convolve_oracle(f, g, full=True)
    exact = product(f, g, exact=True)
    assert rel(exact, oracle) < 1e-10
    assert rel(product(f, g), dealias(convolve_oracle(f, g))) < 1e-10


def test_pad_truncate_round_trip():
    f = scalar_field(8, 7)
    assert np.array_equal(truncate_spectrum(pad_spectrum(f, 16), 8), f)
    assert norm(pad_spectrum(f, 16)) == pytest.approx(norm(f), rel=1e-15)


def test_nonlinear_term_shear_vanishes():
    assert np.abs(nonlinear_term(single_mode_shear(16))).max() < 1e-15


def test_nonlinear_term_taylor_green_vanishes():
    assert np.abs(nonlinear_term(taylor_green(16))).max() < 1e-14


def _oracle_nonlinear(u):
    grid = make_grid(u.shape[-1])
    out = np.zeros_like(u)
    for i in range(3):
        for j in range(3):
            out[i] += 1j * grid.k[j] * convolve_oracle(dealias(u[j]), dealias(u[i]))
    return leray_project(dealias(out))


def test_nonlinear_term_matches_oracle():
    u = velocity(8, 11, slope=-1.0)
    assert rel(nonlinear_term(u), _oracle_nonlinear(u)) < 1e-10


@given(seeds)
def test_nonlinear_term_orthogonal_to_u(seed):
    u = dealias(velocity(16, seed, slope=-1.0))
    nl = nonlinear_term(u)
    assert abs(inner_product(nl, u)) <= 1e-9 * norm(u) ** 3
    assert is_hermitian(nl) and divergence_residual(nl) < 1e-10


def test_bilinear_term_reports_overflow():
    u = velocity(8, 1) * 1e200
    with pytest.raises(NumericalFailure):
        bilinear_term(u, u)


# ---------------------------------------------------------------------------
# random data


@given(seeds)
def test_random_velocity_is_valid(seed):
    u = random_divergence_free_field(16, -2.0, (1, 5), seed)
    assert divergence_residual(u) < 1e-10
    assert is_hermitian(u)
    assert not np.any(u[:, 0, 0, 0])


def test_random_velocity_deterministic_and_banded():
    g = make_grid(16)
    a = random_divergence_free_field(g, -1.0, (1, 2), 1)
    b = random_divergence_free_field(g, -1.0, (1, 2), 1)
    assert np.array_equal(a, b)
    support = np.any(a != 0, axis=0)
    assert support.any()
    assert np.all((g.kmag[support] >= 1) & (g.kmag[support] <= 2))


def test_random_field_same_polynomial_on_every_grid():
    a = random_field(8, -1.0, (1, 2.5), 9)
    b = random_field(16, -1.0, (1, 2.5), 9)
    assert np.array_equal(pad_spectrum(a, 16), b)


def test_random_field_rejects_bad_bands():
    with pytest.raises(ValueError):
        random_field(8, -1.0, (1, 3), 0)
    with pytest.raises(ValueError):
        random_field(8, -1.0, (2.1, 2.2), 0)
