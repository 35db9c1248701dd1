import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnobloch import (BathymetryProfile, LinearPropagator, Truncation, WaveState,
                      assemble_G_theta, band_edges, band_sweep, eigen_decompose,
                      evolve_linearized, flat_bottom_reference,
                      reconstruct_bloch_eigenfunction, theta_grid)
from dnobloch.errors import ConfigError, InstabilityError, InvariantViolation
from dnobloch.fourier import g_symbol, s_symbol
from dnobloch.spectrum import closed_threshold, wave_energy

from conftest import sech


# -- eigen_decompose ---------------------------------------------------------

def test_diagonal_matrix_sorted():
    vals = g_symbol(np.arange(-2, 3) + 0.25, 1.0)
    got, vecs = eigen_decompose(np.diag(vals))
    np.testing.assert_allclose(got, np.sort(vals), atol=1e-15)
    np.testing.assert_allclose(np.abs(vecs) ** 2 @ np.ones(5), np.ones(5))


def test_identity_and_deterministic_cluster():
    vals, vecs = eigen_decompose(np.eye(4))
    np.testing.assert_array_equal(vals, np.ones(4))
    np.testing.assert_allclose(vecs, np.eye(4), atol=1e-14)
    again = eigen_decompose(np.eye(4))[1]
    np.testing.assert_array_equal(vecs, again)


@pytest.mark.parametrize("theta", [0.02, 0.1, -0.15])
def test_two_by_two_model(theta):
    n, h, b2n = 1, 1.0, 0.3 + 0.1j
    gp, gm = g_symbol(n + theta, h), g_symbol(-n + theta, h)
    c = b2n * s_symbol(n + theta, h) * s_symbol(-n + theta, h)
    vals, vecs = eigen_decompose(np.array([[gp, c], [np.conj(c), gm]]))
    root = math.sqrt((gp - gm) ** 2 + 4 * abs(b2n) ** 2 * (s_symbol(n + theta, h) * s_symbol(-n + theta, h)) ** 2)
    np.testing.assert_allclose(vals, [0.5 * (gp + gm - root), 0.5 * (gp + gm + root)], atol=1e-14)
    np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(2), atol=1e-10)


def test_rejects_non_hermitian():
    with pytest.raises(InvariantViolation):
        eigen_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_gram_matrix_on_assembled_operator():
    G = assemble_G_theta(BathymetryProfile.preset("cos13", eps=0.08), 0.0, Truncation(14))
    _, vecs = eigen_decompose(G)
    np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(29), atol=1e-10)


# -- flat bottom -------------------------------------------------------------

def test_flat_reference_examples():
    assert flat_bottom_reference(0.0, 0, 2.0) == 0.0
    assert flat_bottom_reference(0.25, 1, 1.0) == pytest.approx(0.75 * math.tanh(0.75), abs=1e-15)
    assert flat_bottom_reference(0.25, 1, 1.0) == pytest.approx(0.47636, abs=1e-5)
    assert flat_bottom_reference(0.25, 2, 1.0) == pytest.approx(1.06036, abs=1e-5)


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(-0.5, 0.5), n=st.integers(0, 8))
def test_flat_reference_periodic_and_even(theta, n):
    assert flat_bottom_reference(theta, n, 1.0) == pytest.approx(flat_bottom_reference(-theta, n, 1.0), abs=1e-13)
    assert flat_bottom_reference(theta, n, 1.0) == pytest.approx(flat_bottom_reference(theta + 1, n, 1.0), abs=1e-12)


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_flat_sweep_exact(h):
    prof = BathymetryProfile.preset("cosx", h=h, eps=0.0)
    bs = band_sweep(prof, theta_grid(), Truncation(16), n_max=5)
    ref = np.array([[flat_bottom_reference(t, n, h) for n in range(6)] for t in bs.theta])
    np.testing.assert_allclose(bs.bands, ref, atol=1e-12, rtol=0)
    assert all(g.width == 0 for g in band_edges(bs))


def test_high_band_density():
    prof = BathymetryProfile.preset("cosx", eps=0.05)
    bs = band_sweep(prof, theta_grid(9), Truncation(60), n_max=40)
    ratio = bs.band(40) / 20
    inner = np.abs(bs.theta) <= 0.25
    assert np.all((ratio[inner] >= 0.98) & (ratio[inner] <= 1.02))
    # band 40 spans [20, 20.5] in the flat limit, so the edge sits at 1.025
    assert np.all(np.abs(ratio - (20 + np.abs(bs.theta)) / 20) < 1e-3)


def test_sweep_refuses_small_N():
    with pytest.raises(ConfigError, match="N >= 13"):
        band_sweep(BathymetryProfile.preset("cosx", eps=0.1), theta_grid(5), Truncation(10), n_max=5)


def test_theta_grid():
    t = theta_grid()
    assert t.size == 257 and t[0] == -0.5 and t[128] == 0.0
    with pytest.raises(ConfigError):
        theta_grid(256)


# -- perturbed bands ---------------------------------------------------------

@pytest.fixture(scope="module")
def cosx_bands():
    return band_sweep(BathymetryProfile.preset("cosx", eps=0.01), theta_grid(), Truncation(24))


def test_first_gap_width(cosx_bands):
    gap = band_edges(cosx_bands)[0]
    assert gap.width == pytest.approx(0.25 * sech(0.5) ** 2 * 0.01, rel=1e-2)
    assert gap.width == pytest.approx(1.9661e-3, rel=1e-2)
    assert abs(gap.theta_lower) == 0.5 and abs(gap.theta_upper) == 0.5


def test_band_invariants(cosx_bands):
    b = cosx_bands.bands
    assert np.all(np.diff(b, axis=1) >= 0)
    assert np.all(b >= -1e-10)
    assert abs(cosx_bands.band(0)[128]) <= 1e-10
    np.testing.assert_allclose(b, b[::-1], atol=1e-10)
    # continuity: bounded slope on the grid
    slope = np.abs(np.diff(b, axis=0)) / np.diff(cosx_bands.theta)[:, None]
    assert slope.max() < 4.0


def test_cos2x_odd_gaps_closed():
    bs = band_sweep(BathymetryProfile.preset("cos2x", eps=0.05), theta_grid(), Truncation(20))
    reps = band_edges(bs)
    assert reps[0].width <= 1e-10 and reps[0].closed
    assert reps[2].closed
    assert not reps[1].closed


def test_threaded_sweep_matches_serial():
    prof = BathymetryProfile.preset("cos13", eps=0.05)
    a = band_sweep(prof, theta_grid(33), Truncation(24), workers=1)
    b = band_sweep(prof, theta_grid(33), Truncation(24), workers=4)
    np.testing.assert_array_equal(a.bands, b.bands)


def test_band_edges_needs_special_points():
    bs = band_sweep(BathymetryProfile.preset("cosx", eps=0.01), np.linspace(-0.4, 0.4, 4), Truncation(20))
    with pytest.raises(ConfigError):
        band_edges(bs)


@pytest.mark.parametrize("name, gap", [("cosx", 1), ("cosx", 2), ("cos13", 2), ("cos2x", 2)])
def test_truncation_convergence(name, gap):
    prof = BathymetryProfile.preset(name, eps=0.1)
    thetas = theta_grid(65)
    w = [band_edges(band_sweep(prof, thetas, Truncation(N), n_max=3))[gap - 1].width for N in (24, 32)]
    assert abs(w[0] - w[1]) < 0.01 * w[1]


def test_closed_threshold():
    assert closed_threshold(1e-3) == 1e-10
    assert closed_threshold(1e4) == pytest.approx(1e-4)


# -- eigenfunctions ----------------------------------------------------------

def test_flat_eigenfunction_is_pure_mode():
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.0), 0.25, Truncation(6))
    _, vecs = eigen_decompose(G)
    x, phi = reconstruct_bloch_eigenfunction(vecs[:, 2], 0.25, 32)
    np.testing.assert_allclose(phi, np.exp(1.25j * x), atol=1e-13)


def test_periodic_at_zero_theta():
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.05), 0.0, Truncation(10))
    _, vecs = eigen_decompose(G)
    _, phi = reconstruct_bloch_eigenfunction(vecs[:, 3], 0.0, 32, periods=2)
    np.testing.assert_allclose(phi[32:], phi[:32], atol=1e-12)


@settings(max_examples=10, deadline=None)
@given(theta=st.floats(-0.5, 0.49), band=st.integers(0, 5))
def test_quasi_periodicity(theta, band):
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.05), theta, Truncation(12))
    _, vecs = eigen_decompose(G)
    _, phi = reconstruct_bloch_eigenfunction(vecs[:, band], theta, 32, periods=2)
    assert np.max(np.abs(phi[32:] - np.exp(2j * np.pi * theta) * phi[:32])) <= 1e-10


def test_reconstruct_rejects_aliasing():
    with pytest.raises(ConfigError):
        reconstruct_bloch_eigenfunction(np.ones(21), 0.0, 16)


# -- evolution ---------------------------------------------------------------

def test_single_mode_cosine():
    N = 6
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.0), 0.0, Truncation(N))
    eta = np.zeros(2 * N + 1, complex)
    eta[N + 1] = 1.0
    for t in (0.3, 2.0, 7.1975):
        st_ = evolve_linearized(G, WaveState(eta, np.zeros_like(eta)), t)
        np.testing.assert_allclose(st_.eta, math.cos(math.sqrt(math.tanh(1.0)) * t) * eta, atol=1e-13)
    period = 2 * math.pi / math.sqrt(math.tanh(1.0))
    st_ = evolve_linearized(G, WaveState(eta, np.zeros_like(eta)), period)
    np.testing.assert_allclose(st_.eta, eta, atol=1e-12)
    assert period == pytest.approx(7.19976, abs=1e-5)


def test_eigenmode_and_zero_mode():
    N = 8
    G = assemble_G_theta(BathymetryProfile.preset("cos13", eps=0.05), 0.0, Truncation(N))
    prop = LinearPropagator(G, g=9.81)
    k = 4
    phi = prop.vectors[:, k]
    out = prop.evolve(WaveState(phi, np.zeros_like(phi), 9.81), 1.7)
    np.testing.assert_allclose(out.eta, np.cos(prop.omega[k] * 1.7) * phi, atol=1e-12)
    # the constant mode drifts linearly
    zero = np.zeros(2 * N + 1, complex)
    zero[N] = 1.0
    out = prop.evolve(WaveState(np.zeros_like(zero), zero, 9.81), 2.5)
    np.testing.assert_allclose(out.eta, 2.5 * zero, atol=1e-10)


def test_energy_conserved(rng):
    N = 10
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.08), 0.2, Truncation(N))
    eta = rng.normal(size=2 * N + 1) + 1j * rng.normal(size=2 * N + 1)
    dot = rng.normal(size=2 * N + 1) + 1j * rng.normal(size=2 * N + 1)
    prop = LinearPropagator(G)
    s0 = WaveState(eta, dot)
    e0 = prop.energy(s0)
    for t in (0.5, 5.0, 50.0):
        assert prop.energy(prop.evolve(s0, t)) == pytest.approx(e0, rel=1e-10)


def test_reality_preserved_at_zero_theta():
    N = 8
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.05), 0.0, Truncation(N))
    eta = np.zeros(2 * N + 1, complex)
    eta[N + 2] = 0.4 - 0.2j
    eta[N - 2] = 0.4 + 0.2j
    out = evolve_linearized(G, WaveState(eta, np.zeros_like(eta)), 3.3)
    np.testing.assert_allclose(out.eta[::-1], out.eta.conj(), atol=1e-12)


def test_fd_residual_second_order(rng):
    N = 8
    G = assemble_G_theta(BathymetryProfile.preset("cosx", eps=0.05), 0.1, Truncation(N))
    prop = LinearPropagator(G, g=2.0)
    s0 = WaveState(rng.normal(size=2 * N + 1) + 0j, np.zeros(2 * N + 1, complex), 2.0)
    t = 1.3

    def resid(dt):
        eta = [prop.evolve(s0, t + k * dt).eta for k in (-2, -1, 0, 1, 2)]
        # standard 5-point second derivative is fourth order; use the 3-point one for O(dt^2)
        acc = (eta[3] - 2 * eta[2] + eta[1]) / dt ** 2
        return np.linalg.norm(acc + 2.0 * G @ eta[2])

    r = [resid(dt) for dt in (0.04, 0.02, 0.01)]
    orders = np.log2(np.array(r[:-1]) / np.array(r[1:]))
    assert np.all(orders > 1.9)


def test_instability_on_negative_eigenvalue():
    with pytest.raises(InstabilityError):
        LinearPropagator(np.diag([-1e-3, 1.0]))
    with pytest.raises(ConfigError):
        WaveState(np.zeros(3), np.zeros(3), g=0.0)


def test_wave_energy_flat_mode():
    G = np.diag([0.0, 2.0])
    s = WaveState(np.array([0, 1.0]), np.array([1.0, 0]), g=3.0)
    assert wave_energy(G, s) == pytest.approx(0.5 + 3.0)
