import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnobloch.errors import AliasingError, ConfigError
from dnobloch.fourier import (
    BlochParameter,
    FourierField,
    Truncation,
    analyze,
    diag_symbol,
    g_symbol,
    grid,
    is_hermitian,
    s_symbol,
    sech,
    synthesize,
    toeplitz_mult,
)

from conftest import sech as sech_ref


def test_truncation_index_map():
    tr = Truncation(3)
    assert tr.dim == 7
    assert [tr.index(j) for j in tr.modes] == list(range(7))
    with pytest.raises(ConfigError):
        Truncation(0)


@pytest.mark.parametrize("raw, reduced", [(0.5, -0.5), (-0.5, -0.5), (0.75, -0.25),
                                          (1.2, 0.2), (-1.0, 0.0), (0.4999, 0.4999)])
def test_bloch_parameter_reduction(raw, reduced):
    assert BlochParameter(raw).theta == pytest.approx(reduced, abs=1e-15)


def test_synthesize_constant_and_cosine():
    one = FourierField.from_modes({0: 1.0}, N=2, real_valued=True)
    np.testing.assert_allclose(synthesize(one, 8), np.ones(8), atol=1e-15)
    cos = FourierField.from_modes({1: 0.5, -1: 0.5}, real_valued=True)
    np.testing.assert_allclose(synthesize(cos, 16), np.cos(grid(16)), atol=1e-15)


def test_synthesize_rejects_aliasing_grid():
    f = FourierField.from_modes({3: 1.0})
    with pytest.raises(AliasingError):
        synthesize(f, 7)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_round_trip_against_direct_summation(N, seed):
    rng = np.random.default_rng(seed)
    half = rng.normal(size=N) + 1j * rng.normal(size=N)
    c = np.concatenate([np.conj(half[::-1]), [rng.normal()], half])
    field = FourierField(c, real_valued=True)
    M = 4 * N
    x = grid(M)
    direct = np.real(np.exp(1j * np.outer(x, np.arange(-N, N + 1))) @ c)
    samples = synthesize(field, M)
    np.testing.assert_allclose(samples, direct, atol=1e-12 * max(1, np.abs(c).sum()))
    back = analyze(samples, N, real_valued=True)
    assert np.max(np.abs(back.coeffs - c)) <= 1e-12 * max(1.0, np.max(np.abs(c)))


def test_real_flag_enforced():
    with pytest.raises(ConfigError):
        FourierField.from_modes({1: 1.0}, real_valued=True)


def test_stable_sech_matches_cosh_and_survives_large_arguments():
    z = np.linspace(-20, 20, 81)
    np.testing.assert_allclose(sech(z), 1 / np.cosh(z), rtol=1e-14)
    assert sech(1e4) == 0.0
    assert np.isfinite(s_symbol(800.0, 3.0))


def test_diag_symbol_examples():
    tr = Truncation(3)
    G = diag_symbol(lambda k: g_symbol(k, 1.0), 0.0, tr)
    assert G[tr.index(1), tr.index(1)].real == pytest.approx(math.tanh(1.0), abs=1e-15)
    assert G[tr.index(0), tr.index(0)] == 0
    S = diag_symbol(lambda k: s_symbol(k, 1.0), 0.0, tr)
    assert S[tr.index(2), tr.index(2)].real == pytest.approx(2 * sech_ref(2.0), abs=1e-15)
    # the stated decimal is a rounding of 2 sech 2 = 0.531604...
    assert S[tr.index(2), tr.index(2)].real == pytest.approx(0.53159, abs=2e-5)
    assert np.count_nonzero(G - np.diag(np.diag(G))) == 0


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(-0.5, 0.49), h=st.floats(0.2, 3.0))
def test_diag_symbol_shift_identity(theta, h):
    tr = Truncation(6)
    f = lambda k: g_symbol(k, h)
    a = np.diag(diag_symbol(f, theta, tr)).real
    b = np.diag(diag_symbol(f, theta + 1, tr)).real
    # mode j at theta+1 equals mode j+1 at theta
    np.testing.assert_allclose(b[:-1], a[1:], rtol=1e-13, atol=1e-13)


def test_toeplitz_examples():
    tr = Truncation(3)
    cos = FourierField.from_modes({1: 0.5, -1: 0.5}, real_valued=True)
    B = toeplitz_mult(cos, tr)
    assert B[tr.index(1), tr.index(0)] == 0.5
    assert B[tr.index(0), tr.index(0)] == 0
    assert not np.any(toeplitz_mult(FourierField.zeros(2), tr))


@settings(max_examples=30, deadline=None)
@given(K=st.integers(1, 5), N=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_toeplitz_hermitian_for_real_fields(K, N, seed):
    rng = np.random.default_rng(seed)
    half = rng.normal(size=K) + 1j * rng.normal(size=K)
    c = np.concatenate([np.conj(half[::-1]), [0.0], half])
    B = toeplitz_mult(FourierField(c, real_valued=True), Truncation(N))
    assert is_hermitian(B)


def test_toeplitz_is_pointwise_multiplication(rng):
    # (B u)_j for u supported well inside the truncation equals the product's coefficient
    N = 12
    beta = FourierField.from_modes({1: 0.3 + 0.1j, -1: 0.3 - 0.1j, 2: 0.2, -2: 0.2}, N=2)
    u = np.zeros(2 * N + 1, complex)
    u[N - 4 : N + 5] = rng.normal(size=9)
    M = 64
    prod = synthesize(beta, M) * synthesize(FourierField(u), M)
    expect = analyze(prod, N).coeffs
    np.testing.assert_allclose(toeplitz_mult(beta, Truncation(N)) @ u, expect, atol=1e-13)
