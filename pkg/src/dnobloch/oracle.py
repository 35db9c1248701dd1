"""Finite-difference harmonic-extension reference for ``G_theta[b] psi``.

The fluid strip ``-h + eps*beta(x) < y < 0`` is mapped to ``[0, 2pi) x [0, 1]``
with ``y = -(1 - sigma) d(x)``, ``d = h - eps*beta``.  For
``phi = exp(i theta x) Phi(x, sigma)`` with ``Phi`` periodic, Laplace's equation
becomes

    Dx(d Dx Phi) + Dx(c Phi_s) + d_s(c Dx Phi) + d_s(e Phi_s) = 0,
    c = (1 - sigma) d',   e = (1 + c^2) / d,   Dx = d/dx + i theta,

with ``Phi = psi`` at ``sigma = 1`` and zero conormal flux ``c Dx Phi + e Phi_s``
at ``sigma = 0``.  The output is ``Phi_s / d`` at the surface.  Central second
order differences everywhere; Richardson extrapolation over a grid doubling
is applied by default.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bathymetry import BathymetryProfile
from .errors import AliasingError, ConfigError, OracleConvergenceError
from .fourier import FourierField, analyze, as_theta, synthesize

MIN_NX = 16
MIN_NSIGMA = 8


@dataclass(frozen=True)
class OracleResolution:
    """Grid for the oracle: ``nx`` periodic points, ``nsigma`` vertical cells."""

    nx: int = 128
    nsigma: int = 48
    richardson: bool = True

    def __post_init__(self):
        if self.nx < MIN_NX or self.nsigma < MIN_NSIGMA:
            raise ConfigError(f"oracle grid needs nx >= {MIN_NX} and nsigma >= {MIN_NSIGMA}")
        if self.nx % 2:
            raise ConfigError("oracle nx must be even")


def _periodic_diff(n: int, dx: float):
    e = np.ones(n)
    d1 = sp.diags([-e[:-1], e[:-1]], [-1, 1], shape=(n, n), format="lil")
    d1[0, n - 1] = -1
    d1[n - 1, 0] = 1
    d2 = sp.diags([e[:-1], -2 * e, e[:-1]], [-1, 0, 1], shape=(n, n), format="lil")
    d2[0, n - 1] = 1
    d2[n - 1, 0] = 1
    return d1.tocsr() / (2 * dx), d2.tocsr() / dx ** 2


def _depth_and_slope(profile: BathymetryProfile, x: np.ndarray):
    b = profile.beta
    ph = np.exp(1j * np.outer(x, b.modes))
    beta = np.real(ph @ b.coeffs)
    dbeta = np.real(ph @ (1j * b.modes * b.coeffs))
    ddbeta = np.real(ph @ (-(b.modes ** 2) * b.coeffs))
    eps = profile.eps
    return profile.h - eps * beta, -eps * dbeta, -eps * ddbeta


def _solve_surface_flux(profile: BathymetryProfile, theta: float, psi_vals: np.ndarray,
                        nsigma: int) -> np.ndarray:
    """Surface normal derivative on one grid; ``psi_vals`` sampled on that grid."""
    nx = psi_vals.size
    dx = 2 * np.pi / nx
    ds = 1.0 / nsigma
    x = dx * np.arange(nx)
    d, dp, dpp = _depth_and_slope(profile, x)

    # sigma levels -1 (ghost) .. nsigma (surface); row index = (k + 1) * nx + i
    nk = nsigma + 2
    sig = ds * np.arange(-1, nsigma + 1)
    S, X = np.meshgrid(sig, x, indexing="ij")
    dd = np.broadcast_to(d, S.shape)
    c = (1 - S) * dp
    e = (1 + c ** 2) / dd
    # coefficient derivatives for the non-conservative form
    c_x = (1 - S) * dpp
    c_s = -np.broadcast_to(dp, S.shape)
    e_s = 2 * c * c_s / dd
    a_x = np.broadcast_to(dp, S.shape)

    D1, D2 = _periodic_diff(nx, dx)
    I_x = sp.identity(nx, format="csr")
    DX = D1 + 1j * theta * I_x
    DXX = D2 + 2j * theta * D1 - theta ** 2 * I_x

    es = np.ones(nk)
    Ds = sp.diags([-es[:-1], es[:-1]], [-1, 1], shape=(nk, nk)) / (2 * ds)
    Dss = sp.diags([es[:-1], -2 * es, es[:-1]], [-1, 0, 1], shape=(nk, nk)) / ds ** 2
    I_s = sp.identity(nk, format="csr")

    def coef(arr):
        return sp.diags(np.ravel(arr))

    L = (coef(dd) @ sp.kron(I_s, DXX)
         + coef(2 * c) @ sp.kron(Ds, DX)
         + coef(e) @ sp.kron(Dss, I_x)
         + coef(a_x + c_s) @ sp.kron(I_s, DX)
         + coef(c_x + e_s) @ sp.kron(Ds, I_x))
    L = L.tocsr()

    # conormal flux at sigma = 0 (level index 1), central in sigma via the ghost
    flux = (coef(c) @ sp.kron(I_s, DX) + coef(e) @ sp.kron(Ds, I_x)).tocsr()

    rows_pde = np.arange(1 * nx, (nsigma + 1) * nx)           # levels 0..nsigma-1
    rows_bc = np.arange(1 * nx, 2 * nx)                      # level 0
    rows_top = np.arange((nsigma + 1) * nx, (nsigma + 2) * nx)
    top = sp.csr_matrix((np.ones(nx), (np.arange(nx), rows_top)), shape=(nx, nk * nx))
    A = sp.vstack([flux[rows_bc], L[rows_pde], top]).tocsc()
    rhs = np.concatenate([np.zeros(nx + nsigma * nx, dtype=complex), psi_vals.astype(complex)])

    sol = spla.spsolve(A, rhs)
    res = np.linalg.norm(A @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if not np.all(np.isfinite(sol)) or res > 1e-8:
        raise OracleConvergenceError(f"oracle linear solve failed, relative residual {res:.3e}",
                                     residual=res)
    Phi = sol.reshape(nk, nx)
    dphi = (3 * Phi[-1] - 4 * Phi[-2] + Phi[-3]) / (2 * ds)
    return dphi / d


def apply_dno_oracle(profile: BathymetryProfile, theta, psi: FourierField,
                     resolution: OracleResolution | None = None,
                     out_N: int | None = None) -> FourierField:
    """Approximate ``G_theta[eps beta] psi`` by solving the boundary value problem.

    Independent of the Taylor series: the bottom enters only through the
    depth function of the coordinate map.
    """
    res = resolution or OracleResolution()
    theta = as_theta(theta)
    out_N = psi.N if out_N is None else out_N
    if res.nx < 2 * max(psi.N, out_N) + 2:
        raise AliasingError(f"oracle nx={res.nx} too coarse for modes up to {max(psi.N, out_N)}")

    def level(nx, ns):
        vals = synthesize(FourierField(psi.coeffs), nx)
        return _solve_surface_flux(profile, theta, vals, ns)

    coarse = level(res.nx, res.nsigma)
    if res.richardson:
        fine = level(2 * res.nx, 2 * res.nsigma)[::2]
        coarse = (4 * fine - coarse) / 3
    return analyze(coarse, out_N)
