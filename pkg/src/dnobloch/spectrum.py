"""Bloch band structure: eigenpairs, theta sweeps, gaps, eigenfunctions, evolution."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bathymetry import BathymetryProfile
from .dno import assemble_G_theta
from .errors import ConfigError, InstabilityError, InvariantViolation
from .fourier import BlochParameter, Truncation, as_theta, g_symbol, is_hermitian

NEG_TOL = 1e-10
DEFAULT_THETA_POINTS = 257


def closed_threshold(upper_edge: float) -> float:
    """Widths at or below this are numerical noise, not an open gap."""
    return max(1e-10, 1e-8 * abs(upper_edge))


# ---------------------------------------------------------------------------
# eigenpairs

def _canonical_phase(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs) > (1 - 1e-8) * np.max(np.abs(vecs), axis=0), axis=0)
    ph = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(ph) / ph)[None, :]


def eigen_decompose(mat: np.ndarray, cluster_tol: float = 1e-10):
    """Ascending eigenvalues and orthonormal eigenvectors (columns).

    Inside a cluster of numerically equal eigenvalues the basis is rotated onto
    the Fourier modes carrying the most weight, then each vector is phased so
    that its largest entry is real and positive.  Repeated calls give
    identical output.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("eigen_decompose needs a square matrix")
    if not is_hermitian(mat):
        raise InvariantViolation("matrix is not Hermitian to 1e-12 relative")
    herm = 0.5 * (mat + mat.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)

    start = 0
    n = vals.size
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= cluster_tol * scale:
            stop += 1
        if stop - start > 1:
            V = vecs[:, start:stop]
            m = stop - start
            weight = np.sum(np.abs(V) ** 2, axis=1)
            rows = np.sort(np.argsort(-weight, kind="stable")[:m])
            # columns of V B^H align with the chosen unit vectors
            Q, _ = np.linalg.qr(V @ V[rows, :].conj().T)
            vecs[:, start:stop] = Q
        start = stop
    return vals, _canonical_phase(vecs)


# ---------------------------------------------------------------------------
# flat bottom

def flat_bottom_reference(theta, n: int, h: float) -> float:
    """Unperturbed band value: sorted flat-bottom eigenvalue ``n`` at ``theta``."""
    if n < 0:
        raise ValueError("band index must be >= 0")
    t = as_theta(BlochParameter(as_theta(theta)))
    m = (n + 1) // 2
    if n % 2 == 0:
        j = m if t >= 0 else -m
    else:
        j = -m if t >= 0 else m
    return float(g_symbol(j + t, h))


def flat_bottom_mode(theta, n: int) -> int:
    """Fourier mode carrying flat-bottom band ``n`` at ``theta``."""
    t = as_theta(BlochParameter(as_theta(theta)))
    m = (n + 1) // 2
    if n % 2 == 0:
        return m if t >= 0 else -m
    return -m if t >= 0 else m


# ---------------------------------------------------------------------------
# band structure

def theta_grid(points: int = DEFAULT_THETA_POINTS) -> np.ndarray:
    """Uniform closed grid on [-1/2, 1/2]; the last point is the periodic image of the first.

    ``points`` must be odd so that 0 is a grid point.
    """
    if points < 3 or points % 2 == 0:
        raise ConfigError("theta grid needs an odd number (>= 3) of points so it contains 0")
    return np.linspace(-0.5, 0.5, points)


def required_N(n_max: int, order: int, profile: BathymetryProfile) -> int:
    return n_max + 4 + order * profile.max_wavenumber


@dataclass(frozen=True)
class BandStructure:
    theta: np.ndarray
    bands: np.ndarray                 # (len(theta), n_max + 1)
    profile: BathymetryProfile
    N: int
    order: int

    @property
    def n_max(self) -> int:
        return self.bands.shape[1] - 1

    def band(self, n: int) -> np.ndarray:
        return self.bands[:, n]


def _sorted_eigs(profile, theta, trunc, order, n_max):
    G = assemble_G_theta(profile, theta, trunc, order)
    vals = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    return vals[: n_max + 1]


def band_sweep(profile: BathymetryProfile, thetas, trunc: Truncation, order: int = 4,
               n_max: int = 5, workers: int = 1, strict: bool = True) -> BandStructure:
    """Sorted eigenvalues of the truncated operator at every grid point."""
    need = required_N(n_max, order, profile)
    if trunc.N < need:
        raise ConfigError(f"truncation N={trunc.N} too small for {n_max + 1} bands at order "
                          f"{order}; use N >= {need}")
    thetas = np.asarray(thetas, dtype=float)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _sorted_eigs(profile, t, trunc, order, n_max), thetas))
    else:
        rows = [_sorted_eigs(profile, t, trunc, order, n_max) for t in thetas]
    bands = np.vstack(rows)
    if strict and bands.size and bands.min() < -NEG_TOL:
        raise InvariantViolation(f"negative band value {bands.min():.3e}; truncation failure")
    return BandStructure(thetas, bands, profile, trunc.N, order)


@dataclass(frozen=True)
class GapReport:
    """Gap ``n`` sits between band ``n-1`` (max) and band ``n`` (min)."""

    n: int
    lower_edge: float
    upper_edge: float
    width: float
    center: float
    theta_lower: float
    theta_upper: float
    closed: bool
    overlap: float = 0.0

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lower_edge": self.lower_edge,
            "upper_edge": self.upper_edge,
            "width": self.width,
            "center": self.center,
            "theta_lower": self.theta_lower,
            "theta_upper": self.theta_upper,
            "closed": self.closed,
            "overlap": self.overlap,
        }


def band_edges(bs: BandStructure) -> list[GapReport]:
    if not np.any(np.isclose(bs.theta, 0.0)) or not np.any(np.isclose(bs.theta, -0.5)):
        raise ConfigError("theta grid must contain 0 and -1/2 to sample the band edges")
    out = []
    for n in range(1, bs.n_max + 1):
        lo, hi = bs.band(n - 1), bs.band(n)
        i_lo, i_hi = int(np.argmax(lo)), int(np.argmin(hi))
        top, bottom = float(lo[i_lo]), float(hi[i_hi])
        width = max(0.0, bottom - top)
        out.append(GapReport(
            n=n,
            lower_edge=top,
            upper_edge=bottom,
            width=width,
            center=0.5 * (top + bottom),
            theta_lower=float(bs.theta[i_lo]),
            theta_upper=float(bs.theta[i_hi]),
            closed=width <= closed_threshold(bottom),
            overlap=max(0.0, top - bottom),
        ))
    return out


# ---------------------------------------------------------------------------
# eigenfunctions

def reconstruct_bloch_eigenfunction(vector: np.ndarray, theta, grid_size: int,
                                    periods: int = 1):
    """Sample ``Phi(x) = exp(i theta x) sum_j psi_j exp(i j x)`` on ``periods`` periods.

    Returns ``(x, Phi)`` with ``x = 2 pi m / grid_size``.
    """
    vector = np.asarray(vector)
    N = (vector.size - 1) // 2
    if grid_size < 2 * N + 2:
        raise ConfigError(f"grid_size {grid_size} aliases modes up to {N}")
    t = as_theta(theta)
    x = 2 * np.pi * np.arange(periods * grid_size) / grid_size
    modes = np.arange(-N, N + 1)
    phi = np.exp(1j * np.outer(x, modes + t)) @ vector
    return x, phi


# ---------------------------------------------------------------------------
# linearized evolution

@dataclass(frozen=True)
class WaveState:
    """Surface elevation and its time derivative (Fourier coefficients at fixed theta)."""

    eta: np.ndarray
    eta_dot: np.ndarray
    g: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        if self.g <= 0:
            raise ConfigError("gravity must be positive")
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=complex))
        object.__setattr__(self, "eta_dot", np.asarray(self.eta_dot, dtype=complex))
        if self.eta.shape != self.eta_dot.shape:
            raise ConfigError("eta and eta_dot must have the same length")


class LinearPropagator:
    """Exact spectral propagator for ``eta'' + g G eta = 0`` at one theta."""

    def __init__(self, G: np.ndarray, g: float = 1.0):
        self.G = np.asarray(G)
        self.g = g
        vals, vecs = eigen_decompose(self.G)
        if vals.min() < -NEG_TOL:
            raise InstabilityError(
                f"eigenvalue {vals.min():.3e} < 0: the truncated operator is not a valid "
                "Dirichlet-Neumann matrix")
        self.eigenvalues = np.clip(vals, 0.0, None)
        self.vectors = vecs
        self.omega = np.sqrt(g * self.eigenvalues)

    def to_modes(self, coeffs):
        return self.vectors.conj().T @ coeffs

    def from_modes(self, amps):
        return self.vectors @ amps

    def evolve(self, initial: WaveState, t: float) -> WaveState:
        a0 = self.to_modes(initial.eta)
        a1 = self.to_modes(initial.eta_dot)
        dt = t - initial.t
        w = self.omega
        c = np.cos(w * dt)
        s_over_w = dt * np.sinc(w * dt / np.pi)          # sin(w dt)/w, -> dt at w=0
        a = a0 * c + a1 * s_over_w
        adot = -a0 * w * np.sin(w * dt) + a1 * c
        return WaveState(self.from_modes(a), self.from_modes(adot), initial.g, t)

    def energy(self, state: WaveState) -> float:
        return wave_energy(self.G, state)


def evolve_linearized(G: np.ndarray, initial: WaveState, t: float) -> WaveState:
    """Advance ``initial`` to time ``t`` under the linearized water-wave equation."""
    return LinearPropagator(G, initial.g).evolve(initial, t)


def wave_energy(G: np.ndarray, state: WaveState) -> float:
    kin = np.vdot(state.eta_dot, state.eta_dot).real
    pot = np.vdot(state.eta, G @ state.eta).real
    return 0.5 * kin + 0.5 * state.g * pot
