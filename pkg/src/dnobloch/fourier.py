"""Truncated Fourier algebra on the periodized interval [0, 2*pi).

Everything here works on the mode set {-N, ..., N}; mode ``j`` lives in row
``j + N``.  Operators are dense ``(2N+1, 2N+1)`` complex arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import AliasingError, ConfigError

REAL_TOL = 1e-12


@dataclass(frozen=True)
class Truncation:
    """Fourier cutoff: modes ``-N..N``."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"truncation N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def dim(self) -> int:
        return 2 * self.N + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def index(self, j: int) -> int:
        if abs(j) > self.N:
            raise IndexError(f"mode {j} outside truncation N={self.N}")
        return j + self.N

    def widen(self, extra: int) -> "Truncation":
        return Truncation(self.N + int(extra))


def central_block(mat: np.ndarray, inner: Truncation) -> np.ndarray:
    """Restrict an operator on a wider mode set to the modes of ``inner``."""
    n_outer = (mat.shape[0] - 1) // 2
    off = n_outer - inner.N
    if off < 0:
        raise ValueError("inner truncation is wider than the matrix")
    return mat[off : off + inner.dim, off : off + inner.dim]


@dataclass(frozen=True)
class FourierField:
    """Coefficients of ``sum_j c_j exp(i j x)`` for ``|j| <= N``.

    ``coeffs[j + N]`` holds mode ``j``.  Modes beyond ``N`` are zero.
    """

    coeffs: np.ndarray
    real_valued: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ConfigError("FourierField needs an odd-length 1-D coefficient array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.real_valued and not self.is_hermitian_symmetric():
            raise ConfigError("field flagged real-valued violates c(-j) = conj(c(j))")

    @classmethod
    def from_modes(cls, modes: Mapping[int, complex], N: int | None = None,
                   real_valued: bool = False) -> "FourierField":
        top = max((abs(int(k)) for k in modes), default=0)
        N = max(top, 1) if N is None else N
        if top > N:
            raise ConfigError(f"mode {top} exceeds requested N={N}")
        c = np.zeros(2 * N + 1, dtype=complex)
        for k, v in modes.items():
            c[int(k) + N] += v
        return cls(c, real_valued=real_valued)

    @classmethod
    def zeros(cls, N: int, real_valued: bool = True) -> "FourierField":
        return cls(np.zeros(2 * N + 1, dtype=complex), real_valued=real_valued)

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def coeff(self, j: int) -> complex:
        return complex(self.coeffs[j + self.N]) if abs(j) <= self.N else 0j

    def padded(self, N: int) -> np.ndarray:
        """Coefficient array on modes ``-N..N`` (zero-padded or cut)."""
        out = np.zeros(2 * N + 1, dtype=complex)
        m = min(N, self.N)
        out[N - m : N + m + 1] = self.coeffs[self.N - m : self.N + m + 1]
        return out

    def support(self, tol: float = 0.0) -> list[int]:
        """Modes with nonzero coefficient."""
        return [int(j) for j, c in zip(self.modes, self.coeffs) if abs(c) > tol]

    def is_hermitian_symmetric(self, rtol: float = REAL_TOL) -> bool:
        c = self.coeffs
        scale = max(np.max(np.abs(c)), 1.0) if c.size else 1.0
        return bool(np.max(np.abs(c - np.conj(c[::-1]))) <= rtol * scale)

    def __add__(self, other: "FourierField") -> "FourierField":
        N = max(self.N, other.N)
        return FourierField(self.padded(N) + other.padded(N),
                            real_valued=self.real_valued and other.real_valued)

    def scaled(self, a: complex) -> "FourierField":
        return FourierField(a * self.coeffs,
                            real_valued=self.real_valued and np.isreal(a))


@dataclass(frozen=True)
class BlochParameter:
    """Floquet exponent reduced into [-1/2, 1/2)."""

    theta: float

    def __post_init__(self):
        t = float(self.theta)
        t = (t + 0.5) % 1.0 - 0.5
        # guard against (0.5 - tiny) % 1 rounding to exactly 0.5
        if t >= 0.5:
            t -= 1.0
        object.__setattr__(self, "theta", t)

    def __float__(self) -> float:
        return self.theta


def as_theta(theta) -> float:
    return theta.theta if isinstance(theta, BlochParameter) else float(theta)


# ---------------------------------------------------------------------------
# grid transforms

def synthesize(field: FourierField, grid_size: int) -> np.ndarray:
    """Sample ``sum_j c_j e^{ijx}`` at ``x_m = 2 pi m / grid_size``."""
    if grid_size < 2 * field.N + 2:
        raise AliasingError(
            f"grid of {grid_size} points aliases modes up to {field.N}; "
            f"need at least {2 * field.N + 2}")
    buf = np.zeros(grid_size, dtype=complex)
    buf[field.modes % grid_size] = field.coeffs
    vals = np.fft.ifft(buf) * grid_size
    return vals.real.copy() if field.real_valued else vals


def analyze(samples: np.ndarray, N: int, real_valued: bool = False) -> FourierField:
    """Inverse of :func:`synthesize`: coefficients of modes ``-N..N``."""
    samples = np.asarray(samples)
    M = samples.size
    if M < 2 * N + 2:
        raise AliasingError(f"{M} samples cannot resolve modes up to {N}")
    spec = np.fft.fft(samples) / M
    c = spec[np.arange(-N, N + 1) % M]
    if real_valued:
        c = 0.5 * (c + np.conj(c[::-1]))
    return FourierField(c, real_valued=real_valued)


def grid(grid_size: int) -> np.ndarray:
    return 2 * np.pi * np.arange(grid_size) / grid_size


# ---------------------------------------------------------------------------
# symbols

def sech(z):
    """Overflow-free hyperbolic secant."""
    a = np.abs(np.asarray(z, dtype=float))
    e = np.exp(-a)
    return 2 * e / (1 + e * e)


def g_symbol(k, h: float):
    """Flat-bottom Dirichlet-Neumann symbol ``k tanh(h k)``."""
    k = np.asarray(k, dtype=float)
    return k * np.tanh(h * k)


def s_symbol(k, h: float):
    """Bottom-coupling symbol ``k sech(h k)``."""
    k = np.asarray(k, dtype=float)
    return k * sech(h * k)


def diag_symbol(f: Callable[[np.ndarray], np.ndarray], theta, trunc: Truncation) -> np.ndarray:
    """Diagonal operator acting on mode ``j`` by ``f(j + theta)``."""
    k = trunc.modes + as_theta(theta)
    vals = np.asarray(f(k))
    if not np.all(np.isfinite(vals)):
        raise ValueError("symbol is not finite on the shifted wavenumbers")
    return np.diag(vals.astype(complex))


def toeplitz_mult(field: FourierField, trunc: Truncation) -> np.ndarray:
    """Matrix of pointwise multiplication: entry ``(j, l) = c_{j-l}``."""
    N = trunc.N
    c = field.padded(2 * N)  # c[k + 2N] = coeff k, |k| <= 2N
    j = trunc.modes
    return c[(j[:, None] - j[None, :]) + 2 * N]


def is_hermitian(mat: np.ndarray, rtol: float = REAL_TOL) -> bool:
    scale = max(float(np.max(np.abs(mat))) if mat.size else 0.0, 1.0)
    return bool(np.max(np.abs(mat - mat.conj().T)) <= rtol * scale)
