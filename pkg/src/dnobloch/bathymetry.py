"""Periodic bottom profiles ``y = -h + eps * beta(x)``."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .fourier import FourierField, synthesize

PRESETS = {
    "cosx": {1: 0.5, -1: 0.5},
    "cos2x": {2: 0.5, -2: 0.5},
    "cos13": {1: 0.5, -1: 0.5, 3: 0.5, -3: 0.5},
}


@dataclass(frozen=True)
class BathymetryProfile:
    """Mean depth ``h``, bottom shape ``beta`` (zero mean, real) and amplitude ``eps``.

    Construction validates the clearance ``h - eps*beta(x) >= c0`` on a dense grid.
    """

    h: float
    beta: FourierField
    eps: float = 0.0
    c0: float = 1e-3

    def __post_init__(self):
        if not np.isfinite(self.h) or self.h <= 0:
            raise ConfigError(f"depth h must be positive, got {self.h}")
        if not np.isfinite(self.eps) or self.eps < 0:
            raise ConfigError(f"amplitude eps must be >= 0, got {self.eps}")
        if self.c0 <= 0:
            raise ConfigError("clearance bound c0 must be positive")
        b = self.beta
        scale = max(float(np.max(np.abs(b.coeffs))), 1.0)
        if abs(b.coeff(0)) > 1e-12 * scale:
            raise ConfigError("beta must have zero mean (coefficient of mode 0 is nonzero)")
        if not b.is_hermitian_symmetric():
            raise ConfigError("beta must be real-valued: beta_{-k} = conj(beta_k)")
        if not b.real_valued:
            object.__setattr__(self, "beta", FourierField(b.coeffs, real_valued=True))
        depth = self.h - self.eps * self.bottom_shape(max(1024, 32 * self.beta.N))
        if depth.min() < self.c0:
            raise ConfigError(
                f"clearance violated: min(h - eps*beta) = {depth.min():.6g} < c0 = {self.c0}")

    @classmethod
    def preset(cls, name: str, h: float = 1.0, eps: float = 0.0, c0: float = 1e-3):
        try:
            modes = PRESETS[name]
        except KeyError:
            raise ConfigError(f"unknown profile preset {name!r}; "
                              f"choose from {sorted(PRESETS)}") from None
        return cls(h, FourierField.from_modes(modes, real_valued=True), eps, c0)

    @classmethod
    def from_triples(cls, triples: Iterable, h: float, eps: float = 0.0, c0: float = 1e-3):
        """Build beta from ``(k, re, im)`` triples; the conjugate mode is filled in."""
        modes: dict[int, complex] = {}
        for t in triples:
            try:
                k, re, im = t
            except (TypeError, ValueError):
                raise ConfigError(f"beta entry {t!r} is not a (k, re, im) triple") from None
            if int(k) != k:
                raise ConfigError(f"wavenumber {k!r} is not an integer")
            k, c = int(k), complex(re, im)
            if k == 0:
                if c != 0:
                    raise ConfigError("beta must have zero mean; got a nonzero k=0 entry")
                continue
            for kk, cc in ((k, c), (-k, c.conjugate())):
                if kk in modes and abs(modes[kk] - cc) > 1e-14:
                    raise ConfigError(f"conflicting entries for beta mode {kk}")
                modes[kk] = cc
        if not modes:
            modes = {1: 0.0}
        return cls(h, FourierField.from_modes(modes, real_valued=True), eps, c0)

    def with_eps(self, eps: float) -> "BathymetryProfile":
        return replace(self, eps=eps)

    @property
    def support(self) -> list[int]:
        return self.beta.support()

    @property
    def max_wavenumber(self) -> int:
        """Largest ``|k|`` with ``beta_k != 0`` (0 for a flat bottom)."""
        return max((abs(k) for k in self.support), default=0)

    @property
    def is_flat(self) -> bool:
        return self.eps == 0 or not self.support

    def bottom_shape(self, grid_size: int) -> np.ndarray:
        """Samples of beta on the uniform grid."""
        return synthesize(self.beta, max(grid_size, 2 * self.beta.N + 2)).real

    def depth(self, x: np.ndarray) -> np.ndarray:
        """Local depth ``h - eps*beta(x)`` at arbitrary points."""
        x = np.asarray(x, dtype=float)
        b = self.beta
        vals = np.real(np.exp(1j * np.outer(x, b.modes)) @ b.coeffs)
        return self.h - self.eps * vals
