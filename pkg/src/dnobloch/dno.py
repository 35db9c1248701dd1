"""Taylor series of the conjugated Dirichlet-Neumann operator in the bottom amplitude.

With ``S = D sech(hD)``, ``G0 = D tanh(hD)`` (``D = -i d/dx`` shifted by theta)
and ``B`` multiplication by beta, the series terms are

    M1 = -S B S
    M2 = -S B G0 B S
    M3 =  S (-B^3 D^2 / 6 + B^2 D^2 B / 2 - B G0 B G0 B) S
    M4 =  S (B^2 D^2 B G0 B / 2 + B G0 B^2 D^2 B / 2 - B G0 B G0 B G0 B
             - B G0 B^3 D^2 / 6 - B^3 D^2 G0 B / 6) S

They follow from expanding, order by order in the bottom amplitude, the
condition that the harmonic conjugate of the velocity potential is constant
along the bottom.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bathymetry import BathymetryProfile
from .errors import ConfigError, InvariantViolation
from .fourier import (
    BlochParameter,
    Truncation,
    as_theta,
    central_block,
    diag_symbol,
    g_symbol,
    is_hermitian,
    s_symbol,
    toeplitz_mult,
)

MAX_ORDER = 4


@dataclass(frozen=True)
class DnoSeries:
    """Series terms ``M_1..M_order`` (no powers of eps) at one theta."""

    profile: BathymetryProfile
    theta: float
    trunc: Truncation
    terms: tuple = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.terms)

    def flat(self) -> np.ndarray:
        """Diagonal flat-bottom operator ``G_theta[0]``."""
        h = self.profile.h
        return diag_symbol(lambda k: g_symbol(k, h), self.theta, self.trunc)

    def total(self, eps: float | None = None, order: int | None = None) -> np.ndarray:
        """``G_theta[0] + sum_p eps^p M_p`` truncated at ``order``."""
        eps = self.profile.eps if eps is None else eps
        order = self.order if order is None else order
        if order > self.order:
            raise ValueError(f"series only holds {self.order} terms")
        out = self.flat()
        for p in range(order):
            out = out + eps ** (p + 1) * self.terms[p]
        return out


def _check_order(order: int):
    if int(order) != order or order < 1:
        raise ConfigError(f"Taylor order must be a positive integer, got {order!r}")
    if order > MAX_ORDER:
        raise ConfigError(f"Taylor order {order} unsupported; terms are available up to {MAX_ORDER}")


def build_M_terms(profile: BathymetryProfile, theta, trunc: Truncation, order: int) -> DnoSeries:
    """Assemble ``M_1..M_order`` on the modes of ``trunc``.

    Products are formed on a widened mode set and cut back afterwards, so every
    returned entry is exact for a finitely supported beta.
    """
    _check_order(order)
    theta = as_theta(BlochParameter(theta)) if not isinstance(theta, BlochParameter) else theta.theta
    K = profile.max_wavenumber
    wide = trunc.widen(order * K + 1)
    h = profile.h

    S = np.real(np.diag(diag_symbol(lambda k: s_symbol(k, h), theta, wide)))
    G0 = np.real(np.diag(diag_symbol(lambda k: g_symbol(k, h), theta, wide)))
    D2 = (wide.modes + theta) ** 2
    B = toeplitz_mult(profile.beta, wide)

    def sand(X):
        # S X S with S diagonal
        return central_block(S[:, None] * X * S[None, :], trunc)

    BG = B * G0[None, :]              # B G0
    B2 = B @ B
    B3 = B2 @ B
    terms = []
    if order >= 1:
        terms.append(-sand(B))
    if order >= 2:
        BGB = BG @ B
        terms.append(-sand(BGB))
    if order >= 3:
        X3 = (-B3 * D2[None, :] / 6
              + (B2 * D2[None, :]) @ B / 2
              - BG @ BG @ B)
        terms.append(sand(X3))
    if order >= 4:
        B2D2 = B2 * D2[None, :]
        X4 = (B2D2 @ BG @ B / 2
              + BG @ B2D2 @ B / 2
              - BG @ BG @ BG @ B
              - BG @ B3 * D2[None, :] / 6
              - B3 * (D2 * G0)[None, :] @ B / 6)
        terms.append(sand(X4))
    return DnoSeries(profile, theta, trunc, tuple(terms))


def assemble_G_theta(profile: BathymetryProfile, theta, trunc: Truncation, order: int = 4,
                     check: bool = True) -> np.ndarray:
    """Truncated matrix of ``G_theta[b]`` through Taylor order ``order``."""
    _check_order(order)
    th = as_theta(BlochParameter(as_theta(theta)))
    if profile.is_flat:
        return diag_symbol(lambda k: g_symbol(k, profile.h), th, trunc)
    series = build_M_terms(profile, th, trunc, order)
    G = series.total()
    if check and not is_hermitian(G):
        raise InvariantViolation("assembled operator is not Hermitian")
    return G
