"""Block diagonalization of the operator around a double point.

For a colliding mode pair ``(j1, j2)`` with projector ``P`` onto
``{e^{i j1 x}, e^{i j2 x}}`` we build an anti-Hermitian generator
``T = sum_p eps^p T_p`` with ``P e^{-T} (G + M) e^{T} (I - P) = 0`` order by
order, and the 2x2 effective matrix ``A = P e^{-T} (G + M) e^{T} P``.
Matrix power series are plain lists indexed by the power of eps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bathymetry import BathymetryProfile
from .dno import DnoSeries
from .errors import ConfigError, SmallDivisorError
from .fourier import BlochParameter, as_theta, g_symbol, s_symbol, sech

DIVISOR_FLOOR = 1e-8


# ---------------------------------------------------------------------------
# truncated matrix power series

def series_mul(a, b, order):
    out = []
    for q in range(order + 1):
        acc = None
        for i in range(q + 1):
            j = q - i
            if i < len(a) and j < len(b) and a[i] is not None and b[j] is not None:
                term = a[i] @ b[j]
                acc = term if acc is None else acc + term
        out.append(acc)
    return out


def series_exp(t, order, dim, sign=1):
    """Coefficients of ``exp(sign * T)`` with ``t[0]`` ignored (T has no eps^0 term)."""
    gen = [None] + [None if x is None else sign * x for x in t[1:order + 1]]
    result = [np.eye(dim, dtype=complex)] + [np.zeros((dim, dim), complex) for _ in range(order)]
    power = [np.eye(dim, dtype=complex)]
    for k in range(1, order + 1):
        power = series_mul(power, gen, order)
        for q in range(order + 1):
            if power[q] is not None:
                result[q] = result[q] + power[q] / math.factorial(k)
    return result


def conjugated_series(H, T, order):
    """Coefficients of ``e^{-T} H e^{T}`` up to ``order``."""
    dim = H[0].shape[0]
    plus = series_exp(T, order, dim, +1)
    minus = series_exp(T, order, dim, -1)
    return series_mul(series_mul(minus, H, order), plus, order)


# ---------------------------------------------------------------------------
# pair selection

def gap_pair(gap: int, h: float = 1.0):
    """Colliding modes and double point for the gap between bands ``gap-1`` and ``gap``.

    Even gaps collide at theta = 0, odd ones at theta = -1/2.  The modes are the
    flat-bottom labels of bands ``gap-1`` and ``gap`` there, sorted by symbol
    value; returned as ``(theta_star, (j_hi, j_lo))`` with ``j_hi`` the mode
    that is larger in ``j + theta_star``.
    """
    if gap < 1:
        raise ConfigError("gap index must be >= 1")
    theta_star = 0.0 if gap % 2 == 0 else -0.5
    modes = np.arange(-gap - 2, gap + 3)
    order = np.argsort(np.abs(modes + theta_star) + 1e-9 * (modes < 0), kind="stable")
    j_a, j_b = int(modes[order[gap - 1]]), int(modes[order[gap]])
    assert abs(g_symbol(j_a + theta_star, h) - g_symbol(j_b + theta_star, h)) < 1e-12
    pair = (j_a, j_b) if j_a + theta_star > j_b + theta_star else (j_b, j_a)
    return theta_star, pair


# ---------------------------------------------------------------------------
# T recursion

@dataclass(frozen=True)
class PerturbationData:
    """Generators ``T_1..T_q`` for one mode pair at one theta."""

    pair: tuple
    theta: float
    T: tuple            # T[0] is None, T[p] for p = 1..q_max
    series: DnoSeries

    @property
    def q_max(self) -> int:
        return len(self.T) - 1

    @property
    def rows(self):
        N = self.series.trunc.N
        return [self.pair[0] + N, self.pair[1] + N]

    def generator(self, eps: float) -> np.ndarray:
        return sum(eps ** p * self.T[p] for p in range(1, self.q_max + 1))


def _hamiltonian_series(series: DnoSeries):
    return [series.flat()] + list(series.terms)


def solve_T_recursion(series: DnoSeries, n: int | None = None, q_max: int = 3,
                      pair: tuple | None = None) -> PerturbationData:
    """Generators ``T_p`` (p <= q_max) block-diagonalizing around ``pair``.

    ``n`` selects the pair ``(n, -n)``; an explicit ``pair`` overrides it.
    """
    if pair is None:
        if n is None or n < 1:
            raise ConfigError("give a gap index n >= 1 or an explicit mode pair")
        pair = (n, -n)
    if not 1 <= q_max <= series.order:
        raise ConfigError(f"q_max={q_max} needs series terms through order {q_max}; "
                          f"series holds {series.order}")
    N = series.trunc.N
    if any(abs(j) > N for j in pair):
        raise ConfigError(f"pair {pair} outside truncation N={N}")
    dim = series.trunc.dim
    H = _hamiltonian_series(series)
    g = np.real(np.diag(H[0]))
    rows = [pair[0] + N, pair[1] + N]
    others = np.array([i for i in range(dim) if i not in rows])
    modes = series.trunc.modes

    divisors = {}
    for r in rows:
        d = g[r] - g[others]
        floor = DIVISOR_FLOOR * np.sqrt(1 + (modes[others] - modes[r]) ** 2)
        bad = np.flatnonzero(np.abs(d) < floor)
        if bad.size:
            l = int(modes[others[bad[0]]])
            raise SmallDivisorError(
                f"small divisor g_{modes[r]} - g_{l} = {d[bad[0]]:.3e} at theta={series.theta}; "
                f"theta lies outside the validity region of pair {pair}", mode=l, divisor=d[bad[0]])
        divisors[r] = d

    T = [None]
    for q in range(1, q_max + 1):
        X = conjugated_series(H, T + [None], q)[q]
        Tq = np.zeros((dim, dim), dtype=complex)
        for r in rows:
            Tq[r, others] = -X[r, others] / divisors[r]
        Tq[np.ix_(others, rows)] = -Tq[np.ix_(rows, others)].conj().T
        T.append(Tq)
    return PerturbationData(tuple(pair), series.theta, tuple(T), series)


def effective_matrices(data: PerturbationData, max_order: int | None = None):
    """``A_0 .. A_m`` (2x2), ``m = min(series order, q_max + 1)`` by default."""
    m = min(data.series.order, data.q_max + 1) if max_order is None else max_order
    if m > min(data.series.order, data.q_max + 1):
        raise ConfigError(f"A_{m} needs T through order {m - 1} and M through order {m}")
    E = conjugated_series(_hamiltonian_series(data.series), list(data.T), m)
    idx = np.ix_(data.rows, data.rows)
    return [E[p][idx] for p in range(m + 1)]


def effective_matrix_A(data: PerturbationData, eps: float, max_order: int | None = None):
    """Summed effective matrix ``sum_p eps^p A_p`` and the per-order terms."""
    terms = effective_matrices(data, max_order)
    total = sum(eps ** p * A for p, A in enumerate(terms))
    return total, terms


def commutator(a, b):
    return a @ b - b @ a


def a4_reduced_form(data: PerturbationData) -> np.ndarray:
    """``P (M4 - [T1,M3]/2 - [T2,M2]/2 - [T3,M1]/2 + [T1,[T1,[T1,M1]]]/24) P``.

    The compact fourth-order expression; compare with ``effective_matrices``.
    """
    if data.q_max < 3 or data.series.order < 4:
        raise ConfigError("reduced A_4 needs T_1..T_3 and M_1..M_4")
    M = (None,) + data.series.terms
    T = data.T
    X = (M[4] - commutator(T[1], M[3]) / 2 - commutator(T[2], M[2]) / 2
         - commutator(T[3], M[1]) / 2
         + commutator(T[1], commutator(T[1], commutator(T[1], M[1]))) / 24)
    return X[np.ix_(data.rows, data.rows)]


def off_block_residual(data: PerturbationData, eps: float) -> float:
    """Frobenius norm of ``P e^{-T}(G + M) e^{T} (I - P)`` at amplitude ``eps``."""
    H = data.series.total(eps)
    Tm = data.generator(eps)
    U = scipy.linalg.expm(Tm)
    Uinv = scipy.linalg.expm(-Tm)
    E = Uinv @ H @ U
    others = [i for i in range(H.shape[0]) if i not in data.rows]
    return float(np.linalg.norm(E[np.ix_(data.rows, others)]))


# ---------------------------------------------------------------------------
# closed forms

def gap_from_A(A: np.ndarray):
    """Eigenvalues of a 2x2 Hermitian matrix and their difference."""
    A = np.asarray(A)
    a, d = A[0, 0].real, A[1, 1].real
    c = A[0, 1]
    root = np.sqrt((a - d) ** 2 + 4 * abs(c) ** 2)
    lo, hi = 0.5 * (a + d - root), 0.5 * (a + d + root)
    return lo, hi, hi - lo


def second_order_coefficients(profile: BathymetryProfile, n: int, theta=0.0):
    """``a_{n,n}``, ``a_{-n,-n}``, ``a_{n,-n}``: the eps^2 block of the effective matrix.

    Sums run over the stored support of beta and are exact for it.
    """
    t = as_theta(theta)
    h = profile.h
    b = profile.beta
    sup = profile.support

    def g(j):
        return float(g_symbol(j + t, h))

    def s(j):
        return float(s_symbol(j + t, h))

    beta = b.coeff
    sn, smn = s(n), s(-n)
    # l ranges over modes coupled to +n or -n through one beta factor
    ls = sorted({n - k for k in sup} | {-n - k for k in sup} - {n, -n})

    a_nn = -sn ** 2 * (sum(abs(beta(k)) ** 2 * g(k + n) for k in sup)
                       - sum(s(l) ** 2 * abs(beta(n - l)) ** 2 / (g(n) - g(l)) for l in ls))
    a_mm = -smn ** 2 * (sum(abs(beta(k)) ** 2 * g(k - n) for k in sup)
                        - sum(s(l) ** 2 * abs(beta(n + l)) ** 2 / (g(-n) - g(l)) for l in ls))
    ks = sorted({k for k in range(-2 * profile.max_wavenumber - n, 2 * profile.max_wavenumber + n + 1)})
    a_nm = (-smn * sn * sum(g(-k) * beta(n + k) * beta(n - k) for k in ks)
            + 0.5 * sn * smn * sum(beta(n - l) * beta(l + n) * s(l) ** 2
                                   * (1 / (g(n) - g(l)) + 1 / (g(-n) - g(l))) for l in ls))
    return a_nn.real if np.isreal(a_nn) else a_nn, a_mm.real if np.isreal(a_mm) else a_mm, complex(a_nm)


ANALYTIC_PRESETS = ("cosx_gap1", "cosx_gap2", "cosx_gap2_full", "cosx_center_shift",
                    "cos13_gap2")


def analytic_gap_formulas(preset: str, h: float, eps: float) -> float:
    """Closed-form gap predictions for the worked examples.

    ``cosx_center_shift`` is the deviation of the gap-1 centre from ``g_0(1/2)``.
    ``cosx_gap2`` keeps only the ``M_4`` part of the fourth-order off-diagonal
    entry, ``s_1^2 g_2 / 48``; ``cosx_gap2_full`` also keeps the ``[T_1, M_3]``
    and ``[T_3, M_1]`` contributions, which add rather than cancel:
    ``(s_1^2 / 48) (g_2 + s_2^2 / (g_2 - g_1))`` at theta = 0.
    """
    if h <= 0 or eps < 0:
        raise ConfigError("need h > 0 and eps >= 0")
    if preset == "cosx_gap1":
        return 0.25 * sech(h / 2) ** 2 * eps
    if preset == "cosx_gap2":
        return sech(h) ** 2 * np.tanh(2 * h) / 12 * eps ** 4
    if preset == "cosx_gap2_full":
        s1, s2 = float(s_symbol(1.0, h)), float(s_symbol(2.0, h))
        g1, g2 = float(g_symbol(1.0, h)), float(g_symbol(2.0, h))
        return 2 * eps ** 4 * s1 ** 2 / 48 * (g2 + s2 ** 2 / (g2 - g1))
    if preset == "cosx_center_shift":
        s0 = float(s_symbol(0.5, h))
        g0 = float(g_symbol(0.5, h))
        g1 = float(g_symbol(1.5, h))
        return -eps ** 2 * s0 ** 2 * (g0 ** 2 - 9 / 4) / (4 * (g0 - g1))
    if preset == "cos13_gap2":
        th, t2 = np.tanh(h), np.tanh(2 * h)
        return eps ** 2 * sech(h) ** 2 * abs(4 - 2 * th * t2) / abs(th - 2 * t2)
    raise ConfigError(f"unknown analytic preset {preset!r}; choose from {ANALYTIC_PRESETS}")


# ---------------------------------------------------------------------------
# scaling fits and opening predicate

@dataclass(frozen=True)
class ScalingFit:
    exponent: float | None
    coefficient: float | None
    residual: float | None
    closed: bool

    def as_dict(self):
        return {"exponent": self.exponent, "coefficient": self.coefficient,
                "residual": self.residual, "closed": self.closed}


def fit_gap_scaling(eps_list, width_list, floor=None) -> ScalingFit:
    """Least-squares fit of ``log width = log C + p log eps``.

    ``floor`` is the closed-gap threshold (a scalar or one value per point);
    if fewer than three widths clear it, the gap is reported closed and no fit
    is attempted.
    """
    eps = np.asarray(eps_list, dtype=float)
    w = np.asarray(width_list, dtype=float)
    if eps.shape != w.shape:
        raise ValueError("eps and width lists differ in length")
    if np.any(eps <= 0):
        raise ValueError("eps values must be positive")
    floor = np.broadcast_to(1e-10 if floor is None else np.asarray(floor, dtype=float), w.shape)
    ok = w > floor
    if ok.sum() < 3:
        return ScalingFit(None, None, None, True)
    x, y = np.log(eps[ok]), np.log(w[ok])
    (p, logc), res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / ok.sum())) if res.size else 0.0
    return ScalingFit(float(p), float(np.exp(logc)), resid, False)


def gap_opening_predicate(support, target: int, q: int) -> bool:
    """Can ``target`` be written as a sum of at most ``q`` wavenumbers from ``support``?

    A necessary condition for the off-diagonal effective entry (and hence the
    gap) to be nonzero at order <= q.  For the gap at theta = 0 between modes
    ``+n`` and ``-n`` the target is ``2n``; at theta = -1/2 it is the
    difference of the colliding modes.
    """
    ks = sorted({int(k) for k in support if k != 0})
    if not ks or q < 1:
        return False
    reach = {0}
    for _ in range(q):
        reach = {r + k for r in reach for k in ks}
        if target in reach:
            return True
    return False


def gap_target(gap: int) -> int:
    """Mode difference the bottom must bridge to open ``gap``."""
    _, (j1, j2) = gap_pair(gap)
    return j1 - j2
