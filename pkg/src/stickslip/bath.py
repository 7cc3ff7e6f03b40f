"""Ohmic Caldeira-Leggett bath: spectral density, rates, correlation, diagnostics.

Conventions: hbar = 1, energies in hbar*Omega, rates in Omega. The spectral
density is J(w) = 2*alpha*w*exp(-|w|/omega_c); the transition rate splits as
Gamma(E) = gamma(E)/2 + i*sigma(E) with

  gamma(E) = 4*pi*alpha*E*exp(-|E|/omega_c) / (1 - exp(-E/theta)),
  sigma(E) = 2*alpha*( -omega_c + E*[ e^(-E/omega_c) Ei(E/omega_c)
             + sum_{n>=1} ( e^(-x_n) Ei(x_n) + e^(x_n) Ei(-x_n) ) ] ),
  x_n = E/omega_c + n*E/theta.

The two exponential-integral sums are summed pairwise (individual terms decay
only like 1/n; the pairs like 1/n^2) with polygamma tail corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.special import expi, polygamma

from .params import BathParams

_EPS_DEG = 1e-9  # below this |E| the E -> 0 limits are used
_X_ASYM = 40.0  # pair terms with x above this go to the asymptotic tail
_MAX_TERMS = 10**6


def spectral_density(omega, bp: BathParams):
    """Ohmic J(w) = 2*alpha*w*exp(-|w|/omega_c); odd in w."""
    w = np.asarray(omega, dtype=float)
    out = 2.0 * bp.alpha * w * np.exp(-np.abs(w) / bp.omega_c)
    return float(out) if np.ndim(omega) == 0 else out


def renormalization_constant(bp: BathParams) -> float:
    """u_rn = integral_0^inf J(w)/w dw = 2*alpha*omega_c."""
    return 2.0 * bp.alpha * bp.omega_c


def bath_correlation(tau, bp: BathParams):
    """Thermal bath correlation C(tau) in Hurwitz-zeta closed form (diagnostic).

    C(tau) = 2*alpha*theta^2 * [ zeta(2, (theta/omega_c)(1 + i*omega_c*tau))
                                 + zeta(2, 1 + (theta/omega_c)(1 - i*omega_c*tau)) ],
    which reproduces integral e^(i w tau) f_BE(w) J(w) dw term by term.
    Requires theta > 0.
    """
    if bp.theta <= 0:
        raise ValueError("bath_correlation requires theta > 0")
    import mpmath

    r = bp.theta / bp.omega_c

    def _c(t: float) -> complex:
        z1 = mpmath.zeta(2, mpmath.mpc(r, bp.theta * t))
        z2 = mpmath.zeta(2, mpmath.mpc(1.0 + r, -bp.theta * t))
        return 2.0 * bp.alpha * bp.theta**2 * complex(z1 + z2)

    if np.ndim(tau) == 0:
        return _c(float(tau))
    return np.array([_c(float(t)) for t in np.asarray(tau, dtype=float)])


def gamma_rate(E, bp: BathParams):
    """Real decay rate gamma(E); gamma(0) = 4*pi*alpha*theta; detailed balance exact."""
    e = np.asarray(E, dtype=float)
    out = np.empty_like(e)
    small = np.abs(e) < _EPS_DEG
    out[small] = 4.0 * math.pi * bp.alpha * bp.theta
    big = ~small
    eb = e[big]
    if bp.theta == 0.0:
        out[big] = np.where(eb > 0, 4.0 * math.pi * bp.alpha * eb * np.exp(-np.abs(eb) / bp.omega_c), 0.0)
    else:
        r = eb / bp.theta
        base = 4.0 * math.pi * bp.alpha * np.abs(eb) * np.exp(-np.abs(eb) / bp.omega_c)
        with np.errstate(over="ignore", under="ignore"):
            pos = base / (-np.expm1(-np.abs(r)))  # E > 0 branch
            neg = np.where(np.abs(r) < 700.0, base / np.expm1(np.minimum(np.abs(r), 700.0)), 0.0)
        out[big] = np.where(eb > 0, pos, neg)
    return float(out) if np.ndim(E) == 0 else out


def _pair_term(x):
    """g(x) = e^(-x) Ei(x) + e^(x) Ei(-x), even in x; asymptotically 2/x^2 + 12/x^4 + ..."""
    ax = np.abs(x)
    out = np.empty_like(ax)
    direct = ax < _X_ASYM
    xd = ax[direct]
    out[direct] = np.exp(-xd) * expi(xd) + np.exp(xd) * expi(-xd)
    xa = ax[~direct]
    out[~direct] = 2.0 / xa**2 + 12.0 / xa**4 + 240.0 / xa**6
    return out


def sigma_shift(E, bp: BathParams):
    """Principal-value level shift sigma(E); sigma(0) = -2*alpha*omega_c."""
    if np.ndim(E) == 0:
        return _sigma_scalar(float(E), bp)
    e = np.asarray(E, dtype=float)
    return np.array([_sigma_scalar(float(x), bp) for x in e.ravel()]).reshape(e.shape)


def _sigma_scalar(e: float, bp: BathParams) -> float:
    if bp.alpha == 0.0:
        return 0.0
    if abs(e) < _EPS_DEG:
        return -2.0 * bp.alpha * bp.omega_c
    if bp.theta == 0.0:
        # only the n = 0 term survives
        h = math.exp(-e / bp.omega_c) * expi(e / bp.omega_c)
        return 2.0 * bp.alpha * (-bp.omega_c + e * h)
    a = abs(e) / bp.omega_c
    b = abs(e) / bp.theta
    if b * _MAX_TERMS < _X_ASYM:
        return _sigma_pv_quad(e, bp)  # series cannot reach the asymptotic regime under the cap
    n_direct = min(int(math.ceil((_X_ASYM - a) / b)) + 1 if a < _X_ASYM else 1, _MAX_TERMS)
    s = 0.0
    if n_direct >= 1:
        n = np.arange(1, n_direct + 1, dtype=float)
        s = float(np.sum(_pair_term(a + n * b)))
    # polygamma tails of 2/x^2 + 12/x^4 + 240/x^6 beyond n_direct
    z = n_direct + 1 + a / b
    s += float(
        2.0 * polygamma(1, z) / b**2 + 2.0 * polygamma(3, z) / b**4 + 2.0 * polygamma(5, z) / b**6
    )
    h0 = math.exp(-e / bp.omega_c) * expi(e / bp.omega_c)
    return 2.0 * bp.alpha * (-bp.omega_c + e * (h0 + s))


def _sigma_pv_quad(e: float, bp: BathParams) -> float:
    """Fallback: direct principal-value quadrature of J(w) f_BE(w) / (E + w)."""

    def f(w: float) -> float:
        if abs(w) < 1e-12:
            return 2.0 * bp.alpha * bp.theta
        r = w / bp.theta
        if r > 700.0:
            return spectral_density(w, bp) * math.exp(-r)
        if r < -700.0:
            return -spectral_density(w, bp)
        return spectral_density(w, bp) / math.expm1(r)

    pole = -e
    lo, hi = pole - 1.0, pole + 1.0
    val, _ = quad(f, lo, hi, weight="cauchy", wvar=pole, limit=400)
    tail1, _ = quad(lambda w: f(w) / (w - pole), hi, hi + 40.0 * bp.omega_c, limit=400)
    tail2, _ = quad(lambda w: f(w) / (w - pole), lo - 40.0 * bp.omega_c, lo, limit=400)
    return val + tail1 + tail2


def transition_rate(E, bp: BathParams):
    """Gamma(E) = gamma(E)/2 + i*sigma(E)."""
    g = gamma_rate(E, bp)
    s = sigma_shift(E, bp)
    return 0.5 * g + 1j * s


class BathRates:
    """Vectorised Gamma(E) evaluator with an optional precomputed sigma spline.

    The spline (build_table) makes per-step evaluation cheap inside the
    propagator; gamma is always evaluated directly. Instances are immutable
    after table construction and safe for concurrent reads.
    """

    _cache: dict[tuple, tuple] = {}

    def __init__(self, bp: BathParams):
        self.params = bp
        self._sigma_spline: CubicSpline | None = None
        self._table: np.ndarray | None = None
        self._e0: float = 0.0
        self._inv_step: float = 0.0
        self._span: float = 0.0

    def build_table(self, e_max: float, points_per_unit: int = 150) -> None:
        """Tabulate Gamma on [-e_max, e_max] with a grid refined near 0.

        Tables are memoised per (BathParams, span) for the lifetime of the
        process; rebuilding is idempotent, so concurrent readers are safe.
        """
        if self.params.alpha == 0.0:
            return
        e_max = max(e_max, 1.0)
        key = (self.params.alpha, self.params.omega_c, self.params.theta, round(e_max, 6))
        hit = BathRates._cache.get(key)
        if hit is None:
            coarse = np.linspace(0.05, e_max, max(int(points_per_unit * e_max), 200))[1:]
            fine = np.linspace(1e-6, 0.05, 800)
            pos = np.concatenate([fine, coarse])
            grid = np.concatenate([-pos[::-1], [0.0], pos])
            spline = CubicSpline(grid, sigma_shift(grid, self.params))
            # dense uniform complex table for constant-time lookups
            step = 2e-4
            n_half = int(math.ceil(e_max / step))
            uni = step * np.arange(-n_half, n_half + 1)
            table = 0.5 * gamma_rate(uni, self.params) + 1j * spline(uni)
            hit = (spline, float(uni[0]), 1.0 / step, table)
            BathRates._cache[key] = hit
        self._sigma_spline, self._e0, self._inv_step, self._table = hit
        self._span = e_max

    def sigma(self, E):
        if self._sigma_spline is not None and np.all(np.abs(E) <= self._span):
            return self._sigma_spline(E)
        return sigma_shift(E, self.params)

    def gamma(self, E):
        return gamma_rate(E, self.params)

    def __call__(self, E):
        """Gamma(E), elementwise over an array of energy differences.

        With a table built, values come from piecewise-linear interpolation on
        the refined grid (the propagation hot path); otherwise the closed
        forms are evaluated directly.
        """
        if self.params.alpha == 0.0:
            z = np.zeros_like(np.asarray(E, dtype=float), dtype=complex)
            return complex(0) if np.ndim(E) == 0 else z
        if self._table is not None:
            e = np.asarray(E, dtype=float)
            pos = (e - self._e0) * self._inv_step
            if pos.min() >= 0.0 and pos.max() <= len(self._table) - 1:
                idx = pos.astype(np.intp)
                np.minimum(idx, len(self._table) - 2, out=idx)
                frac = pos - idx
                out = self._table[idx] * (1.0 - frac) + self._table[idx + 1] * frac
                return out if np.ndim(E) else complex(out)
        return 0.5 * self.gamma(E) + 1j * self.sigma(E)


@dataclass(frozen=True)
class MarkovDiagnostics:
    """Time scales probing the weak-coupling/short-memory approximation.

    tau_R is None when alpha = 0 (no relaxation channel). Validity flags use
    "<<" = ratio below 0.1.
    """

    tau_E: float
    tau_s: float
    tau_B: float
    tau_R: float | None
    bath_faster_than_relaxation: bool
    bath_faster_than_system: bool


def markov_diagnostics(snapshots, bp: BathParams, sigma_t: np.ndarray) -> MarkovDiagnostics:
    """Estimate tau_E, tau_s, tau_B, tau_R from a phase-aligned snapshot history."""
    snaps = list(snapshots)
    if len(snaps) < 2:
        raise ValueError("need at least two snapshots")
    rate_e = 0.0
    rate_s = 0.0
    for prev, cur in zip(snaps[:-1], snaps[1:]):
        dt = cur.t_bar - prev.t_bar
        dE = (cur.energies - prev.energies) / dt
        rate_e = max(rate_e, float(np.max(np.abs(dE / cur.energies))))
        dc = (cur.vectors - prev.vectors) / dt
        cross = cur.vectors.T.conj() @ dc - 1j * (cur.vectors.T.conj() @ sigma_t @ cur.vectors)
        np.fill_diagonal(cross, 0.0)
        rate_s = max(rate_s, float(np.max(np.abs(cross))))
    tau_e = math.inf if rate_e == 0 else 1.0 / rate_e
    tau_s = math.inf if rate_s == 0 else 1.0 / rate_s
    # bath memory: 1/e decay of |C(tau)|
    if bp.theta > 0 and bp.alpha > 0:
        c0 = abs(bath_correlation(0.0, bp))
        tau = 1.0 / bp.omega_c
        while abs(bath_correlation(tau, bp)) > c0 / math.e:
            tau *= 1.5
        tau_b = tau
    else:
        tau_b = 1.0 / bp.omega_c
    if bp.alpha == 0.0:
        tau_r = None
        faster_rel = True
    else:
        gmax = 0.0
        for s in snaps:
            diffs = s.energies[None, :] - s.energies[:, None]
            gmax = max(gmax, float(np.max(gamma_rate(diffs, bp))))
        tau_r = math.inf if gmax == 0 else 1.0 / gmax
        faster_rel = tau_b < 0.1 * tau_r
    tau_sys = min(tau_e, tau_s)
    return MarkovDiagnostics(
        tau_E=tau_e,
        tau_s=tau_s,
        tau_B=tau_b,
        tau_R=tau_r,
        bath_faster_than_relaxation=faster_rel,
        bath_faster_than_system=tau_b < 0.1 * tau_sys,
    )
