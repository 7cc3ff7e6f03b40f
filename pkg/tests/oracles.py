"""Independent numerical oracles used by the tests.

These deliberately avoid the closed forms under test: matrix elements come
from Gauss-Hermite quadrature, lattice sums from brute-force summation,
bath quantities from direct (principal-value / Fourier) quadrature.
"""

import math

import numpy as np
from numpy.polynomial.hermite import hermgauss, hermval
from scipy.integrate import quad

_GH_NODES, _GH_WEIGHTS = hermgauss(220)


def oscillator_eigenfunction(n: int, x: np.ndarray) -> np.ndarray:
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    norm = math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return hermval(x, coeffs) * np.exp(-(x**2) / 2.0) / norm


def quadrature_matrix_element(n: int, m: int, fn) -> float:
    """<phi_n| fn(x) |phi_m> over the full line by Gauss-Hermite quadrature."""
    x, w = _GH_NODES, _GH_WEIGHTS
    integrand = oscillator_eigenfunction(n, x) * oscillator_eigenfunction(m, x) * fn(x)
    return float(np.sum(w * integrand * np.exp(x**2)))


def cos_matrix_element(n: int, m: int, kappa: float, phase: float) -> float:
    """<n(t)|cos(kappa x)|m(t)> in the moving frame; phase = kappa*v*t."""
    return quadrature_matrix_element(n, m, lambda y: np.cos(kappa * y + phase))


def sin_matrix_element(n: int, m: int, kappa: float, phase: float) -> float:
    return quadrature_matrix_element(n, m, lambda y: np.sin(kappa * y + phase))


def displaced_overlap(p: int, n: int, s: float) -> float:
    """<phi_p(x) | phi_n(x - s)>."""
    x, w = _GH_NODES, _GH_WEIGHTS
    integrand = (
        oscillator_eigenfunction(p, x) * oscillator_eigenfunction(n, x - s) * np.exp(x**2)
    )
    return float(np.sum(w * integrand))


def brute_force_lattice_potential(x: float, chain, n_terms: int = 10**4) -> float:
    """Direct truncated sums of the Gaussian-resummed repulsion and the r^-6 tail."""
    ns = np.arange(-n_terms, n_terms + 1)
    sr = (
        chain.A_s
        * math.exp(-chain.d / chain.d_s)
        * np.sum(np.exp(-(chain.a**2 / (2.0 * chain.d * chain.d_s)) * ((x - ns * chain.a) / chain.a) ** 2))
    )
    lr = -np.sum(chain.C_6 / (chain.d**2 + (x - ns * chain.a) ** 2) ** 3)
    return float(sr + lr)


def fourier_cos_coefficient(fn, period: float, n_points: int = 4096) -> float:
    """(2/a) * integral_0^a fn(x) cos(2 pi x / a) dx by the rectangle rule."""
    xs = (np.arange(n_points) + 0.5) * period / n_points
    return float(
        (2.0 / period) * np.sum(fn(xs) * np.cos(2.0 * np.pi * xs / period)) * (period / n_points)
    )


def _thermal_weight(w: float, bp) -> float:
    r = w / bp.theta
    if abs(w) < 1e-13:
        return 2.0 * bp.alpha * bp.theta
    if r > 700.0:
        return 2.0 * bp.alpha * w * math.exp(-abs(w) / bp.omega_c) * math.exp(-r)
    if r < -700.0:
        return -2.0 * bp.alpha * w * math.exp(-abs(w) / bp.omega_c)
    return 2.0 * bp.alpha * w * math.exp(-abs(w) / bp.omega_c) / math.expm1(r)


def sigma_pv_oracle(E: float, bp) -> float:
    """PV integral of J(w) f_BE(w) / (E + w) via the symmetric-difference form."""
    pole = -E

    def h(s: float) -> float:
        return (_thermal_weight(pole + s, bp) - _thermal_weight(pole - s, bp)) / s

    upper = 60.0 * bp.omega_c + abs(pole)
    total = 0.0
    for a, b in zip((0.0, 1e-4, 1e-2, 1.0, 10.0), (1e-4, 1e-2, 1.0, 10.0, upper)):
        val, _ = quad(h, a, b, limit=500)
        total += val
    return total


def bath_correlation_oracle(tau: float, bp) -> complex:
    """C(tau) = int e^{i w tau} f_BE J dw by piecewise/Fourier quadrature."""
    j_fn = lambda w: 2.0 * bp.alpha * w * math.exp(-abs(w) / bp.omega_c)

    def jf(w: float) -> float:
        r = w / bp.theta
        if r > 700.0:
            return 0.0
        return j_fn(w) / math.expm1(r)

    # real part: +1 term by Fourier quadrature, f_BE term decays on the theta scale
    re_plus1, _ = quad(j_fn, 0.0, np.inf, weight="cos", wvar=tau, limit=800)
    cut = min(0.75, 700.0 * bp.theta)
    re_fbe, _ = quad(lambda w: 2.0 * jf(w) * math.cos(w * tau), 1e-12, cut, limit=800)
    im_part, _ = quad(j_fn, 0.0, np.inf, weight="sin", wvar=tau, limit=800)
    return complex(re_plus1 + re_fbe, -im_part)
