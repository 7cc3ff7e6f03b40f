"""Lattice potential of the 1D atomic chain: exact lattice sums and the cosine reduction.

The short-range repulsion summed over sites collapses to a Jacobi theta
function; the r^-6 attraction has a closed-form lattice sum. For d >> a both
reduce to  V(x) ~= Delta0 + U0/2 + (U0/2) cos(2 pi x / a).
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .params import ChainParams


def theta3(u, q: float):
    """Third Jacobi theta function 1 + 2*sum_n q^(n^2) cos(2nu), 0 <= q < 1.

    The series is truncated once a term magnitude drops below 1e-16.
    """
    if not 0 <= q < 1:
        raise ValueError(f"theta3 needs 0 <= q < 1, got {q}")
    s = np.ones_like(np.asarray(u, dtype=float))
    n = 1
    while True:
        amp = 2.0 * q ** (n * n)
        if amp < 1e-16:
            break
        s = s + amp * np.cos(2.0 * n * np.asarray(u, dtype=float))
        n += 1
    if np.ndim(u) == 0:
        return float(s)
    return s


def _short_range(x, p: ChainParams):
    # Gaussian-resummed overlap repulsion: A_s e^{-d/d_s} sum_n e^{-(x-na)^2/(2 d d_s)}
    pref = p.A_s * math.exp(-p.d / p.d_s) * math.sqrt(2.0 * math.pi * p.d * p.d_s / p.a**2)
    q = math.exp(-2.0 * math.pi**2 * p.d * p.d_s / p.a**2)
    return pref * theta3(np.pi * np.asarray(x, dtype=float) / p.a, q)


def _long_range(x, p: ChainParams):
    # closed form of -C6 sum_n [d^2 + (x-na)^2]^-3, written in e^{-2 pi d/a}
    # so it stays finite for arbitrarily large d/a
    if p.C_6 == 0.0:
        return np.zeros_like(np.asarray(x, dtype=float))
    u = math.exp(-2.0 * math.pi * p.d / p.a)
    c = np.cos(2.0 * np.pi * np.asarray(x, dtype=float) / p.a)
    w = 1.0 + u * u - 2.0 * u * c
    t1 = (3.0 * math.pi * p.d / (8.0 * p.a)) * (1.0 - u * u) / w
    t2 = (3.0 * math.pi**2 * p.d**2 / (4.0 * p.a**2)) * 2.0 * u * (c * (1.0 + u * u) - 2.0 * u) / w**2
    t3 = (
        (math.pi**3 * p.d**3 / (2.0 * p.a**3))
        * 2.0
        * u
        * (1.0 - u * u)
        * (c * (1.0 + u * u) + 2.0 * u * (c * c - 2.0))
        / w**3
    )
    return -(p.C_6 / p.d**6) * (t1 + t2 + t3)


def lattice_potential_exact(x, p: ChainParams):
    """Chain potential V_sr(x) + V_lr(x) from the exact lattice sums; periodic in a.

    Accepts a scalar or array x (same length unit as p.a).
    """
    v = _short_range(x, p) + _long_range(x, p)
    if np.ndim(x) == 0:
        return float(v)
    return v


def lattice_potential_cosine(p: ChainParams) -> tuple[float, float]:
    """Cosine-approximation amplitude U0(d) and offset Delta0(d).

    Valid for d >> a; warns when d < 2a, and warns (non-fatally) when the
    cosine approximation deviates from the exact potential by more than 5% of
    U0 anywhere over one period.
    """
    if p.d < 2.0 * p.a:
        warnings.warn(
            f"cosine approximation assumes d >> a (d/a = {p.d / p.a:.2f})",
            stacklevel=2,
        )
    sr_pref = p.A_s * math.sqrt(2.0 * math.pi * p.d * p.d_s / p.a**2)
    sr_mean = sr_pref * math.exp(-p.d / p.d_s)
    lr_mean = 3.0 * math.pi * p.C_6 / (8.0 * p.d**5 * p.a)
    U0 = 4.0 * (
        sr_pref * math.exp(-p.d / p.d_s - 2.0 * math.pi**2 * p.d * p.d_s / p.a**2)
        - lr_mean * math.exp(-2.0 * math.pi * p.d / p.a)
    )
    Delta0 = (sr_mean - lr_mean) - 0.5 * U0
    if U0 != 0.0:
        xs = np.linspace(0.0, p.a, 257)
        dev = np.max(np.abs(lattice_potential_exact(xs, p) - cosine_potential(xs, p)))
        if dev > 0.05 * abs(U0):
            warnings.warn(
                f"cosine approximation off by {dev / abs(U0):.1%} of U0 over one period",
                stacklevel=2,
            )
    return U0, Delta0


def cosine_potential(x, p: ChainParams):
    """The reduced potential Delta0 + U0/2 + (U0/2) cos(2 pi x / a)."""
    U0, Delta0 = _cosine_coefficients(p)
    return Delta0 + 0.5 * U0 + 0.5 * U0 * np.cos(2.0 * np.pi * np.asarray(x, dtype=float) / p.a)


def _cosine_coefficients(p: ChainParams) -> tuple[float, float]:
    # same algebra as lattice_potential_cosine, without the diagnostics
    sr_pref = p.A_s * math.sqrt(2.0 * math.pi * p.d * p.d_s / p.a**2)
    sr_mean = sr_pref * math.exp(-p.d / p.d_s)
    lr_mean = 3.0 * math.pi * p.C_6 / (8.0 * p.d**5 * p.a)
    U0 = 4.0 * (
        sr_pref * math.exp(-p.d / p.d_s - 2.0 * math.pi**2 * p.d * p.d_s / p.a**2)
        - lr_mean * math.exp(-2.0 * math.pi * p.d / p.a)
    )
    Delta0 = (sr_mean - lr_mean) - 0.5 * U0
    return U0, Delta0
