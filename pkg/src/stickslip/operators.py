"""Closed-form operator matrices in the moving harmonic-oscillator basis.

Everything is expressed through one time-independent prefactor table
pref[n,n'] = (-1)^floor(|n-n'|/2) / sqrt(2^(|n-n'|+2)) * sqrt(min!/max!)
             * kappa^|n-n'| * e^(-kappa^2/4) * L_min^|n-n'|(kappa^2/2),
built once per (kappa, n_size); the drive enters only through
sin/cos(kappa * v_bar * t_bar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams


@dataclass(frozen=True)
class OperatorMatrix:
    """A matrix representation tagged with its evaluation time and role."""

    entries: np.ndarray
    t_bar: float
    kind: str  # hamiltonian | corrugation | drift | coupling | position | momentum | overlap


def genlaguerre(m: int, k: int, x: float) -> float:
    """Associated Laguerre L_m^k(x) by upward recurrence (stable for x >= 0)."""
    if m == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + k - x
    for j in range(1, m):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return cur


def prefactor_table(kappa: float, n_size: int) -> np.ndarray:
    """Time-independent magnitude/sign table shared by the corrugation and coupling matrices."""
    half = kappa * kappa / 2.0
    expf = math.exp(-half / 2.0)  # e^{-kappa^2/4}
    tab = np.zeros((n_size, n_size))
    for n in range(n_size):
        for m in range(n, n_size):
            delta = m - n
            # sqrt(min!/max!) * kappa^delta as a product of kappa/sqrt(j) factors
            ratio = 1.0
            for j in range(n + 1, m + 1):
                ratio *= kappa / math.sqrt(j)
            val = (
                (-1.0) ** (delta // 2)
                / math.sqrt(2.0 ** (delta + 2))
                * ratio
                * expf
                * genlaguerre(n, delta, half)
            )
            tab[n, m] = val
            tab[m, n] = val
    return tab


class MovingBasis:
    """Precomputed operator blocks for a given (SystemParams, n_size).

    The table is immutable after construction and safe to share across
    threads; the per-time builders allocate fresh arrays.
    """

    def __init__(self, p: SystemParams, n_size: int):
        self.p = p
        self.n_size = n_size
        self.pref = prefactor_table(p.kappa, n_size)
        idx = np.arange(n_size)
        odd = (np.abs(idx[:, None] - idx[None, :]) % 2) == 1
        self._v_sin = np.where(odd, self.pref, 0.0)  # odd |n-n'| block
        self._v_cos = np.where(odd, 0.0, self.pref)  # even |n-n'| block
        self.diagonal = idx + 0.5 + 0.5 * p.u0
        self._sigma = drift_matrix(p.v_bar, n_size).entries

    def phase(self, t_bar: float) -> float:
        return self.p.kappa * self.p.v_bar * t_bar

    def corrugation(self, t_bar: float) -> np.ndarray:
        ph = self.phase(t_bar)
        return math.sin(ph) * self._v_sin - math.cos(ph) * self._v_cos

    def hamiltonian(self, t_bar: float) -> np.ndarray:
        h = self.p.u0 * self.corrugation(t_bar)
        h[np.diag_indices(self.n_size)] += self.diagonal
        return h

    def hamiltonian_xc_derivative(self, t_bar: float) -> np.ndarray:
        """d(H)/d(x_c) at fixed basis, x_c = v_bar*t_bar (drives the trap phase only)."""
        ph = self.phase(t_bar)
        return self.p.u0 * self.p.kappa * (math.cos(ph) * self._v_sin + math.sin(ph) * self._v_cos)

    def coupling(self, t_bar: float) -> np.ndarray:
        ph = self.phase(t_bar)
        return 2.0 * (math.sin(ph) * self._v_cos + math.cos(ph) * self._v_sin)

    @property
    def sigma_t(self) -> np.ndarray:
        return self._sigma


def corrugation_matrix(t_bar: float, p: SystemParams, n_size: int) -> OperatorMatrix:
    """Matrix of -(1/2)<n|cos(kappa x)|n'> in the moving basis (real symmetric)."""
    return OperatorMatrix(MovingBasis(p, n_size).corrugation(t_bar), t_bar, "corrugation")


def hamiltonian_matrix(t_bar: float, p: SystemParams, n_size: int) -> OperatorMatrix:
    """H[n,n'] = (n + 1/2 + u0/2) delta + u0 * V(t_bar); real symmetric."""
    return OperatorMatrix(MovingBasis(p, n_size).hamiltonian(t_bar), t_bar, "hamiltonian")


def coupling_matrix(t_bar: float, p: SystemParams, n_size: int) -> OperatorMatrix:
    """Bath-coupling matrix <n|sin(kappa x)|n'> in the moving basis (real symmetric)."""
    return OperatorMatrix(MovingBasis(p, n_size).coupling(t_bar), t_bar, "coupling")


def drift_matrix(v_bar: float, n_size: int) -> OperatorMatrix:
    """Basis-drift matrix sigma_t: Hermitian, tridiagonal, purely imaginary off-diagonals.

    (sigma_t)[n, n+1] = -i v_bar sqrt(n+1)/sqrt(2), time independent.
    """
    s = np.zeros((n_size, n_size), dtype=complex)
    amp = v_bar / math.sqrt(2.0)
    for n in range(n_size - 1):
        s[n, n + 1] = -1j * amp * math.sqrt(n + 1)
        s[n + 1, n] = +1j * amp * math.sqrt(n + 1)
    return OperatorMatrix(s, 0.0, "drift")


def position_momentum_matrices(n_size: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Ladder matrices of the relative coordinate x - v_bar*t_bar and momentum p.

    <x> = v_bar*t_bar + Tr[rho * x_rel]; signs fixed so [x, p] = i up to truncation.
    """
    off = np.sqrt((np.arange(n_size - 1) + 1) / 2.0)
    x = np.diag(off, 1) + np.diag(off, -1)
    p = np.diag(-1j * off, 1) + np.diag(+1j * off, -1)
    return (
        OperatorMatrix(x.astype(complex), 0.0, "position"),
        OperatorMatrix(p, 0.0, "momentum"),
    )


def static_overlap(t_bar: float, v_bar: float, n_size: int) -> OperatorMatrix:
    """Overlap matrix between the moving basis at t_bar and the basis at t=0.

    Entry [p, n] = <p(0)|n(t_bar)>, so column n is moving state n expanded in
    the static basis; columns are orthonormal up to truncation. Real-valued.
    """
    s = v_bar * t_bar
    out = np.zeros((n_size, n_size))
    if s == 0.0:
        np.fill_diagonal(out, 1.0)
        return OperatorMatrix(out, t_bar, "overlap")
    lgf = np.array([math.lgamma(k + 1) for k in range(n_size)])
    pref = math.exp(-s * s / 4.0)
    logas = math.log(abs(s))
    sgn_s = 1.0 if s > 0 else -1.0
    for n in range(n_size):
        for p in range(n_size):
            acc = 0.0
            for m in range(min(n, p) + 1):
                k = n + p - 2 * m
                mag = math.exp(
                    0.5 * (lgf[n] + lgf[p]) - lgf[m] - lgf[n - m] - lgf[p - m]
                    - 0.5 * k * math.log(2.0) + k * logas
                )
                acc += (-1.0) ** (n - m) * (sgn_s**k) * mag
            out[p, n] = pref * acc
    return OperatorMatrix(out, t_bar, "overlap")
