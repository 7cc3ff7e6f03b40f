"""Observables of the propagated state: energy, populations, entropy, kinematics,
force, work/heat bookkeeping and the mixed-state geometric phase.

All quantities follow the dimensionless conventions of params: energies in
hbar*Omega, lengths in ell, velocities in nu, forces normalised by
pi*U0/a = u0*kappa/2 where reported as F_L_norm.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .operators import drift_matrix, position_momentum_matrices
from .params import SystemParams
from .spectrum import SpectrumSnapshot


@dataclass
class TrajectoryRecord:
    """One output row; quantum-only fields are None in classical rows."""

    t_bar: float
    t_over_T: float
    E_avg: float
    populations: tuple[float, ...] | None  # P_0 .. P_4
    S_L: float | None
    x_avg: float
    x_c: float
    v_avg: float
    sx_sp: float | None
    F_L_norm: float
    W: float
    Q: float
    P_released: float
    gamma_phase: float | None


@lru_cache(maxsize=8)
def _ladders(n_size: int):
    x_op, p_op = position_momentum_matrices(n_size)
    x = x_op.entries
    p = p_op.entries
    return x, p, x @ x, p @ p


def energy_and_populations(
    rho: np.ndarray, snapshot: SpectrumSnapshot, n_levels: int = 5
) -> tuple[float, np.ndarray]:
    """<E> = sum_k E_k P_k and the lowest n_levels eigenstate populations."""
    c = snapshot.vectors
    pops_all = np.real(np.einsum("pk,pq,qk->k", c.conj(), rho, c))
    e_avg = float(np.dot(snapshot.energies, pops_all))
    return e_avg, pops_all[:n_levels]


def linear_entropy(rho: np.ndarray, n_size: int) -> float:
    """S_L = N/(N-1) (1 - Tr rho^2); 0 for pure, 1 for maximally mixed."""
    purity = float(np.real(np.trace(rho @ rho)))
    return n_size / (n_size - 1.0) * (1.0 - purity)


def kinematics(rho: np.ndarray, t_bar: float, v_bar: float) -> tuple[float, float, float]:
    """(<x>, <v>, sigma_x*sigma_p); <x> = v_bar*t_bar + Tr[rho x_rel]."""
    x, p, x2, p2 = _ladders(rho.shape[0])
    xm = float(np.real(np.trace(rho @ x)))
    pm = float(np.real(np.trace(rho @ p)))
    x2m = float(np.real(np.trace(rho @ x2)))
    p2m = float(np.real(np.trace(rho @ p2)))
    var_x = max(x2m - xm * xm, 0.0)
    var_p = max(p2m - pm * pm, 0.0)
    return v_bar * t_bar + xm, pm, float(np.sqrt(var_x * var_p))


def lateral_force(rho: np.ndarray, t_bar: float, p: SystemParams) -> float:
    """Spring force -(<x> - v_bar t_bar), normalised by pi*U0/a = u0*kappa/2."""
    x = _ladders(rho.shape[0])[0]
    raw = -float(np.real(np.trace(rho @ x)))
    norm = 0.5 * p.u0 * p.kappa
    return raw / norm if norm > 0 else raw


def work_heat_power(
    times: np.ndarray, energies: np.ndarray, rel_forces: np.ndarray, v_bar: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Trap work, heat and power from a uniformly sampled history.

    rel_forces are the unnormalised -(<x> - v_bar t) values. W is the
    trapezoid of v_bar * F_L, Q = Delta<E> - W and P = Q / t_bar (0 at t=0).
    """
    times = np.asarray(times, dtype=float)
    integrand = v_bar * np.asarray(rel_forces, dtype=float)
    w = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(times) * (integrand[:-1] + integrand[1:]))])
    q = np.asarray(energies, dtype=float) - energies[0] - w
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(times > 0, q / times, 0.0)
    return w, q, p


class PhaseAccumulator:
    """Accumulates the mixed-state geometric phase along a sampled evolution.

    Feed samples in time order via update(t_bar, rho, overlap) where overlap
    is the static-basis overlap matrix at t_bar (entry [p, n] = <p(0)|n(t)>).
    Eigenvector paths of rho are parallel-transported between samples (greedy
    maximum-overlap matching plus a phase rotation per level), which makes the
    result invariant under the eigensolver's arbitrary per-sample phases; the
    basis-drift connection is integrated by the midpoint rule.
    """

    def __init__(self, n_size: int, v_bar: float, degeneracy_tol: float = 1e-10):
        self.sigma = drift_matrix(v_bar, n_size).entries
        self.degeneracy_tol = degeneracy_tol
        self._xi0 = None
        self._p0 = None
        self._p_prev = None
        self._t_prev = None
        self._sdiag_prev = None
        self._phi_sigma = None
        self._warned = False

    def _decompose(self, rho: np.ndarray):
        return np.linalg.eigh(0.5 * (rho + rho.conj().T))

    def update(self, t_bar: float, rho: np.ndarray, overlap: np.ndarray) -> float:
        xi, pmat = self._decompose(rho)
        if self._p0 is None:
            self._xi0 = np.clip(xi, 0.0, None)
            self._p0 = pmat
            self._p_prev = pmat
            self._t_prev = t_bar
            self._sdiag_prev = np.real(np.einsum("pk,pq,qk->k", pmat.conj(), self.sigma, pmat))
            self._phi_sigma = np.zeros(len(xi))
            return 0.0
        m = self._p_prev.conj().T @ pmat
        n = m.shape[0]
        order = np.full(n, -1, dtype=int)
        taken = np.zeros(n, dtype=bool)
        count = 0
        for f in np.argsort(np.abs(m), axis=None)[::-1]:
            i, j = divmod(f, n)
            if order[i] < 0 and not taken[j]:
                order[i] = j
                taken[j] = True
                count += 1
                if count == n:
                    break
        pmat = pmat[:, order]
        xi = xi[order]
        d = np.einsum("pk,pk->k", self._p_prev.conj(), pmat)
        phase = np.where(np.abs(d) > 0, d / np.maximum(np.abs(d), 1e-300), 1.0)
        pmat = pmat * np.conj(phase)[None, :]
        weighted = np.clip(xi, 0.0, None) > 1e-9
        if not self._warned and np.count_nonzero(weighted) > 1:
            gaps = np.diff(np.sort(xi[weighted]))
            if gaps.size and np.min(gaps) < self.degeneracy_tol:
                warnings.warn(
                    f"near-degenerate state-spectrum eigenvalues at t_bar={t_bar:.6g}; "
                    "eigenvector path is ambiguous",
                    stacklevel=2,
                )
                self._warned = True
        sdiag = np.real(np.einsum("pk,pq,qk->k", pmat.conj(), self.sigma, pmat))
        dt = t_bar - self._t_prev
        self._phi_sigma = self._phi_sigma + 0.5 * dt * (self._sdiag_prev + sdiag)
        self._p_prev = pmat
        self._t_prev = t_bar
        self._sdiag_prev = sdiag
        terms = (
            np.sqrt(self._xi0 * np.clip(xi, 0.0, None))
            * np.einsum("pk,pq,qk->k", self._p0.conj(), overlap.astype(complex), pmat)
            * np.exp(1j * self._phi_sigma)
        )
        total = np.sum(terms)
        return float(np.angle(total))


def geometric_phase(
    times: np.ndarray, rhos, overlaps, v_bar: float
) -> np.ndarray:
    """Phase series gamma(t_bar) for a sampled history (first sample defines t=0)."""
    times = np.asarray(times, dtype=float)
    n_size = rhos[0].shape[0]
    acc = PhaseAccumulator(n_size, v_bar)
    return np.array([acc.update(t, r, o) for t, r, o in zip(times, rhos, overlaps)])
