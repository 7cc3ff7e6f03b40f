"""Quasistatic eigenproblem: snapshots, continuity, anti-crossings, slip times.

The spectrum depends on time only through the trap-center position
x_c = v_bar * t_bar (one lattice period is x_c in [0, 2 pi / kappa)), so
anti-crossing geometry is v_bar independent; Landau-Zener velocities are
expressed per unit x_c and come out in units of nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import MovingBasis, position_momentum_matrices
from .params import SystemParams


class SpectrumError(RuntimeError):
    pass


class AlignmentError(RuntimeError):
    pass


@dataclass
class SpectrumSnapshot:
    """Instantaneous eigensystem of H_S(t_bar); vectors[:, k] is eigenstate k."""

    t_bar: float
    energies: np.ndarray
    vectors: np.ndarray
    n_size: int


@dataclass(frozen=True)
class AntiCrossing:
    """Avoided crossing between adjacent levels.

    gap: minimum |E_n' - E_n|; slope: max |d(E_n' - E_n)/dx_c| on the crossing
    flanks; v_lz = pi*gap^2/(2*slope) in units of nu.
    """

    pair: tuple[int, int]
    t_star: float
    gap: float
    slope: float
    v_lz: float = field(init=False)

    def __post_init__(self):
        if self.gap <= 0 or self.slope <= 0:
            raise ValueError("anti-crossing needs gap > 0 and slope > 0")
        object.__setattr__(self, "v_lz", math.pi * self.gap**2 / (2.0 * self.slope))


def solve_snapshot(
    t_bar: float, p: SystemParams, n_size: int, basis: MovingBasis | None = None
) -> SpectrumSnapshot:
    """Full symmetric eigendecomposition of the Hamiltonian matrix at t_bar."""
    if n_size < 5:
        raise ValueError(f"n_size must be >= 5, got {n_size}")
    if basis is None:
        basis = MovingBasis(p, n_size)
    try:
        energies, vectors = np.linalg.eigh(basis.hamiltonian(t_bar))
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolver failed at t_bar={t_bar}") from exc
    return SpectrumSnapshot(t_bar=t_bar, energies=energies, vectors=vectors, n_size=n_size)


def phase_align(prev: SpectrumSnapshot, cur: SpectrumSnapshot) -> SpectrumSnapshot:
    """Match cur's eigenvectors to prev's by maximum overlap and fix their signs.

    Columns are reordered when levels cross and flipped so that
    <prev_k, cur_k> >= 0. Raises AlignmentError when the best overlap for some
    level falls below 0.5 (time step too large to track continuity).
    """
    if prev.n_size != cur.n_size:
        raise ValueError("snapshots have different n_size")
    overlap = prev.vectors.T @ cur.vectors
    n = cur.n_size
    diag = np.diagonal(overlap)
    if np.all(np.abs(diag) >= 0.5):
        # no level crossed between the snapshots: identity matching
        signs = np.where(diag >= 0, 1.0, -1.0)
        return SpectrumSnapshot(
            t_bar=cur.t_bar,
            energies=cur.energies,
            vectors=cur.vectors * signs[None, :],
            n_size=n,
        )
    order = np.full(n, -1, dtype=int)
    taken = np.zeros(n, dtype=bool)
    # greedy assignment on sorted |overlap|
    flat = np.argsort(np.abs(overlap), axis=None)[::-1]
    assigned = 0
    for f in flat:
        i, j = divmod(f, n)
        if order[i] < 0 and not taken[j]:
            order[i] = j
            taken[j] = True
            assigned += 1
            if assigned == n:
                break
    best = np.abs(overlap[np.arange(n), order])
    if np.min(best) < 0.5:
        k = int(np.argmin(best))
        raise AlignmentError(
            f"ambiguous level tracking at t_bar={cur.t_bar}: level {k} best overlap {best[k]:.3f} < 0.5"
        )
    signs = np.sign(overlap[np.arange(n), order])
    signs[signs == 0] = 1.0
    vectors = cur.vectors[:, order] * signs[None, :]
    energies = cur.energies[order]
    return SpectrumSnapshot(t_bar=cur.t_bar, energies=energies, vectors=vectors, n_size=n)


def _gap_and_slope(basis: MovingBasis, t_bar: float, i: int, j: int) -> tuple[float, float]:
    """Adiabatic gap E_j - E_i and its Hellmann-Feynman derivative w.r.t. x_c."""
    energies, vectors = np.linalg.eigh(basis.hamiltonian(t_bar))
    dh = basis.hamiltonian_xc_derivative(t_bar)
    ci, cj = vectors[:, i], vectors[:, j]
    return energies[j] - energies[i], (cj @ dh @ cj) - (ci @ dh @ ci)


def _golden_minimize(fn, a: float, b: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while (b - a) > tol:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def find_anticrossings(
    p: SystemParams,
    n_size: int,
    n_levels: int = 5,
    t_grid: np.ndarray | None = None,
) -> list[AntiCrossing]:
    """Locate avoided crossings between adjacent levels below n_levels.

    For each pair the minimum gap is refined by golden section; the diabatic
    slope is taken as the steepest |d(gap)/dx_c| between the local maxima of
    the gap flanking the minimum. Pairs whose gap barely modulates over the
    period (< 5% relative) carry no avoided crossing and are omitted.
    """
    basis = MovingBasis(p, n_size)
    if t_grid is None:
        t_grid = np.linspace(0.0, p.T_bar, 2001)
    t_grid = np.asarray(t_grid, dtype=float)
    energies = np.array([np.linalg.eigvalsh(basis.hamiltonian(t)) for t in t_grid])
    found: list[AntiCrossing] = []
    for i in range(min(n_levels, n_size) - 1):
        j = i + 1
        gaps = energies[:, j] - energies[:, i]
        gmin_grid, gmax_grid = float(np.min(gaps)), float(np.max(gaps))
        if gmin_grid <= 0 or (gmax_grid - gmin_grid) < 0.05 * gmin_grid:
            continue  # parallel levels: no anti-crossing
        k = int(np.argmin(gaps))
        if k == 0 or k == len(t_grid) - 1:
            continue  # no interior minimum in the window
        gap_fn = lambda t: _gap_and_slope(basis, t, i, j)[0]
        t_star = _golden_minimize(gap_fn, t_grid[k - 1], t_grid[k + 1], tol=1e-10 * p.T_bar)
        gap = gap_fn(t_star)
        # bracket with the nearest local maxima of the gap on each side
        kl = k
        while kl > 0 and gaps[kl - 1] >= gaps[kl] * (1 - 1e-12):
            kl -= 1
        kr = k
        while kr < len(gaps) - 1 and gaps[kr + 1] >= gaps[kr] * (1 - 1e-12):
            kr += 1
        # steepest gap slope on the flanks (the HF derivative is already per unit x_c)
        slope_fn = lambda t: -abs(_gap_and_slope(basis, t, i, j)[1])
        best = 0.0
        for a, b in ((t_grid[kl], t_star), (t_star, t_grid[kr])):
            if b <= a:
                continue
            ts = np.linspace(a, b, 101)
            sl = np.array([-slope_fn(t) for t in ts])
            m = int(np.argmax(sl))
            lo, hi = ts[max(m - 1, 0)], ts[min(m + 1, len(ts) - 1)]
            t_best = _golden_minimize(slope_fn, lo, hi, tol=1e-12 * p.T_bar)
            best = max(best, -slope_fn(t_best))
        slope = best
        if slope <= 0:
            continue
        found.append(AntiCrossing(pair=(i, j), t_star=t_star, gap=gap, slope=slope))
    return found


def lz_probability(ac: AntiCrossing, v: float) -> float:
    """Diabatic transition probability exp(-v_lz / v) for drive velocity v (in nu)."""
    if v <= 0:
        raise ValueError(f"velocity must be > 0, got {v}")
    return math.exp(-ac.v_lz / v)


def eigenstate_slip_times(
    p: SystemParams, n_size: int, n_levels: int = 5
) -> list[tuple[int, float | None]]:
    """Slip time of each quasistatic eigenstate within the double-well window.

    t_slip,n minimises <x>_n - v_bar*t_bar over [0.32 T, 0.68 T]. The minimum
    must be interior and the displacement must recover to >= 0 afterwards
    inside the window (the state catches up with the trap); otherwise the
    eigenstate never slips and None is reported.
    """
    basis = MovingBasis(p, n_size)
    x_rel = position_momentum_matrices(n_size)[0].entries.real
    ts = np.linspace(0.32 * p.T_bar, 0.68 * p.T_bar, 1441)
    disp = np.empty((len(ts), n_levels))
    for a, t in enumerate(ts):
        _, vectors = np.linalg.eigh(basis.hamiltonian(t))
        for k in range(n_levels):
            c = vectors[:, k]
            disp[a, k] = c @ x_rel @ c
    out: list[tuple[int, float | None]] = []
    for k in range(n_levels):
        m = int(np.argmin(disp[:, k]))
        if m == 0 or m == len(ts) - 1:
            out.append((k, None))
            continue
        if np.max(disp[m:, k]) < 0.0:
            out.append((k, None))  # never catches up: no slip
            continue
        # parabolic refinement around the grid minimum
        y0, y1, y2 = disp[m - 1, k], disp[m, k], disp[m + 1, k]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        out.append((k, float(ts[m] + shift * (ts[1] - ts[0]))))
    return out
