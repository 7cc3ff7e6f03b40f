"""Density-matrix propagation in the moving basis: unitary and Born-Markov.

Both modes integrate d(rho)/dt = RHS with fixed-step RK4. The open-system RHS
is -i[H + u_rn A^2 - sigma_t, rho] - ([A, S rho] + h.c.) with the
bath-convoluted S = C [(C^T A C) o Gamma] C^T built from the phase-aligned
instantaneous eigensystem at every RK4 stage time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import BathRates, renormalization_constant
from .operators import MovingBasis, position_momentum_matrices
from .params import BathParams, NumericsParams, SystemParams
from .spectrum import SpectrumSnapshot, phase_align, solve_snapshot


class PropagationAborted(RuntimeError):
    """State-health check failed (step too large or Markov breakdown)."""

    def __init__(self, message: str, log: "PropagationLog"):
        super().__init__(message)
        self.log = log


@dataclass
class PropagationLog:
    """Per-sample state-health records (monotone time stamps)."""

    times: list[float] = field(default_factory=list)
    trace_dev: list[float] = field(default_factory=list)
    herm_dev: list[float] = field(default_factory=list)
    min_eig: list[float] = field(default_factory=list)
    aborted: bool = False
    reason: str | None = None

    def record(self, t: float, rho: np.ndarray) -> None:
        self.times.append(t)
        self.trace_dev.append(abs(np.trace(rho).real - 1.0) + abs(np.trace(rho).imag))
        self.herm_dev.append(float(np.max(np.abs(rho - rho.conj().T))))
        self.min_eig.append(float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]))


@dataclass
class PropagationResult:
    rho: np.ndarray
    log: PropagationLog
    sample_times: np.ndarray
    work: np.ndarray  # trap work W(t_bar) accumulated at full step resolution
    dt_bar: float


def initial_state(p: SystemParams, n_size: int) -> np.ndarray:
    """Projector onto the instantaneous ground state at t_bar = 0."""
    snap = solve_snapshot(0.0, p, n_size)
    c0 = snap.vectors[:, 0]
    return np.outer(c0, c0).astype(complex)


def closed_rhs(
    rho: np.ndarray, t_bar: float, p: SystemParams, n_size: int, basis: MovingBasis | None = None
) -> np.ndarray:
    """-i [H(t) - sigma_t, rho]; preserves Hermiticity and trace."""
    if basis is None:
        basis = MovingBasis(p, n_size)
    m = basis.hamiltonian(t_bar) - basis.sigma_t
    return -1j * (m @ rho - rho @ m)


def build_s_matrix(
    t_bar: float,
    p: SystemParams,
    bp: BathParams,
    snapshot: SpectrumSnapshot,
    n_size: int,
    rates: BathRates | None = None,
    coupling: np.ndarray | None = None,
) -> np.ndarray:
    """Bath-convoluted operator S = C [(C^T A C) o Gamma] C^T in the moving basis.

    Gamma[m, m'] = Gamma(E_m' - E_m) over the snapshot's eigenvalues; C has
    the eigenvectors as columns.
    """
    if rates is None:
        rates = BathRates(bp)
    if coupling is None:
        coupling = MovingBasis(p, n_size).coupling(t_bar)
    c = snapshot.vectors
    de = snapshot.energies[None, :] - snapshot.energies[:, None]
    gam = rates(de)
    x = c.T @ coupling @ c
    return (c @ (x * gam)) @ c.T


def open_rhs(
    rho: np.ndarray,
    t_bar: float,
    p: SystemParams,
    bp: BathParams,
    snapshot: SpectrumSnapshot,
    n_size: int,
    rates: BathRates | None = None,
    basis: MovingBasis | None = None,
) -> np.ndarray:
    """Born-Markov RHS with renormalisation u_rn A^2 and the S-matrix dissipator."""
    if basis is None:
        basis = MovingBasis(p, n_size)
    a = basis.coupling(t_bar)
    s = build_s_matrix(t_bar, p, bp, snapshot, n_size, rates=rates, coupling=a)
    u_rn = renormalization_constant(bp)
    heff = basis.hamiltonian(t_bar) + u_rn * (a @ a) - basis.sigma_t
    sr = s @ rho
    rs = rho @ s.conj().T
    dissip = a @ sr - sr @ a + rs @ a - a @ rs
    return -1j * (heff @ rho - rho @ heff) - dissip


def default_dt(p: SystemParams, n_size: int, basis: MovingBasis | None = None) -> float:
    """min(0.5 / max|E_n - E_m|, T_bar / 200000), scanning one drive period."""
    if basis is None:
        basis = MovingBasis(p, n_size)
    spread = 0.0
    for t in np.linspace(0.0, p.T_bar, 17):
        e = np.linalg.eigvalsh(basis.hamiltonian(t))
        spread = max(spread, float(e[-1] - e[0]))
    return min(0.5 / spread, p.T_bar / 200000.0)


def _max_level_spread(p: SystemParams, n_size: int, basis: MovingBasis) -> float:
    spread = 0.0
    for t in np.linspace(0.0, p.T_bar, 17):
        e = np.linalg.eigvalsh(basis.hamiltonian(t))
        spread = max(spread, float(e[-1] - e[0]))
    return spread


def propagate(
    mode: str,
    p: SystemParams,
    bp: BathParams | None,
    numerics: NumericsParams,
    observer=None,
    *,
    samples_per_period: int = 1000,
    renormalize_trace: bool = False,
    rhs_override=None,
    rho0: np.ndarray | None = None,
) -> PropagationResult:
    """Fixed-step RK4 propagation from t_bar = 0 over numerics.t_max_periods periods.

    mode: "closed" (unitary) or "open" (Born-Markov; needs bp). The observer,
    if given, is called as observer(t_bar, rho, snapshot) at t_bar = 0 and then
    every stride; the returned work array is sampled at the same moments but
    accumulated by trapezoid at every step. Aborts (PropagationAborted) when
    the trace deviates by more than 1e-3 or an eigenvalue of rho drops below
    -1e-3.
    """
    if mode not in ("closed", "open"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "open" and bp is None:
        raise ValueError("open mode requires bath parameters")
    n = numerics.n_size
    basis = MovingBasis(p, n)
    spread = _max_level_spread(p, n, basis)
    dt = numerics.dt_bar if numerics.dt_bar is not None else min(0.5 / spread, p.T_bar / 200000.0)
    if dt * spread >= 1.0:
        raise ValueError(
            f"dt_bar={dt} violates the Bohr-oscillation bound 1/max|E_n-E_m|={1.0 / spread:.3e}"
        )
    t_max = numerics.t_max_periods * p.T_bar
    n_steps = max(1, int(math.ceil(t_max / dt - 1e-12)))
    dt = t_max / n_steps
    stride = max(1, int(round(p.T_bar / samples_per_period / dt)))

    rho = initial_state(p, n) if rho0 is None else np.array(rho0, dtype=complex)
    log = PropagationLog()

    open_mode = mode == "open"
    rates = None
    if open_mode:
        rates = BathRates(bp)
        if bp.alpha > 0.0:
            rates.build_table(spread * 1.2 + 1.0)
    u_rn = renormalization_constant(bp) if open_mode else 0.0

    # closed-mode commutator generator: M(phi) = D0 + sin(phi) B1 + cos(phi) B2
    d0 = np.diag(basis.diagonal).astype(complex) - basis.sigma_t
    b_sin = (p.u0 * basis._v_sin).astype(complex)
    b_cos = (-p.u0 * basis._v_cos).astype(complex)
    kv = p.kappa * p.v_bar

    x_off = position_momentum_matrices(n)[0].entries.real.diagonal(1).copy()

    def force(r: np.ndarray) -> float:
        # F_L = -Tr[rho x_rel] for Hermitian rho via the tridiagonal structure
        return -2.0 * float(np.real(np.sum(x_off * np.diagonal(r, 1))))

    snap_ref = solve_snapshot(0.0, p, n, basis)

    def stage_rhs_closed(r: np.ndarray, t: float) -> np.ndarray:
        ph = kv * t
        m = d0 + math.sin(ph) * b_sin + math.cos(ph) * b_cos
        return -1j * (m @ r - r @ m)

    def make_open_stage(t: float, snap: SpectrumSnapshot):
        ph = kv * t
        a = 2.0 * (math.sin(ph) * basis._v_cos + math.cos(ph) * basis._v_sin)
        c = snap.vectors
        de = snap.energies[None, :] - snap.energies[:, None]
        s = (c @ ((c.T @ a @ c) * rates(de))) @ c.T
        heff = (
            d0
            + math.sin(ph) * b_sin
            + math.cos(ph) * b_cos
            + u_rn * (a @ a)
        )
        sh = s.conj().T
        a_c = a.astype(complex)

        def rhs(r: np.ndarray) -> np.ndarray:
            sr = s @ r
            rs = r @ sh
            dissip = a_c @ sr - sr @ a_c + rs @ a_c - a_c @ rs
            return -1j * (heff @ r - r @ heff) - dissip

        return rhs

    sample_times = [0.0]
    work_samples = [0.0]
    w_acc = 0.0
    f_prev = force(rho)
    if observer is not None:
        observer(0.0, rho, snap_ref)
    log.record(0.0, rho)

    t = 0.0
    snap_t = snap_ref
    for step in range(n_steps):
        if rhs_override is not None:
            k1 = rhs_override(rho, t)
            r2 = rho + (0.5 * dt) * k1
            k2 = rhs_override(r2, t + 0.5 * dt)
            r3 = rho + (0.5 * dt) * k2
            k3 = rhs_override(r3, t + 0.5 * dt)
            r4 = rho + dt * k3
            k4 = rhs_override(r4, t + dt)
        elif not open_mode:
            k1 = stage_rhs_closed(rho, t)
            r2 = rho + (0.5 * dt) * k1
            k2 = stage_rhs_closed(r2, t + 0.5 * dt)
            r3 = rho + (0.5 * dt) * k2
            k3 = stage_rhs_closed(r3, t + 0.5 * dt)
            r4 = rho + dt * k3
            k4 = stage_rhs_closed(r4, t + dt)
        else:
            snap_half = phase_align(snap_t, solve_snapshot(t + 0.5 * dt, p, n, basis))
            snap_full = phase_align(snap_half, solve_snapshot(t + dt, p, n, basis))
            rhs_1 = make_open_stage(t, snap_t)
            rhs_h = make_open_stage(t + 0.5 * dt, snap_half)
            rhs_f = make_open_stage(t + dt, snap_full)
            k1 = rhs_1(rho)
            k2 = rhs_h(rho + (0.5 * dt) * k1)
            k3 = rhs_h(rho + (0.5 * dt) * k2)
            k4 = rhs_f(rho + dt * k3)
            snap_t = snap_full
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = (step + 1) * dt

        f_cur = force(rho)
        w_acc += 0.5 * dt * p.v_bar * (f_prev + f_cur)
        f_prev = f_cur

        tr = np.trace(rho)
        tr_dev = abs(tr.real - 1.0) + abs(tr.imag)
        if renormalize_trace and tr.real != 0.0:
            rho = rho / tr.real
        if tr_dev > 1e-3:
            log.aborted = True
            log.reason = f"trace deviation {tr_dev:.3e} at t_bar={t:.6g}"
            log.record(t, rho)
            raise PropagationAborted(log.reason, log)

        if (step + 1) % stride == 0 or step == n_steps - 1:
            log.record(t, rho)
            if log.min_eig[-1] < -1e-3:
                log.aborted = True
                log.reason = f"negative population {log.min_eig[-1]:.3e} at t_bar={t:.6g}"
                raise PropagationAborted(log.reason, log)
            # observer snapshots are energy-ordered (the adiabatic labelling)
            snap_here = snap_t if open_mode else solve_snapshot(t, p, n, basis)
            sample_times.append(t)
            work_samples.append(w_acc)
            if observer is not None:
                observer(t, rho, snap_here)

    return PropagationResult(
        rho=rho,
        log=log,
        sample_times=np.array(sample_times),
        work=np.array(work_samples),
        dt_bar=dt,
    )
