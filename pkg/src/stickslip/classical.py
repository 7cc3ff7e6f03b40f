"""Classical driven dynamics with an Ohmic bath: stochastic Newton law.

  x'' = -(x - v_bar t) - (u0 kappa / 2) sin(kappa x)
        - 2 pi alpha kappa^2 cos^2(kappa x) x' + f_ran(t),

with FDT-consistent noise <f f'> = 2 theta c_damp(x) delta(t - t'). The noise
coefficient is evaluated at the step start (Ito-forward); the drift is
integrated by deterministic RK4 and the Gaussian impulse applied per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import BathParams, NumericsParams, SystemParams


class TrajectoryDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class ClassicalState:
    x_bar: float = 0.0
    xdot_bar: float = 0.0
    t_bar: float = 0.0


@dataclass
class ClassicalTrajectory:
    times: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    force: np.ndarray  # unnormalised -(x - v_bar t)
    energy: np.ndarray
    work: np.ndarray
    dt_bar: float


@dataclass
class EnsembleResult:
    """Per-time ensemble statistics over independent noise realisations."""

    times: np.ndarray
    mean_x: np.ndarray
    var_x: np.ndarray
    mean_xdot: np.ndarray
    var_xdot: np.ndarray
    mean_force: np.ndarray
    var_force: np.ndarray
    mean_energy: np.ndarray
    mean_work: np.ndarray
    mean_heat: np.ndarray
    n_trajectories: int
    seed: int
    stream_scheme: str = "SeedSequence(seed, spawn_key=(trajectory_index,)) -> Philox"
    dt_bar: float = 0.0
    final_x: np.ndarray | None = None
    final_xdot: np.ndarray | None = None


def deterministic_force(x_bar: float, t_bar: float, p: SystemParams) -> float:
    """Spring plus corrugation force -(x - v_bar t) - (u0 kappa/2) sin(kappa x)."""
    return -(x_bar - p.v_bar * t_bar) - 0.5 * p.u0 * p.kappa * math.sin(p.kappa * x_bar)


def damping_coefficient(x_bar, p: SystemParams, bp: BathParams):
    """Position-dependent viscosity c_damp(x) = 2 pi alpha kappa^2 cos^2(kappa x)."""
    return 2.0 * math.pi * bp.alpha * p.kappa**2 * np.cos(p.kappa * np.asarray(x_bar)) ** 2


def viscous_force(x_bar: float, xdot_bar: float, p: SystemParams, bp: BathParams) -> float:
    """-c_damp(x) * xdot."""
    return -float(damping_coefficient(x_bar, p, bp)) * xdot_bar


def sample_random_force(
    x_bar: float,
    dt_bar: float,
    theta: float,
    p: SystemParams,
    bp: BathParams,
    rng: np.random.Generator,
) -> float:
    """One FDT-consistent velocity impulse: N(0, 2 theta c_damp(x) dt)."""
    if dt_bar <= 0:
        raise ValueError(f"dt_bar must be > 0, got {dt_bar}")
    if theta == 0.0 or bp.alpha == 0.0:
        return 0.0
    amp = math.sqrt(2.0 * theta * float(damping_coefficient(x_bar, p, bp)) * dt_bar)
    return amp * float(rng.standard_normal())


def potential_energy(x_bar, t_bar, p: SystemParams):
    return 0.5 * (np.asarray(x_bar) - p.v_bar * t_bar) ** 2 + p.u0 * np.sin(
        0.5 * p.kappa * np.asarray(x_bar)
    ) ** 2


def classical_default_dt(p: SystemParams) -> float:
    """Resolve the stiffest oscillation sqrt(1 + u0 kappa^2/2) with margin."""
    stiff = math.sqrt(1.0 + 0.5 * p.u0 * p.kappa**2)
    return min(2e-3, 0.05 / stiff)


def integrate_trajectory(
    initial: ClassicalState,
    p: SystemParams,
    bp: BathParams,
    numerics: NumericsParams,
    rng: np.random.Generator | None = None,
    samples_per_period: int = 1000,
) -> ClassicalTrajectory:
    """Single trajectory by deterministic RK4 plus per-step noise impulses.

    The stability bound sqrt(1 + u0 kappa^2/2) * dt < 0.1 is enforced; the
    trajectory aborts (TrajectoryDiverged) when |x| exceeds 1e6.
    """
    dt = numerics.dt_bar if numerics.dt_bar is not None else classical_default_dt(p)
    stiff = math.sqrt(1.0 + 0.5 * p.u0 * p.kappa**2)
    if stiff * dt >= 0.1:
        raise ValueError(f"dt_bar={dt} too large for stiffness {stiff:.3f} (need product < 0.1)")
    t_max = numerics.t_max_periods * p.T_bar
    n_steps = max(1, int(math.ceil(t_max / dt - 1e-12)))
    dt = t_max / n_steps
    stride = max(1, int(round(p.T_bar / samples_per_period / dt)))

    noisy = bp.alpha > 0.0 and bp.theta > 0.0 and rng is not None
    c_pref = 2.0 * math.pi * bp.alpha * p.kappa**2
    noise_pref = math.sqrt(2.0 * bp.theta * c_pref * dt) if noisy else 0.0
    vb, kap = p.v_bar, p.kappa
    fku = 0.5 * p.u0 * kap
    h2 = 0.5 * dt

    x, v, t = initial.x_bar, initial.xdot_bar, initial.t_bar
    w = 0.0
    f_prev = -(x - vb * t)
    e0 = 0.5 * v * v + float(potential_energy(x, t, p))

    times = [t]
    xs = [x]
    vs = [v]
    fs = [f_prev]
    es = [e0]
    ws = [0.0]

    chunk = 65536
    noise = None
    for step in range(n_steps):
        if noisy and step % chunk == 0:
            noise = rng.standard_normal(min(chunk, n_steps - step))
        ax = x  # noise coefficient frozen at step start
        k1x = v
        k1v = -(x - vb * t) - fku * math.sin(kap * x) - c_pref * math.cos(kap * x) ** 2 * v
        x2 = x + h2 * k1x
        v2 = v + h2 * k1v
        k2v = -(x2 - vb * (t + h2)) - fku * math.sin(kap * x2) - c_pref * math.cos(kap * x2) ** 2 * v2
        x3 = x + h2 * v2
        v3 = v + h2 * k2v
        k3v = -(x3 - vb * (t + h2)) - fku * math.sin(kap * x3) - c_pref * math.cos(kap * x3) ** 2 * v3
        x4 = x + dt * v3
        v4 = v + dt * k3v
        k4v = -(x4 - vb * (t + dt)) - fku * math.sin(kap * x4) - c_pref * math.cos(kap * x4) ** 2 * v4
        x = x + dt / 6.0 * (k1x + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if noisy:
            v += noise_pref * math.cos(kap * ax) * float(noise[step % chunk])
        t = initial.t_bar + (step + 1) * dt
        f_cur = -(x - vb * t)
        w += 0.5 * dt * vb * (f_prev + f_cur)
        f_prev = f_cur
        if abs(x) > 1e6:
            raise TrajectoryDiverged(f"|x| = {abs(x):.3e} at t_bar = {t:.6g}")
        if (step + 1) % stride == 0 or step == n_steps - 1:
            times.append(t)
            xs.append(x)
            vs.append(v)
            fs.append(f_cur)
            es.append(0.5 * v * v + float(potential_energy(x, t, p)))
            ws.append(w)
    return ClassicalTrajectory(
        times=np.array(times),
        x=np.array(xs),
        xdot=np.array(vs),
        force=np.array(fs),
        energy=np.array(es),
        work=np.array(ws),
        dt_bar=dt,
    )


def run_ensemble(
    p: SystemParams,
    bp: BathParams,
    numerics: NumericsParams,
    samples_per_period: int = 1000,
    batch_size: int = 256,
    keep_final_states: bool = False,
) -> EnsembleResult:
    """Average numerics.ensemble independent trajectories.

    Every trajectory draws from its own counter-based stream
    (SeedSequence(seed, spawn_key=(index,)) feeding Philox), so the result is
    independent of batching and scheduling. Initial state x=0, xdot=0.
    """
    dt = numerics.dt_bar if numerics.dt_bar is not None else classical_default_dt(p)
    stiff = math.sqrt(1.0 + 0.5 * p.u0 * p.kappa**2)
    if stiff * dt >= 0.1:
        raise ValueError(f"dt_bar={dt} too large for stiffness {stiff:.3f} (need product < 0.1)")
    t_max = numerics.t_max_periods * p.T_bar
    n_steps = max(1, int(math.ceil(t_max / dt - 1e-12)))
    dt = t_max / n_steps
    stride = max(1, int(round(p.T_bar / samples_per_period / dt)))
    sample_steps = list(range(stride, n_steps + 1, stride))
    if not sample_steps or sample_steps[-1] != n_steps:
        sample_steps.append(n_steps)
    times = np.concatenate([[0.0], dt * np.array(sample_steps, dtype=float)])
    n_samp = len(times)

    noisy = bp.alpha > 0.0 and bp.theta > 0.0
    c_pref = 2.0 * math.pi * bp.alpha * p.kappa**2
    noise_pref = math.sqrt(2.0 * bp.theta * c_pref * dt) if noisy else 0.0
    vb, kap = p.v_bar, p.kappa
    fku = 0.5 * p.u0 * kap
    h2 = 0.5 * dt

    sums = {k: np.zeros(n_samp) for k in ("x", "x2", "v", "v2", "f", "f2", "e", "w", "q")}
    n_tot = numerics.ensemble
    chunk = max(1024, (1 << 22) // max(batch_size, 1))
    finals_x: list[np.ndarray] = []
    finals_v: list[np.ndarray] = []

    for start in range(0, n_tot, batch_size):
        nb = min(batch_size, n_tot - start)
        gens = [
            np.random.Generator(np.random.Philox(np.random.SeedSequence(numerics.seed, spawn_key=(start + i,))))
            for i in range(nb)
        ]
        x = np.zeros(nb)
        v = np.zeros(nb)
        w = np.zeros(nb)
        f_prev = -(x - 0.0)
        e0 = 0.5 * v * v + potential_energy(x, 0.0, p)
        samp = {k: np.empty((n_samp, nb)) for k in ("x", "v", "f", "e", "w")}
        for key, val in (("x", x), ("v", v), ("f", f_prev), ("e", e0), ("w", w)):
            samp[key][0] = val
        si = 1
        noise = None
        t = 0.0
        for step in range(n_steps):
            if noisy and step % chunk == 0:
                m = min(chunk, n_steps - step)
                noise = np.empty((m, nb))
                for i, g in enumerate(gens):
                    noise[:, i] = g.standard_normal(m)
            ax = x
            k1v = -(x - vb * t) - fku * np.sin(kap * x) - c_pref * np.cos(kap * x) ** 2 * v
            x2 = x + h2 * v
            v2 = v + h2 * k1v
            th = t + h2
            k2v = -(x2 - vb * th) - fku * np.sin(kap * x2) - c_pref * np.cos(kap * x2) ** 2 * v2
            x3 = x + h2 * v2
            v3 = v + h2 * k2v
            k3v = -(x3 - vb * th) - fku * np.sin(kap * x3) - c_pref * np.cos(kap * x3) ** 2 * v3
            x4 = x + dt * v3
            v4 = v + dt * k3v
            tf = t + dt
            k4v = -(x4 - vb * tf) - fku * np.sin(kap * x4) - c_pref * np.cos(kap * x4) ** 2 * v4
            x = x + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            if noisy:
                v = v + noise_pref * np.cos(kap * ax) * noise[step % chunk]
            t = tf
            f_cur = -(x - vb * t)
            w = w + 0.5 * dt * vb * (f_prev + f_cur)
            f_prev = f_cur
            if si <= len(sample_steps) and (step + 1) == sample_steps[si - 1]:
                samp["x"][si] = x
                samp["v"][si] = v
                samp["f"][si] = f_cur
                samp["e"][si] = 0.5 * v * v + potential_energy(x, t, p)
                samp["w"][si] = w
                si += 1
        if np.max(np.abs(x)) > 1e6:
            raise TrajectoryDiverged("ensemble member diverged")
        if keep_final_states:
            finals_x.append(x.copy())
            finals_v.append(v.copy())
        sums["x"] += samp["x"].sum(axis=1)
        sums["x2"] += (samp["x"] ** 2).sum(axis=1)
        sums["v"] += samp["v"].sum(axis=1)
        sums["v2"] += (samp["v"] ** 2).sum(axis=1)
        sums["f"] += samp["f"].sum(axis=1)
        sums["f2"] += (samp["f"] ** 2).sum(axis=1)
        sums["e"] += samp["e"].sum(axis=1)
        sums["w"] += samp["w"].sum(axis=1)
        q = samp["e"] - samp["e"][0][None, :] - samp["w"]
        sums["q"] += q.sum(axis=1)

    mean = {k: sums[k] / n_tot for k in sums}
    return EnsembleResult(
        times=times,
        mean_x=mean["x"],
        var_x=np.maximum(mean["x2"] - mean["x"] ** 2, 0.0),
        mean_xdot=mean["v"],
        var_xdot=np.maximum(mean["v2"] - mean["v"] ** 2, 0.0),
        mean_force=mean["f"],
        var_force=np.maximum(mean["f2"] - mean["f"] ** 2, 0.0),
        mean_energy=mean["e"],
        mean_work=mean["w"],
        mean_heat=mean["q"],
        n_trajectories=n_tot,
        seed=numerics.seed,
        dt_bar=dt,
        final_x=np.concatenate(finals_x) if keep_final_states else None,
        final_xdot=np.concatenate(finals_v) if keep_final_states else None,
    )
