"""Run orchestration: trajectory/summary CSV output, manifests, sweeps.

All CSV numbers are written with repr-stable %.12g formatting (locale
independent); blank cells mark quantities a mode does not produce. Identical
configuration and seed give bitwise-identical CSVs; sweep output is sorted by
(velocity, mode) so it is independent of worker scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bath import BathRates
from .classical import run_ensemble
from .config import RunConfig
from .observables import (
    PhaseAccumulator,
    TrajectoryRecord,
    energy_and_populations,
    kinematics,
    lateral_force,
    linear_entropy,
)
from .operators import MovingBasis, static_overlap
from .params import NumericsParams
from .propagator import propagate
from .spectrum import solve_snapshot

TRAJECTORY_HEADER = (
    "t_bar,t_over_T,E_avg,P0,P1,P2,P3,P4,S_L,x_avg,x_c,v_avg,sx_sp,"
    "F_L_norm,W,Q,P_released,gamma_phase"
)
SWEEP_HEADER = "v_over_nu,mode,P_released_end,t_slip_over_T,F_L_max_norm"
SPECTRUM_HEADER = "t_bar,t_over_T,E0,E1,E2,E3,E4"
RATES_HEADER = "E,gamma,sigma"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.12g" % float(x)


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


@dataclass
class RunOutput:
    files: list[str]
    manifest: Path


def _record_row(r: TrajectoryRecord) -> tuple:
    pops = r.populations if r.populations is not None else (None,) * 5
    return (
        r.t_bar,
        r.t_over_T,
        r.E_avg,
        *pops,
        r.S_L,
        r.x_avg,
        r.x_c,
        r.v_avg,
        r.sx_sp,
        r.F_L_norm,
        r.W,
        r.Q,
        r.P_released,
        r.gamma_phase,
    )


def _quantum_rows(config: RunConfig, closed: bool):
    p, bp, num = config.system, config.bath, config.numerics
    n = num.n_size
    phase = PhaseAccumulator(n, p.v_bar)
    raw = []

    def observer(t, rho, snap):
        e_avg, pops = energy_and_populations(rho, snap)
        x_avg, v_avg, sxsp = kinematics(rho, t, p.v_bar)
        s_l = linear_entropy(rho, n)
        f_norm = lateral_force(rho, t, p)
        gam = phase.update(t, rho, static_overlap(t, p.v_bar, n).entries)
        raw.append((t, e_avg, pops.copy(), s_l, x_avg, v_avg, sxsp, f_norm, gam))

    result = propagate(
        "closed" if closed else "open",
        p,
        bp,
        num,
        observer,
        samples_per_period=config.samples_per_period,
    )
    rows = []
    e0 = raw[0][1]
    for (t, e_avg, pops, s_l, x_avg, v_avg, sxsp, f_norm, gam), w in zip(raw, result.work):
        q = e_avg - e0 - w
        rows.append(
            _record_row(
                TrajectoryRecord(
                    t_bar=t,
                    t_over_T=t / p.T_bar,
                    E_avg=e_avg,
                    populations=tuple(pops),
                    S_L=s_l,
                    x_avg=x_avg,
                    x_c=p.v_bar * t,
                    v_avg=v_avg,
                    sx_sp=sxsp,
                    F_L_norm=f_norm,
                    W=w,
                    Q=q,
                    P_released=-q / t if t > 0 else 0.0,
                    gamma_phase=gam,
                )
            )
        )
    return rows, result


def _classical_rows(config: RunConfig):
    p, bp, num = config.system, config.bath, config.numerics
    norm = 0.5 * p.u0 * p.kappa if p.u0 > 0 else 1.0
    res = run_ensemble(p, bp, num, samples_per_period=config.samples_per_period)
    rows = []
    for i, t in enumerate(res.times):
        q = res.mean_heat[i]
        rows.append(
            _record_row(
                TrajectoryRecord(
                    t_bar=t,
                    t_over_T=t / p.T_bar,
                    E_avg=res.mean_energy[i],
                    populations=None,
                    S_L=None,
                    x_avg=res.mean_x[i],
                    x_c=p.v_bar * t,
                    v_avg=res.mean_xdot[i],
                    sx_sp=math.sqrt(res.var_x[i] * res.var_xdot[i]),
                    F_L_norm=res.mean_force[i] / norm,
                    W=res.mean_work[i],
                    Q=q,
                    P_released=-q / t if t > 0 else 0.0,
                    gamma_phase=None,
                )
            )
        )
    return rows, res


def _first_period_summary(rows, T_bar):
    """(P_released_end, t_slip/T, max F_norm) from trajectory rows of >= 1 period."""
    ts = np.array([r[0] for r in rows])
    f = np.array([float(r[13]) for r in rows])
    q = np.array([float(r[15]) for r in rows])
    first = ts <= T_bar * (1.0 + 1e-9)
    k = int(np.argmax(f[first]))
    idx_end = int(np.argmax(ts[first]))
    t_end = ts[first][idx_end]
    p_rel = -q[first][idx_end] / t_end if t_end > 0 else 0.0
    return p_rel, ts[first][k] / T_bar, float(f[first][k])


def _sweep_point(args):
    config, v, mode = args
    from .params import SystemParams

    sys_p = SystemParams(u0=config.system.u0, kappa=config.system.kappa, v_bar=v)
    num = NumericsParams(
        n_size=config.numerics.n_size,
        dt_bar=config.numerics.dt_bar,
        t_max_periods=config.sweep.periods,
        ensemble=config.numerics.ensemble,
        seed=config.numerics.seed,
    )
    sub = RunConfig(
        mode=config.mode,
        system=sys_p,
        bath=config.bath,
        numerics=num,
        samples_per_period=config.samples_per_period,
    )
    if mode == "quantum":
        rows, _ = _quantum_rows(sub, closed=False)
    else:
        rows, _ = _classical_rows(sub)
    p_rel, t_slip, f_max = _first_period_summary(rows, sys_p.T_bar)
    return (v, mode, p_rel, t_slip, f_max)


def run(config: RunConfig, out_dir: str | Path, threads: int = 1) -> RunOutput:
    """Execute the configured mode and write CSV artifacts plus a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    files: list[str] = []
    status = "complete"
    try:
        if config.mode in ("quantum-closed", "quantum-open"):
            rows, _ = _quantum_rows(config, closed=config.mode == "quantum-closed")
            path = out / "trajectory.csv"
            _write_csv(path, TRAJECTORY_HEADER, rows)
            files.append(path.name)
        elif config.mode == "classical":
            rows, _ = _classical_rows(config)
            path = out / "trajectory.csv"
            _write_csv(path, TRAJECTORY_HEADER, rows)
            files.append(path.name)
        elif config.mode == "spectrum":
            p, n = config.system, config.numerics.n_size
            basis = MovingBasis(p, n)
            rows = []
            for t in np.linspace(0.0, p.T_bar, config.samples_per_period + 1):
                snap = solve_snapshot(t, p, n, basis)
                rows.append((t, t / p.T_bar, *snap.energies[:5]))
            path = out / "spectrum.csv"
            _write_csv(path, SPECTRUM_HEADER, rows)
            files.append(path.name)
            # basis-size convergence diagnostic for the tracked levels
            conv_rows = []
            for n_size in range(5, 51, 5):
                for frac in (0.0, 0.25, 0.5):
                    snap = solve_snapshot(frac * p.T_bar, p, n_size)
                    conv_rows.append((n_size, frac, *snap.energies[:5]))
            conv = out / "convergence.csv"
            _write_csv(conv, "n_size,t_over_T,E0,E1,E2,E3,E4", conv_rows)
            files.append(conv.name)
        elif config.mode == "bath-rates":
            rates = BathRates(config.bath)
            es = np.linspace(-config.rates_e_max, config.rates_e_max, config.rates_points)
            rows = [(e, rates.gamma(e), float(np.real(rates.sigma(e)))) for e in es]
            path = out / "bath_rates.csv"
            _write_csv(path, RATES_HEADER, rows)
            files.append(path.name)
        elif config.mode == "sweep":
            if config.sweep is None:
                raise ValueError("sweep mode requires a sweep specification")
            tasks = [
                (config, float(v), m) for v in config.sweep.velocities for m in config.sweep.modes
            ]
            if threads > 1:
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    results = list(pool.map(_sweep_point, tasks))
            else:
                results = [_sweep_point(t) for t in tasks]
            results.sort(key=lambda r: (r[0], r[1]))
            path = out / "sweep_summary.csv"
            _write_csv(path, SWEEP_HEADER, results)
            files.append(path.name)
        else:
            raise ValueError(f"unknown mode {config.mode!r}")
    except BaseException:
        status = "aborted"
        raise
    finally:
        manifest = out / "manifest.txt"
        _write_manifest(manifest, config, files, status, time.time() - t0)
    return RunOutput(files=files, manifest=manifest)


def _write_manifest(path: Path, config: RunConfig, files, status: str, wall: float) -> None:
    p, bp, num = config.system, config.bath, config.numerics
    kv = [
        ("code_version", __version__),
        ("mode", config.mode),
        ("system.u0", p.u0),
        ("system.kappa", p.kappa),
        ("drive.v", p.v_bar),
        ("derived.eta", p.eta),
        ("derived.T_bar", p.T_bar),
        ("bath.alpha", bp.alpha),
        ("bath.omega_c", bp.omega_c),
        ("bath.theta", bp.theta),
        ("numerics.n_size", num.n_size),
        ("numerics.dt_bar", "auto" if num.dt_bar is None else num.dt_bar),
        ("numerics.t_max_periods", num.t_max_periods),
        ("numerics.ensemble", num.ensemble),
        ("numerics.seed", num.seed),
        ("run.stride", config.samples_per_period),
        ("status", status),
        ("wall_time_s", f"{wall:.3f}"),
        ("files", ";".join(files)),
    ]
    if config.sweep is not None:
        kv.append(("sweep.points", len(config.sweep.velocities)))
        kv.append(("sweep.v_min", config.sweep.velocities[0]))
        kv.append(("sweep.v_max", config.sweep.velocities[-1]))
        kv.append(("sweep.modes", ",".join(config.sweep.modes)))
        kv.append(("sweep.periods", config.sweep.periods))
    with open(path, "w", newline="") as fh:
        for k, v in kv:
            fh.write(f"{k}={v}\n")
