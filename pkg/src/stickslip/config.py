"""Flat key=value run configuration with dotted sections.

Example::

    system.u0=5
    system.kappa=1
    drive.v=0.005
    bath.alpha=1e-4
    run.mode=quantum-open

Unknown keys, type mismatches and constraint violations raise ConfigError
with the offending line number. An empty file is a valid all-defaults
configuration (the Fig.-2-style parameter set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import BathParams, NumericsParams, SystemParams

MODES = ("quantum-closed", "quantum-open", "classical", "sweep", "spectrum", "bath-rates")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SweepSpec:
    """Log-spaced velocity grid and the per-point run modes."""

    velocities: tuple[float, ...]
    modes: tuple[str, ...] = ("quantum", "classical")
    periods: float = 1.0

    def __post_init__(self):
        if len(self.velocities) < 1 or any(v <= 0 for v in self.velocities):
            raise ValueError("sweep velocities must be positive")
        if any(b <= a for a, b in zip(self.velocities, self.velocities[1:])):
            raise ValueError("sweep velocities must be strictly increasing")
        bad = [m for m in self.modes if m not in ("quantum", "classical")]
        if bad:
            raise ValueError(f"unknown sweep modes: {bad}")


@dataclass
class RunConfig:
    mode: str
    system: SystemParams
    bath: BathParams
    numerics: NumericsParams
    samples_per_period: int = 1000
    sweep: SweepSpec | None = None
    rates_e_max: float = 30.0
    rates_points: int = 1201


_FLOAT_KEYS = {
    "system.u0": (0.0, None, "u0 must be >= 0"),
    "system.kappa": (None, None, "kappa must be > 0"),
    "drive.v": (None, None, "drive velocity must be > 0"),
    "bath.alpha": (0.0, None, "alpha must be >= 0"),
    "bath.omega_c": (None, None, "omega_c must be > 0"),
    "bath.theta": (0.0, None, "theta must be >= 0"),
    "numerics.dt_bar": (None, None, "dt_bar must be > 0"),
    "numerics.t_max_periods": (None, None, "t_max_periods must be > 0"),
    "sweep.v_min": (None, None, "sweep.v_min must be > 0"),
    "sweep.v_max": (None, None, "sweep.v_max must be > 0"),
    "sweep.periods": (None, None, "sweep.periods must be > 0"),
    "rates.e_max": (None, None, "rates.e_max must be > 0"),
}
_STRICT_POS = {
    "system.kappa",
    "drive.v",
    "bath.omega_c",
    "numerics.dt_bar",
    "numerics.t_max_periods",
    "sweep.v_min",
    "sweep.v_max",
    "sweep.periods",
    "rates.e_max",
}
_INT_KEYS = {
    "numerics.n_size": (5, "n_size must be >= 5"),
    "numerics.ensemble": (1, "ensemble must be >= 1"),
    "numerics.seed": (None, ""),
    "run.stride": (1, "stride must be >= 1"),
    "sweep.points": (2, "sweep.points must be >= 2"),
    "rates.points": (2, "rates.points must be >= 2"),
}
_STR_KEYS = {"run.mode", "sweep.modes"}
_ALL_KEYS = set(_FLOAT_KEYS) | set(_INT_KEYS) | _STR_KEYS


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and validate a configuration; `mode` (from the CLI subcommand)
    overrides any run.mode key. Defaults reproduce the reference parameter
    set: u0=5, kappa=1, v=0.005, alpha=1e-4, omega_c=50, theta=0.01, n_size=25.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}", ln)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key {key!r}", ln)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", ln)
        lines[key] = ln
        if key in _FLOAT_KEYS:
            try:
                x = float(val)
            except ValueError:
                raise ConfigError(f"{key} expects a number, got {val!r}", ln) from None
            lo, _, msg = _FLOAT_KEYS[key]
            if not math.isfinite(x):
                raise ConfigError(f"{key} must be finite", ln)
            if key in _STRICT_POS and x <= 0:
                raise ConfigError(msg, ln)
            if lo is not None and x < lo:
                raise ConfigError(msg, ln)
            values[key] = x
        elif key in _INT_KEYS:
            try:
                x = int(val)
            except ValueError:
                raise ConfigError(f"{key} expects an integer, got {val!r}", ln) from None
            lo, msg = _INT_KEYS[key]
            if lo is not None and x < lo:
                raise ConfigError(msg, ln)
            values[key] = x
        else:
            values[key] = val

    cfg_mode = values.get("run.mode")
    if cfg_mode is not None and cfg_mode not in MODES:
        raise ConfigError(f"run.mode must be one of {MODES}, got {cfg_mode!r}", lines["run.mode"])
    if mode is not None:
        if cfg_mode is not None and cfg_mode != mode and not (
            mode.startswith("quantum") and str(cfg_mode).startswith("quantum")
        ):
            raise ConfigError(
                f"run.mode {cfg_mode!r} conflicts with the requested command {mode!r}",
                lines["run.mode"],
            )
        final_mode = cfg_mode if (cfg_mode is not None and str(cfg_mode).startswith(mode.split("-")[0])) else mode
    else:
        final_mode = cfg_mode if cfg_mode is not None else "quantum-open"
    final_mode = str(final_mode)

    system = SystemParams(
        u0=float(values.get("system.u0", 5.0)),
        kappa=float(values.get("system.kappa", 1.0)),
        v_bar=float(values.get("drive.v", 0.005)),
    )
    bath = BathParams(
        alpha=float(values.get("bath.alpha", 1e-4)),
        omega_c=float(values.get("bath.omega_c", 50.0)),
        theta=float(values.get("bath.theta", 0.01)),
    )
    numerics = NumericsParams(
        n_size=int(values.get("numerics.n_size", 25)),
        dt_bar=values.get("numerics.dt_bar"),  # None = auto
        t_max_periods=float(values.get("numerics.t_max_periods", 3.0)),
        ensemble=int(values.get("numerics.ensemble", 1)),
        seed=int(values.get("numerics.seed", 0)),
    )

    sweep = None
    if final_mode == "sweep" or any(k.startswith("sweep.") for k in values):
        v_min = float(values.get("sweep.v_min", 0.002))
        v_max = float(values.get("sweep.v_max", 1.0))
        points = int(values.get("sweep.points", 25))
        if v_min >= v_max:
            raise ConfigError(
                "sweep.v_min must be < sweep.v_max",
                lines.get("sweep.v_min") or lines.get("sweep.v_max"),
            )
        modes_s = str(values.get("sweep.modes", "quantum,classical"))
        mode_list = tuple(m.strip() for m in modes_s.split(",") if m.strip())
        try:
            sweep = SweepSpec(
                velocities=tuple(np.geomspace(v_min, v_max, points)),
                modes=mode_list,
                periods=float(values.get("sweep.periods", 1.0)),
            )
        except ValueError as exc:
            raise ConfigError(str(exc), lines.get("sweep.modes")) from None

    return RunConfig(
        mode=final_mode,
        system=system,
        bath=bath,
        numerics=numerics,
        samples_per_period=int(values.get("run.stride", 1000)),
        sweep=sweep,
        rates_e_max=float(values.get("rates.e_max", 30.0)),
        rates_points=int(values.get("rates.points", 1201)),
    )
