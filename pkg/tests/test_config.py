import numpy as np
import pytest

from stickslip.config import ConfigError, SweepSpec, parse_config


def test_reference_parameter_set():
    cfg = parse_config("system.u0=5\nsystem.kappa=1\ndrive.v=0.005")
    assert cfg.system.eta == 2.5
    assert cfg.system.v_bar == 0.005
    assert cfg.mode == "quantum-open"


def test_empty_text_gives_valid_defaults():
    cfg = parse_config("")
    assert cfg.system.u0 == 5.0
    assert cfg.system.kappa == 1.0
    assert cfg.bath.alpha == 1e-4
    assert cfg.bath.omega_c == 50.0
    assert cfg.bath.theta == 0.01
    assert cfg.numerics.n_size == 25
    assert cfg.numerics.dt_bar is None


def test_negative_u0_names_constraint_and_line():
    with pytest.raises(ConfigError, match=r"line 2: u0 must be >= 0"):
        parse_config("# comment\nsystem.u0=-1")


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r"line 3: unknown key 'system.mass'"):
        parse_config("system.u0=5\n\nsystem.mass=2")


def test_type_mismatch_reports_line():
    with pytest.raises(ConfigError, match=r"line 1: numerics.n_size expects an integer"):
        parse_config("numerics.n_size=big")
    with pytest.raises(ConfigError, match=r"line 1: drive.v expects a number"):
        parse_config("drive.v=fast")


def test_duplicate_and_malformed_lines():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("system.u0=5\nsystem.u0=6")
    with pytest.raises(ConfigError, match="expected key=value"):
        parse_config("system.u0")


def test_mode_conflict():
    with pytest.raises(ConfigError, match="conflicts"):
        parse_config("run.mode=classical", mode="quantum-open")
    cfg = parse_config("run.mode=quantum-closed", mode="quantum-open")
    assert cfg.mode == "quantum-closed"
    with pytest.raises(ConfigError, match="run.mode must be one of"):
        parse_config("run.mode=warpdrive")


def test_sweep_grid_log_spaced():
    cfg = parse_config(
        "sweep.v_min=0.01\nsweep.v_max=1\nsweep.points=5\nsweep.modes=quantum", mode="sweep"
    )
    vs = np.array(cfg.sweep.velocities)
    assert len(vs) == 5
    assert np.all(np.diff(vs) > 0)
    ratios = vs[1:] / vs[:-1]
    assert np.allclose(ratios, ratios[0], rtol=1e-12)
    assert cfg.sweep.modes == ("quantum",)


def test_sweep_validation():
    with pytest.raises(ConfigError, match="v_min must be <"):
        parse_config("sweep.v_min=1\nsweep.v_max=0.5", mode="sweep")
    with pytest.raises(ConfigError, match="unknown sweep modes"):
        parse_config("sweep.modes=quantum,magic", mode="sweep")
    with pytest.raises(ValueError):
        SweepSpec(velocities=(0.2, 0.1))
    with pytest.raises(ValueError):
        SweepSpec(velocities=(0.0, 0.1))


def test_seed_and_stride_pass_through():
    cfg = parse_config("numerics.seed=99\nrun.stride=250")
    assert cfg.numerics.seed == 99
    assert cfg.samples_per_period == 250
