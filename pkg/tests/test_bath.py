import math

import numpy as np
import pytest
from scipy.integrate import quad

from oracles import bath_correlation_oracle, sigma_pv_oracle
from stickslip.bath import (
    BathRates,
    bath_correlation,
    gamma_rate,
    markov_diagnostics,
    renormalization_constant,
    sigma_shift,
    spectral_density,
    transition_rate,
)
from stickslip.operators import drift_matrix
from stickslip.params import BathParams, SystemParams
from stickslip.spectrum import phase_align, solve_snapshot

BP = BathParams(alpha=1e-4, omega_c=50.0, theta=0.01)


def test_spectral_density_values():
    assert spectral_density(3.0, BathParams(alpha=0.0)) == 0.0
    grid = np.linspace(-120.0, 120.0, 41)
    assert np.allclose(spectral_density(-grid, BP), -spectral_density(grid, BP), atol=0)
    assert spectral_density(50.0, BP) == pytest.approx(2e-4 * 50.0 * math.exp(-1.0), rel=1e-14)


def test_renormalization_constant():
    assert renormalization_constant(BP) == pytest.approx(0.01, rel=1e-14)
    assert renormalization_constant(BathParams(alpha=0.0)) == 0.0
    integral, _ = quad(lambda w: spectral_density(w, BP) / w, 0.0, np.inf)
    assert integral == pytest.approx(renormalization_constant(BP), rel=1e-10)


@pytest.mark.parametrize("tau", [0.1, 1.0, 10.0])
def test_bath_correlation_matches_fourier_integral(tau):
    ref = bath_correlation_oracle(tau, BP)
    val = bath_correlation(tau, BP)
    assert abs(val - ref) / abs(ref) < 1e-6


def test_bath_correlation_symmetry_and_linearity():
    c = bath_correlation(1.3, BP)
    assert bath_correlation(-1.3, BP) == pytest.approx(np.conj(c), rel=1e-14)
    doubled = BathParams(alpha=2e-4, omega_c=50.0, theta=0.01)
    assert bath_correlation(1.3, doubled) == pytest.approx(2.0 * c, rel=1e-14)
    with pytest.raises(ValueError):
        bath_correlation(1.0, BathParams(alpha=1e-4, omega_c=50.0, theta=0.0))


def test_gamma_rate_limits_and_values():
    assert gamma_rate(0.0, BP) == pytest.approx(4.0 * math.pi * 1e-4 * 0.01, rel=1e-14)
    expected = 4.0 * math.pi * 1e-4 * math.exp(-0.02) / (1.0 - math.exp(-100.0))
    assert gamma_rate(1.0, BP) == pytest.approx(expected, rel=1e-12)
    assert gamma_rate(1.0, BathParams(alpha=0.0)) == 0.0


def test_gamma_rate_detailed_balance():
    for e in (0.5, 1.0, 3.0):
        log_ratio = math.log(gamma_rate(e, BP)) - math.log(gamma_rate(-e, BP))
        assert abs(log_ratio - e / BP.theta) <= 1e-10 * (e / BP.theta)


def test_gamma_rate_continuity_at_zero():
    g0 = gamma_rate(0.0, BP)
    for e in (1e-6, -1e-6):
        assert abs(gamma_rate(e, BP) - g0) < 1e-3 * g0


def test_sigma_shift_limits():
    assert sigma_shift(0.0, BP) == pytest.approx(-2.0 * 1e-4 * 50.0, rel=1e-14)
    assert sigma_shift(1.0, BathParams(alpha=0.0)) == 0.0
    s0 = -2.0 * BP.alpha * BP.omega_c
    for e in (1e-6, -1e-6):
        assert abs(sigma_shift(e, BP) - s0) < 1e-3 * abs(s0)


@pytest.mark.parametrize("e", [0.5, -0.5, 1.0, -1.0, 3.0, -3.0])
def test_sigma_shift_matches_pv_quadrature(e):
    ref = sigma_pv_oracle(e, BP)
    assert abs(sigma_shift(e, BP) - ref) / abs(ref) < 1e-6


def test_transition_rate_assembly():
    g = transition_rate(0.0, BP)
    assert g.real == pytest.approx(0.5 * 4.0 * math.pi * BP.alpha * BP.theta, rel=1e-14)
    assert g.imag == pytest.approx(-2.0 * BP.alpha * BP.omega_c, rel=1e-14)
    assert transition_rate(0.7, BathParams(alpha=0.0)) == 0.0
    grid = np.linspace(-10.0, 10.0, 201)
    vals = transition_rate(grid, BP)
    assert np.all(vals.real >= 0.0)
    assert np.all(np.isreal(vals.imag))


def test_bath_rates_table_matches_direct():
    rates = BathRates(BP)
    rates.build_table(12.0)
    rng = np.random.default_rng(0)
    es = np.concatenate([rng.uniform(-11, 11, 200), [0.0, 1e-6, -1e-6, 0.05]])
    direct = 0.5 * gamma_rate(es, BP) + 1j * sigma_shift(es, BP)
    table = rates(es)
    assert np.max(np.abs(table - direct)) < 1e-9


def test_markov_diagnostics_reference_point():
    p = SystemParams(u0=5.0, kappa=1.0, v_bar=0.005)
    ts = np.linspace(0.18, 0.22, 9) * p.T_bar
    snaps = [solve_snapshot(ts[0], p, 25)]
    for t in ts[1:]:
        snaps.append(phase_align(snaps[-1], solve_snapshot(t, p, 25)))
    sigma_t = drift_matrix(p.v_bar, 25).entries
    diag = markov_diagnostics(snaps, BP, sigma_t)
    assert diag.bath_faster_than_relaxation
    assert diag.bath_faster_than_system
    assert diag.tau_B < 1.0
    # alpha = 0: no relaxation channel, trivially valid
    diag0 = markov_diagnostics(snaps, BathParams(alpha=0.0), sigma_t)
    assert diag0.tau_R is None
    assert diag0.bath_faster_than_relaxation
    # doubling alpha halves the relaxation time
    diag2 = markov_diagnostics(snaps, BathParams(alpha=2e-4, omega_c=50.0, theta=0.01), sigma_t)
    assert diag2.tau_R == pytest.approx(diag.tau_R / 2.0, rel=1e-10)
