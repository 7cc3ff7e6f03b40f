import numpy as np
import pytest

from oracles import brute_force_lattice_potential, fourier_cos_coefficient
from stickslip.lattice import (
    cosine_potential,
    lattice_potential_cosine,
    lattice_potential_exact,
    theta3,
)
from stickslip.params import ChainParams


CHAIN = ChainParams(a=1.0, d=3.0, A_s=1.9, d_s=0.4, C_6=2.7)


def test_no_interaction_is_zero():
    p = ChainParams(a=1.0, d=3.0, A_s=0.0, d_s=0.4, C_6=0.0)
    xs = np.linspace(-2.0, 2.0, 41)
    assert np.all(lattice_potential_exact(xs, p) == 0.0)
    assert lattice_potential_cosine(p) == (0.0, 0.0)


def test_lattice_periodicity():
    xs = np.linspace(0.0, 1.0, 37)
    v1 = lattice_potential_exact(xs, CHAIN)
    v2 = lattice_potential_exact(xs + CHAIN.a, CHAIN)
    assert np.max(np.abs(v1 - v2) / np.abs(v1)) < 1e-12


def test_exact_matches_brute_force_sums():
    for x in (0.0, 0.13, 0.33, 0.5, 0.77):
        ref = brute_force_lattice_potential(x, CHAIN)
        val = lattice_potential_exact(x, CHAIN)
        assert val == pytest.approx(ref, rel=1e-8)


def test_mirror_symmetry():
    xs = np.linspace(0.01, 0.49, 25)
    v_plus = lattice_potential_exact(xs, CHAIN)
    v_minus = lattice_potential_exact(-xs, CHAIN)
    assert np.max(np.abs(v_plus - v_minus)) < 1e-14 * np.max(np.abs(v_plus))
    # mirror about a/2
    v_half = lattice_potential_exact(CHAIN.a - xs, CHAIN)
    assert np.max(np.abs(v_plus - v_half)) < 1e-12 * np.max(np.abs(v_plus))


def test_theta3_q_zero_limit():
    assert theta3(0.37, 0.0) == 1.0
    with pytest.raises(ValueError):
        theta3(0.0, 1.0)


def test_theta3_against_direct_series():
    q, u = 0.3, 0.7
    direct = 1.0 + 2.0 * sum(q ** (n * n) * np.cos(2 * n * u) for n in range(1, 60))
    assert theta3(u, q) == pytest.approx(direct, rel=1e-14)


def test_cosine_amplitude_matches_fourier_projection():
    # short-range-dominated corrugation: d*d_s small keeps the harmonic healthy
    chain = ChainParams(a=1.0, d=2.5, A_s=1e28, d_s=0.04, C_6=1.0)
    U0, _ = lattice_potential_cosine(chain)
    coeff = fourier_cos_coefficient(lambda x: lattice_potential_exact(x, chain), chain.a)
    assert coeff == pytest.approx(U0 / 2.0, rel=0.02)


def test_offset_plus_half_amplitude_is_mean():
    chain = ChainParams(a=1.0, d=2.5, A_s=1e28, d_s=0.04, C_6=1.0)
    U0, Delta0 = lattice_potential_cosine(chain)
    xs = (np.arange(2048) + 0.5) / 2048 * chain.a
    mean_cosine = float(np.mean(cosine_potential(xs, chain)))
    assert mean_cosine == pytest.approx(Delta0 + U0 / 2.0, rel=1e-12)


def test_close_distance_warns():
    near = ChainParams(a=1.0, d=1.5, A_s=1.0, d_s=0.4, C_6=0.0)
    with pytest.warns(UserWarning):
        lattice_potential_cosine(near)


def test_deviation_flag_for_tiny_corrugation():
    # at d*d_s >> a^2 the cosine amplitude is exponentially small and the
    # neglected harmonics exceed 5% of it: the (non-fatal) flag must fire
    with pytest.warns(UserWarning, match="cosine approximation off"):
        lattice_potential_cosine(CHAIN)
