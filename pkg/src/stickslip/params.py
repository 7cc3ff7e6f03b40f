"""Model parameters and dimensionless rescaling.

Units: the trap frequency Omega, oscillator length ell = sqrt(hbar/(M Omega))
and velocity nu = ell*Omega set the scales. All dimensionless quantities are
energies in hbar*Omega, lengths in ell, times in 1/Omega, velocities in nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ChainParams:
    """Microscopic chain/particle interaction parameters (dimensional).

    a: lattice period, d: particle-chain distance, A_s/d_s: magnitude and
    decay length of the short-range repulsion, C_6: Hamaker constant of the
    attractive r^-6 tail. Lengths share one unit; A_s and C_6/length^6 share
    one energy unit.
    """

    a: float
    d: float
    A_s: float
    d_s: float
    C_6: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError(f"lattice period a must be > 0, got {self.a}")
        if self.d <= 0:
            raise ValueError(f"distance d must be > 0, got {self.d}")
        if self.d_s <= 0:
            raise ValueError(f"decay length d_s must be > 0, got {self.d_s}")
        if self.A_s < 0:
            raise ValueError(f"A_s must be >= 0, got {self.A_s}")
        if self.C_6 < 0:
            raise ValueError(f"C_6 must be >= 0, got {self.C_6}")


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless drive/corrugation parameters.

    u0: corrugation depth U0/(hbar Omega); kappa: lattice wavenumber
    2*pi*ell/a; v_bar: drive velocity v/nu. Derived: eta = (u0/2)*kappa^2
    (stick-slip requires eta > 1) and the drive period T_bar = (2*pi/kappa)/v_bar.
    """

    u0: float
    kappa: float
    v_bar: float
    eta: float = field(init=False)
    T_bar: float = field(init=False)

    def __post_init__(self):
        if self.u0 < 0:
            raise ValueError(f"u0 must be >= 0, got {self.u0}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.v_bar <= 0:
            raise ValueError(f"v_bar must be > 0, got {self.v_bar}")
        object.__setattr__(self, "eta", 0.5 * self.u0 * self.kappa**2)
        object.__setattr__(self, "T_bar", (2.0 * math.pi / self.kappa) / self.v_bar)


@dataclass(frozen=True)
class BathParams:
    """Ohmic bath: J(w) = 2*alpha*w*exp(-|w|/omega_c), temperature theta = k_B T/(hbar Omega)."""

    alpha: float = 1e-4
    omega_c: float = 50.0
    theta: float = 0.01

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if self.theta < 0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")


@dataclass(frozen=True)
class NumericsParams:
    """Discretisation controls.

    dt_bar=None lets the propagator pick min(0.5/max|E_n-E_m|, T_bar/200000);
    an explicit dt_bar is still checked against the Bohr-oscillation bound at
    propagation start.
    """

    n_size: int = 25
    dt_bar: float | None = None
    t_max_periods: float = 3.0
    ensemble: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_size < 5:
            raise ValueError(f"n_size must be >= 5, got {self.n_size}")
        if self.dt_bar is not None and self.dt_bar <= 0:
            raise ValueError(f"dt_bar must be > 0, got {self.dt_bar}")
        if self.t_max_periods <= 0:
            raise ValueError(f"t_max_periods must be > 0, got {self.t_max_periods}")
        if self.ensemble < 1:
            raise ValueError(f"ensemble must be >= 1, got {self.ensemble}")


def build_system_params(
    v_over_nu: float,
    u0: float | None = None,
    kappa: float | None = None,
    chain: ChainParams | None = None,
    hbar_omega: float | None = None,
    ell: float | None = None,
) -> SystemParams:
    """Assemble SystemParams either directly from (u0, kappa) or from chain microparameters.

    The direct route is the working mode; the chain route derives
    u0 = U0(d)/hbar_omega from the cosine-approximation amplitude and
    kappa = 2*pi*ell/a, so it needs the energy quantum and trap length.
    """
    if v_over_nu <= 0:
        raise ValueError(f"v_over_nu must be > 0, got {v_over_nu}")
    if u0 is None:
        if chain is None or hbar_omega is None:
            raise ValueError("need either u0 or (chain, hbar_omega)")
        from .lattice import lattice_potential_cosine

        U0, _ = lattice_potential_cosine(chain)
        u0 = U0 / hbar_omega
        if u0 < 0:
            # attraction-dominated corrugation: depth is |U0|, origin shifts by a/2
            u0 = abs(u0)
    if kappa is None:
        if chain is None or ell is None:
            raise ValueError("need either kappa or (chain, ell)")
        kappa = 2.0 * math.pi * ell / chain.a
    return SystemParams(u0=u0, kappa=kappa, v_bar=v_over_nu)
