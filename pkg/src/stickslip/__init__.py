"""Quantum and classical stick-slip friction of a harmonically driven particle
over a periodic lattice potential."""

__version__ = "0.1.0"

from .params import BathParams, ChainParams, NumericsParams, SystemParams, build_system_params
from .lattice import lattice_potential_cosine, lattice_potential_exact
from .operators import (
    MovingBasis,
    OperatorMatrix,
    corrugation_matrix,
    coupling_matrix,
    drift_matrix,
    hamiltonian_matrix,
    position_momentum_matrices,
    static_overlap,
)
from .spectrum import (
    AntiCrossing,
    SpectrumSnapshot,
    eigenstate_slip_times,
    find_anticrossings,
    lz_probability,
    phase_align,
    solve_snapshot,
)
from .bath import (
    BathRates,
    MarkovDiagnostics,
    bath_correlation,
    gamma_rate,
    markov_diagnostics,
    renormalization_constant,
    sigma_shift,
    spectral_density,
    transition_rate,
)
from .propagator import (
    PropagationAborted,
    PropagationLog,
    PropagationResult,
    build_s_matrix,
    closed_rhs,
    initial_state,
    open_rhs,
    propagate,
)
from .observables import (
    PhaseAccumulator,
    TrajectoryRecord,
    energy_and_populations,
    geometric_phase,
    kinematics,
    lateral_force,
    linear_entropy,
    work_heat_power,
)
from .classical import (
    ClassicalState,
    EnsembleResult,
    deterministic_force,
    integrate_trajectory,
    run_ensemble,
    sample_random_force,
    viscous_force,
)
from .config import ConfigError, RunConfig, SweepSpec, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
