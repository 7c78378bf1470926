"""Covariance-level simulator for a pair of linearly coupled oscillators."""

from .dynamics import (
    OMEGA,
    SIGMA_OVERFLOW_LIMIT,
    DissipationSpec,
    TrajectoryRecord,
    death_time,
    drift_and_diffusion,
    elliptical_mode_propagator,
    entanglement_trajectory,
    evolve_dissipative,
    evolve_unitary,
    mach_zehnder_residual,
    unitary_propagator,
)
from .model import (
    DegenerateCouplingError,
    DiagonalizerParams,
    HamiltonianMatrix,
    HookianSpec,
    ModeHamiltonian,
    OscillatorPair,
    Regime,
    build_hamiltonian,
    classify_regime,
    critical_coupling,
    diagonal_hamiltonian,
    diagonalizer_params,
    diagonalizing_symplectic,
    hookian_reduce,
    normal_mode_energies_sq,
    symplectic_frequencies,
)
from .numerics import integrate_matrix, mat_exp, rk4_integrate
from .states import (
    NumericalInconsistencyError,
    PhysicalityCheck,
    ThermalSpec,
    check_physical,
    covariance_blocks,
    log_negativity,
    nu_minus_pt,
    purity,
    seralian,
    symplectic_eigenvalues,
    thermal_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "OMEGA",
    "SIGMA_OVERFLOW_LIMIT",
    "DissipationSpec",
    "TrajectoryRecord",
    "death_time",
    "drift_and_diffusion",
    "elliptical_mode_propagator",
    "entanglement_trajectory",
    "evolve_dissipative",
    "evolve_unitary",
    "mach_zehnder_residual",
    "unitary_propagator",
    "DegenerateCouplingError",
    "DiagonalizerParams",
    "HamiltonianMatrix",
    "HookianSpec",
    "ModeHamiltonian",
    "OscillatorPair",
    "Regime",
    "build_hamiltonian",
    "classify_regime",
    "critical_coupling",
    "diagonal_hamiltonian",
    "diagonalizer_params",
    "diagonalizing_symplectic",
    "hookian_reduce",
    "normal_mode_energies_sq",
    "symplectic_frequencies",
    "integrate_matrix",
    "mat_exp",
    "rk4_integrate",
    "NumericalInconsistencyError",
    "PhysicalityCheck",
    "ThermalSpec",
    "check_physical",
    "covariance_blocks",
    "log_negativity",
    "nu_minus_pt",
    "purity",
    "seralian",
    "symplectic_eigenvalues",
    "thermal_covariance",
]
