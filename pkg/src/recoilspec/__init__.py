"""Photon-recoil spectroscopy modelling toolkit.

Pipeline: driven two-level Bloch dynamics during short pulses -> per-pulse
momentum drift/diffusion coefficients -> analytic phase-space propagation of
the motional probe state -> overlap signals, recoil sensitivity, Fisher
information bounds, Doppler systematics and probe-state optimization.
"""

from .bloch import (BlochTrajectory, BlochVector, PulseParams,
                    bloch_trajectory, correlation_yy, solve_bloch,
                    steady_state)
from .doppler import ShiftResult, asymmetric_overlap, two_point_shift
from .errors import (ConfigError, ConvergenceError, FlatFlankError,
                     GridUnderflowError, NoCrossingError, OptimizerError,
                     PerturbativeRegimeError, QuadratureConvergenceError,
                     RecoilSpecError, StepSizeError, UnsupportedDampingError)
from .metrology import (SensitivityResult, WorkingPoint, fisher_binary,
                        fisher_imperfect, find_working_point,
                        phase_mismatch_sensitivity, qfi,
                        qfi_sensitivity_bound, recoil_sensitivity, snr)
from .pdeoracle import GridSpec, overlap_pde, overlap_pde_batch
from .phasespace import (CatState, FockSuperposition, FPParams, GaussianState,
                         characteristic_function, evolve_and_overlap_cat,
                         evolve_and_overlap_fock, evolve_gaussian,
                         overlap_after, overlap_gaussian, state_nbar,
                         state_qfi)
from .recoil import (DriftDiffusion, compute_coefficients, doppler_damping,
                     drift_p, drift_slope, mean_photons_per_pulse)
from .stateopt import (OptimizationProblem, OptimizationResult,
                       SinglePhotonBudget, fock_sensitivity,
                       optimize_fock_superposition, single_photon_budget,
                       squeezing_db)

__version__ = "0.1.0"

__all__ = [
    "BlochTrajectory", "BlochVector", "PulseParams", "bloch_trajectory",
    "correlation_yy", "solve_bloch", "steady_state",
    "ShiftResult", "asymmetric_overlap", "two_point_shift",
    "ConfigError", "ConvergenceError", "FlatFlankError", "GridUnderflowError",
    "NoCrossingError", "OptimizerError", "PerturbativeRegimeError",
    "QuadratureConvergenceError", "RecoilSpecError", "StepSizeError",
    "UnsupportedDampingError",
    "SensitivityResult", "WorkingPoint", "fisher_binary", "fisher_imperfect",
    "find_working_point", "phase_mismatch_sensitivity", "qfi",
    "qfi_sensitivity_bound", "recoil_sensitivity", "snr",
    "GridSpec", "overlap_pde", "overlap_pde_batch",
    "CatState", "FockSuperposition", "FPParams", "GaussianState",
    "characteristic_function", "evolve_and_overlap_cat",
    "evolve_and_overlap_fock", "evolve_gaussian", "overlap_after",
    "overlap_gaussian", "state_nbar", "state_qfi",
    "DriftDiffusion", "compute_coefficients", "doppler_damping", "drift_p",
    "drift_slope", "mean_photons_per_pulse",
    "OptimizationProblem", "OptimizationResult", "SinglePhotonBudget",
    "fock_sensitivity", "optimize_fock_superposition",
    "single_photon_budget", "squeezing_db",
]
