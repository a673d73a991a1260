"""Finite-volume Godunov solver for 1-D scalar conservation laws whose flux
has BV spatial discontinuities and a degenerate (plateau) profile, plus the
verification harness for the scheme's proven properties."""

__version__ = "0.1.0"

from .coefficients import SpatialCoefficient
from .diagnostics import (DiagnosticsRecord, StepRecorder,
                          TimeContinuityResult, discrete_entropy_residual,
                          entropy_residual_profile, entropy_tolerance,
                          l1_error, mass_balance_residual,
                          time_continuity_bound, time_continuity_check,
                          total_variation, tv_beta)
from .errors import (BVFluxError, ConfigError, InvalidInputError,
                     InvariantViolationError, RootFindError,
                     UnsupportedReferenceError)
from .examples import (EXAMPLE_IDS, VALIDATION_FLUX_IDS, ExampleProblem,
                       GeometricPartition, eval_exact, example_problem,
                       validation_model)
from .flux_model import (BoundSet, CallableBeta, CheckResult, FluxModel,
                         PlateauInfo, ScaleBeta, ShiftBeta, ValidationReport)
from .solver import (Grid1D, SolverState, TimeStepping,
                     classical_godunov_oracle, godunov_flux_g,
                     godunov_interface_flux, incremental_coefficients,
                     interface_fluxes, run, sample_initial_data, step,
                     u_incremental_coefficients)
from .stationary import (StationaryState, compute_alpha_bar,
                         discrete_stationary_state, solve_k_alpha,
                         sup_state_bound)
from .config import RunConfig, load_config, parse_config
from .runner import (ProblemSetup, RunResult, build_problem,
                     execute_convergence, execute_run, execute_tv_history,
                     execute_validate, run_single)

__all__ = [
    "__version__",
    "BVFluxError", "ConfigError", "InvalidInputError",
    "InvariantViolationError", "RootFindError", "UnsupportedReferenceError",
    "SpatialCoefficient",
    "FluxModel", "ShiftBeta", "ScaleBeta", "CallableBeta", "PlateauInfo",
    "BoundSet", "CheckResult", "ValidationReport",
    "Grid1D", "TimeStepping", "SolverState", "sample_initial_data",
    "godunov_flux_g", "godunov_interface_flux", "classical_godunov_oracle",
    "interface_fluxes", "step", "run", "incremental_coefficients",
    "u_incremental_coefficients",
    "StationaryState", "compute_alpha_bar", "discrete_stationary_state",
    "solve_k_alpha", "sup_state_bound",
    "DiagnosticsRecord", "StepRecorder", "total_variation", "tv_beta",
    "l1_error", "entropy_residual_profile", "discrete_entropy_residual",
    "entropy_tolerance", "mass_balance_residual", "time_continuity_bound",
    "time_continuity_check", "TimeContinuityResult",
    "GeometricPartition", "ExampleProblem", "example_problem",
    "validation_model", "eval_exact", "EXAMPLE_IDS", "VALIDATION_FLUX_IDS",
    "RunConfig", "load_config", "parse_config",
    "ProblemSetup", "RunResult", "build_problem", "run_single",
    "execute_run", "execute_convergence", "execute_tv_history",
    "execute_validate",
]
