"""Per-step verification quantities: TV, entropy residuals, conservation.

Everything the scheme provably satisfies is computed here as a number the
harness can threshold: total variation in u and beta, the discrete
adapted-entropy residual against stationary states, the mass-balance
identity, the time-continuity sum, and L1 error against an exact profile.
TV sums exclude the frozen ghost cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError
from .flux_model import BoundSet, FluxModel
from .solver import Grid1D, SolverState, TimeStepping, interface_fluxes, \
    plateau_representatives
from .stationary import StationaryState

ENTROPY_TOL_SCALE = 1e-12
TVD_SLACK = 1e-10


@dataclass
class DiagnosticsRecord:
    level: int
    time: float
    tv_u: float
    tv_beta: float
    mass: float
    entropy_residual_max: float
    time_continuity_sum: float
    l1_error: Optional[float] = None


@dataclass(frozen=True)
class TimeContinuityResult:
    total: float
    bound: float
    passed: bool


def total_variation(v) -> float:
    v = np.asarray(v, dtype=float)
    if v.size < 2:
        raise InvalidInputError("total variation needs at least 2 values")
    return float(np.sum(np.abs(np.diff(v))))


def tv_beta(state: SolverState, grid: Grid1D, model: FluxModel) -> float:
    b = np.asarray(model.eval_beta(grid.centers, state.u), dtype=float)
    return total_variation(b)


def l1_error(state: SolverState, grid: Grid1D,
             exact: Callable[[float], float]) -> float:
    """e = dx * sum_j |u_j - exact(x_j)|, exact sampled at cell centers."""
    vals = np.array([float(exact(float(x))) for x in grid.centers])
    return grid.dx * float(np.sum(np.abs(state.u - vals)))


def entropy_fluxes(u_ext: np.ndarray, k_ext: np.ndarray, x_ext: np.ndarray,
                   model: FluxModel, um_ext: np.ndarray) -> np.ndarray:
    """Numerical entropy flux per interface: F(max(u,k)) - F(min(u,k))."""
    top = interface_fluxes(np.maximum(u_ext, k_ext), x_ext, model, um_ext)
    bot = interface_fluxes(np.minimum(u_ext, k_ext), x_ext, model, um_ext)
    return top - bot


def entropy_residual_profile(prev: SolverState, nxt: SolverState,
                             k: StationaryState, grid: Grid1D, ts: TimeStepping,
                             model: FluxModel,
                             um_ext: Optional[np.ndarray] = None) -> np.ndarray:
    """Cell-wise residual of the discrete entropy inequality against k.

    residual_j = |u_j^{n+1} - k_j| - |u_j^n - k_j| + lambda * (EF_{j+1/2} - EF_{j-1/2});
    the scheme guarantees residual_j <= 0 up to rounding.
    """
    if prev.u.size != nxt.u.size or prev.u.size != k.values.size:
        raise InvalidInputError("state and stationary-state lengths differ")
    x_ext = grid.extended_centers
    if um_ext is None:
        um_ext = plateau_representatives(model, x_ext)
    u_ext = prev.extended()
    k_ext = k.extended()
    ef = entropy_fluxes(u_ext, k_ext, x_ext, model, um_ext)
    return (np.abs(nxt.u - k.values) - np.abs(prev.u - k.values)
            + ts.lam * np.diff(ef))


def discrete_entropy_residual(prev: SolverState, nxt: SolverState,
                              k: StationaryState, grid: Grid1D, ts: TimeStepping,
                              model: FluxModel,
                              um_ext: Optional[np.ndarray] = None) -> float:
    """Max over interior cells of the entropy residual (<= ~1e-12 when valid)."""
    return float(np.max(entropy_residual_profile(prev, nxt, k, grid, ts, model,
                                                 um_ext)))


def entropy_tolerance(m_bound: float) -> float:
    """Rounding allowance for the entropy residual: 1e-12 scaled by (1+M)."""
    return ENTROPY_TOL_SCALE * (1.0 + abs(m_bound))


def mass_balance_residual(prev: SolverState, nxt: SolverState, lam: float,
                          flux_left: float, flux_right: float) -> float:
    """Defect of sum(u^{n+1}) - sum(u^n) = -lambda (F_right - F_left).

    The cell sums telescope exactly in real arithmetic; the difference is
    accumulated with exact summation so only per-cell update rounding remains.
    """
    diff = math.fsum(np.concatenate((nxt.u, -prev.u)))
    return diff + lam * (flux_right - flux_left)


def time_continuity_bound(lam: float, bounds: BoundSet, tv_alpha: float,
                          tv_u0: float, tv_um: float) -> float:
    """2*lambda*(eta_bar TV(a) + L TV(u0) + L TV(u_M))."""
    return 2.0 * lam * (bounds.eta_bar * tv_alpha
                        + bounds.L * tv_u0 + bounds.L * tv_um)


def time_continuity_check(prev: SolverState, nxt: SolverState,
                          bound: float) -> TimeContinuityResult:
    total = float(np.sum(np.abs(nxt.u - prev.u)))
    return TimeContinuityResult(total=total, bound=bound,
                                passed=total <= bound + TVD_SLACK)


class StepRecorder:
    """Accumulates one DiagnosticsRecord per step plus worst-case aggregates.

    Designed to be handed to solver.run; all checks are recorded, never
    enforced, so a failing run still produces a full diagnostic trail.
    """

    def __init__(self, grid: Grid1D, ts: TimeStepping, model: FluxModel,
                 stationary_states: Sequence[StationaryState] = (),
                 tc_bound: Optional[float] = None,
                 exact: Optional[Callable[[float], float]] = None,
                 exact_level: Optional[int] = None):
        self.grid = grid
        self.ts = ts
        self.model = model
        self.stationary_states = list(stationary_states)
        self.tc_bound = tc_bound
        self.exact = exact
        self.exact_level = exact_level
        self.um_ext = plateau_representatives(model, grid.extended_centers)
        self.records: list = []
        self.initial_tv_beta: Optional[float] = None
        self.max_entropy_residual = -math.inf
        self.max_tv_beta_increase = -math.inf
        self.max_mass_residual = 0.0
        self.max_abs_u = 0.0
        self.max_beta_time_sum = 0.0
        self.tc_failures = 0
        self._prev_tv_beta: Optional[float] = None

    def on_step(self, prev: SolverState, nxt: SolverState, t: float,
                fluxes: np.ndarray) -> None:
        if self._prev_tv_beta is None:
            self._prev_tv_beta = tv_beta(prev, self.grid, self.model)
            self.initial_tv_beta = self._prev_tv_beta
            self.max_abs_u = float(np.max(np.abs(prev.extended())))
        tvb = tv_beta(nxt, self.grid, self.model)
        self.max_tv_beta_increase = max(self.max_tv_beta_increase,
                                        tvb - self._prev_tv_beta)
        b_prev = np.asarray(self.model.eval_beta(self.grid.centers, prev.u))
        b_next = np.asarray(self.model.eval_beta(self.grid.centers, nxt.u))
        self.max_beta_time_sum = max(self.max_beta_time_sum,
                                     float(np.sum(np.abs(b_next - b_prev))))
        self._prev_tv_beta = tvb

        residual = -math.inf
        for k in self.stationary_states:
            residual = max(residual, discrete_entropy_residual(
                prev, nxt, k, self.grid, self.ts, self.model, self.um_ext))
        if self.stationary_states:
            self.max_entropy_residual = max(self.max_entropy_residual, residual)

        mass_defect = mass_balance_residual(prev, nxt, self.ts.lam,
                                            float(fluxes[0]), float(fluxes[-1]))
        self.max_mass_residual = max(self.max_mass_residual, abs(mass_defect))
        self.max_abs_u = max(self.max_abs_u, float(np.max(np.abs(nxt.u))))

        tc_sum = float(np.sum(np.abs(nxt.u - prev.u)))
        if self.tc_bound is not None and tc_sum > self.tc_bound + TVD_SLACK:
            self.tc_failures += 1

        err = None
        if self.exact is not None and nxt.level == self.exact_level:
            err = l1_error(nxt, self.grid, self.exact)

        self.records.append(DiagnosticsRecord(
            level=nxt.level,
            time=t,
            tv_u=total_variation(nxt.u),
            tv_beta=tvb,
            mass=self.grid.dx * math.fsum(nxt.u),
            entropy_residual_max=residual if self.stationary_states else math.nan,
            time_continuity_sum=tc_sum,
            l1_error=err,
        ))
