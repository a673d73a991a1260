"""Stationary states: flux levels alpha and the branch profiles k_alpha(x).

A stationary state at level alpha solves A(x, k(x)) = alpha pointwise, with
k on the increasing (plus) or decreasing (minus) branch of A(x, .).  Since
A = g(beta) and g is x-independent, the solve happens once in the beta
variable (z with g(z) = alpha on the requested branch) and maps through
beta^{-1} per grid point.  Their grid samplings are exact fixed points of
the scheme and the comparison states for the entropy diagnostics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InvalidInputError, RootFindError
from .flux_model import MAX_BISECTIONS, TOL_ROOT, FluxModel, _bisect_increasing
from .solver import Grid1D, SolverState

Branch = Literal["plus", "minus", "plateau"]


@dataclass(frozen=True)
class StationaryState:
    """Grid sampling of k_alpha on one branch, ghosts included."""

    alpha: float
    branch: str
    values: np.ndarray
    ghost_left: float
    ghost_right: float

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def extended(self) -> np.ndarray:
        return np.concatenate(([self.ghost_left], self.values, [self.ghost_right]))

    def as_solver_state(self) -> SolverState:
        return SolverState(0, self.values, self.ghost_left, self.ghost_right)


def compute_alpha_bar(state0: SolverState, grid: Grid1D, model: FluxModel) -> float:
    """Grid sup of the flux along the initial data, ghost samples included."""
    x_ext = grid.extended_centers
    u_ext = state0.extended()
    a = model.g(np.asarray(model.beta(x_ext, u_ext), dtype=float))
    return float(np.max(a))


def _g_branch_inverse(model: FluxModel, alpha: float, branch: str) -> float:
    """z on the requested branch of g with g(z) = alpha (alpha=0: plateau edge)."""
    if alpha < 0.0:
        raise InvalidInputError("alpha must be nonnegative (g >= 0)")
    if branch not in ("plus", "minus"):
        raise InvalidInputError(f"unknown branch {branch!r}")
    if alpha == 0.0:
        return model.z_plus if branch == "plus" else model.z_minus
    if branch == "plus" and model.g_inverse_plus is not None:
        return float(model.g_inverse_plus(alpha))
    if branch == "minus" and model.g_inverse_minus is not None:
        return float(model.g_inverse_minus(alpha))
    # Bracket by doubling; the growth bound kappa guarantees termination.
    sign = 1.0 if branch == "plus" else -1.0
    edge = model.z_plus if branch == "plus" else model.z_minus
    g_at = lambda t: float(model.g(np.asarray(edge + sign * t, dtype=float)))
    w = 1.0
    for _ in range(MAX_BISECTIONS):
        if g_at(w) >= alpha:
            t = _bisect_increasing(g_at, 0.0, w, alpha)
            return edge + sign * t
        w *= 2.0
    raise RootFindError(f"flux level {alpha} not bracketed on branch {branch}")


def solve_k_alpha(x: float, alpha: float, branch: str, model: FluxModel) -> float:
    """k_alpha at one point: beta^{-1}(x, z) for the branch level z."""
    z = _g_branch_inverse(model, alpha, branch)
    return float(model.eval_beta_inverse(x, z))


def discrete_stationary_state(grid: Grid1D, alpha: float, branch: str,
                              model: FluxModel) -> StationaryState:
    """Sample k_alpha^branch at the cell and ghost centers.

    For alpha = 0 the branches collapse onto the plateau endpoints; the
    extra branch name "plateau" selects the representative u_M = beta^{-1}(x,0)
    (deterministic choice among the infinitely many plateau states).
    """
    x_ext = grid.extended_centers
    if branch == "plateau":
        if alpha != 0.0:
            raise InvalidInputError("plateau branch only exists at alpha = 0")
        z = 0.0
    else:
        z = _g_branch_inverse(model, alpha, branch)
    vals = np.asarray(model.eval_beta_inverse(x_ext, np.full(x_ext.shape, z)),
                      dtype=float)
    residual = np.max(np.abs(
        model.g(np.asarray(model.beta(x_ext, vals), dtype=float)) - alpha))
    if residual > 10.0 * TOL_ROOT * (1.0 + abs(alpha)):
        raise RootFindError(f"stationary residual {residual} above tolerance")
    return StationaryState(alpha=float(alpha), branch=branch, values=vals[1:-1],
                           ghost_left=float(vals[0]), ghost_right=float(vals[-1]))


def sup_state_bound(grid: Grid1D, alpha_bar: float, model: FluxModel) -> float:
    """Sup over the grid of |k_alpha_bar| on both branches; the run's bound."""
    k_plus = discrete_stationary_state(grid, alpha_bar, "plus", model)
    k_minus = discrete_stationary_state(grid, alpha_bar, "minus", model)
    return float(max(np.max(np.abs(k_plus.extended())),
                     np.max(np.abs(k_minus.extended()))))
