"""Grid, CFL time stepping, generalized Godunov flux, and the marching loop.

The update is always the conservative form

    u_j^{n+1} = u_j^n - lambda (F_{j+1/2} - F_{j-1/2}),

with the two-sided interface flux

    F = max{ A(x_l, max(u, u_M(x_l))), A(x_r, min(v, u_M(x_r))) },

which reduces to the classical Godunov flux when x_l = x_r.  The domain is
finite with one frozen ghost cell per side; users keep data variation away
from the boundary so the ghosts stay consistent with stationary tails.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError, InvariantViolationError
from .flux_model import BoundSet, FluxModel

CFL_LIMIT = 0.5
M_BOUND_SLACK = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Equispaced cell centers on [x_left, x_right); cells are half-open."""

    x_left: float
    x_right: float
    m_cells: int

    def __post_init__(self) -> None:
        if self.m_cells < 2:
            raise InvalidInputError("need at least 2 cells")
        if not self.x_right > self.x_left:
            raise InvalidInputError("empty spatial window")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.m_cells

    @cached_property
    def centers(self) -> np.ndarray:
        x = self.x_left + (np.arange(self.m_cells) + 0.5) * self.dx
        x.setflags(write=False)
        return x

    @cached_property
    def extended_centers(self) -> np.ndarray:
        """Centers with one ghost cell appended on each side."""
        c = self.centers
        x = np.concatenate(([c[0] - self.dx], c, [c[-1] + self.dx]))
        x.setflags(write=False)
        return x


@dataclass(frozen=True)
class TimeStepping:
    """Fixed-ratio marching: dt = lam*dx, N steps landing exactly on t_final."""

    lam: float
    dt: float
    t_final: float
    n_steps: int

    def satisfies_cfl(self, bounds: BoundSet) -> bool:
        return self.lam * bounds.L_g * bounds.L_beta <= CFL_LIMIT + 1e-14

    @classmethod
    def from_bounds(cls, grid: Grid1D, bounds: BoundSet, t_final: float,
                    cfl_safety: float = 0.9, lam: Optional[float] = None,
                    n_multiple: int = 1) -> "TimeStepping":
        """Pick lam from the CFL bound, then rescale dt to land on t_final.

        N = round(t_final/dt) is adjusted upward (in units of n_multiple,
        so snapshot times stay on step boundaries) until the rescaled dt
        again satisfies lam*L_g*L_beta <= 1/2.
        """
        if t_final <= 0.0:
            raise InvalidInputError("t_final must be positive")
        if not 0.0 < cfl_safety <= 1.0:
            raise InvalidInputError("cfl_safety must be in (0, 1]")
        product = bounds.L_g * bounds.L_beta
        if lam is None:
            # Degenerate fluxes (L = 0) put no restriction on lam; use 1.
            lam = CFL_LIMIT / product * cfl_safety if product > 0.0 else 1.0
        dt0 = lam * grid.dx
        n = max(1, round(t_final / dt0))
        n = ((n + n_multiple - 1) // n_multiple) * n_multiple
        while True:
            dt = t_final / n
            lam_eff = dt / grid.dx
            if lam_eff * product <= CFL_LIMIT + 1e-14:
                return cls(lam=lam_eff, dt=dt, t_final=t_final, n_steps=n)
            n += n_multiple


@dataclass(frozen=True)
class SolverState:
    """Cell values at one time level, plus the frozen ghost values."""

    level: int
    u: np.ndarray
    ghost_left: float
    ghost_right: float

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        if not (np.all(np.isfinite(u)) and np.isfinite(self.ghost_left)
                and np.isfinite(self.ghost_right)):
            raise InvalidInputError("state values must be finite")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def extended(self) -> np.ndarray:
        return np.concatenate(([self.ghost_left], self.u, [self.ghost_right]))

    def advanced(self, u_new: np.ndarray) -> "SolverState":
        return SolverState(self.level + 1, u_new, self.ghost_left, self.ghost_right)


def sample_initial_data(u0: Callable[[float], float], grid: Grid1D) -> SolverState:
    """Point-sample u0 at the cell centers; ghosts take the tail samples."""
    x_ext = grid.extended_centers
    vals = np.array([float(u0(float(x))) for x in x_ext])
    if not np.all(np.isfinite(vals)):
        raise InvalidInputError("initial data produced non-finite samples")
    return SolverState(level=0, u=vals[1:-1],
                       ghost_left=float(vals[0]), ghost_right=float(vals[-1]))


# ---------------------------------------------------------------------------
# numerical fluxes
# ---------------------------------------------------------------------------

def godunov_flux_g(p, q, model: FluxModel):
    """Godunov flux of g in the beta variables: max{g(max(p,0)), g(min(q,0))}."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.maximum(model.g(np.maximum(p, 0.0)), model.g(np.minimum(q, 0.0)))
    if out.ndim == 0:
        return float(out)
    return out


def godunov_interface_flux(u: float, v: float, x_l: float, x_r: float,
                           model: FluxModel) -> float:
    """Two-sided Godunov flux across the interface between cells at x_l, x_r."""
    um_l = float(model.eval_beta_inverse(x_l, 0.0))
    um_r = float(model.eval_beta_inverse(x_r, 0.0))
    a_l = model.eval_flux(x_l, max(float(u), um_l))
    a_r = model.eval_flux(x_r, min(float(v), um_r))
    return float(max(a_l, a_r))


def classical_godunov_oracle(u: float, v: float, x: float, model: FluxModel,
                             n_samples: int) -> float:
    """Brute-force min/max of A(x, .) over [u, v]; test oracle only."""
    if n_samples < 2:
        raise InvalidInputError("n_samples must be at least 2")
    if u == v:
        return float(model.eval_flux(x, u))
    ws = np.linspace(min(u, v), max(u, v), n_samples + 1)
    a = model.eval_flux(np.full(ws.shape, float(x)), ws)
    return float(np.min(a) if u <= v else np.max(a))


def interface_fluxes(u_ext: np.ndarray, x_ext: np.ndarray, model: FluxModel,
                     um_ext: np.ndarray) -> np.ndarray:
    """Vectorized interface fluxes for all m+1 interfaces of an extended array."""
    w_l = np.maximum(u_ext[:-1], um_ext[:-1])
    w_r = np.minimum(u_ext[1:], um_ext[1:])
    a_l = model.g(np.asarray(model.beta(x_ext[:-1], w_l), dtype=float))
    a_r = model.g(np.asarray(model.beta(x_ext[1:], w_r), dtype=float))
    return np.maximum(a_l, a_r)


def plateau_representatives(model: FluxModel, x_ext: np.ndarray) -> np.ndarray:
    """u_M = beta^{-1}(x, 0) at the extended centers, computed once per run."""
    return np.asarray(model.eval_beta_inverse(x_ext, np.zeros(x_ext.shape)),
                      dtype=float)


# ---------------------------------------------------------------------------
# marching
# ---------------------------------------------------------------------------

def _advance(u_ext: np.ndarray, x_ext: np.ndarray, lam: float, model: FluxModel,
             um_ext: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    fluxes = interface_fluxes(u_ext, x_ext, model, um_ext)
    return u_ext[1:-1] - lam * np.diff(fluxes), fluxes


def _check_bound(u_new: np.ndarray, m_bound: Optional[float]) -> None:
    if m_bound is not None:
        worst = float(np.max(np.abs(u_new)))
        if worst > m_bound + M_BOUND_SLACK:
            raise InvariantViolationError(
                f"|u| = {worst} exceeds bound {m_bound}; check CFL and model")


def step(state: SolverState, grid: Grid1D, ts: TimeStepping, model: FluxModel,
         m_bound: Optional[float] = None,
         um_ext: Optional[np.ndarray] = None) -> SolverState:
    """One conservative update; ghosts stay frozen, level increments."""
    x_ext = grid.extended_centers
    if um_ext is None:
        um_ext = plateau_representatives(model, x_ext)
    u_new, _ = _advance(state.extended(), x_ext, ts.lam, model, um_ext)
    _check_bound(u_new, m_bound)
    return state.advanced(u_new)


def run(state0: SolverState, grid: Grid1D, ts: TimeStepping, model: FluxModel,
        m_bound: Optional[float] = None,
        recorder=None,
        snapshot_levels: Iterable[int] = (),
        on_snapshot: Optional[Callable[[int, float, np.ndarray], None]] = None):
    """March n_steps updates; returns (final state, recorder's records).

    recorder, if given, must provide on_step(prev, new, t, fluxes) and a
    records attribute; snapshot hooks receive (level, time, read-only u).
    """
    x_ext = grid.extended_centers
    um_ext = plateau_representatives(model, x_ext)
    wanted = set(int(n) for n in snapshot_levels)
    state = state0
    if on_snapshot is not None and state.level in wanted:
        on_snapshot(state.level, state.level * ts.dt, state.u)
    for n in range(state.level + 1, state.level + 1 + ts.n_steps):
        u_new, fluxes = _advance(state.extended(), x_ext, ts.lam, model, um_ext)
        _check_bound(u_new, m_bound)
        new = state.advanced(u_new)
        if recorder is not None:
            recorder.on_step(state, new, n * ts.dt, fluxes)
        if on_snapshot is not None and n in wanted:
            on_snapshot(n, n * ts.dt, new.u)
        state = new
    return state, (recorder.records if recorder is not None else [])


# ---------------------------------------------------------------------------
# incremental-form diagnostics
# ---------------------------------------------------------------------------

def incremental_coefficients(state: SolverState, grid: Grid1D, ts: TimeStepping,
                             model: FluxModel, j: int) -> Tuple[float, float, float]:
    """Beta-space incremental coefficients (C_{j+1/2}, D_{j-1/2}, theta) at cell j.

    Divided differences use the 0-convention on vanishing denominators.
    Diagnostics only; the marching loop never uses the incremental form.
    """
    if not 0 <= j < grid.m_cells:
        raise InvalidInputError("cell index out of range")
    u_ext = state.extended()
    x_ext = grid.extended_centers
    i = j + 1
    b = np.asarray(model.eval_beta(x_ext[i - 1:i + 2], u_ext[i - 1:i + 2]),
                   dtype=float)
    gb_left = godunov_flux_g(b[0], b[1], model)
    gb_mid = godunov_flux_g(b[1], b[1], model)
    gb_right = godunov_flux_g(b[1], b[2], model)
    u_new = u_ext[i] - ts.lam * (gb_right - gb_left)
    b_new = float(np.asarray(model.eval_beta(x_ext[i], u_new), dtype=float))
    du = u_new - u_ext[i]
    theta = 0.0 if du == 0.0 else (b_new - b[1]) / du
    d_plus = b[2] - b[1]
    c = 0.0 if d_plus == 0.0 else -ts.lam * theta * (gb_right - gb_mid) / d_plus
    d_minus = b[1] - b[0]
    d = 0.0 if d_minus == 0.0 else ts.lam * theta * (gb_mid - gb_left) / d_minus
    return float(c), float(d), float(theta)


def u_incremental_coefficients(state: SolverState, grid: Grid1D, ts: TimeStepping,
                               model: FluxModel, j: int):
    """u-space incremental coefficients (C, D), or None where not applicable.

    The u-space form requires A(., u) constant on [x_{j-1}, x_{j+1}]; cells
    whose neighborhood contains a coefficient breakpoint return None.
    """
    if not 0 <= j < grid.m_cells:
        raise InvalidInputError("cell index out of range")
    x_ext = grid.extended_centers
    i = j + 1
    bp = model.spatial.breakpoints
    lo, hi = x_ext[i - 1], x_ext[i + 1]
    if bp.size and np.any((bp >= lo) & (bp <= hi)):
        return None
    u_ext = state.extended()
    x = float(x_ext[i])
    f_left = godunov_interface_flux(u_ext[i - 1], u_ext[i], x, x, model)
    f_mid = godunov_interface_flux(u_ext[i], u_ext[i], x, x, model)
    f_right = godunov_interface_flux(u_ext[i], u_ext[i + 1], x, x, model)
    d_plus = u_ext[i + 1] - u_ext[i]
    c = 0.0 if d_plus == 0.0 else -ts.lam * (f_right - f_mid) / d_plus
    d_minus = u_ext[i] - u_ext[i - 1]
    d = 0.0 if d_minus == 0.0 else ts.lam * (f_mid - f_left) / d_minus
    return float(c), float(d)
