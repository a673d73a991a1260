"""Flux models A(x,u) = g(beta(x,u)) with a degenerate plateau.

The outer function g is unimodal with a flat minimum: it vanishes on
[z_minus, z_plus], is strictly decreasing to the left and strictly
increasing to the right, and grows at least like a fixed function kappa.
The inner transform beta(x, .) is strictly increasing in u with slope
bounded between K2 and K3(r), and its x-dependence is controlled by a
piecewise-constant coefficient.  All bound constants the scheme needs
(K0..K4 and their derived sups) live here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .coefficients import SpatialCoefficient
from .errors import InvalidInputError, RootFindError

TOL_ROOT = 1e-12
MAX_BISECTIONS = 200


def _check_finite(*args) -> None:
    for a in args:
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("non-finite input")


def _bisect_increasing(f: Callable[[float], float], lo: float, hi: float,
                       target: float) -> float:
    """Root of f(u) = target for increasing f with f(lo) <= target <= f(hi).

    Bisects until the bracket cannot be split further, so the returned root
    is accurate to rounding; stationary states built from it are then fixed
    points of the scheme to machine precision.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo > target or fhi < target:
        raise RootFindError("target not bracketed")
    if flo == target:
        return lo
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == target:
            return mid
        if fm < target:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    return lo if abs(f(lo) - target) <= abs(f(hi) - target) else hi


# ---------------------------------------------------------------------------
# beta forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftBeta:
    """beta(x,u) = u - shift(x); the canonical form for step coefficients."""

    shift: SpatialCoefficient

    def __call__(self, x, u):
        return np.asarray(u, dtype=float) - self.shift(x)

    def inverse(self, x, z):
        return np.asarray(z, dtype=float) + self.shift(x)

    @property
    def slope_lower(self) -> float:
        return 1.0

    def slope_upper(self, r: float) -> float:
        return 1.0

    def x_lipschitz(self, u: float) -> float:
        return 1.0

    @property
    def spatial(self) -> SpatialCoefficient:
        return self.shift


@dataclass(frozen=True)
class ScaleBeta:
    """beta(x,u) = s(x)*u with s(x) >= s_min > 0."""

    scale: SpatialCoefficient

    def __post_init__(self) -> None:
        if np.min(self.scale.values) <= 0.0:
            raise InvalidInputError("scale coefficient must be strictly positive")

    def __call__(self, x, u):
        return self.scale(x) * np.asarray(u, dtype=float)

    def inverse(self, x, z):
        return np.asarray(z, dtype=float) / self.scale(x)

    @property
    def slope_lower(self) -> float:
        return float(np.min(self.scale.values))

    def slope_upper(self, r: float) -> float:
        return float(np.max(self.scale.values))

    def x_lipschitz(self, u: float) -> float:
        return abs(float(u))

    @property
    def spatial(self) -> SpatialCoefficient:
        return self.scale


@dataclass(frozen=True)
class CallableBeta:
    """Generic monotone beta given as a callable; inverses fall back to bisection.

    The slope and x-variation constants are supplied by the caller, either
    as known closed forms or estimated from samples (see from_samples).
    """

    func: Callable
    k2: float
    k3: Callable[[float], float]
    k4: Callable[[float], float]
    spatial: SpatialCoefficient = field(
        default_factory=lambda: SpatialCoefficient.constant(0.0))

    def __call__(self, x, u):
        return self.func(x, np.asarray(u, dtype=float))

    def inverse(self, x, z):
        zs = np.atleast_1d(np.asarray(z, dtype=float))
        xs = np.broadcast_to(np.asarray(x, dtype=float), zs.shape)
        out = np.array([self._inverse_scalar(float(xi), float(zi))
                        for xi, zi in zip(xs.ravel(), zs.ravel())])
        out = out.reshape(zs.shape)
        if np.ndim(z) == 0 and np.ndim(x) == 0:
            return float(out[0])
        return out

    def _inverse_scalar(self, x: float, z: float) -> float:
        # Slope >= k2 puts the root within |z - beta(x,0)|/k2 of u=0;
        # grow the bracket geometrically in case k2 is conservative.
        f = lambda u: float(self.func(x, u))
        w = max(1.0, abs(z - f(0.0)) / self.k2)
        for _ in range(MAX_BISECTIONS):
            if f(-w) <= z <= f(w):
                return _bisect_increasing(f, -w, w, z)
            w *= 2.0
        raise RootFindError("could not bracket beta inverse")

    @property
    def slope_lower(self) -> float:
        return self.k2

    def slope_upper(self, r: float) -> float:
        return float(self.k3(r))

    def x_lipschitz(self, u: float) -> float:
        return float(self.k4(u))

    @classmethod
    def from_samples(cls, func: Callable, u_samples: Sequence[float],
                     xs: Sequence[float] = (0.0,),
                     spatial: Optional[SpatialCoefficient] = None,
                     safety: float = 1.05) -> "CallableBeta":
        """Estimate K2/K3/K4 from divided differences, inflated by `safety`.

        Suitable for tabulated monotone transforms without closed-form
        constants; the sampling grid sets the resolution of the estimates.
        """
        us = np.sort(np.asarray(u_samples, dtype=float))
        if us.size < 3:
            raise InvalidInputError("need at least 3 u samples")
        xs = np.asarray(xs, dtype=float)
        slopes = []
        for x in xs:
            b = func(float(x), us)
            slopes.append(np.diff(b) / np.diff(us))
        slopes = np.concatenate(slopes)
        if np.min(slopes) <= 0.0:
            raise InvalidInputError("sampled beta is not strictly increasing")
        k2 = float(np.min(slopes)) / safety
        k3_val = float(np.max(slopes)) * safety
        r_max = float(np.max(np.abs(us)))
        k4_vals = np.zeros(us.size)
        if spatial is not None and xs.size > 1:
            alpha = np.array([spatial(float(x)) for x in xs])
            for i, u in enumerate(us):
                bs = np.array([float(func(float(x), u)) for x in xs])
                num = np.abs(bs[:, None] - bs[None, :])
                den = np.abs(alpha[:, None] - alpha[None, :])
                mask = den > 0.0
                k4_vals[i] = float(np.max(num[mask] / den[mask])) if mask.any() else 0.0
        k4_max = float(np.max(k4_vals)) * safety if k4_vals.size else 0.0

        def k3(r: float, _v=k3_val, _r=r_max) -> float:
            return _v

        def k4(u: float, _v=k4_max) -> float:
            return _v

        return cls(func=func, k2=k2, k3=k3, k4=k4,
                   spatial=spatial or SpatialCoefficient.constant(0.0))


BetaForm = Union[ShiftBeta, ScaleBeta, CallableBeta]


# ---------------------------------------------------------------------------
# plateau and bound containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlateauInfo:
    """Endpoints and representative point of the zero-flux interval at one x."""

    u_m_minus: float
    u_m_plus: float
    u_m: float


@dataclass(frozen=True)
class BoundSet:
    """Lipschitz data for a given solution bound m: |u| <= m."""

    L: float
    L_g: float
    L_beta: float
    eta_bar: float
    p_bound: float


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{self.name:<6} {status:<4} worst={self.worst:.3e}  {self.detail}"


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list:
        return [c.line() for c in self.checks]

    def __str__(self) -> str:
        return "\n".join(self.lines())


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FluxModel:
    """A(x,u) = g(beta(x,u)) together with its plateau and bound constants.

    g must be vectorized over numpy arrays.  g_inverse_minus/plus, when
    given, invert g restricted to its decreasing/increasing branch and let
    stationary solves skip bisection.
    """

    g: Callable
    beta: BetaForm
    z_minus: float
    z_plus: float
    lipschitz_g: Callable[[float], float]
    growth: Callable[[float], float]
    g_inverse_minus: Optional[Callable[[float], float]] = None
    g_inverse_plus: Optional[Callable[[float], float]] = None
    name: str = ""

    def __post_init__(self) -> None:
        if not (self.z_minus <= 0.0 <= self.z_plus):
            raise InvalidInputError("plateau must contain 0: z_minus <= 0 <= z_plus")

    # -- K constants delegated to the beta form ----------------------------
    @property
    def lower_slope(self) -> float:
        return self.beta.slope_lower

    def lipschitz_beta_u(self, r: float) -> float:
        return self.beta.slope_upper(r)

    def lipschitz_beta_x(self, u: float) -> float:
        return self.beta.x_lipschitz(u)

    @property
    def spatial(self) -> SpatialCoefficient:
        return self.beta.spatial

    # -- evaluation ---------------------------------------------------------
    def eval_beta(self, x, u):
        _check_finite(x, u)
        return self.beta(x, u)

    def eval_flux(self, x, u):
        _check_finite(x, u)
        out = self.g(np.asarray(self.beta(x, u), dtype=float))
        if np.ndim(x) == 0 and np.ndim(u) == 0:
            return float(out)
        return out

    def eval_beta_inverse(self, x, z):
        _check_finite(x, z)
        return self.beta.inverse(x, z)

    def plateau_bounds(self, x: float) -> PlateauInfo:
        return PlateauInfo(
            u_m_minus=float(self.eval_beta_inverse(x, self.z_minus)),
            u_m_plus=float(self.eval_beta_inverse(x, self.z_plus)),
            u_m=float(self.eval_beta_inverse(x, 0.0)),
        )

    def plateau_reps(self, xs) -> np.ndarray:
        """u_M = beta^{-1}(x, 0) at each x; the plateau representative."""
        return np.asarray(self.eval_beta_inverse(np.asarray(xs, dtype=float),
                                                 np.zeros(np.shape(xs))))

    # -- derived bounds -------------------------------------------------------
    def sup_plateau_bound(self) -> float:
        """K0: sup over coefficient intervals of |u_M(x)|."""
        xs = self.spatial.representative_points()
        return float(np.max(np.abs(self.plateau_reps(xs))))

    def eta(self, u: float) -> float:
        """Spatial-variation modulus of A at level u: K1(K3~(|u|)) * K4(u)."""
        k0 = self.sup_plateau_bound()
        k3t = self.lipschitz_beta_u(abs(u)) * (abs(u) + k0)
        return self.lipschitz_g(k3t) * self.lipschitz_beta_x(u)

    def lipschitz_bounds(self, m_bound: float, n_eta_samples: int = 513) -> BoundSet:
        if m_bound < 0.0:
            raise InvalidInputError("m_bound must be nonnegative")
        l_beta = self.lipschitz_beta_u(m_bound)
        xs = self.spatial.representative_points()
        lo = np.abs(self.beta(xs, np.full(xs.shape, -m_bound)))
        hi = np.abs(self.beta(xs, np.full(xs.shape, m_bound)))
        p_bound = float(max(np.max(lo), np.max(hi))) if xs.size else 0.0
        l_g = self.lipschitz_g(p_bound)
        k0 = self.sup_plateau_bound()
        us = np.linspace(0.0, m_bound, n_eta_samples)
        k3t = np.array([self.lipschitz_beta_u(u) for u in us]) * (us + k0)
        eta = np.array([self.lipschitz_g(t) for t in k3t]) \
            * np.array([self.lipschitz_beta_x(u) for u in us])
        return BoundSet(L=l_g * l_beta, L_g=l_g, L_beta=l_beta,
                        eta_bar=float(np.max(eta)) if eta.size else 0.0,
                        p_bound=p_bound)

    # -- assumption validation ------------------------------------------------
    def validate_assumptions(self, sample_xs: Sequence[float],
                             u_range: float) -> ValidationReport:
        """Numerically spot-check the structural assumptions on this model.

        Failures are returned as report entries, never raised; sampling is
        deterministic (uniform grids over the requested ranges).
        """
        if len(sample_xs) == 0:
            raise InvalidInputError("sample_xs must be nonempty")
        xs = np.asarray(sample_xs, dtype=float)
        m = float(u_range)
        us = np.linspace(-m, m, 201)
        slack = 1e-9 * (1.0 + m)
        checks = []

        # C-1: composition structure is intrinsic; record the identity.
        a_direct = np.array([self.eval_flux(float(x), us) for x in xs])
        a_comp = np.array([self.g(np.asarray(self.beta(float(x), us))) for x in xs])
        worst = float(np.max(np.abs(a_direct - a_comp)))
        checks.append(CheckResult("C-1", worst <= slack, worst,
                                  "A agrees with g(beta) on samples"))

        # C-2: plateau value, strict unimodality, growth kappa.
        zp = np.linspace(self.z_minus, self.z_plus, 101)
        worst = float(np.max(np.abs(self.g(zp))))
        checks.append(CheckResult("C-2a", worst <= slack, worst,
                                  "g vanishes on the plateau"))
        span = max(1.0, 2.0 * m)
        zl = np.linspace(self.z_minus - span, self.z_minus, 101)
        zr = np.linspace(self.z_plus, self.z_plus + span, 101)
        gl = self.g(zl)
        gr = self.g(zr)
        worst = float(max(np.max(np.diff(gl)), -np.min(np.diff(gr))))
        checks.append(CheckResult("C-2b", worst < 0.0, worst,
                                  "g strictly monotone off the plateau"))
        ts = np.linspace(0.0, span, 101)[1:]
        kappa = np.array([self.growth(t) for t in ts])
        worst = float(max(np.max(kappa - self.g(self.z_plus + ts)),
                          np.max(kappa - self.g(self.z_minus - ts))))
        checks.append(CheckResult("C-2c", worst <= slack, worst,
                                  "g dominates its growth function kappa"))

        # C-3: Lipschitz bound K1 on g over the sampled beta range.
        b_all = np.concatenate([np.asarray(self.beta(float(x), us)) for x in xs])
        r_b = float(np.max(np.abs(b_all)))
        k1 = self.lipschitz_g(r_b)
        zs = np.linspace(-r_b, r_b, 201)
        gz = self.g(zs)
        worst = float(np.max(np.abs(np.diff(gz)) - k1 * np.abs(np.diff(zs))))
        checks.append(CheckResult("C-3", worst <= slack, worst,
                                  f"|g'| <= K1({r_b:.3g}) = {k1:.3g}"))

        # C-4: beta strictly increasing in u.
        worst = -math.inf
        for x in xs:
            b = np.asarray(self.beta(float(x), us))
            worst = max(worst, float(np.max(-np.diff(b))))
        checks.append(CheckResult("C-4", worst < 0.0, worst,
                                  "beta strictly increasing in u"))

        # C-5: slope upper bound K3 and x-variation bound K4 against alpha.
        k3 = self.lipschitz_beta_u(m)
        worst = -math.inf
        for x in xs:
            b = np.asarray(self.beta(float(x), us))
            worst = max(worst, float(np.max(np.diff(b) - k3 * np.diff(us))))
        checks.append(CheckResult("C-5a", worst <= slack, worst,
                                  f"beta slope <= K3({m:.3g}) = {k3:.3g}"))
        alpha = np.array([self.spatial(float(x)) for x in xs])
        worst = -math.inf
        for u in us[::10]:
            b = np.array([float(np.asarray(self.beta(float(x), u))) for x in xs])
            diff_b = np.abs(b[:, None] - b[None, :])
            diff_a = np.abs(alpha[:, None] - alpha[None, :])
            worst = max(worst, float(np.max(diff_b - self.lipschitz_beta_x(u) * diff_a)))
        checks.append(CheckResult("C-5b", worst <= slack, worst,
                                  "x-variation of beta bounded by K4*|alpha jump|"))

        # C-6: slope lower bound K2.
        k2 = self.lower_slope
        worst = -math.inf
        for x in xs:
            b = np.asarray(self.beta(float(x), us))
            worst = max(worst, float(np.max(k2 * np.diff(us) - np.diff(b))))
        checks.append(CheckResult("C-6", worst <= slack, worst,
                                  f"beta slope >= K2 = {k2:.3g}"))

        # A-1: piecewise-constant spatial data with sorted breakpoints.
        bp = self.spatial.breakpoints
        ok = bool(bp.size < 2 or np.all(np.diff(bp) > 0.0))
        checks.append(CheckResult("A-1", ok, 0.0 if ok else 1.0,
                                  f"{bp.size} sorted breakpoints"))

        # A-2: local u-Lipschitz bound q(M) = K1(K3~(M)) K3(M).
        k0 = self.sup_plateau_bound()
        q_m = self.lipschitz_g(self.lipschitz_beta_u(m) * (m + k0)) \
            * self.lipschitz_beta_u(m)
        worst = -math.inf
        for x in xs:
            a = np.array([self.eval_flux(float(x), float(u)) for u in us])
            worst = max(worst, float(np.max(np.abs(np.diff(a)) - q_m * np.diff(us))))
        checks.append(CheckResult("A-2", worst <= slack, worst,
                                  f"|A(x,.)' | <= q(M) = {q_m:.3g}"))

        # A-3: flux vanishes exactly on [u_M^-, u_M^+] and is unimodal around it.
        worst = -math.inf
        for x in xs:
            info = self.plateau_bounds(float(x))
            up = np.linspace(info.u_m_minus, info.u_m_plus, 33)
            a = np.array([self.eval_flux(float(x), float(u)) for u in up])
            worst = max(worst, float(np.max(np.abs(a))))
        checks.append(CheckResult("A-3", worst <= slack, worst,
                                  "A vanishes between the plateau endpoints"))

        # A-4: growth bound gamma(t) = kappa(K2 t) away from the plateau.
        worst = -math.inf
        for x in xs:
            info = self.plateau_bounds(float(x))
            for t in ts:
                gam = self.growth(k2 * t)
                worst = max(worst,
                            gam - self.eval_flux(float(x), info.u_m_plus + t),
                            gam - self.eval_flux(float(x), info.u_m_minus - t))
        checks.append(CheckResult("A-4", worst <= slack, float(worst),
                                  "A dominates gamma(dist to plateau)"))

        # B-1: finite total variation of the coefficient.
        tv = self.spatial.total_variation()
        checks.append(CheckResult("B-1", math.isfinite(tv), 0.0,
                                  f"TV(coefficient) = {tv:.6g}"))

        # B-2: spatial variation of A bounded by eta(u)*|a(x)-a(y)|.
        worst = -math.inf
        for u in us[::10]:
            a = np.array([self.eval_flux(float(x), float(u)) for x in xs])
            diff_a = np.abs(a[:, None] - a[None, :])
            diff_c = np.abs(alpha[:, None] - alpha[None, :])
            worst = max(worst, float(np.max(diff_a - self.eta(float(u)) * diff_c)))
        checks.append(CheckResult("B-2", worst <= slack, worst,
                                  "x-variation of A bounded by eta*|alpha jump|"))

        return ValidationReport(checks)
