"""Built-in benchmark problems and validator flux configurations.

Two benchmarks with known exact profiles drive the quantitative checks:

* "paper-ex1": quadratic g with a shift coefficient whose jumps accumulate
  geometrically; the solution at t=1 is a ladder of rarefactions separated
  by stationary shocks.
* "paper-ex2": piecewise-linear degenerate g; constant initial data decays
  onto the plateau profile u = r(x) by t=6.

Three further fluxes exercise the assumption validator: a transform whose
lower slope degenerates at u=0 (total variation can blow up there), a
uniformly convex flux, and a trigonometric composite with a degenerate g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .coefficients import SpatialCoefficient
from .errors import InvalidInputError, UnsupportedReferenceError
from .flux_model import CallableBeta, FluxModel, ShiftBeta


@dataclass(frozen=True)
class GeometricPartition:
    """Strictly increasing breakpoints a_n with a finite accumulation point."""

    p: float
    q: float
    a: np.ndarray
    accumulation: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        if a.size and not np.all(np.diff(a) > 0.0):
            raise InvalidInputError("partition points must be strictly increasing")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def from_widths(cls, start: float, widths, p: float, q: float,
                    accumulation: float, min_width: float = 0.0) -> "GeometricPartition":
        """Accumulate interval widths until they fall below min_width.

        With min_width = 0 the partition is built out to double-precision
        exhaustion (the next point no longer moves), so a sampled grid sees
        exactly the same coefficient values as the untruncated object.
        """
        points = [float(start)]
        for w in widths:
            if w < min_width:
                break
            nxt = points[-1] + w
            if nxt <= points[-1]:
                break
            points.append(nxt)
        return cls(p=p, q=q, a=np.array(points), accumulation=accumulation)


@dataclass(frozen=True)
class ExampleProblem:
    """A runnable benchmark: model, data, exact profile at one reference time."""

    name: str
    model: FluxModel
    u0: Callable[[float], float]
    exact: Callable[[float], float]
    reference_time: float
    partition: GeometricPartition
    r: SpatialCoefficient
    domain: tuple


# ---------------------------------------------------------------------------
# benchmark 1: rarefaction ladder, g(z) = z^2/2, beta = u + r(x)
# ---------------------------------------------------------------------------

def _ex1_widths(p: float, q: float):
    n = 1
    while True:
        if n % 2 == 1:
            yield p * q ** (n - 1) - p * q ** n
        else:
            yield p * q ** (n - 2) - p * q ** (n - 1)
        n += 1


def _ex1_accumulation(p: float, q: float) -> float:
    # 1 + sum of all interval widths, summed to numerical convergence.
    total = 1.0
    for w in _ex1_widths(p, q):
        nxt = total + w
        if nxt <= total:
            return total
        total = nxt


@lru_cache(maxsize=32)
def example1_problem(p: float = 4.0, q: float = 0.8,
                     min_width: float = 0.0) -> ExampleProblem:
    if not (p > 0.0 and 0.0 < q < 1.0):
        raise InvalidInputError("need p > 0 and q in (0, 1)")
    a_inf = _ex1_accumulation(p, q)
    part = GeometricPartition.from_widths(1.0, _ex1_widths(p, q), p, q,
                                          accumulation=a_inf,
                                          min_width=min_width)
    a = part.a
    # Exact-solution evaluation always locates x in the fully resolved
    # partition, so the reference is independent of the model truncation.
    a_ref = a if min_width == 0.0 else GeometricPartition.from_widths(
        1.0, _ex1_widths(p, q), p, q, accumulation=a_inf).a
    # r = p left of a_1, p q^{n-1} on C_n = [a_n, a_{n+1}), 0 past the
    # accumulation point (dropped intervals merge into that tail value).
    r_values = np.concatenate(([p], p * q ** np.arange(a.size - 1), [0.0]))
    r = SpatialCoefficient(a, r_values, name="r")
    shift = SpatialCoefficient(a, -r_values, name="-r")

    def g(z):
        return 0.5 * np.square(z)

    model = FluxModel(
        g=g,
        beta=ShiftBeta(shift),
        z_minus=0.0,
        z_plus=0.0,
        lipschitz_g=lambda r_: float(r_),
        growth=lambda t: 0.5 * t * t,
        g_inverse_minus=lambda alpha: -math.sqrt(2.0 * alpha),
        g_inverse_plus=lambda alpha: math.sqrt(2.0 * alpha),
        name="paper-ex1",
    )

    def locate(x: float) -> int:
        # 0: left of a_1; n >= 1: inside C_n; -1: past the accumulation point
        # (including the sub-ulp sliver the resolved partition cannot place).
        if x >= a_inf:
            return -1
        n = int(np.searchsorted(a_ref, x, side="right"))
        return -1 if n >= a_ref.size else n

    def u0(x: float) -> float:
        n = locate(x)
        if n == -1:
            return 0.0
        if n <= 1:
            return -p * q
        if n % 2 == 1:
            return -p * q ** n
        return -p * q ** (n - 2)

    def exact_t1(x: float) -> float:
        n = locate(x)
        if n == -1:
            return 0.0
        if n <= 1:
            return -p * q
        if n % 2 == 1:
            return x - a_ref[n - 1] - p * q ** (n - 1)
        return x - a_ref[n] - p * q ** (n - 1)

    return ExampleProblem(name="paper-ex1", model=model, u0=u0, exact=exact_t1,
                          reference_time=1.0, partition=part, r=r,
                          domain=(0.0, 6.0))


def example1_model(p: float = 4.0, q: float = 0.8, min_width: float = 0.0):
    prob = example1_problem(p, q, min_width)
    return prob.model, prob.u0, prob.exact


# ---------------------------------------------------------------------------
# benchmark 2: stationary plateau profile, degenerate piecewise-linear g
# ---------------------------------------------------------------------------

def degenerate_linear_g(z):
    """g = -z-1 below the plateau [-1, 0], z above it (gap closed as g(z)=z)."""
    z = np.asarray(z, dtype=float)
    return np.where(z > 0.0, z, np.where(z < -1.0, -z - 1.0, 0.0))


@lru_cache(maxsize=32)
def example2_problem(min_width: float = 0.0) -> ExampleProblem:
    ratio = 0.8
    part = GeometricPartition.from_widths(
        1.0, (ratio ** n for n in _count_from(1)), p=5.0, q=ratio,
        accumulation=5.0, min_width=min_width)
    a = part.a
    a_ref = a if min_width == 0.0 else GeometricPartition.from_widths(
        1.0, (ratio ** n for n in _count_from(1)), p=5.0, q=ratio,
        accumulation=5.0).a
    n_idx = np.arange(1, a.size + 1)
    # r = 2 left of a_1, r_n = 1 - (-0.8)^n on [a_n, a_{n+1}), 1 past x = 5.
    r_values = np.concatenate(([2.0], 1.0 - (-ratio) ** n_idx[:-1], [1.0]))
    r = SpatialCoefficient(a, r_values, name="r")

    model = FluxModel(
        g=degenerate_linear_g,
        beta=ShiftBeta(r),
        z_minus=-1.0,
        z_plus=0.0,
        lipschitz_g=lambda r_: 1.0,
        growth=lambda t: float(t),
        g_inverse_minus=lambda alpha: -1.0 - alpha,
        g_inverse_plus=lambda alpha: float(alpha),
        name="paper-ex2",
    )

    def u0(x: float) -> float:
        return 2.0

    def exact_t6(x: float) -> float:
        if x < a_ref[0]:
            return 2.0
        if x >= 5.0:
            return 1.0
        n = int(np.searchsorted(a_ref, x, side="right"))
        return 1.0 - (-ratio) ** n

    return ExampleProblem(name="paper-ex2", model=model, u0=u0, exact=exact_t6,
                          reference_time=6.0, partition=part, r=r,
                          domain=(0.0, 6.0))


def example2_model(min_width: float = 0.0):
    prob = example2_problem(min_width)
    return prob.model, prob.u0, prob.exact


def _count_from(start: int):
    n = start
    while True:
        yield n
        n += 1


# ---------------------------------------------------------------------------
# validator-only fluxes (no exact solutions)
# ---------------------------------------------------------------------------

def _heaviside_coefficient() -> SpatialCoefficient:
    return SpatialCoefficient(np.array([0.0]), np.array([1.0, 0.0]), name="H(-x)")


def tv_blowup_model() -> FluxModel:
    """A = u^2 for x<0, |u| for x>=0: the lower slope of beta degenerates at 0.

    The declared K2 = 1 is only valid on the right half line; the validator's
    C-6 check exposes the violation (and with it the growth bound A-4).
    """

    def beta_func(x, u):
        u = np.asarray(u, dtype=float)
        left = np.square(u) * np.sign(u)
        return np.where(np.asarray(x, dtype=float) < 0.0, left, u)

    beta = CallableBeta(
        func=beta_func,
        k2=1.0,
        k3=lambda r_: max(2.0 * r_, 1.0),
        k4=lambda u: u * u + abs(u),
        spatial=_heaviside_coefficient(),
    )
    return FluxModel(
        g=lambda z: np.abs(z),
        beta=beta,
        z_minus=0.0,
        z_plus=0.0,
        lipschitz_g=lambda r_: 1.0,
        growth=lambda t: float(t),
        g_inverse_minus=lambda alpha: -float(alpha),
        g_inverse_plus=lambda alpha: float(alpha),
        name="tv-blowup",
    )


def uniformly_convex_model(r: SpatialCoefficient = None) -> FluxModel:
    """A = (u - r(x))^2: uniformly convex in u, no plateau."""
    if r is None:
        r = SpatialCoefficient(np.array([0.0, 1.0]), np.array([1.0, -0.5, 0.25]),
                               name="r")
    return FluxModel(
        g=lambda z: np.square(z),
        beta=ShiftBeta(r),
        z_minus=0.0,
        z_plus=0.0,
        lipschitz_g=lambda r_: 2.0 * float(r_),
        growth=lambda t: float(t) * float(t),
        g_inverse_minus=lambda alpha: -math.sqrt(alpha),
        g_inverse_plus=lambda alpha: math.sqrt(alpha),
        name="uniformly-convex",
    )


def trig_composite_model() -> FluxModel:
    """A = g(2u + sin u) for x<0, g(2u + cos u) for x>=0, degenerate g."""

    def beta_func(x, u):
        u = np.asarray(u, dtype=float)
        return np.where(np.asarray(x, dtype=float) < 0.0,
                        2.0 * u + np.sin(u), 2.0 * u + np.cos(u))

    beta = CallableBeta(
        func=beta_func,
        k2=1.0,
        k3=lambda r_: 3.0,
        k4=lambda u: math.sqrt(2.0),
        spatial=_heaviside_coefficient(),
    )
    return FluxModel(
        g=degenerate_linear_g,
        beta=beta,
        z_minus=-1.0,
        z_plus=0.0,
        lipschitz_g=lambda r_: 1.0,
        growth=lambda t: float(t),
        name="trig-composite",
    )


# ---------------------------------------------------------------------------
# registries
# ---------------------------------------------------------------------------

EXAMPLE_IDS = ("paper-ex1", "paper-ex2")
VALIDATION_FLUX_IDS = ("tv-blowup", "uniformly-convex", "trig-composite")


def example_problem(example: str, min_width: float = 0.0) -> ExampleProblem:
    if example == "paper-ex1":
        return example1_problem(min_width=min_width)
    if example == "paper-ex2":
        return example2_problem(min_width=min_width)
    raise InvalidInputError(f"unknown example id {example!r}")


def validation_model(flux_id: str) -> FluxModel:
    builders = {
        "tv-blowup": tv_blowup_model,
        "uniformly-convex": uniformly_convex_model,
        "trig-composite": trig_composite_model,
    }
    if flux_id not in builders:
        raise InvalidInputError(f"unknown validation flux id {flux_id!r}")
    return builders[flux_id]()


def eval_exact(example: str, x: float, t: float) -> float:
    """Exact solution of a benchmark at (x, t); only the reference time exists."""
    prob = example_problem(example)
    if t != prob.reference_time:
        raise UnsupportedReferenceError(
            f"{example} has an exact solution only at t = {prob.reference_time}")
    return float(prob.exact(float(x)))
