"""Piecewise-constant spatial coefficients with finitely many jumps.

A coefficient is a step function of x described by a strictly increasing
list of breakpoints and one value per interval, including the two
unbounded tails.  Cells are half-open, so a query exactly on a breakpoint
returns the value of the interval to its right.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class SpatialCoefficient:
    """Step function r(x) with values[i] on (breakpoints[i-1], breakpoints[i])."""

    breakpoints: np.ndarray
    values: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1:
            raise InvalidInputError("breakpoints and values must be 1-D sequences")
        if vals.size != bp.size + 1:
            raise InvalidInputError(
                f"need {bp.size + 1} values for {bp.size} breakpoints, got {vals.size}"
            )
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(vals))):
            raise InvalidInputError("breakpoints and values must be finite")
        if bp.size > 1 and not np.all(np.diff(bp) > 0.0):
            raise InvalidInputError("breakpoints must be strictly increasing")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float, name: str = "") -> "SpatialCoefficient":
        return cls(np.empty(0), np.array([float(value)]), name=name)

    @property
    def left_tail(self) -> float:
        return float(self.values[0])

    @property
    def right_tail(self) -> float:
        return float(self.values[-1])

    def __call__(self, x):
        """Evaluate at scalar or array x; breakpoints take the right value."""
        idx = np.searchsorted(self.breakpoints, x, side="right")
        out = self.values[idx]
        if np.ndim(x) == 0:
            return float(out)
        return out

    def total_variation(self) -> float:
        if self.values.size < 2:
            return 0.0
        return float(np.sum(np.abs(np.diff(self.values))))

    def representative_points(self) -> np.ndarray:
        """One x inside every interval, tails included (used for sampling sups)."""
        bp = self.breakpoints
        if bp.size == 0:
            return np.array([0.0])
        mids = 0.5 * (bp[:-1] + bp[1:])
        return np.concatenate(([bp[0] - 1.0], mids, [bp[-1] + 1.0]))

    def unsampled_interval_count(self, points) -> int:
        """Number of bounded intervals containing none of the given points.

        Grid sups taken over such points can miss the value on an interval
        narrower than the spacing; callers report this count as a warning.
        """
        bp = self.breakpoints
        if bp.size < 2:
            return 0
        pts = np.sort(np.asarray(points, dtype=float))
        lo = np.searchsorted(pts, bp[:-1], side="left")
        hi = np.searchsorted(pts, bp[1:], side="left")
        return int(np.sum(hi == lo))
