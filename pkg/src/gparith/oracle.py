"""Verification tools that do not trust the solvers.

Brute-force grid minimization and central finite differences; the test
suite uses these to validate analytic gradients, Hessians and minimizers
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InvalidInputError, _as_vector3

__all__ = ["GridBox", "GridMinimum", "grid_min", "fd_gradient", "fd_hessian"]


@dataclass(frozen=True)
class GridBox:
    """Axis-aligned scan box; odd points_per_axis so the center is a grid point."""

    center: np.ndarray
    half_widths: np.ndarray
    points_per_axis: int = 21

    def __post_init__(self):
        center = _as_vector3(self.center, "center")
        half = _as_vector3(self.half_widths, "half_widths")
        if not np.all(half > 0):
            raise InvalidInputError("half_widths must be positive")
        n = self.points_per_axis
        if int(n) != n or n < 3 or n % 2 == 0:
            raise InvalidInputError(
                f"points_per_axis must be an odd integer >= 3, got {n}"
            )
        center.flags.writeable = False
        half.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_widths", half)
        object.__setattr__(self, "points_per_axis", int(n))

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(c - h, c + h, self.points_per_axis)
            for c, h in zip(self.center, self.half_widths)
        ]


@dataclass(frozen=True)
class GridMinimum:
    point: np.ndarray
    value: float


def grid_min(objective, box: GridBox) -> GridMinimum:
    """Exhaustive scan of the box; first minimum in lexicographic order wins.

    The objective is offered the whole (N, 3) point array first (the
    package's own objectives evaluate batched); anything that rejects the
    batch or returns the wrong shape is evaluated pointwise.
    """
    points = np.stack(np.meshgrid(*box.axes(), indexing="ij"), axis=-1).reshape(-1, 3)
    values = None
    try:
        batched = np.asarray(objective(points), dtype=float)
        if batched.shape == (len(points),):
            values = batched
    except Exception:
        values = None
    if values is None:
        values = np.fromiter(
            (float(objective(p)) for p in points), dtype=float, count=len(points)
        )
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("objective is not finite everywhere on the grid")
    index = int(np.argmin(values))  # argmin returns the first minimum
    return GridMinimum(point=points[index].copy(), value=float(values[index]))


def fd_gradient(objective, point, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient, step = rel_step * (1 + |coordinate|) per axis."""
    if not (math.isfinite(rel_step) and rel_step > 0):
        raise InvalidInputError("rel_step must be finite and > 0")
    p = _as_vector3(point, "point")
    gradient = np.empty(3)
    for axis in range(3):
        h = rel_step * (1.0 + abs(p[axis]))
        offset = np.zeros(3)
        offset[axis] = h
        gradient[axis] = (objective(p + offset) - objective(p - offset)) / (2.0 * h)
    return gradient


def fd_hessian(gradient, point, rel_step: float = 1e-4) -> np.ndarray:
    """Central differences of a gradient function, symmetrized ((H + H')/2)."""
    if not (math.isfinite(rel_step) and rel_step > 0):
        raise InvalidInputError("rel_step must be finite and > 0")
    p = _as_vector3(point, "point")
    columns = np.empty((3, 3))
    for axis in range(3):
        h = rel_step * (1.0 + abs(p[axis]))
        offset = np.zeros(3)
        offset[axis] = h
        columns[:, axis] = (
            np.asarray(gradient(p + offset), dtype=float)
            - np.asarray(gradient(p - offset), dtype=float)
        ) / (2.0 * h)
    return 0.5 * (columns + columns.T)
