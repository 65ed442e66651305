"""Sampling grids on the unit disk."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Polar grid on |z| <= max_radius plus extra circles near the boundary.

    The boundary liminf of a function is estimated from its minima on the
    ``refinement_radii`` circles, which must increase strictly toward 1.
    """

    radial_count: int = 200
    angular_count: int = 512
    max_radius: float = 0.999
    refinement_radii: Tuple[float, ...] = (0.9, 0.99, 0.999, 0.9999)

    def __post_init__(self):
        if self.radial_count < 1 or self.angular_count < 1:
            raise ValueError("grid counts must be positive")
        if not 0.0 < self.max_radius < 1.0:
            raise ValueError(f"max_radius must lie in (0, 1), got {self.max_radius!r}")
        radii = tuple(float(r) for r in self.refinement_radii)
        if any(not 0.0 < r < 1.0 for r in radii):
            raise ValueError("refinement radii must lie in (0, 1)")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("refinement radii must be strictly increasing")
        object.__setattr__(self, "refinement_radii", radii)

    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    def circle(self, r: float) -> np.ndarray:
        return r * np.exp(1j * self.angles())

    def disk_points(self) -> np.ndarray:
        """Origin plus rings at the nonzero radii of linspace(0, max_radius)."""
        radii = np.linspace(0.0, self.max_radius, self.radial_count)[1:]
        ring = np.exp(1j * self.angles())
        return np.concatenate([[0j], np.outer(radii, ring).ravel()])

    def points(self) -> np.ndarray:
        """Disk points together with all refinement circles."""
        return np.concatenate([self.disk_points()] + [self.circle(r) for r in self.refinement_radii])

    def refine(self) -> "GridSpec":
        """A grid whose point set contains this one (halved radial and angular spacing)."""
        return GridSpec(
            2 * self.radial_count - 1 if self.radial_count > 1 else 2,
            2 * self.angular_count,
            self.max_radius,
            self.refinement_radii,
        )


DEFAULT_GRID = GridSpec()
