"""Gridded image container shared by the PSF and reconstruction code."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ImageGrid"]


@dataclass
class ImageGrid:
    """Complex values sampled on a rectilinear grid.

    ``values[i, j]`` is the sample at ``(axis1[i], axis2[j])``. For
    angular images both axes are direction cosines; for range-azimuth
    images ``axis1`` is range in metres and ``axis2`` is ``alpha``.
    """

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    axis1_name: str = "alpha"
    axis2_name: str = "beta"

    def __post_init__(self):
        self.axis1 = np.atleast_1d(np.asarray(self.axis1, dtype=float))
        self.axis2 = np.atleast_1d(np.asarray(self.axis2, dtype=float))
        self.values = np.asarray(self.values)
        if self.values.shape != (self.axis1.size, self.axis2.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.axis1.size}, {self.axis2.size})")

    @property
    def shape(self):
        return self.values.shape

    @property
    def extent(self):
        """``((axis1_min, axis1_max), (axis2_min, axis2_max))``."""
        return ((float(self.axis1[0]), float(self.axis1[-1])),
                (float(self.axis2[0]), float(self.axis2[-1])))

    @property
    def spacing(self):
        d1 = float(self.axis1[1] - self.axis1[0]) if self.axis1.size > 1 else 0.0
        d2 = float(self.axis2[1] - self.axis2[0]) if self.axis2.size > 1 else 0.0
        return d1, d2

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def real(self) -> np.ndarray:
        return np.real(self.values)

    def peak(self):
        """``(axis1, axis2, value)`` at the largest magnitude."""
        i, j = np.unravel_index(np.argmax(np.abs(self.values)), self.values.shape)
        return float(self.axis1[i]), float(self.axis2[j]), self.values[i, j]
