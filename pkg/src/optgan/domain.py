"""Axis-aligned box search domains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[low_i, high_i]`` in each dimension.

    Bounds are stored as float64 arrays and must satisfy ``low < high``
    componentwise.
    """

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.atleast_1d(np.asarray(self.low, dtype=np.float64))
        high = np.atleast_1d(np.asarray(self.high, dtype=np.float64))
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        if low.ndim != 1 or low.shape != high.shape:
            raise ValueError("box bounds must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
            raise ValueError("box bounds must be finite")
        if not np.all(low < high):
            raise ValueError("box requires low < high in every dimension")

    @classmethod
    def cube(cls, low: float, high: float, dim: int) -> "Box":
        """Box with the same ``[low, high]`` interval in every dimension."""
        if dim < 1:
            raise ValueError("dim must be >= 1")
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.low.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.low + self.high)

    @property
    def halfwidth(self) -> np.ndarray:
        return 0.5 * (self.high - self.low)

    def volume(self) -> float:
        return float(np.prod(self.high - self.low))

    def contains(self, x, strict: bool = False) -> bool:
        """True if every point in ``x`` (a vector or a batch of rows) lies inside."""
        x = np.asarray(x)
        if strict:
            return bool(np.all(x > self.low) and np.all(x < self.high))
        return bool(np.all(x >= self.low) and np.all(x <= self.high))

    def shrunk(self, fraction: float) -> "Box":
        """Box scaled about its center by ``fraction`` of the original width."""
        if not 0.0 < fraction <= 1.0:
            raise ValueError("fraction must be in (0, 1]")
        hw = self.halfwidth * fraction
        return Box(self.center - hw, self.center + hw)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` i.i.d. uniform points, returned as rows of a (count, dim) array."""
        if count < 1:
            raise ValueError("count must be >= 1")
        return rng.uniform(self.low, self.high, size=(count, self.dim))
