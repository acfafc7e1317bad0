"""Length functions on the coordinate cone.

A length function assigns a positive number to every nonzero coordinate
vector, is linear on rays (1-homogeneous) and subadditive, so its unit
sub-level set is convex.  The L^1 norm of the coordinate vector is the
baseline; any hyperbolic length is quasi-comparable to it, and the sampled
comparison constants are what turn a length bound into a finite enumeration
box.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConstants, EmptySample


def l1_length(x) -> float:
    """Sum of absolute coordinates.

    On valid cone vectors (intersection entries nonnegative) this is
    sum |t_i| + sum m_i.
    """
    return float(np.abs(np.asarray(x, dtype=float)).sum())


class LengthFunction:
    """Callable contract: positive, 1-homogeneous, subadditive on the cone."""

    label = "length"

    def __call__(self, x) -> float:
        raise NotImplementedError

    def batch(self, arr) -> np.ndarray:
        """Vectorized evaluation over rows of a 2-d array."""
        return np.array([self(row) for row in np.asarray(arr, dtype=float)])


class L1Length(LengthFunction):
    label = "l1"

    def __call__(self, x) -> float:
        return l1_length(x)

    def batch(self, arr) -> np.ndarray:
        return np.abs(np.asarray(arr, dtype=float)).sum(axis=1)


class ScaledL1(LengthFunction):
    """s * L1, used as a transparent test instance."""

    def __init__(self, factor: float):
        if factor <= 0:
            raise ValueError("factor must be positive")
        self.factor = float(factor)
        self.label = f"{factor}*l1"

    def __call__(self, x) -> float:
        return self.factor * l1_length(x)

    def batch(self, arr) -> np.ndarray:
        return self.factor * np.abs(np.asarray(arr, dtype=float)).sum(axis=1)


@dataclass(frozen=True)
class QuasiConstants:
    """Sampled comparison constants: c_lo * L1 <= L <= c_hi * L1.

    Empirical, not proven bounds; they are only used to size enumeration
    boxes, and box completeness is re-checked after the fact.
    """

    c_lo: float
    c_hi: float
    sample_size: int

    def __post_init__(self):
        if not (0 < self.c_lo <= self.c_hi):
            raise ValueError(f"need 0 < c_lo <= c_hi, got ({self.c_lo}, {self.c_hi})")


def estimate_quasi_constants(length_fn, samples) -> QuasiConstants:
    """Min and max of L(x)/L1(x) over a sample of nonzero vectors."""
    ratios = []
    for x in samples:
        base = l1_length(x)
        if base == 0.0:
            raise ValueError("samples must be nonzero vectors")
        ratios.append(length_fn(x) / base)
    if not ratios:
        raise EmptySample("no sample vectors supplied")
    return QuasiConstants(min(ratios), max(ratios), len(ratios))


def ball_bounding_radius(quasi: QuasiConstants, radius: float) -> float:
    """L1 radius whose ball contains {L <= radius} over the sampled regime."""
    if quasi.c_lo <= 0:
        raise DegenerateConstants("c_lo must be positive")
    return radius / quasi.c_lo
