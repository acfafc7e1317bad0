"""Exception hierarchy shared across the toolkit.

ConfigError maps to CLI exit code 2; NumericDiagnostic and its
subclasses map to exit code 3 (the computation ran but tripped a
numeric guard rather than producing a result).
"""


class CurveCountError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CurveCountError):
    """Invalid or missing configuration (bad flags, malformed input)."""


class NumericDiagnostic(CurveCountError):
    """A numeric guard fired; the result would not be trustworthy."""


class NonHyperbolic(ConfigError):
    """Surface signature does not carry a hyperbolic structure."""


class SpaceMismatch(CurveCountError):
    """Operands live in coordinate spaces of different dimension."""


class InvalidMulticurve(CurveCountError):
    """Coordinate vector violates the multicurve lattice conventions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class EmptySample(CurveCountError):
    """A sample set that must be nonempty was empty."""


class DegenerateConstants(CurveCountError):
    """Quasi-comparison constants unusable (c_lo is not positive)."""


class NonPositiveLength(ConfigError):
    """A geodesic length parameter must be strictly positive."""


class InvalidChart(ConfigError):
    """Trace triple fails the cusped-torus chart constraints."""


class NonHyperbolicTrace(CurveCountError):
    """Trace at or below 2: parabolic/elliptic holonomy, chart unusable."""


class NotUnimodular(CurveCountError):
    """Integer matrix with determinant other than +-1."""


class DepthCapExceeded(NumericDiagnostic):
    """Tree enumeration descended past its safety depth cap."""


class NonConvergent(NumericDiagnostic):
    """Trace-triple reduction failed to reach a minimal triple."""


class InsufficientSeries(CurveCountError):
    """Too few data points (or too narrow a span) to fit."""


class NonPositiveCount(CurveCountError):
    """Power-law fitting needs strictly positive counts in its window."""


class UnsupportedOrbit(CurveCountError):
    """No mapping-class orbit test implemented for this space."""


class UnsupportedSurface(CurveCountError):
    """No boundary-volume data available for this cut surface."""


class SamplerDegenerate(NumericDiagnostic):
    """Importance weights collapsed; effective sample size too small."""
