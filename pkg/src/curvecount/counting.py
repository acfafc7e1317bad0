"""Riemann-sum measures, orbit densities, extrapolation and power-law fits.

The Lebesgue-type measure of a sub-level set is recovered as the limit of
normalized lattice counts lambda_t = |{x != 0 : L(x) <= t}| / t^d; the orbit
density mu_t counts only the mapping-class orbit of a fixed curve.  Counts
use the closed condition L <= t (the boundary is measure-zero in the limit)
and always exclude the zero vector.

Two lattice models are provided.  ``TorusPlane`` is the (p, q) plane of the
once-punctured torus: all nonzero integer pairs, where the orbit of any
slope is exactly the primitive pairs.  ``DehnLattice`` is the multicurve
lattice Z^k x (2Z>=0)^k of a general coordinate space; relative to a plain
Z^{2k} count this rescales the limit by 2^{-k} (even intersections), which
cancels in every internal comparison because one convention is used
throughout.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateConstants,
    InsufficientSeries,
    NonPositiveCount,
    UnsupportedOrbit,
)
from .lengths import L1Length, LengthFunction, QuasiConstants, ScaledL1, ball_bounding_radius
from .surfaces import CoordinateSpace
from .torus import MarkovChart, Slope, ball_slope_lengths


@dataclass(frozen=True)
class MeasureEstimate:
    """A lambda_t series with optional 1/t extrapolation attached."""

    t_values: tuple
    lambda_t: tuple
    counts: tuple = ()
    extrapolated: float = None
    error_bar: float = None


@dataclass(frozen=True)
class OrbitCensus:
    """A mu_t series for the orbit of a fixed base slope."""

    base: Slope
    t_values: tuple
    mu_t: tuple
    counts: tuple = ()


@dataclass(frozen=True)
class FitResult:
    """Power-law fit N(L) ~ constant * L^exponent over a window."""

    exponent: float
    constant: float
    stderr: float
    window: tuple


# ---------------------------------------------------------------------------
# Lattice models
# ---------------------------------------------------------------------------


class TorusPlane:
    """Integer (p, q) plane of the once-punctured torus, origin excluded.

    d = 2 and the L1 unit ball has measure exactly 2.  Hyperbolic counting
    needs a chart and goes through exact slope enumeration: a nonzero pair
    is n times a primitive pair and its length is |n| times the slope
    length, so ball counts are 2 * sum over slopes of floor(t / length).
    """

    d = 2
    l1_ball_measure = 2.0

    def __init__(self, chart: MarkovChart = None):
        self.chart = chart

    def _require_chart(self) -> MarkovChart:
        if self.chart is None:
            raise DegenerateConstants("hyperbolic counting needs a chart")
        return self.chart

    def count_ball(self, t: float, length="l1", quasi: QuasiConstants = None) -> int:
        """Number of nonzero lattice pairs with length <= t."""
        if t <= 0:
            return 0
        if isinstance(length, str) and length == "l1":
            return _plane_l1_count(t)
        if isinstance(length, str) and length == "hyperbolic":
            lens = ball_slope_lengths(self._require_chart(), t)
            if lens.size == 0:
                return 0
            return 2 * int(np.floor(t / lens).sum())
        return self._generic_count(t, length, quasi, primitive=False)

    def count_ball_many(self, ts, length="l1", quasi: QuasiConstants = None):
        """Ball counts for several radii; one enumeration for hyperbolic."""
        if isinstance(length, str) and length == "hyperbolic":
            tmax = max(ts)
            lens = ball_slope_lengths(self._require_chart(), tmax)
            out = []
            for t in ts:
                sel = lens[lens <= t]
                out.append(0 if sel.size == 0 else 2 * int(np.floor(t / sel).sum()))
            return out
        return [self.count_ball(t, length, quasi) for t in ts]

    def count_orbit(self, t: float, base: Slope, length="l1") -> int:
        """Orbit points of a base slope with length <= t.

        The mapping-class group acts transitively on primitive pairs, so
        membership is primitivity regardless of the base.
        """
        if not isinstance(base, Slope):
            raise UnsupportedOrbit(f"base curve must be a Slope, got {base!r}")
        if t <= 0:
            return 0
        if isinstance(length, str) and length == "l1":
            return _plane_l1_primitive_count(t)
        if isinstance(length, str) and length == "hyperbolic":
            lens = ball_slope_lengths(self._require_chart(), t)
            return 2 * int(lens.size)
        raise UnsupportedOrbit(f"no orbit count for length {length!r}")

    def _generic_count(self, t, length_fn: LengthFunction, quasi, primitive):
        if quasi is None:
            if isinstance(length_fn, ScaledL1):
                quasi = QuasiConstants(length_fn.factor, length_fn.factor, 0)
            elif isinstance(length_fn, L1Length):
                quasi = QuasiConstants(1.0, 1.0, 0)
            else:
                raise DegenerateConstants(
                    "generic length functions need quasi constants for the box"
                )
        r = int(math.floor(ball_bounding_radius(quasi, t)))
        ps, qs = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
        ps, qs = ps.ravel(), qs.ravel()
        keep = (ps != 0) | (qs != 0)
        if primitive:
            keep &= np.gcd(np.abs(ps), np.abs(qs)) == 1
        ps, qs = ps[keep], qs[keep]
        vals = length_fn.batch(np.column_stack([ps, qs]))
        return int((vals <= t).sum())


class DehnLattice:
    """Multicurve lattice Z^k x (2Z>=0)^k of a coordinate space.

    Points with a zero intersection number carry a nonnegative twist, the
    zero vector is excluded, and d = 2k.  The L1 unit-ball measure on this
    lattice is 1/(2k)!:  the R^{2k} cross-polytope volume 2^{2k}/(2k)!
    halved per nonnegative intersection coordinate and thinned by the
    even-intersection density 2^{-k}.
    """

    def __init__(self, space: CoordinateSpace):
        self.space = space
        self.d = space.dimension

    @property
    def l1_ball_measure(self) -> float:
        return 1.0 / math.factorial(self.d)

    def count_ball(self, t: float, length_fn: LengthFunction = None,
                   quasi: QuasiConstants = None) -> int:
        """Number of nonzero multicurve lattice points with length <= t."""
        if t <= 0:
            return 0
        if length_fn is None:
            length_fn = L1Length()
        if quasi is None:
            if isinstance(length_fn, ScaledL1):
                quasi = QuasiConstants(length_fn.factor, length_fn.factor, 0)
            elif isinstance(length_fn, L1Length):
                quasi = QuasiConstants(1.0, 1.0, 0)
            else:
                raise DegenerateConstants(
                    "generic length functions need quasi constants for the box"
                )
        r = int(math.floor(ball_bounding_radius(quasi, t)))
        k = self.space.pants_curves
        axes = [np.arange(-r, r + 1)] * k + [np.arange(0, r + 1, 2)] * k
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        twists, inters = pts[:, :k], pts[:, k:]
        keep = np.any(pts != 0, axis=1)
        # m_i = 0 forces t_i >= 0 so vectors biject with multicurves
        keep &= ~np.any((inters == 0) & (twists < 0), axis=1)
        pts = pts[keep]
        vals = length_fn.batch(pts.astype(float))
        return int((vals <= t).sum())

    def count_ball_many(self, ts, length_fn=None, quasi=None):
        return [self.count_ball(t, length_fn, quasi) for t in ts]

    def count_orbit(self, t, base, length_fn=None):
        raise UnsupportedOrbit(
            "no mapping-class action implemented for general Dehn lattices"
        )


def _plane_l1_count(t: float) -> int:
    """Nonzero integer pairs with |p| + |q| <= t (exact)."""
    big = int(math.floor(t))
    if big < 1:
        return 0
    ps = np.arange(1, big + 1)
    quadrant = np.maximum(np.floor(t - ps).astype(np.int64), 0).sum()
    return int(4 * quadrant + 4 * big)


def _plane_l1_primitive_count(t: float) -> int:
    """Primitive integer pairs with |p| + |q| <= t (exact, by gcd)."""
    big = int(math.floor(t))
    if big < 1:
        return 0
    ps, qs = np.meshgrid(
        np.arange(1, big + 1, dtype=np.int32),
        np.arange(1, big + 1, dtype=np.int32),
        indexing="ij",
    )
    inside = (ps + qs) <= t
    prim = np.gcd(ps, qs) == 1
    return int(4 * np.count_nonzero(inside & prim) + 4)


# ---------------------------------------------------------------------------
# Series, extrapolation, fits
# ---------------------------------------------------------------------------


def lambda_t(model, t: float, **kwargs) -> float:
    """Normalized lattice count |{0 < L <= t}| / t^d."""
    return model.count_ball(t, **kwargs) / float(t) ** model.d


def mu_t(model, t: float, base, **kwargs) -> float:
    """Normalized orbit count |orbit & {L <= t}| / t^d."""
    return model.count_orbit(t, base, **kwargs) / float(t) ** model.d


def lambda_series(model, ts, **kwargs) -> MeasureEstimate:
    ts = [float(t) for t in ts]
    counts = model.count_ball_many(ts, **kwargs)
    lam = tuple(c / t**model.d for c, t in zip(counts, ts))
    return MeasureEstimate(tuple(ts), lam, tuple(counts))


def mu_series(model, ts, base, **kwargs) -> OrbitCensus:
    ts = [float(t) for t in ts]
    counts = [model.count_orbit(t, base, **kwargs) for t in ts]
    mu = tuple(c / t**model.d for c, t in zip(counts, ts))
    return OrbitCensus(base, tuple(ts), mu, tuple(counts))


EXTRAPOLATION_MODELS = ("1/t", "1/t2")


def extrapolate(series: MeasureEstimate, tail: int = None,
                model: str = "1/t") -> MeasureEstimate:
    """Fit the series tail against a finite-size model and attach the limit.

    Models: "1/t" fits lambda + a/t (first-order default), "1/t2" adds a
    second-order b/t^2 term.  ``tail`` keeps only the trailing points
    (default: all).  Requires at least 3 points spanning a factor of 4 in
    t.  The error bar is the rms fit residual.
    """
    ts = np.asarray(series.t_values, dtype=float)
    ys = np.asarray(series.lambda_t, dtype=float)
    if tail is not None:
        ts, ys = ts[-tail:], ys[-tail:]
    if ts.size < 3:
        raise InsufficientSeries(f"need >= 3 t values, got {ts.size}")
    if ts.max() < 4.0 * ts.min():
        raise InsufficientSeries("t values must span at least a factor of 4")
    if model == "1/t":
        design = np.column_stack([np.ones_like(ts), 1.0 / ts])
    elif model == "1/t2":
        if ts.size < 4:
            raise InsufficientSeries("the second-order model needs >= 4 points")
        design = np.column_stack([np.ones_like(ts), 1.0 / ts, 1.0 / ts**2])
    else:
        raise ValueError(f"unknown extrapolation model {model!r}")
    coef, _, _, _ = np.linalg.lstsq(design, ys, rcond=None)
    resid = ys - design @ coef
    error = float(np.sqrt(np.mean(resid**2)))
    return replace(series, extrapolated=float(coef[0]), error_bar=error)


def fit_power_law(points, window: tuple = None) -> FitResult:
    """Log-log linear regression of (L, count) data on a tail window.

    The default window keeps L at or above the geometric mean of the grid
    endpoints (the top half of the grid in log scale).  Counts inside the
    window must be positive; stderr is the standard error of the exponent.
    """
    pts = sorted((float(a), float(b)) for a, b in points)
    if len(pts) < 4:
        raise InsufficientSeries(f"need >= 4 points, got {len(pts)}")
    if window is None:
        lo = math.sqrt(pts[0][0] * pts[-1][0])
        hi = pts[-1][0]
    else:
        lo, hi = float(window[0]), float(window[1])
    sel = [(a, b) for a, b in pts if lo <= a <= hi]
    if len(sel) < 2:
        raise InsufficientSeries(f"window [{lo}, {hi}] keeps {len(sel)} points")
    if any(b <= 0 for _, b in sel):
        raise NonPositiveCount("window contains nonpositive counts")
    xs = np.log([a for a, _ in sel])
    ys = np.log([b for _, b in sel])
    design = np.column_stack([np.ones_like(xs), xs])
    coef, _, _, _ = np.linalg.lstsq(design, ys, rcond=None)
    resid = ys - design @ coef
    if len(sel) > 2:
        sigma2 = float(resid @ resid) / (len(sel) - 2)
        cov = sigma2 * np.linalg.inv(design.T @ design)
        stderr = float(math.sqrt(max(cov[1, 1], 0.0)))
    else:
        stderr = 0.0
    return FitResult(
        exponent=float(coef[1]),
        constant=float(math.exp(coef[0])),
        stderr=stderr,
        window=(sel[0][0], sel[-1][0]),
    )


def sandwich_lambda(quasi: QuasiConstants, model) -> tuple:
    """Bounds on the unit-ball measure from the quasi-comparison constants.

    c_lo * L1 <= L <= c_hi * L1 squeezes {L <= 1} between scaled L1 balls,
    so the measure lies in [lam1 / c_hi^d, lam1 / c_lo^d].
    """
    if quasi.c_lo <= 0:
        raise DegenerateConstants("c_lo must be positive")
    lam1 = model.l1_ball_measure
    d = model.d
    return (lam1 / quasi.c_hi**d, lam1 / quasi.c_lo**d)
