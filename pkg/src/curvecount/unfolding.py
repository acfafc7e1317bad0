"""Moduli-space integration: volume element, unfolding, coarea checks.

In Fenchel-Nielsen coordinates the Weil-Petersson volume element is the
product of d(length) d(twist) over the pants curves, so forgetting the
(length, twist) pair of one curve is a volume-exact projection and the
fiber over the cut surface is a circle whose circumference is that curve's
length.  Unfolding the orbit sum over the cut curve turns the moduli-space
integral of the short-curve count n(L) into the volume of the region of the
stabilizer cover where the curve is shorter than L, which for the
once-punctured torus evaluates in closed form to L^2/2.

The Monte-Carlo side samples (length, twist) boxes with the flat density,
reduces each sample to its fundamental-domain trace triple, and corrects by
importance weights 1/m where m is the number of mapping-class lifts of the
sampled surface inside the box.  Lifts are enumerated exactly: one lift per
(short slope, twist translate), read off from the re-marked trace triples
that the slope enumeration already produces.
"""

import math
from concurrent import futures
from dataclasses import dataclass

import numpy as np

from .errors import SamplerDegenerate, UnsupportedSurface
from .surfaces import SurfaceSignature
from .torus import (
    MarkovChart,
    Slope,
    _ball_walk,
    _fn_from_triple,
    _reduce_triple,
)

#: Sampled pants-curve lengths stay above this floor: below it the chart is
#: numerically parabolic.  The excluded corner of moduli space has volume
#: ~floor^2/2, which is orders of magnitude below the Monte-Carlo error.
LENGTH_FLOOR = 1e-3


@dataclass(frozen=True)
class VolumeElement:
    """Product volume element: one (length, twist) density-1 factor per curve."""

    chart: tuple
    density: float = 1.0

    def __post_init__(self):
        if self.density != 1.0:
            raise ValueError("the Fenchel-Nielsen volume density is identically 1")

    def box_volume(self, ranges) -> float:
        """Volume of a product box of (length, twist) intervals."""
        v = 1.0
        for (a, b) in ranges:
            v *= b - a
        return v


@dataclass(frozen=True)
class UnfoldingSpec:
    """Data for cutting along a curve and unfolding the orbit sum.

    ``boundary_volume`` holds the coefficients (ascending powers) of the
    moduli volume of the cut surface as a polynomial in the common length
    of the two cut boundary circles; None means no volume data available.
    """

    cut_curve: Slope
    cut_surface: SurfaceSignature
    fiber_model: str
    stabilizer_note: str
    boundary_volume: tuple = None

    def __post_init__(self):
        if self.cut_surface.boundary < 2:
            raise ValueError(
                "cutting produces two boundary circles of equal length; "
                f"got boundary={self.cut_surface.boundary}"
            )


def torus_unfolding_spec() -> UnfoldingSpec:
    """Cutting the once-punctured torus along (1,0).

    The cut surface is a pair of pants with one cusp and the two matched
    boundary circles; its moduli space is a single point, normalized to
    volume 1.
    """
    return UnfoldingSpec(
        cut_curve=Slope(1, 0),
        cut_surface=SurfaceSignature(genus=0, cusps=1, boundary=2),
        fiber_model="circle of circumference equal to the cut-curve length",
        stabilizer_note="twist subgroup of the cut-curve stabilizer",
        boundary_volume=(1.0,),
    )


def projection_jacobian() -> float:
    """Jacobian of forgetting one (length, twist) pair: exactly 1.

    The volume element is a product over pants curves, so dropping the
    factor of the cut curve is volume-exact.
    """
    return 1.0


def unfolded_volume(max_length: float, spec: UnfoldingSpec) -> float:
    """Volume of the cover region where the cut curve is shorter than the bound.

    Integrates (fiber circumference) x (cut-surface moduli volume) over the
    curve length: integral_0^L of l * V(l) dl.  With polynomial V of degree
    d - 2 the result is a polynomial of degree d in the bound; the torus
    case V = 1 gives L^2/2.
    """
    if spec.boundary_volume is None:
        raise UnsupportedSurface(
            f"no boundary-volume polynomial for {spec.cut_surface}"
        )
    if max_length < 0:
        raise ValueError("length bound must be nonnegative")
    total = 0.0
    for j, c in enumerate(spec.boundary_volume):
        total += c * max_length ** (j + 2) / (j + 2)
    return total


# ---------------------------------------------------------------------------
# Monte-Carlo over moduli space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplerBox:
    """Uniform (length, twist) sampling box with the flat density."""

    l_lo: float
    l_hi: float
    tau_lo: float
    tau_hi: float

    def __post_init__(self):
        if not (0 <= self.l_lo < self.l_hi) or not (self.tau_lo < self.tau_hi):
            raise ValueError(f"degenerate box {self}")

    @property
    def area(self) -> float:
        return (self.l_hi - self.l_lo) * (self.tau_hi - self.tau_lo)


def default_box(max_length: float) -> SamplerBox:
    """Box covering one lift of every surface with a curve shorter than the bound.

    Any surface carrying a slope of length l <= L has a lift with that slope
    as the pants curve and twist reduced mod l, so the box (0, L] x [0, L]
    sees all the mass; the tiny length floor is a documented numerical
    cutoff.
    """
    if max_length <= LENGTH_FLOOR:
        raise ValueError(f"length bound must exceed {LENGTH_FLOOR}")
    return SamplerBox(LENGTH_FLOOR, max_length, 0.0, max_length)


def _fn_triple(l, tau):
    x = 2.0 * math.cosh(0.5 * l)
    c = 1.0 / math.tanh(0.5 * l)
    return x, 2.0 * c * math.cosh(0.5 * tau), 2.0 * c * math.cosh(0.5 * (tau + l))


def _lift_count(recs, box: SamplerBox, trace_lo: float, trace_hi: float,
                mirrored: bool) -> int:
    """Number of mapping-class lifts of the surface inside the box.

    One lift per (slope with length in the box range, twist translate in
    the box range): invert each re-marked triple to (length, twist) and
    count integer twist translates.  ``mirrored`` flags that the triples
    mark the mirror surface, whose twists are the negatives of the real
    ones.
    """
    sign = -1.0 if mirrored else 1.0
    m = 0
    for (tc, th, tl) in recs:
        if tc < trace_lo or tc > trace_hi:
            continue
        lc, tw = _fn_from_triple(tc, th, tl)
        tw *= sign
        kmin = math.ceil((box.tau_lo - tw) / lc)
        kmax = math.floor((box.tau_hi - tw) / lc)
        if kmax >= kmin:
            m += kmax - kmin + 1
    return m


def _count_batch(args):
    """One batch of the average-count estimator; returns plain accumulators."""
    seed, index, per, box, max_length, enum_to, depth_cap = args
    rng = np.random.Generator(np.random.Philox(key=[seed, index]))
    ls = box.l_hi - rng.uniform(0.0, box.l_hi - box.l_lo, per)
    taus = rng.uniform(box.tau_lo, box.tau_hi, per)
    tcut = 2.0 * math.cosh(0.5 * max_length)
    trace_lo = 2.0 * math.cosh(0.5 * box.l_lo)
    trace_hi = 2.0 * math.cosh(0.5 * box.l_hi)
    acc = 0.0
    wsum = 0.0
    w2sum = 0.0
    hits = 0
    for l, tau in zip(ls, taus):
        xr, yr, zr, mirrored = _reduce_triple(*_fn_triple(l, tau))
        recs = []
        _ball_walk(xr, yr, zr, enum_to,
                   lambda p, q, tc, th, tl: recs.append((tc, th, tl)),
                   depth_cap)
        m = _lift_count(recs, box, trace_lo, trace_hi, mirrored)
        w = 1.0 / m
        wsum += w
        w2sum += w * w
        f = sum(1 for r in recs if r[0] <= tcut)
        if f:
            hits += 1
            acc += f * w
    return acc, wsum, w2sum, hits


@dataclass(frozen=True)
class AverageCountEstimate:
    """Monte-Carlo estimate of the moduli-space integral of n(L).

    ``predicted`` is the unfolded volume; kappa is their ratio, the fitted
    proportionality left free for torsion bookkeeping the identity itself
    does not fix.
    """

    max_length: float
    integral_estimate: float
    stderr: float
    predicted: float
    kappa: float
    kappa_stderr: float
    n_samples: int
    effective_sample_size: float
    samples_with_curves: int
    box: SamplerBox


def estimate_average_count(
    max_length: float,
    n_samples: int,
    seed: int,
    box: SamplerBox = None,
    batches: int = 16,
    threads: int = 1,
    ess_floor: float = 0.1,
    depth_cap: int = None,
    stream_offset: int = 0,
) -> AverageCountEstimate:
    """Estimate the moduli-space integral of the short-slope count.

    Samples the box uniformly, weights each surface by 1/(number of its
    lifts in the box) so the estimate is an unbiased moduli integral, and
    reports batch-mean errors over ``batches`` counter-seeded streams
    (stream_offset shifts the stream index so several runs under one seed
    stay independent).  Identical results for identical seeds regardless
    of ``threads``.
    """
    if max_length <= 0:
        raise ValueError("length bound must be positive")
    if box is None:
        box = default_box(max_length)
    per = max(1, n_samples // batches)
    actual = per * batches
    enum_to = max(max_length, box.l_hi)
    jobs = [(seed, stream_offset + i, per, box, max_length, enum_to, depth_cap)
            for i in range(batches)]
    if threads and threads > 1:
        with futures.ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_count_batch, jobs))
    else:
        results = [_count_batch(j) for j in jobs]
    means = np.array([box.area * acc / per for acc, _, _, _ in results])
    wsum = sum(r[1] for r in results)
    w2sum = sum(r[2] for r in results)
    hits = sum(r[3] for r in results)
    ess = wsum * wsum / w2sum if w2sum > 0 else 0.0
    if ess < ess_floor * actual:
        raise SamplerDegenerate(
            f"effective sample size {ess:.1f} below {ess_floor:.0%} of {actual}"
        )
    estimate = float(means.mean())
    stderr = float(means.std(ddof=1) / math.sqrt(batches))
    predicted = unfolded_volume(max_length, torus_unfolding_spec())
    return AverageCountEstimate(
        max_length=max_length,
        integral_estimate=estimate,
        stderr=stderr,
        predicted=predicted,
        kappa=estimate / predicted,
        kappa_stderr=stderr / predicted,
        n_samples=actual,
        effective_sample_size=float(ess),
        samples_with_curves=hits,
        box=box,
    )


def estimate_moduli_integral(
    fn,
    n_samples: int,
    seed: int,
    box: SamplerBox,
    batches: int = 16,
    ess_floor: float = 0.1,
):
    """Importance-weighted moduli average of an arbitrary chart functional.

    ``fn`` receives the fundamental-domain MarkovChart of each sample.
    Returns (integral estimate, batch-mean stderr, effective sample size,
    per-sample values in stream order).  Serial; meant for diagnostics at
    test scale.
    """
    per = max(1, n_samples // batches)
    trace_lo = 2.0 * math.cosh(0.5 * box.l_lo)
    trace_hi = 2.0 * math.cosh(0.5 * box.l_hi)
    means = []
    wsum = w2sum = 0.0
    values = []
    for index in range(batches):
        rng = np.random.Generator(np.random.Philox(key=[seed, index]))
        ls = box.l_hi - rng.uniform(0.0, box.l_hi - box.l_lo, per)
        taus = rng.uniform(box.tau_lo, box.tau_hi, per)
        acc = 0.0
        for l, tau in zip(ls, taus):
            xr, yr, zr, mirrored = _reduce_triple(*_fn_triple(l, tau))
            recs = []
            _ball_walk(xr, yr, zr, box.l_hi,
                       lambda p, q, tc, th, tl: recs.append((tc, th, tl)))
            m = _lift_count(recs, box, trace_lo, trace_hi, mirrored)
            w = 1.0 / m
            wsum += w
            w2sum += w * w
            term = fn(MarkovChart(xr, yr, zr)) * w
            values.append(box.area * term)
            acc += term
        means.append(box.area * acc / per)
    ess = wsum * wsum / w2sum if w2sum > 0 else 0.0
    if ess < ess_floor * per * batches:
        raise SamplerDegenerate(
            f"effective sample size {ess:.1f} below {ess_floor:.0%} of {per * batches}"
        )
    means = np.array(means)
    return (
        float(means.mean()),
        float(means.std(ddof=1) / math.sqrt(batches)),
        float(ess),
        values,
    )


# ---------------------------------------------------------------------------
# Coarea checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoareaCheckReport:
    """Both sides of the h = 1 coarea identity for a built-in test map."""

    map_label: str
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    jacobian_values: tuple
    fiber_areas: tuple


def _batch_stats(values, batches):
    chunks = np.array_split(np.asarray(values, dtype=float), batches)
    means = np.array([c.mean() for c in chunks])
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(batches))


def coarea_check(map_name: str, n_samples: int, seed: int,
                 batches: int = 16) -> CoareaCheckReport:
    """Monte-Carlo both sides of integral(fiber area) = integral(Jacobian).

    Built-in maps: "projection" (unit square onto an axis, Jf = 1),
    "radius" (unit disk onto [0,1], Jf = 1 away from the critical origin)
    and "square_radius" (squared radius, Jf = 2r, a genuine smooth critical
    point at the origin contributing zero).
    """
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    if map_name == "projection":
        # LHS: fibers are unit segments, measured by sampling unit-speed
        # parametrizations; RHS: Jf = 1 over the unit square.
        cs = rng.uniform(0.0, 1.0, n_samples)
        fiber = np.ones_like(cs)
        xy = rng.uniform(0.0, 1.0, (n_samples, 2))
        jac = np.ones(xy.shape[0])
        rhs_vals = jac * 1.0
    elif map_name == "radius":
        cs = rng.uniform(0.0, 1.0, n_samples)
        thetas = rng.uniform(0.0, 2.0 * math.pi, n_samples)
        fiber = 2.0 * math.pi * cs * np.ones_like(thetas)  # speed = radius
        pts = rng.uniform(-1.0, 1.0, (n_samples, 2))
        r = np.hypot(pts[:, 0], pts[:, 1])
        jac = np.where(r > 0.0, 1.0, 0.0)
        rhs_vals = 4.0 * np.where(r <= 1.0, jac, 0.0)
    elif map_name == "square_radius":
        cs = rng.uniform(0.0, 1.0, n_samples)
        fiber = 2.0 * math.pi * np.sqrt(cs)
        pts = rng.uniform(-1.0, 1.0, (n_samples, 2))
        r = np.hypot(pts[:, 0], pts[:, 1])
        jac = 2.0 * r
        rhs_vals = 4.0 * np.where(r <= 1.0, jac, 0.0)
    else:
        raise ValueError(f"unknown coarea test map {map_name!r}")
    lhs, lhs_err = _batch_stats(fiber, batches)
    rhs, rhs_err = _batch_stats(rhs_vals, batches)
    return CoareaCheckReport(
        map_label=map_name,
        lhs=lhs,
        lhs_stderr=lhs_err,
        rhs=rhs,
        rhs_stderr=rhs_err,
        jacobian_values=tuple(np.round(jac[:16], 12)),
        fiber_areas=tuple(np.round(fiber[:16], 12)),
    )
