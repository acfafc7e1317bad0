"""Exact hyperbolic geometry of the once-punctured torus.

A complete hyperbolic structure with one cusp is recorded as the trace
triple (x, y, z) of the holonomies of the slopes (1,0), (0,1), (1,1).
The cusp forces the commutator trace to be -2, which by the Fricke
identity is exactly the Markov cubic

    x^2 + y^2 + z^2 = x*y*z.

Simple closed curves are slopes (primitive integer pairs); their traces
follow the vertex recursion t(a+b) = t(a)*t(b) - t(a-b) down the
Stern-Brocot tree, and geodesic length is 2*arccosh(trace/2).  Everything
else in the module (enumeration of short slopes, SL(2,Z) action, reduction
to a fundamental-domain triple, Fenchel-Nielsen conversion) is built on
those two facts.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DepthCapExceeded,
    InvalidChart,
    NonConvergent,
    NonHyperbolicTrace,
    NonPositiveLength,
    NotUnimodular,
)
from .lengths import LengthFunction, l1_length

# Traces this close to 2 are treated as parabolic: not a closed geodesic,
# and not a usable chart coordinate.
PARABOLIC_TOL = 1e-12
CUBIC_RTOL = 1e-9


@dataclass(frozen=True)
class Slope:
    """Primitive pair (p, q) in canonical form: q > 0, or (p, q) = (1, 0)."""

    p: int
    q: int

    def __post_init__(self):
        if math.gcd(abs(self.p), abs(self.q)) != 1:
            raise ValueError(f"({self.p}, {self.q}) is not primitive")
        if self.q < 0 or (self.q == 0 and self.p != 1):
            raise ValueError(f"({self.p}, {self.q}) is not in canonical form")

    @classmethod
    def from_vector(cls, p: int, q: int) -> "Slope":
        """Canonical slope of any nonzero primitive integer vector."""
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)


@dataclass(frozen=True)
class MarkovChart:
    """Trace triple (x, y, z) of slopes (1,0), (0,1), (1,1) on the cubic.

    Entries must exceed 2 (hyperbolic holonomy; genuine structures near a
    pinched curve have an entry barely above 2) and the triple must satisfy
    the Markov cubic to 1e-9 relative.
    """

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (v > 2.0 + PARABOLIC_TOL) or not math.isfinite(v):
                raise InvalidChart(f"trace {name}={v} is not hyperbolic (> 2)")
        s = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(s - self.x * self.y * self.z) > CUBIC_RTOL * s:
            raise InvalidChart(
                f"triple ({self.x}, {self.y}, {self.z}) is off the Markov cubic "
                f"(relative residual {abs(s - self.x * self.y * self.z) / s:.3e})"
            )

    def triple(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class FNChart:
    """Fenchel-Nielsen chart: length and twist along the (1,0) pants curve."""

    length: float
    twist: float

    def __post_init__(self):
        if not (self.length > 0.0) or not math.isfinite(self.length):
            raise NonPositiveLength(f"pants-curve length must be > 0, got {self.length}")


@dataclass(frozen=True)
class SimpleCurveRecord:
    """A simple closed geodesic: slope, holonomy trace, length."""

    slope: Slope
    trace: float
    length: float


def trace_to_length(trace: float) -> float:
    """Geodesic length 2*arccosh(trace/2); rejects non-hyperbolic traces."""
    if trace < 2.0 + PARABOLIC_TOL:
        raise NonHyperbolicTrace(f"trace {trace} is not that of a closed geodesic")
    return 2.0 * math.acosh(0.5 * trace)


# ---------------------------------------------------------------------------
# Fenchel-Nielsen <-> trace coordinates
#
# Generator A is diagonal with eigenvalue e^{l/2}.  The transverse generator
# at twist 0 is the symmetric hyperbolic element with a*d = coth^2(l/2),
# which is the unique normalization making tr[A, B] = -2.  Twisting by tau
# composes B with translation by tau along the axis of A:
#
#   x(l)      = 2 cosh(l/2)
#   y(l, tau) = 2 coth(l/2) cosh(tau/2)
#   z(l, tau) = 2 coth(l/2) cosh((tau + l)/2)
#
# tau = 0 is the minimal-y point where z is the double root x*y/2; the full
# twist tau -> tau + l lands on the Dehn-twisted (hence equivalent) chart.
# ---------------------------------------------------------------------------


def fn_holonomy(fn: FNChart):
    """Explicit SL(2,R) holonomy pair (A, B) for a Fenchel-Nielsen chart."""
    half = 0.5 * fn.length
    lam = math.exp(half)
    u = 1.0 / math.tanh(half) ** 2
    sa, sb = math.sqrt(u), math.sqrt(u - 1.0)
    e = math.exp(0.5 * fn.twist)
    A = np.array([[lam, 0.0], [0.0, 1.0 / lam]])
    B = np.array([[e * sa, e * sb], [sb / e, sa / e]])
    return A, B


def fn_to_markov(fn: FNChart) -> MarkovChart:
    """Trace triple of the Fenchel-Nielsen chart (closed form, no matrices)."""
    half = 0.5 * fn.length
    x = 2.0 * math.cosh(half)
    c = 1.0 / math.tanh(half)
    y = 2.0 * c * math.cosh(0.5 * fn.twist)
    z = 2.0 * c * math.cosh(0.5 * (fn.twist + fn.length))
    return MarkovChart(x, y, z)


def _fn_from_triple(x: float, y: float, z: float):
    """Invert the chart formulas on a raw basis triple; returns (l, tau)."""
    length = 2.0 * math.acosh(0.5 * x)
    r = 2.0 * x / math.sqrt(x * x - 4.0)  # 2*coth(l/2)
    ratio = y / r
    t = 2.0 * math.acosh(ratio) if ratio > 1.0 else 0.0
    zp = r * math.cosh(0.5 * (t + length))
    zm = r * math.cosh(0.5 * (length - t))
    tau = t if abs(zp - z) <= abs(zm - z) else -t
    return length, tau


def fn_from_markov(chart: MarkovChart) -> FNChart:
    """Fenchel-Nielsen coordinates of a chart in the (1,0) marking."""
    length, tau = _fn_from_triple(chart.x, chart.y, chart.z)
    return FNChart(length, tau)


def fricke_matrices(chart: MarkovChart):
    """Any SL(2,R) pair realizing the trace triple.

    A = [[x, -1], [1, 0]] and B = [[0, zeta], [-1/zeta, y]] with
    zeta + 1/zeta = z.  Traces of words depend on the triple only, so this
    pair backs the independent matrix-product oracle for slope traces.
    """
    x, y, z = chart.triple()
    zeta = 0.5 * (z + math.sqrt(z * z - 4.0))
    A = np.array([[x, -1.0], [1.0, 0.0]])
    B = np.array([[0.0, zeta], [-1.0 / zeta, y]])
    return A, B


# ---------------------------------------------------------------------------
# Slope traces
#
# The Farey interval descent: maintain neighbor slopes lo < hi containing the
# target, plus the trace of the third triangle vertex behind the (lo, hi)
# edge.  The mediant's trace is t_lo * t_hi - t_back, and the mediant
# replaces one endpoint.  Slopes p/q > 0 start from (0/1, 1/0) with the
# back-vertex -1 of trace x*y - z; slopes p/q < 0 start from (-1/0, 0/1)
# with back-vertex +1 of trace z.
# ---------------------------------------------------------------------------


def slope_trace(slope: Slope, chart: MarkovChart) -> float:
    """Holonomy trace of a slope via the vertex recursion."""
    x, y, z = chart.triple()
    p, q = slope.p, slope.q
    if q == 0:
        return x
    if (p, q) == (0, 1):
        return y
    if p > 0:
        plo, qlo, tlo, phi, qhi, thi, tback = 0, 1, y, 1, 0, x, x * y - z
    else:
        plo, qlo, tlo, phi, qhi, thi, tback = -1, 0, x, 0, 1, y, z
    while True:
        pc, qc = plo + phi, qlo + qhi
        tc = tlo * thi - tback
        if pc == p and qc == q:
            return tc
        if p * qc - q * pc < 0:  # target below the mediant: descend left
            phi, qhi, thi, tback = pc, qc, tc, thi
        else:
            plo, qlo, tlo, tback = pc, qc, tc, tlo


def matrix_slope_trace(slope: Slope, chart: MarkovChart) -> float:
    """Slope trace by explicit matrix word products (the oracle route).

    Walks the same Farey path but concatenates holonomy matrices
    (mediant word = hi-word * lo-word) instead of using trace identities;
    negative slopes substitute A^{-1} for A.
    """
    A, B = fricke_matrices(chart)
    p, q = slope.p, slope.q
    if q == 0:
        return abs(float(np.trace(A)))
    if (p, q) == (0, 1):
        return abs(float(np.trace(B)))
    Ainv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]])
    if p > 0:
        plo, qlo, Wlo, phi, qhi, Whi = 0, 1, B, 1, 0, A
    else:
        plo, qlo, Wlo, phi, qhi, Whi = -1, 0, Ainv, 0, 1, B
    while True:
        pc, qc = plo + phi, qlo + qhi
        Wc = Whi @ Wlo
        if pc == p and qc == q:
            return abs(float(np.trace(Wc)))
        if p * qc - q * pc < 0:
            phi, qhi, Whi = pc, qc, Wc
        else:
            plo, qlo, Wlo = pc, qc, Wc


def slope_length(slope: Slope, chart: MarkovChart) -> float:
    """Geodesic length 2*arccosh(trace/2) of a slope."""
    return trace_to_length(slope_trace(slope, chart))


_LOG_SWITCH = 1e100


def _stable_slope_length(p: int, q: int, x: float, y: float, z: float) -> float:
    """Slope length robust to trace overflow.

    Runs the plain trace recursion until values threaten double range, then
    continues in log domain: log t_c = log t_lo + log t_hi +
    log1p(-t_back/(t_lo t_hi)).  Once traces are that large the descent is
    certified increasing, so the correction term is minuscule and the log
    recursion is stable.  Lets the plane length function evaluate rational
    directions whose primitive representative is astronomically long.
    """
    if q == 0:
        return trace_to_length(x)
    if (p, q) == (0, 1):
        return trace_to_length(y)
    if p > 0:
        plo, qlo, tlo, phi, qhi, thi, tback = 0, 1, y, 1, 0, x, x * y - z
    else:
        plo, qlo, tlo, phi, qhi, thi, tback = -1, 0, x, 0, 1, y, z
    logs = False
    while True:
        pc, qc = plo + phi, qlo + qhi
        if logs:
            tc = tlo + thi + math.log1p(-math.exp(tback - tlo - thi))
        else:
            tc = tlo * thi - tback
            if tc > _LOG_SWITCH:
                tlo, thi = math.log(tlo), math.log(thi)
                tback = math.log(tback) if tback > 0 else -math.inf
                tc = tlo + thi + math.log1p(-math.exp(tback - tlo - thi))
                logs = True
        if pc == p and qc == q:
            if not logs:
                return trace_to_length(tc)
            # 2*arccosh(e^u / 2) = 2(u - log 2) up to e^{-2u} corrections
            return 2.0 * (tc - math.log(2.0))
        if p * qc - q * pc < 0:
            phi, qhi, thi, tback = pc, qc, tc, thi
        else:
            plo, qlo, tlo, tback = pc, qc, tc, tlo


# ---------------------------------------------------------------------------
# Enumeration of short slopes
# ---------------------------------------------------------------------------


def default_depth_cap(max_length: float) -> int:
    return int(64 * (1 + max_length))


def _ball_walk(x, y, z, max_length: float, record, depth_cap=None):
    """Depth-first walk over both Farey half-trees up to a trace threshold.

    ``record(p, q, tc, thi, tlo)`` is called once per slope with trace
    <= 2*cosh(max_length/2).  The extra traces thi, tlo are those of the
    interval endpoints at the moment the slope is created; (slope, -hi)
    is a positively oriented basis with third vertex lo, so
    (tc, thi, tlo) is the trace triple of the chart re-marked to make the
    recorded slope the (1,0) pants curve.

    A subtree is pruned when its entry trace exceeds the threshold and
    also exceeds both parent traces: parents above 2 then force strictly
    increasing traces down every deeper branch, so nothing short is lost.
    The descent may pass through trace values above the threshold while
    they are still decreasing (heavily twisted charts); the depth cap
    converts a runaway descent, which no valid chart produces, into a
    diagnostic instead of a wrong answer.
    """
    if not (max_length > 0.0):
        raise ValueError("max_length must be positive")
    if max_length > 1400.0:
        raise ValueError("max_length too large for double-precision traces")
    if depth_cap is None:
        depth_cap = default_depth_cap(max_length)
    tmax = 2.0 * math.cosh(0.5 * max_length)
    w = x * y - z
    if x <= tmax:
        record(1, 0, x, y, z)
    if y <= tmax:
        record(0, 1, y, x, w)
    # (plo,qlo,tlo, phi,qhi,thi, tback, depth): right half then left half
    stack = [
        (0, 1, y, 1, 0, x, w, 0),
        (-1, 0, x, 0, 1, y, z, 0),
    ]
    while stack:
        plo, qlo, tlo, phi, qhi, thi, tback, depth = stack.pop()
        tc = tlo * thi - tback
        if tc > tmax:
            if tc > tlo and tc > thi:
                continue
        else:
            record(plo + phi, qlo + qhi, tc, thi, tlo)
        if depth >= depth_cap:
            raise DepthCapExceeded(
                f"slope enumeration exceeded depth {depth_cap} at length bound "
                f"{max_length}; chart may be numerically corrupt"
            )
        pc, qc = plo + phi, qlo + qhi
        stack.append((plo, qlo, tlo, pc, qc, tc, thi, depth + 1))
        stack.append((pc, qc, tc, phi, qhi, thi, tlo, depth + 1))


def enumerate_simple(chart: MarkovChart, max_length: float, depth_cap=None):
    """All simple closed geodesics of length <= max_length, one per slope.

    Deterministic output, ordered by (length, p, q).
    """
    out = []

    def record(p, q, tc, _thi, _tlo):
        out.append(SimpleCurveRecord(Slope(p, q), tc, trace_to_length(tc)))

    _ball_walk(*chart.triple(), max_length, record, depth_cap)
    out.sort(key=lambda r: (r.length, r.slope.p, r.slope.q))
    return out


def ball_slope_lengths(chart: MarkovChart, max_length: float, depth_cap=None):
    """Lengths of all slopes with length <= max_length, as a sorted array."""
    lens = []

    def record(_p, _q, tc, _thi, _tlo):
        lens.append(2.0 * math.acosh(0.5 * tc))

    _ball_walk(*chart.triple(), max_length, record, depth_cap)
    lens.sort()
    return np.asarray(lens, dtype=float)


def ball_basis_triples(chart: MarkovChart, max_length: float, depth_cap=None):
    """Per short slope, the chart's trace triple re-marked at that slope.

    Returns a list of (t_slope, t_second, t_third): the traces of the image
    basis when the slope is carried to (1,0) by an orientation-preserving
    mapping class.  Feeding a triple to the Fenchel-Nielsen inversion yields
    the (length, twist) coordinates of this surface marked at that slope,
    which is how moduli-space lift counting is done.
    """
    out = []

    def record(_p, _q, tc, thi, tlo):
        out.append((tc, thi, tlo))

    _ball_walk(*chart.triple(), max_length, record, depth_cap)
    return out


def count_simple(chart: MarkovChart, max_length: float, depth_cap=None) -> int:
    """Number of simple closed geodesics of length <= max_length."""
    n = 0

    def record(*_):
        nonlocal n
        n += 1

    _ball_walk(*chart.triple(), max_length, record, depth_cap)
    return n


def count_multicurves(chart: MarkovChart, max_length: float, depth_cap=None) -> int:
    """Number of multicurves of length <= max_length.

    On the torus every multicurve is an integer multiple of a single slope,
    so this is sum over short slopes of floor(max_length / length).
    """
    lens = ball_slope_lengths(chart, max_length, depth_cap)
    if lens.size == 0:
        return 0
    return int(np.floor(max_length / lens).sum())


# ---------------------------------------------------------------------------
# Mapping-class action and fundamental-domain reduction
# ---------------------------------------------------------------------------


def mcg_apply(g, slope: Slope) -> Slope:
    """Image of a slope under an integer matrix with determinant +-1."""
    (a, b), (c, d) = (int(g[0][0]), int(g[0][1])), (int(g[1][0]), int(g[1][1]))
    det = a * d - b * c
    if det not in (1, -1):
        raise NotUnimodular(f"determinant {det}")
    return Slope.from_vector(a * slope.p + b * slope.q, c * slope.p + d * slope.q)


def transport_chart(g, chart: MarkovChart) -> MarkovChart:
    """Chart relabeled by a mapping class: traces of the image basis slopes."""
    (a, b), (c, d) = (int(g[0][0]), int(g[0][1])), (int(g[1][0]), int(g[1][1]))
    det = a * d - b * c
    if det not in (1, -1):
        raise NotUnimodular(f"determinant {det}")
    e1 = mcg_apply(g, Slope(1, 0))
    e2 = mcg_apply(g, Slope(0, 1))
    e3 = Slope.from_vector(a + b, c + d)
    return MarkovChart(
        slope_trace(e1, chart), slope_trace(e2, chart), slope_trace(e3, chart)
    )


def _sort3(x, y, z, flip):
    if x > y:
        x, y, flip = y, x, not flip
    if y > z:
        y, z, flip = z, y, not flip
    if x > y:
        x, y, flip = y, x, not flip
    return x, y, z, flip


def _reduce_triple(x: float, y: float, z: float, max_steps: int = 10**6):
    """Exchange-move descent to the minimal sorted triple.

    Repeatedly replaces the largest entry z by the conjugate root x*y - z
    while that strictly decreases it, re-sorting each time.  The exchange
    preserves the cubic exactly in algebra; strict descent bounds the step
    count for any genuine chart, and the cap turns float corruption into a
    diagnostic.

    Returns (x, y, z, mirrored).  Transposing two entries and exchanging a
    root are both orientation-reversing relabelings, so the output triple
    marks either the input surface or its mirror image; ``mirrored`` says
    which, which matters to anything reading twist coordinates off the
    reduced marking (lengths and counts are mirror-blind).
    """
    x, y, z, flip = _sort3(x, y, z, False)
    steps = 0
    while True:
        zp = x * y - z
        if not zp < z:
            return x, y, z, flip
        steps += 1
        if steps > max_steps:
            raise NonConvergent(f"triple reduction exceeded {max_steps} exchange moves")
        x, y, z, flip = _sort3(x, y, zp, not flip)


def markov_reduce(chart: MarkovChart, max_steps: int = 10**6) -> MarkovChart:
    """Fundamental-domain representative of a chart under the MCG action.

    The representative is unique up to mirror symmetry, which trace
    coordinates cannot see; lengths and counts are unaffected.
    """
    x, y, z, _ = _reduce_triple(chart.x, chart.y, chart.z, max_steps)
    return MarkovChart(x, y, z)


class TorusHyperbolicLength(LengthFunction):
    """Hyperbolic length on the (p, q) coordinate plane of the torus.

    A vector s*(p, q) with (p, q) primitive has length s times the geodesic
    length of the slope, which makes the function linear on rays by
    construction and subadditive because cut-and-paste shortens curves.
    Evaluation therefore needs the direction to be rational: float inputs
    are snapped to the nearest direction with denominator at most
    ``max_denominator`` and rejected if none matches.  Rational directions
    are dense in the plane and are all the lattice completion ever uses.
    """

    label = "hyperbolic"

    def __init__(self, chart: MarkovChart, max_denominator: int = 10**4):
        self.chart = chart
        self.max_denominator = max_denominator
        self._memo = {}

    def slope_length(self, slope: Slope) -> float:
        key = (slope.p, slope.q)
        v = self._memo.get(key)
        if v is None:
            v = _stable_slope_length(
                slope.p, slope.q, self.chart.x, self.chart.y, self.chart.z
            )
            self._memo[key] = v
        return v

    def __call__(self, v) -> float:
        u, w = float(v[0]), float(v[1])
        if u == 0.0 and w == 0.0:
            return 0.0
        if w < 0.0 or (w == 0.0 and u < 0.0):
            u, w = -u, -w
        if w == 0.0:
            return u * self.slope_length(Slope(1, 0))
        r = (Fraction(u) / Fraction(w)).limit_denominator(self.max_denominator)
        p, q = r.numerator, r.denominator
        s = w / q
        if abs(u - s * p) > 1e-9 * (abs(u) + abs(w)):
            raise ValueError(
                f"({u}, {w}) is not a scaled lattice direction with denominator "
                f"<= {self.max_denominator}"
            )
        return s * self.slope_length(Slope(p, q))

    def l1_ratio(self, v) -> float:
        """L(v) / L1(v), the pointwise quasi-comparison ratio."""
        return self(v) / l1_length(v)
