"""Curve counting on hyperbolic surfaces through Dehn-coordinate lattices.

Core pipelines: exact geodesic enumeration on the once-punctured torus,
Riemann-sum Thurston measures and orbit densities on coordinate lattices,
power-law fits of counting functions, and Monte-Carlo verification of the
moduli-space unfolding identity.
"""

__version__ = "0.1.0"

from .counting import (
    DehnLattice,
    FitResult,
    MeasureEstimate,
    OrbitCensus,
    TorusPlane,
    extrapolate,
    fit_power_law,
    lambda_series,
    lambda_t,
    mu_series,
    mu_t,
    sandwich_lambda,
)
from .lengths import (
    L1Length,
    LengthFunction,
    QuasiConstants,
    ScaledL1,
    ball_bounding_radius,
    estimate_quasi_constants,
    l1_length,
)
from .surfaces import (
    CoordinateSpace,
    MulticurveCoords,
    SurfaceSignature,
    add,
    dimension,
    moduli_dimension,
    scale,
    validate_multicurve,
)
from .torus import (
    FNChart,
    MarkovChart,
    SimpleCurveRecord,
    Slope,
    TorusHyperbolicLength,
    count_multicurves,
    count_simple,
    enumerate_simple,
    fn_from_markov,
    fn_to_markov,
    fricke_matrices,
    markov_reduce,
    matrix_slope_trace,
    mcg_apply,
    slope_length,
    slope_trace,
    transport_chart,
)
from .unfolding import (
    AverageCountEstimate,
    CoareaCheckReport,
    SamplerBox,
    UnfoldingSpec,
    coarea_check,
    estimate_average_count,
    projection_jacobian,
    torus_unfolding_spec,
    unfolded_volume,
)
