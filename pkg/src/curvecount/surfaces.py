"""Surface signatures and the integer Dehn-coordinate model of multicurves.

A multicurve on a surface with a fixed pants decomposition is encoded by one
twist integer and one even nonnegative intersection number per pants curve.
The coordinate cone is R^k x R+^k (twists first); multicurves are the lattice
points, with the convention that a component disjoint from all pants curves
(intersection number 0) twists a nonnegative number of times, so that
coordinate vectors biject with multicurves.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidMulticurve, NonHyperbolic, SpaceMismatch

ODD_INTERSECTION = "odd_intersection"
NEGATIVE_INTERSECTION = "negative_intersection"
NEGATIVE_TWIST_AT_ZERO = "negative_twist_at_zero"


def moduli_dimension(genus, cusps=0, boundary=0):
    """Dimension 6g - 6 + 2c + 2p of the measured-lamination cone.

    Raises NonHyperbolic when the signature admits no hyperbolic structure
    with a positive-dimensional deformation space (dimension < 2 or
    Euler characteristic >= 0).
    """
    d = 6 * genus - 6 + 2 * cusps + 2 * boundary
    chi = 2 - 2 * genus - cusps - boundary
    if d < 2 or chi >= 0:
        raise NonHyperbolic(
            f"signature (g={genus}, c={cusps}, p={boundary}) is not hyperbolic "
            f"(dim={d}, chi={chi})"
        )
    return d


@dataclass(frozen=True)
class SurfaceSignature:
    """Topological type: genus, cusp count, boundary (perforation) count.

    Cusps and perforations contribute identically to the dimension formula
    but are kept as separate fields.  Any signature with negative Euler
    characteristic is representable (a pair of pants shows up as a cut
    surface); asking for its coordinate-cone dimension raises when the
    deformation space is a point.
    """

    genus: int
    cusps: int = 0
    boundary: int = 0

    def __post_init__(self):
        for name in ("genus", "cusps", "boundary"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        chi = 2 - 2 * self.genus - self.cusps - self.boundary
        if chi >= 0:
            raise NonHyperbolic(
                f"signature (g={self.genus}, c={self.cusps}, p={self.boundary}) "
                f"has chi={chi} >= 0"
            )

    @property
    def dimension(self):
        return moduli_dimension(self.genus, self.cusps, self.boundary)


def dimension(signature: SurfaceSignature) -> int:
    """Dimension of ML(S) for a validated signature."""
    return signature.dimension


@dataclass(frozen=True)
class CoordinateSpace:
    """Dehn-coordinate cone R^k x R+^k attached to a signature.

    Only k and the dimension are load-bearing; which curves bound which
    pants is opaque metadata as far as the implemented length functions
    are concerned.
    """

    signature: SurfaceSignature
    pants_curves: int
    dimension: int

    @classmethod
    def for_signature(cls, signature: SurfaceSignature) -> "CoordinateSpace":
        d = signature.dimension
        return cls(signature=signature, pants_curves=d // 2, dimension=d)

    def __post_init__(self):
        if self.dimension != 2 * self.pants_curves:
            raise ValueError("dimension must equal twice the pants-curve count")


@dataclass(frozen=True)
class MulticurveCoords:
    """Integer Dehn coordinates: twists t_i and intersection numbers m_i."""

    twists: tuple
    intersections: tuple

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(int(v) for v in self.twists))
        object.__setattr__(
            self, "intersections", tuple(int(v) for v in self.intersections)
        )
        if len(self.twists) != len(self.intersections):
            raise SpaceMismatch("twist and intersection vectors differ in length")

    @classmethod
    def zero(cls, k: int) -> "MulticurveCoords":
        """The empty multicurve."""
        return cls((0,) * k, (0,) * k)

    @property
    def k(self) -> int:
        return len(self.twists)

    @property
    def is_zero(self) -> bool:
        return not any(self.twists) and not any(self.intersections)

    def vector(self) -> np.ndarray:
        """Concatenated (twists, intersections) as a float vector."""
        return np.asarray(self.twists + self.intersections, dtype=float)


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int

    def __str__(self):
        return f"{self.kind}[{self.index}]"


def validate_multicurve(space: CoordinateSpace, x: MulticurveCoords):
    """Check the lattice conventions; return a list of violations (empty = ok).

    Violations: odd or negative intersection numbers, and a negative twist on
    a coordinate whose intersection number vanishes.
    """
    if x.k != space.pants_curves:
        raise SpaceMismatch(
            f"vector has {x.k} coordinates, space has {space.pants_curves}"
        )
    report = []
    for i, (t, m) in enumerate(zip(x.twists, x.intersections)):
        if m < 0:
            report.append(Violation(NEGATIVE_INTERSECTION, i))
        elif m % 2 != 0:
            report.append(Violation(ODD_INTERSECTION, i))
        elif m == 0 and t < 0:
            report.append(Violation(NEGATIVE_TWIST_AT_ZERO, i))
    return report


def require_valid(space: CoordinateSpace, x: MulticurveCoords) -> MulticurveCoords:
    report = validate_multicurve(space, x)
    if report:
        raise InvalidMulticurve(report)
    return x


def scale(x: MulticurveCoords, n: int) -> MulticurveCoords:
    """Coordinatewise multiple n*x for a positive integer n."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"scale factor must be a positive integer, got {n!r}")
    return MulticurveCoords(
        tuple(n * t for t in x.twists), tuple(n * m for m in x.intersections)
    )


def add(space: CoordinateSpace, x: MulticurveCoords, y: MulticurveCoords):
    """Coordinatewise sum of two valid multicurves.

    The sum of valid vectors is automatically valid (evenness and the
    zero-intersection twist convention are preserved); invalid inputs are
    rejected so normalization errors surface at the source.
    """
    if x.k != y.k:
        raise SpaceMismatch(f"operand sizes {x.k} and {y.k} differ")
    require_valid(space, x)
    require_valid(space, y)
    return MulticurveCoords(
        tuple(a + b for a, b in zip(x.twists, y.twists)),
        tuple(a + b for a, b in zip(x.intersections, y.intersections)),
    )
