"""Exception types shared across the package.

Every failure mode that callers are expected to catch gets its own class so
that tests and the CLI can distinguish bad input (surface does not define a
hyperbolic cone metric), geometric degeneracies (coincident fixed points,
unflippable quadrilaterals) and numerical walls (cone angle too close to a
multiple of 2*pi for the bivector formula to be evaluated).
"""


class HypconeError(Exception):
    """Base class for all package-specific errors."""


# --- surface combinatorics / metric validation ------------------------------

class NonManifold(HypconeError):
    """An edge id does not appear exactly twice with opposite directions."""


class Disconnected(HypconeError):
    """The triangles do not form a connected surface."""


class TriangleInequality(HypconeError):
    """A triangle's side lengths violate a strict triangle inequality."""


class NonPositiveLength(HypconeError):
    """An edge length is zero, negative, or not finite."""


class NotAdmissible(HypconeError):
    """The cone angles are not realizable by a hyperbolic metric (chi >= 0)."""


class OutOfRange(HypconeError):
    """A numeric argument lies outside the domain of the requested formula."""


class DimensionMismatch(HypconeError):
    """A vector argument has the wrong number of entries."""


# --- 2x2 matrix arithmetic ---------------------------------------------------

class NoBranch(HypconeError):
    """The requested matrix logarithm branch does not exist."""


class NotSemisimple(HypconeError):
    """Axis data requested for a parabolic or identity element."""


class NotElliptic(HypconeError):
    """An operation requiring an elliptic element received something else."""


class NotHyperbolic(HypconeError):
    """An operation requiring a hyperbolic element received something else."""


class CoincidentFixedPoints(HypconeError):
    """Two elliptic elements share a fixed point, so no axis joins them."""


class DegenerateDirection(HypconeError):
    """A perturbation formula was asked to divide by a null direction."""


class NoSolution(HypconeError):
    """A root-finding problem has no solution on the admissible branch."""


# --- developing map / bivector evaluation ------------------------------------

class NumericalCollapse(HypconeError):
    """A developed triangle degenerated below resolvable size."""


class WallAngle(HypconeError):
    """A cone angle sits too close to 2*pi*k for the requested operation."""


# --- Delaunay flips -----------------------------------------------------------

class UnflippableConfiguration(HypconeError):
    """The quadrilateral around an edge cannot be flipped isometrically."""


class NonTermination(HypconeError):
    """The flip loop exceeded its iteration budget."""
