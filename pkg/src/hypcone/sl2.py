"""Projective SL(2,R) arithmetic and upper half-plane geometry.

Group elements are unit-determinant real 2x2 matrices taken up to sign; the
traceless matrices form their Lie algebra.  The exponential and logarithm are
evaluated in closed form through the Cayley-Hamilton relation X^2 = -det(X) I,
so every branch choice is explicit:

* elliptic logs are "counterclockwise": the returned generator is a positive
  multiple of a conjugate of E - F, whose Mobius flow rotates counterclockwise
  around its fixed point, and the rotation angle lies in (0, 2*pi);
* hyperbolic logs are the unique real logarithm of the trace-positive
  representative.

The trace form B(X, Y) = tr(XY) has signature (2, 1) on the traceless
matrices.  Normalized axis vectors (B = +2 on translation directions, -2 on
rotation generators) turn hyperbolic trigonometry into linear algebra:
pairings of axis vectors encode distances between fixed points, angles
between crossing axes, and signed distances from points to oriented axes.
The sign convention used throughout: the positive side of an oriented axis is
the half-plane on its LEFT, and the mixed rotation/translation pairing is
+2 sinh(signed distance).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentFixedPoints,
    DegenerateDirection,
    NoBranch,
    NoSolution,
    NotElliptic,
    NotHyperbolic,
    NotSemisimple,
    OutOfRange,
)

# Classification tolerance on |trace| vs 2; see classify().
TRACE_TOL = 1e-9
# Determinant drift allowed before a representative is rescaled.
DET_TOL = 1e-12

ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"
IDENTITY = "identity"


# ---------------------------------------------------------------------------
# points of the upper half-plane
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypPoint:
    """A point x + iy of the upper half-plane (y > 0)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and self.y > 0.0):
            raise OutOfRange(f"({self.x}, {self.y}) is not in the upper half-plane")

    @classmethod
    def from_complex(cls, z) -> "HypPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def hyp_distance(p: HypPoint, q: HypPoint) -> float:
    """Distance in the upper half-plane: cosh d = 1 + |p-q|^2 / (2 Im p Im q)."""
    d2 = (p.x - q.x) ** 2 + (p.y - q.y) ** 2
    return math.acosh(max(1.0, 1.0 + d2 / (2.0 * p.y * q.y)))


def hyp_direction(p: HypPoint, q: HypPoint) -> float:
    """Angle of the initial tangent at p of the geodesic from p to q.

    Measured in the conformal chart (0 = toward +x, pi/2 = straight up).
    """
    if p == q:
        raise OutOfRange("direction undefined for coincident points")
    # Send p to the disk origin; diameters through 0 are the geodesics, and
    # the chart rotation between the two models at p is exactly -pi/2.
    zeta = (q.z - p.z) / (q.z - p.z.conjugate())
    return cmath.phase(zeta) + math.pi / 2.0


# ---------------------------------------------------------------------------
# the Lie algebra: traceless real 2x2 matrices
# ---------------------------------------------------------------------------

class Sl2Vector:
    """A traceless real 2x2 matrix."""

    __slots__ = ("mat",)

    def __init__(self, mat):
        arr = np.asarray(mat, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        tr = arr[0, 0] + arr[1, 1]
        scale = max(1.0, float(np.max(np.abs(arr))))
        if abs(tr) > 1e-12 * scale:
            raise ValueError(f"matrix is not traceless (trace {tr})")
        arr = arr.copy()
        half = tr / 2.0
        arr[0, 0] -= half
        arr[1, 1] -= half
        arr.flags.writeable = False
        self.mat = arr

    def __repr__(self):
        a, b, c = self.mat[0, 0], self.mat[0, 1], self.mat[1, 0]
        return f"Sl2Vector([[{a!r}, {b!r}], [{c!r}, {-a!r}]])"

    def __add__(self, other: "Sl2Vector") -> "Sl2Vector":
        return Sl2Vector(self.mat + other.mat)

    def __sub__(self, other: "Sl2Vector") -> "Sl2Vector":
        return Sl2Vector(self.mat - other.mat)

    def __mul__(self, t: float) -> "Sl2Vector":
        return Sl2Vector(self.mat * float(t))

    __rmul__ = __mul__

    def __neg__(self) -> "Sl2Vector":
        return Sl2Vector(-self.mat)

    def bracket(self, other: "Sl2Vector") -> "Sl2Vector":
        """Commutator [self, other]."""
        return Sl2Vector(self.mat @ other.mat - other.mat @ self.mat)

    def det(self) -> float:
        m = self.mat
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def conjugate_by(self, g: "Sl2Matrix") -> "Sl2Vector":
        """Adjoint action g X g^-1."""
        return Sl2Vector(g.mat @ self.mat @ np.linalg.inv(g.mat))


def sl2_basis() -> tuple[Sl2Vector, Sl2Vector, Sl2Vector]:
    """The standard triple (H, E, F): [H,E] = 2E, [H,F] = -2F, [E,F] = H."""
    return (
        Sl2Vector([[1.0, 0.0], [0.0, -1.0]]),
        Sl2Vector([[0.0, 1.0], [0.0, 0.0]]),
        Sl2Vector([[0.0, 0.0], [1.0, 0.0]]),
    )


H_VEC, E_VEC, F_VEC = sl2_basis()


def trace_form(x: Sl2Vector, y: Sl2Vector) -> float:
    """B(X, Y) = tr(XY); signature (2,1) on the traceless matrices."""
    return float(np.trace(x.mat @ y.mat))


def killing_constant(samples: int = 64, seed: int = 7) -> float:
    """Empirical constant c with Killing(X,Y) = c * B(X,Y).

    The Killing form is computed directly from the adjoint representation on
    the basis (H, E, F); the ratio is constant and |c| = 4.  The sign that
    comes out of the computation is +4.
    """
    basis = [v.mat for v in sl2_basis()]

    def ad(xm):
        cols = []
        for bm in basis:
            comm = xm @ bm - bm @ xm
            cols.append([comm[0, 0], comm[0, 1], comm[1, 0]])
        return np.array(cols).T

    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(samples):
        cx = rng.normal(size=3)
        cy = rng.normal(size=3)
        xm = cx[0] * basis[0] + cx[1] * basis[1] + cx[2] * basis[2]
        ym = cy[0] * basis[0] + cy[1] * basis[1] + cy[2] * basis[2]
        b = np.trace(xm @ ym)
        if abs(b) < 1e-3:
            continue
        ratios.append(float(np.trace(ad(xm) @ ad(ym)) / b))
    return float(np.mean(ratios))


# ---------------------------------------------------------------------------
# the group: unit-determinant matrices up to sign
# ---------------------------------------------------------------------------

class Sl2Matrix:
    """A projective unit-determinant 2x2 real matrix.

    The stored representative is canonical: trace >= 0, and for trace 0 the
    (2,1) entry is positive (falling back to the (1,2) entry).  This makes
    logs, classification and printed output deterministic.
    """

    __slots__ = ("mat",)

    def __init__(self, mat):
        arr = np.array(mat, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        det = float(arr[0, 0] * arr[1, 1] - arr[0, 1] * arr[1, 0])
        if not math.isfinite(det) or det <= 0.0:
            raise ValueError(f"matrix determinant {det} is not positive")
        if abs(det - 1.0) > DET_TOL:
            arr /= math.sqrt(det)
        tr = arr[0, 0] + arr[1, 1]
        if tr < 0.0:
            arr = -arr
        elif tr == 0.0:
            if arr[1, 0] < 0.0 or (arr[1, 0] == 0.0 and arr[0, 1] < 0.0):
                arr = -arr
        arr.flags.writeable = False
        self.mat = arr

    @classmethod
    def identity(cls) -> "Sl2Matrix":
        return cls(np.eye(2))

    def __repr__(self):
        a, b, c, d = (self.mat[0, 0], self.mat[0, 1], self.mat[1, 0], self.mat[1, 1])
        return f"Sl2Matrix([[{a!r}, {b!r}], [{c!r}, {d!r}]])"

    def __matmul__(self, other: "Sl2Matrix") -> "Sl2Matrix":
        return Sl2Matrix(self.mat @ other.mat)

    def inverse(self) -> "Sl2Matrix":
        m = self.mat
        return Sl2Matrix([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])

    def trace(self) -> float:
        return float(self.mat[0, 0] + self.mat[1, 1])

    def det(self) -> float:
        m = self.mat
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def apply(self, z):
        """Mobius action on a complex number or HypPoint."""
        if isinstance(z, HypPoint):
            return HypPoint.from_complex(self.apply(z.z))
        m = self.mat
        return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])

    def projectively_close(self, other: "Sl2Matrix", tol: float = 1e-9) -> bool:
        d1 = float(np.max(np.abs(self.mat - other.mat)))
        d2 = float(np.max(np.abs(self.mat + other.mat)))
        return min(d1, d2) <= tol


@dataclass(frozen=True)
class IsometryClass:
    """Classification of a projective element by |trace| against 2.

    `angle` is arccos(tr(M^2)/2) in (0, pi] for an elliptic element (the
    unsigned rotation angle; see elliptic_rotation_angle for the directed
    one), `length` is the translation length arccosh(tr(M^2)/2) for a
    hyperbolic element.
    """

    kind: str
    angle: float | None = None
    length: float | None = None


def classify(m: Sl2Matrix, tol: float = TRACE_TOL) -> IsometryClass:
    """Sort a projective element into elliptic/parabolic/hyperbolic/identity."""
    t = m.trace()  # canonical representative, so t >= 0
    if t <= 2.0 - tol:
        half = min(1.0, max(-1.0, (t * t - 2.0) / 2.0))
        return IsometryClass(ELLIPTIC, angle=math.acos(half))
    if t >= 2.0 + tol:
        return IsometryClass(HYPERBOLIC, length=math.acosh((t * t - 2.0) / 2.0))
    if float(np.max(np.abs(m.mat - np.eye(2)))) <= tol:
        return IsometryClass(IDENTITY)
    return IsometryClass(PARABOLIC)


# ---------------------------------------------------------------------------
# exp and log in closed form
# ---------------------------------------------------------------------------

def sl2_exp(x: Sl2Vector) -> Sl2Matrix:
    """exp(X) via X^2 = -det(X) I.

    With k = det X: exp(X) = c0(k) I + c1(k) X where c0 = cos(sqrt k),
    c1 = sin(sqrt k)/sqrt k for k > 0 and the cosh/sinh analogues for k < 0;
    both are the same analytic series in k, used directly near k = 0.
    """
    k = x.det()
    if abs(k) < 1e-8:
        c0 = 1.0 - k / 2.0 + k * k / 24.0 - k ** 3 / 720.0
        c1 = 1.0 - k / 6.0 + k * k / 120.0 - k ** 3 / 5040.0
    elif k > 0.0:
        w = math.sqrt(k)
        c0 = math.cos(w)
        c1 = math.sin(w) / w
    else:
        w = math.sqrt(-k)
        c0 = math.cosh(w)
        c1 = math.sinh(w) / w
    return Sl2Matrix(c0 * np.eye(2) + c1 * x.mat)


def _elliptic_unit_and_angle(m: Sl2Matrix) -> tuple[np.ndarray, float]:
    """Counterclockwise unit rotation generator u (u^2 = -I) and angle in (0, 2pi)."""
    t = m.trace()
    half = 2.0 * math.acos(min(1.0, max(-1.0, t / 2.0)))  # in (0, pi]
    s = math.sin(half / 2.0)
    u = (m.mat - (t / 2.0) * np.eye(2)) / s
    # u is conjugate to +-(E - F); the counterclockwise sign has negative
    # (2,1) entry (equivalently positive (1,2) entry).
    if u[1, 0] < 0.0:
        return u, half
    return -u, 2.0 * math.pi - half


def elliptic_rotation_angle(m: Sl2Matrix) -> float:
    """Directed (counterclockwise) rotation angle in (0, 2*pi)."""
    if classify(m).kind != ELLIPTIC:
        raise NotElliptic("rotation angle defined for elliptic elements only")
    return _elliptic_unit_and_angle(m)[1]


def sl2_log(m: Sl2Matrix) -> Sl2Vector:
    """Principal logarithm of the canonical representative.

    Elliptic: the minimal-norm counterclockwise branch (nu/2) u with
    nu in (0, 2*pi) and u a unit counterclockwise rotation generator.
    Hyperbolic: the unique real log of the trace-positive representative.
    Parabolic: the nilpotent M - I.  Identity has no distinguished branch.
    """
    cls = classify(m)
    if cls.kind == IDENTITY:
        raise NoBranch("identity has no preferred logarithm branch")
    if cls.kind == PARABOLIC:
        n = m.mat - np.eye(2)
        half = (n[0, 0] + n[1, 1]) / 2.0
        return Sl2Vector(n - half * np.eye(2))
    t = m.trace()
    if cls.kind == HYPERBOLIC:
        ell = 2.0 * math.acosh(t / 2.0)
        v = (m.mat - (t / 2.0) * np.eye(2)) / math.sinh(ell / 2.0)
        return Sl2Vector((ell / 2.0) * v)
    u, nu = _elliptic_unit_and_angle(m)
    return Sl2Vector((nu / 2.0) * u)


def axis_vector(m: Sl2Matrix) -> Sl2Vector:
    """Normalized axis vector L(M) = 2 log(M) / (angle or length).

    B(L, L) = -2 for elliptic (counterclockwise unit rotation generator) and
    +2 for hyperbolic (unit translation direction along the oriented axis).
    """
    cls = classify(m)
    if cls.kind == ELLIPTIC:
        u, _ = _elliptic_unit_and_angle(m)
        return Sl2Vector(u)
    if cls.kind == HYPERBOLIC:
        t = m.trace()
        ell = 2.0 * math.acosh(t / 2.0)
        return Sl2Vector((m.mat - (t / 2.0) * np.eye(2)) / math.sinh(ell / 2.0))
    raise NotSemisimple(f"no axis vector for a {cls.kind} element")


def fixed_point(m: Sl2Matrix) -> HypPoint:
    """The unique fixed point in the upper half-plane of an elliptic element."""
    if classify(m).kind != ELLIPTIC:
        raise NotElliptic("only elliptic elements fix a point of the half-plane")
    a, b, c, d = m.mat[0, 0], m.mat[0, 1], m.mat[1, 0], m.mat[1, 1]
    disc = (a + d) ** 2 - 4.0  # < 0 for elliptic
    root = math.sqrt(-disc)
    return HypPoint((a - d) / (2.0 * c), root / (2.0 * abs(c)))


# ---------------------------------------------------------------------------
# constructing isometries from geometric data
# ---------------------------------------------------------------------------

def _translate_to(p: HypPoint) -> Sl2Matrix:
    """The affine map z -> y z + x taking i to p."""
    r = math.sqrt(p.y)
    return Sl2Matrix([[r, p.x / r], [0.0, 1.0 / r]])


def _rotation_at_i(angle: float) -> Sl2Matrix:
    """exp((angle/2)(E - F)): counterclockwise rotation by `angle` about i."""
    h = angle / 2.0
    return Sl2Matrix([[math.cos(h), math.sin(h)], [-math.sin(h), math.cos(h)]])


def elliptic_about(p: HypPoint, angle: float) -> Sl2Matrix:
    """Counterclockwise rotation by `angle` about p."""
    g = _translate_to(p)
    return g @ _rotation_at_i(angle) @ g.inverse()


def hyperbolic_along(u: float, v: float, length: float) -> Sl2Matrix:
    """Translation by `length` along the geodesic from boundary point u to v."""
    if length <= 0.0:
        raise OutOfRange("translation length must be positive")
    if u == v:
        raise OutOfRange("axis endpoints must be distinct")
    if v > u:
        g = Sl2Matrix(np.array([[v, u], [1.0, 1.0]]) / math.sqrt(v - u))
    else:
        g = Sl2Matrix(np.array([[v, -u], [1.0, -1.0]]) / math.sqrt(u - v))
    h = length / 2.0
    return g @ Sl2Matrix([[math.exp(h), 0.0], [0.0, math.exp(-h)]]) @ g.inverse()


def hyp_exp(p: HypPoint, direction: float, dist: float) -> HypPoint:
    """The point at distance `dist` from p along the geodesic with the given
    initial chart angle (pi/2 = straight up)."""
    g = _translate_to(p) @ _rotation_at_i(direction - math.pi / 2.0)
    return g.apply(HypPoint(0.0, math.exp(dist)))


def normalizing_isometry(p: HypPoint, q: HypPoint) -> Sl2Matrix:
    """The isometry sending p to i and q onto the imaginary axis above i."""
    g = _translate_to(p).inverse()
    w = g.apply(q)
    phi = hyp_direction(HypPoint(0.0, 1.0), w)
    return _rotation_at_i(math.pi / 2.0 - phi) @ g


def isometry_mapping_segment(p1: HypPoint, q1: HypPoint,
                             p2: HypPoint, q2: HypPoint) -> Sl2Matrix:
    """The orientation-preserving isometry with p1 -> p2 and the ray toward q1
    mapped onto the ray toward q2 (exact when d(p1,q1) = d(p2,q2))."""
    return normalizing_isometry(p2, q2).inverse() @ normalizing_isometry(p1, q1)


# ---------------------------------------------------------------------------
# pairings of axis vectors (hyperbolic trigonometry as linear algebra)
# ---------------------------------------------------------------------------

def elliptic_pair_pairing(s1: Sl2Matrix, s2: Sl2Matrix) -> tuple[float, Sl2Vector]:
    """Pairing and bracket of the axis vectors of two elliptic elements.

    Returns (B(L1, L2), [L1, L2]).  The pairing equals -2 cosh(d) for fixed
    points at distance d, and the bracket is 2 sinh(d) times the unit axis
    vector of the translation taking the first fixed point to the second.
    """
    for s in (s1, s2):
        if classify(s).kind != ELLIPTIC:
            raise NotElliptic("both inputs must be elliptic")
    if hyp_distance(fixed_point(s1), fixed_point(s2)) < 1e-9:
        raise CoincidentFixedPoints("fixed points coincide; no joining axis")
    l1 = axis_vector(s1)
    l2 = axis_vector(s2)
    return trace_form(l1, l2), l1.bracket(l2)


def geodesic_pair_pairing(r1: Sl2Matrix, r2: Sl2Matrix) -> float:
    """B(L1, L2) for two hyperbolic elements.

    |value| <= 2 means the axes cross (value = 2 cos of the crossing angle
    between the oriented directions); |value| > 2 means they are disjoint
    with |value| = 2 cosh of the distance between them.
    """
    for r in (r1, r2):
        if classify(r).kind != HYPERBOLIC:
            raise NotHyperbolic("both inputs must be hyperbolic")
    return trace_form(axis_vector(r1), axis_vector(r2))


def axes_relation(pairing: float, tol: float = TRACE_TOL) -> str:
    """Decode geodesic_pair_pairing: 'crossing', 'disjoint' or 'asymptotic'."""
    a = abs(pairing)
    if a < 2.0 - tol:
        return "crossing"
    if a > 2.0 + tol:
        return "disjoint"
    return "asymptotic"


def mixed_pairing(r: Sl2Matrix, s: Sl2Matrix) -> float:
    """B(L(R), L(S)) for hyperbolic R and elliptic S.

    Equals 2 sinh(d) where d is the signed distance from the fixed point of S
    to the oriented axis of R, positive on the left of the axis.
    """
    if classify(r).kind != HYPERBOLIC:
        raise NotHyperbolic("first argument must be hyperbolic")
    if classify(s).kind != ELLIPTIC:
        raise NotElliptic("second argument must be elliptic")
    return trace_form(axis_vector(r), axis_vector(s))


# ---------------------------------------------------------------------------
# first-order perturbation of the logarithm
# ---------------------------------------------------------------------------

_BASIS_MATS = [v.mat for v in sl2_basis()]


def _vec(mat: np.ndarray) -> np.ndarray:
    """Coordinates of a traceless matrix in the (H, E, F) basis."""
    return np.array([mat[0, 0], mat[0, 1], mat[1, 0]])


def _adjoint_matrix(g: Sl2Matrix) -> np.ndarray:
    """Ad_g on the traceless matrices, as a 3x3 matrix in the (H,E,F) basis."""
    ginv = np.linalg.inv(g.mat)
    return np.column_stack([_vec(g.mat @ bm @ ginv) for bm in _BASIS_MATS])


def log_perturbation(s: Sl2Vector, u: Sl2Vector) -> Sl2Vector:
    """First-order term of log(exp(tu) exp(s)) at t = 0.

    The coefficient is (1 - Ad_S)^{-1}[u, s] + (B(u,s)/B(s,s)) s, where the
    inverse is taken on the B-orthogonal complement of s ([u,s] always lies
    there, and Ad_S preserves it).  Solved as a 3x3 least-squares system
    followed by B-orthogonal projection; no series expansion.
    """
    bss = trace_form(s, s)
    if abs(s.det()) < 1e-12 or bss == 0.0:
        raise DegenerateDirection("base direction is parabolic-type (B(s,s) = 0)")
    bracket = u.bracket(s)
    a = np.eye(3) - _adjoint_matrix(sl2_exp(s))
    x, *_ = np.linalg.lstsq(a, _vec(bracket.mat), rcond=None)
    xmat = x[0] * _BASIS_MATS[0] + x[1] * _BASIS_MATS[1] + x[2] * _BASIS_MATS[2]
    xvec = Sl2Vector(xmat)
    xvec = xvec - (trace_form(xvec, s) / bss) * s
    return xvec + (trace_form(u, s) / bss) * s


# ---------------------------------------------------------------------------
# two nearby cone points: trace of the combined holonomy
# ---------------------------------------------------------------------------

def injectivity_holonomy_pair(theta_h: float, theta_j: float, d: float):
    """The pair of elliptic matrices modelling two cone points at distance d.

    The first rotates about i; the second is its conjugate pushed distance d
    down the imaginary axis.  Angles are reduced angles in (0, 2*pi).
    """
    for th in (theta_h, theta_j):
        if not 0.0 < th < 2.0 * math.pi:
            raise OutOfRange("reduced angles must lie in (0, 2*pi)")
    if d < 0.0:
        raise OutOfRange("distance must be nonnegative")
    ch, sh = math.cos(theta_h / 2.0), math.sin(theta_h / 2.0)
    cj, sj = math.cos(theta_j / 2.0), math.sin(theta_j / 2.0)
    a = np.array([[ch, sh], [-sh, ch]])
    b = np.array([[cj, math.exp(d) * sj], [-math.exp(-d) * sj, cj]])
    return Sl2Matrix(a), Sl2Matrix(b)


def elliptic_product_trace(theta_h: float, theta_j: float, d: float) -> float:
    """|tr| of the product of the two model elliptics.

    Closed form: 2 |cos(th/2) cos(tj/2) - cosh(d) sin(th/2) sin(tj/2)|.
    """
    a, b = injectivity_holonomy_pair(theta_h, theta_j, d)
    return abs(float(np.trace(a.mat @ b.mat)))


def solve_order_q_distance(theta_h: float, theta_j: float, p: int, q: int) -> float:
    """Distance d >= 0 at which the combined holonomy has order q.

    Targets |tr| = 2 |cos(pi p / q)|.  The trace profile in d is
    2 |g(d)| with g(d) = cos(th/2)cos(tj/2) - cosh(d) sin(th/2)sin(tj/2),
    strictly decreasing; the smallest crossing of the target is returned.
    Raises NoSolution if the reduced angles do not sum past 2*pi or the
    target is below the attainable range.
    """
    if not (isinstance(p, int) and isinstance(q, int) and 0 < p < q
            and math.gcd(p, q) == 1):
        raise ValueError("need integers 0 < p < q with gcd(p, q) = 1")
    for th in (theta_h, theta_j):
        if not 0.0 < th < 2.0 * math.pi:
            raise OutOfRange("reduced angles must lie in (0, 2*pi)")
    if theta_h + theta_j <= 2.0 * math.pi:
        raise NoSolution("reduced angles must sum past 2*pi")
    ch, sh = math.cos(theta_h / 2.0), math.sin(theta_h / 2.0)
    cj, sj = math.cos(theta_j / 2.0), math.sin(theta_j / 2.0)
    g0 = ch * cj - sh * sj
    t2 = abs(math.cos(math.pi * p / q))
    denom = sh * sj
    if g0 > 0.0 and t2 <= g0:
        coshd = (ch * cj - t2) / denom  # first crossing, g(d) = +t2
    else:
        coshd = (ch * cj + t2) / denom  # crossing on the negative branch
        if coshd < 1.0 - 1e-12:
            raise NoSolution("target trace below the attainable range")
    d = math.acosh(max(1.0, coshd))
    residual = abs(elliptic_product_trace(theta_h, theta_j, d) - 2.0 * t2)
    if residual > 1e-10:
        raise NoSolution(f"root residual {residual} too large")
    return d
