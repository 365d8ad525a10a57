"""Randomized verification suites for the pairing and logarithm identities.

Each suite draws random configurations, evaluates the library's formula, and
compares against an oracle computed by a different route — Euclidean circle
geometry of half-plane geodesics, explicit boundary-endpoint formulas, or
Richardson-extrapolated finite differences.  Residuals are scaled by
1/(1 + |expected|) so that configurations with large pairings are judged
relatively.  The suites are deterministic for a fixed seed and are exposed
both to the test suite and to the command-line self-test.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import se2
from .sl2 import (
    H_VEC,
    HypPoint,
    Sl2Vector,
    elliptic_about,
    elliptic_pair_pairing,
    geodesic_pair_pairing,
    hyp_distance,
    hyperbolic_along,
    log_perturbation,
    mixed_pairing,
    normalizing_isometry,
    sl2_exp,
    sl2_log,
    trace_form,
)

DEFAULT_SEED = 1729

TRIG_TOL = 1e-9
LOG_TOL = 1e-6


def _scaled(err: float, expected: float) -> float:
    return err / (1.0 + abs(expected))


def _random_point(rng) -> HypPoint:
    return HypPoint(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(0.25, 2.5)))


def _distinct_reals(rng, k: int, gap: float = 0.05) -> list:
    while True:
        xs = [float(x) for x in rng.uniform(-3.0, 3.0, size=k)]
        if all(abs(xs[i] - xs[j]) >= gap
               for i in range(k) for j in range(i + 1, k)):
            return xs


def rotation_pair_suite(rng, count: int) -> float:
    """Axis-vector identities for two elliptic elements.

    Pairing -2 cosh d, bracket 2 sinh d times the unit translation generator
    from the first center to the second (built from an independent
    normalizing isometry), and the bracket's self-pairing 8 sinh^2 d.
    """
    worst = 0.0
    for _ in range(count):
        p1 = _random_point(rng)
        p2 = _random_point(rng)
        while hyp_distance(p1, p2) < 1e-2:
            p2 = _random_point(rng)
        s1 = elliptic_about(p1, float(rng.uniform(0.1, 2.0 * math.pi - 0.1)))
        s2 = elliptic_about(p2, float(rng.uniform(0.1, 2.0 * math.pi - 0.1)))
        val, br = elliptic_pair_pairing(s1, s2)
        d = hyp_distance(p1, p2)
        worst = max(worst, _scaled(abs(val + 2.0 * math.cosh(d)), 2.0 * math.cosh(d)))
        w = normalizing_isometry(p1, p2)
        expected = 2.0 * math.sinh(d) * H_VEC.conjugate_by(w.inverse()).mat
        worst = max(worst, _scaled(float(np.max(np.abs(br.mat - expected))),
                                   float(np.max(np.abs(expected)))))
        self_pair = trace_form(br, br)
        want = 8.0 * math.sinh(d) ** 2
        worst = max(worst, _scaled(abs(self_pair - want), want))
    return worst


def _crossing_angle(u1, v1, u2, v2) -> float:
    """Angle at which the half-circle geodesics (u1 v1), (u2 v2) cross,
    between their oriented unit tangents, via Euclidean circle geometry."""
    c1, r1 = (u1 + v1) / 2.0, abs(v1 - u1) / 2.0
    c2, r2 = (u2 + v2) / 2.0, abs(v2 - u2) / 2.0
    x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1))
    y = math.sqrt(max(0.0, r1 * r1 - (x - c1) ** 2))
    z0 = complex(x, y)
    e1 = (z0 - c1) / r1
    e2 = (z0 - c2) / r2
    t1 = -1j * e1 if v1 > u1 else 1j * e1
    t2 = -1j * e2 if v2 > u2 else 1j * e2
    return abs(cmath.phase(t2 / t1))


def axis_pair_suite(rng, count: int) -> float:
    """Pairing of two hyperbolic axis vectors vs boundary-endpoint oracles.

    Expected value 2(u + v)/(v - u) after the Mobius change sending the first
    axis to the upward imaginary axis; crossing/disjoint classification vs
    endpoint interleaving; crossing angle vs circle tangents; distance of
    disjoint axes via sinh d = 2 sqrt(uv)/|v - u|.
    """
    worst = 0.0
    for _ in range(count):
        u1, v1, u2, v2 = _distinct_reals(rng, 4)
        r1 = hyperbolic_along(u1, v1, float(rng.uniform(0.3, 2.5)))
        r2 = hyperbolic_along(u2, v2, float(rng.uniform(0.3, 2.5)))
        val = geodesic_pair_pairing(r1, r2)

        def mob(z):
            return (z - u1) / (v1 - z)

        ut, vt = mob(u2), mob(v2)
        expected = 2.0 * (ut + vt) / (vt - ut)
        worst = max(worst, _scaled(abs(val - expected), expected))

        lo, hi = min(u1, v1), max(u1, v1)
        crossing = (lo < u2 < hi) != (lo < v2 < hi)
        if crossing != (abs(val) < 2.0):
            worst = max(worst, 1.0)
        elif crossing:
            delta = _crossing_angle(u1, v1, u2, v2)
            worst = max(worst, _scaled(abs(val - 2.0 * math.cos(delta)), 2.0))
        else:
            sd = 2.0 * math.sqrt(ut * vt) / abs(vt - ut)
            want = 2.0 * math.hypot(1.0, sd)
            worst = max(worst, _scaled(abs(abs(val) - want), want))
    return worst


def mixed_pair_suite(rng, count: int) -> float:
    """Hyperbolic-vs-elliptic pairing against signed point-to-axis distance.

    Expected -2 Re(p~)/Im(p~) with p~ the Mobius image of the fixed point
    when the axis is sent to the upward imaginary axis (positive on its
    left), plus an independent inside/outside-the-half-circle side test.
    """
    worst = 0.0
    for _ in range(count):
        u, v = _distinct_reals(rng, 2)
        r = hyperbolic_along(u, v, float(rng.uniform(0.3, 2.5)))
        p = _random_point(rng)
        s = elliptic_about(p, float(rng.uniform(0.1, 2.0 * math.pi - 0.1)))
        val = mixed_pairing(r, s)
        pt = (p.z - u) / (v - p.z)
        expected = -2.0 * pt.real / pt.imag
        worst = max(worst, _scaled(abs(val - expected), expected))
        if abs(expected) > 1e-3:
            center, radius = (u + v) / 2.0, abs(v - u) / 2.0
            outside = abs(p.z - center) > radius
            left = outside if v > u else not outside
            if (val > 0.0) != left:
                worst = max(worst, 1.0)
    return worst


def flat_rotation_suite(rng, count: int) -> float:
    """Euclidean rotations: fixed-point formula, center distances, and
    equivariance of fixed points under conjugation."""
    worst = 0.0
    for _ in range(count):
        c1 = rng.uniform(-5.0, 5.0, size=2)
        c2 = rng.uniform(-5.0, 5.0, size=2)
        a1 = float(rng.uniform(0.1, 2.0 * math.pi - 0.1))
        a2 = float(rng.uniform(0.1, 2.0 * math.pi - 0.1))
        s1 = se2.Se2Element.rotation_about(c1, a1)
        s2 = se2.Se2Element.rotation_about(c2, a2)
        f1 = s1.fixed_point()
        worst = max(worst, float(np.max(np.abs(f1 - c1))))
        worst = max(worst, float(np.max(np.abs(s1.apply(f1) - f1))))
        d = se2.se2_pair_distance(s1, s2)
        worst = max(worst, _scaled(abs(d - float(np.hypot(*(c1 - c2)))), d))
        g = se2.Se2Element(float(rng.uniform(-3.0, 3.0)), rng.uniform(-2.0, 2.0, size=2))
        conj = g.compose(s1).compose(g.inverse())
        worst = max(worst, float(np.max(np.abs(conj.fixed_point() - g.apply(c1)))))
    return worst


def flat_orientation_suite(rng, count: int) -> float:
    """Wedge-sum side test: sign of the oriented triple area versus the
    constructed side of the line, with isometry (in)variance."""
    worst = 0.0
    for _ in range(count):
        x1 = rng.uniform(-3.0, 3.0, size=2)
        x2 = rng.uniform(-3.0, 3.0, size=2)
        while np.hypot(*(x2 - x1)) < 0.1:
            x2 = rng.uniform(-3.0, 3.0, size=2)
        direction = x2 - x1
        normal = np.array([-direction[1], direction[0]])
        side = float(rng.uniform(0.05, 2.0)) * (1 if rng.uniform() < 0.5 else -1)
        x3 = x1 + float(rng.uniform(-1.0, 2.0)) * direction + side * normal
        got = se2.triple_orientation(x1, x2, x3)
        if got != (1 if side > 0 else -1):
            worst = max(worst, 1.0)
        if se2.triple_orientation(x2, x1, x3) != -got:
            worst = max(worst, 1.0)
        g = se2.Se2Element(float(rng.uniform(-3.0, 3.0)), rng.uniform(-2.0, 2.0, size=2))
        if se2.triple_orientation(g.apply(x1), g.apply(x2), g.apply(x3)) != got:
            worst = max(worst, 1.0)
    return worst


def _numerical_log_slope(s: Sl2Vector, u: Sl2Vector) -> np.ndarray:
    """Richardson-extrapolated (log(exp(tu) exp(s)) - s)/t at t -> 0."""
    base = sl2_exp(s)

    def f(t):
        return (sl2_log(sl2_exp(t * u) @ base).mat - s.mat) / t

    f3, f4, f5 = f(1e-3), f(1e-4), f(1e-5)
    r1 = (10.0 * f4 - f3) / 9.0
    r2 = (10.0 * f5 - f4) / 9.0
    return (100.0 * r2 - r1) / 99.0


def log_expansion_suite(rng, count: int) -> float:
    """First-order coefficient of log(exp(tu) exp(s)) against the numerical
    oracle, for elliptic and for hyperbolic base directions."""
    worst = 0.0
    for k in range(count):
        if k % 2 == 0:
            base = elliptic_about(_random_point(rng),
                                  float(rng.uniform(0.2, 2.0 * math.pi - 0.2)))
        else:
            u1, v1 = _distinct_reals(rng, 2)
            base = hyperbolic_along(u1, v1, float(rng.uniform(0.2, 2.5)))
        s = sl2_log(base)
        c = rng.normal(size=3)
        u = Sl2Vector([[c[0], c[1]], [c[2], -c[0]]])
        got = log_perturbation(s, u)
        rr = _numerical_log_slope(s, u)
        worst = max(worst, _scaled(float(np.max(np.abs(got.mat - rr))),
                                   float(np.max(np.abs(rr)))))
    return worst


SUITES = (
    ("rotation-pairs", rotation_pair_suite, TRIG_TOL),
    ("axis-pairs", axis_pair_suite, TRIG_TOL),
    ("mixed-pairs", mixed_pair_suite, TRIG_TOL),
    ("flat-fixed-points", flat_rotation_suite, TRIG_TOL),
    ("flat-orientation", flat_orientation_suite, TRIG_TOL),
    ("log-expansion", log_expansion_suite, LOG_TOL),
)


def run_all(seed: int = DEFAULT_SEED, trig_count: int = 500,
            log_count: int = 200) -> list:
    """Run every suite with a fresh seeded generator.

    Returns rows (name, count, max scaled residual, tolerance).
    """
    rows = []
    for name, fn, tol in SUITES:
        count = log_count if fn is log_expansion_suite else trig_count
        rng = np.random.default_rng(seed)
        rows.append((name, count, fn(rng, count), tol))
    return rows
