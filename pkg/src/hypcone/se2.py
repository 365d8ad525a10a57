"""Orientation-preserving isometries of the Euclidean plane.

An element is x -> N x + w with N the rotation by `angle`.  These appear as
degenerate limits of hyperbolic developing maps when a cone angle crosses a
multiple of 2*pi, and in flat-triangle checks of the trigonometric pairing
identities.  Only the small API needed there is provided: composition,
inversion, fixed points of genuine rotations, and an exact orientation test
for point triples.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotElliptic, OutOfRange


class Se2Element:
    """The map x -> R(angle) x + w."""

    __slots__ = ("angle", "rot", "w")

    def __init__(self, angle: float, w):
        if not math.isfinite(angle):
            raise OutOfRange("angle must be finite")
        w = np.asarray(w, dtype=float)
        if w.shape != (2,):
            raise ValueError("translation part must be a 2-vector")
        c, s = math.cos(angle), math.sin(angle)
        self.angle = float(angle)
        self.rot = np.array([[c, -s], [s, c]])
        self.w = w.copy()

    @classmethod
    def rotation_about(cls, center, angle: float) -> "Se2Element":
        center = np.asarray(center, dtype=float)
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return cls(angle, center - rot @ center)

    @classmethod
    def translation(cls, w) -> "Se2Element":
        return cls(0.0, w)

    def __repr__(self):
        return f"Se2Element(angle={self.angle!r}, w={self.w.tolist()!r})"

    def apply(self, x):
        return self.rot @ np.asarray(x, dtype=float) + self.w

    def compose(self, other: "Se2Element") -> "Se2Element":
        """self after other."""
        return Se2Element(self.angle + other.angle, self.rot @ other.w + self.w)

    def inverse(self) -> "Se2Element":
        return Se2Element(-self.angle, -(self.rot.T @ self.w))

    def fixed_point(self) -> np.ndarray:
        """Center of rotation; undefined for (near-)translations."""
        # x = Nx + w has a solution iff 1 is not an eigenvalue of N.
        if abs(math.remainder(self.angle, 2.0 * math.pi)) < 1e-12:
            raise NotElliptic("angle is a multiple of 2*pi; no fixed point")
        return np.linalg.solve(np.eye(2) - self.rot, self.w)


def se2_pair_distance(s1: Se2Element, s2: Se2Element) -> float:
    """Distance between the rotation centers of two genuine rotations."""
    return float(np.hypot(*(s1.fixed_point() - s2.fixed_point())))


def triple_orientation(p1, p2, p3) -> int:
    """Sign of the oriented area of the triangle (p1, p2, p3).

    +1 counterclockwise, -1 clockwise, 0 degenerate; computed as the exact
    sign of p1^p2 + p2^p3 + p3^p1.
    """
    (x1, y1), (x2, y2), (x3, y3) = p1, p2, p3
    val = float((x1 * y2 - x2 * y1) + (x2 * y3 - x3 * y2) + (x3 * y1 - x1 * y3))
    return (val > 0.0) - (val < 0.0)
