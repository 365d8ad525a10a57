import math

import pytest

from hypcone import ConeSurface


def torus_surface(a=1.2, b=None, c=None):
    """One-vertex torus: two triangles glued along all three edges."""
    b = a if b is None else b
    c = a if c is None else c
    return ConeSurface(
        {"x": a, "y": b, "z": c},
        [
            [("x", "+"), ("y", "+"), ("z", "+")],
            [("x", "-"), ("y", "-"), ("z", "-")],
        ],
    )


def sphere3_surface(a=1.0, b=1.2, c=1.4):
    """Three-cone sphere: a triangle doubled across its boundary."""
    return ConeSurface(
        {"p": a, "q": b, "r": c},
        [
            [("p", "+"), ("q", "+"), ("r", "+")],
            [("r", "-"), ("q", "-"), ("p", "-")],
        ],
    )


def tetra_surface(lengths=None):
    """Boundary of a tetrahedron, four vertices."""
    if lengths is None:
        lengths = {k: 1.3 for k in ("ab", "ac", "ad", "bc", "bd", "cd")}
    return ConeSurface(
        lengths,
        [
            [("ab", "+"), ("bc", "+"), ("ac", "-")],
            [("ac", "+"), ("cd", "+"), ("ad", "-")],
            [("ad", "+"), ("bd", "-"), ("ab", "-")],
            [("bd", "+"), ("cd", "-"), ("bc", "-")],
        ],
    )


def genus1_two_cone_surface(h=1.6, w=1.6, s0=1.0, s1=1.0, s2=1.0, s3=1.0):
    """Genus-1 surface with two cone points, four triangles."""
    return ConeSurface(
        {"h": h, "w": w, "s0": s0, "s1": s1, "s2": s2, "s3": s3},
        [
            [("h", "+"), ("s1", "-"), ("s0", "+")],
            [("w", "+"), ("s2", "-"), ("s1", "+")],
            [("h", "-"), ("s3", "-"), ("s2", "+")],
            [("w", "-"), ("s0", "-"), ("s3", "+")],
        ],
    )


def equilateral_torus_angle(a):
    """Cone angle of the equilateral one-vertex torus with edge length a."""
    return 6.0 * math.acos(math.cosh(a) / (math.cosh(a) + 1.0))


@pytest.fixture
def torus():
    return torus_surface()


@pytest.fixture
def skew_torus():
    return torus_surface(1.0, 1.3, 1.7)


@pytest.fixture
def sphere3():
    return sphere3_surface()


@pytest.fixture
def tetra():
    return tetra_surface()


@pytest.fixture
def skew_tetra():
    return tetra_surface(
        {"ab": 1.1, "ac": 1.3, "ad": 1.2, "bc": 1.25, "bd": 1.35, "cd": 1.15}
    )


@pytest.fixture
def g1n2():
    return genus1_two_cone_surface()


@pytest.fixture
def skew_g1n2():
    return genus1_two_cone_surface(h=1.55, w=1.7, s0=0.95, s1=1.05, s2=1.0, s3=1.1)


@pytest.fixture
def corpus(torus, skew_torus, sphere3, tetra, skew_tetra, g1n2, skew_g1n2):
    return [torus, skew_torus, sphere3, tetra, skew_tetra, g1n2, skew_g1n2]
