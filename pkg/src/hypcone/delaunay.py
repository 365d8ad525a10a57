"""Intrinsic Delaunay retriangulation by hyperbolic edge flips.

The local quality measure of an interior edge is psi0 = pi - (alpha + beta),
the two corner angles opposite the edge in its incident triangles; an edge is
locally Delaunay when psi0 >= 0.  A flip develops the two triangles into the
half-plane as a quadrilateral, replaces the edge by the cross diagonal
(keeping its id, with the developed cross distance as the new length), and
rewires the quad; the underlying metric is untouched, only the triangulation
of it changes.  Repeatedly flipping the worst edge terminates in a
triangulation with all psi0 >= 0, the Delaunay refinement of the metric's
Voronoi dual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonTermination, UnflippableConfiguration
from .holonomy import place_third
from .sl2 import HypPoint, hyp_distance, normalizing_isometry
from .surface import ConeSurface

# An edge counts as non-Delaunay only below -PSI_TOL, so floating-point
# zeros do not trigger flip loops.
PSI_TOL = 1e-10
MAX_FLIPS = 10 ** 6


@dataclass(frozen=True)
class FlipMove:
    """One executed flip: where, and what it did to the length."""

    edge: str
    tri_plus: int
    tri_minus: int
    pre_length: float
    post_length: float
    pre_psi0: float


def edge_invariant(s: ConeSurface, e: str) -> float:
    """psi0(e) = pi minus the two corner angles opposite e."""
    hf, hb = s.halfedges_of_edge(e)
    return math.pi - s.angle_at(s.prv(hf)) - s.angle_at(s.prv(hb))


def edge_invariants(s: ConeSurface) -> dict:
    return {e: edge_invariant(s, e) for e in s.edge_ids}


def _develop_quad(s: ConeSurface, e: str):
    """Develop the two triangles of e into one chart.

    Returns (p, q, x, y): the edge runs p -> q, x is the apex on its left
    (the triangle containing the forward half-edge), y the apex on its right.
    """
    hf, hb = s.halfedges_of_edge(e)
    if s.tri(hf) == s.tri(hb):
        raise UnflippableConfiguration(
            f"edge {e!r} bounds the same triangle twice")
    p = HypPoint(0.0, 1.0)
    q = HypPoint(0.0, math.exp(s.lengths[e]))
    x = place_third(p, q, s.length_of(s.prv(hf)), s.length_of(s.nxt(hf)),
                    s.lengths[e])
    y = place_third(q, p, s.length_of(s.prv(hb)), s.length_of(s.nxt(hb)),
                    s.lengths[e])
    return hf, hb, p, q, x, y


def flip_new_length(s: ConeSurface, e: str) -> float:
    """Length of the replacement diagonal, with the embeddability check."""
    _, _, p, q, x, y = _develop_quad(s, e)
    norm = normalizing_isometry(x, y)
    sp = norm.apply(p.z).real
    sq = norm.apply(q.z).real
    if not (sp * sq < 0.0):
        raise UnflippableConfiguration(
            f"diagonal replacing edge {e!r} does not cross it "
            f"(developed sides {sp} and {sq})")
    return hyp_distance(x, y)


def flip(s: ConeSurface, e: str):
    """Replace e by the cross diagonal of its quadrilateral.

    Returns (new surface, FlipMove).  The two rewired triangles keep their
    slots: the one that held the forward half-edge gets sides
    [e forward, old prv(backward), old nxt(forward)], the other
    [e backward, old prv(forward), old nxt(backward)].
    """
    hf, hb, p, q, x, y = _develop_quad(s, e)
    norm = normalizing_isometry(x, y)
    sp = norm.apply(p.z).real
    sq = norm.apply(q.z).real
    if not (sp * sq < 0.0):
        raise UnflippableConfiguration(
            f"diagonal replacing edge {e!r} does not cross it "
            f"(developed sides {sp} and {sq})")
    new_len = hyp_distance(x, y)

    def rec(h):
        return (s.he_edge[h], s.he_dir[h])

    tris = list(s.triangles)
    tris[s.tri(hf)] = ((e, "+"), rec(s.prv(hb)), rec(s.nxt(hf)))
    tris[s.tri(hb)] = ((e, "-"), rec(s.prv(hf)), rec(s.nxt(hb)))
    lengths = dict(s.lengths)
    lengths[e] = new_len
    move = FlipMove(edge=e, tri_plus=s.tri(hf), tri_minus=s.tri(hb),
                    pre_length=s.lengths[e], post_length=new_len,
                    pre_psi0=edge_invariant(s, e))
    return ConeSurface(lengths, tris), move


def make_delaunay(s: ConeSurface, tol: float = PSI_TOL):
    """Flip the most negative edge (ties by id) until all psi0 >= -tol.

    Returns (final surface, list of FlipMove).
    """
    moves = []
    for _ in range(MAX_FLIPS):
        worst = None
        worst_val = -tol
        for e in s.edge_ids:
            val = edge_invariant(s, e)
            if val < worst_val:
                worst, worst_val = e, val
        if worst is None:
            return s, moves
        s, move = flip(s, worst)
        moves.append(move)
    raise NonTermination(
        f"still not Delaunay after {MAX_FLIPS} flips; last edge {moves[-1].edge!r}")


def flip_length_jacobian(s: ConeSurface, e: str, rel_step: float = 1e-6) -> np.ndarray:
    """Row of d(new length)/d(a_k) by central differences.

    This is the only nontrivial row of the Jacobian of the flip coordinate
    change; all other coordinates are carried through unchanged.
    """
    row = np.zeros(s.n_edges)
    for k, eid in enumerate(s.edge_ids):
        a = s.lengths[eid]
        h = rel_step * max(1.0, a)
        up = flip_new_length(s.with_lengths({eid: a + h}), e)
        dn = flip_new_length(s.with_lengths({eid: a - h}), e)
        row[k] = (up - dn) / (2.0 * h)
    return row


def flip_coordinate_jacobian(s: ConeSurface, e: str) -> np.ndarray:
    """Full N x N Jacobian of the flip coordinate change at s."""
    jac = np.eye(s.n_edges)
    jac[s.edge_index[e], :] = flip_length_jacobian(s, e)
    return jac


def move_log_lines(moves) -> list:
    """One line per flip: edge, pre-length, post-length, pre-psi0."""
    from .surface import fmt17
    return ["flip %s pre %s post %s psi0 %s" %
            (m.edge, fmt17(m.pre_length), fmt17(m.post_length), fmt17(m.pre_psi0))
            for m in moves]
