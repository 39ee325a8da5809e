"""C1 piecewise-cubic interpolation on a Delaunay triangulation.

Each macro triangle is split at its centroid into three subtriangles, and a
cubic Bernstein-Bezier patch is built on each. Corner values and gradients
pin the boundary control points; the three mid-edge control points are fixed
by requiring the derivative normal to each outer edge to vary linearly along
it, and the interior points follow from C1 matching across the split edges.
Two neighboring macro triangles share their edge curve (same endpoint values
and gradients) and both impose the linear-normal-derivative rule, so the
composite surface is C1 across macro edges as well.

Vertex gradients default to a weighted least-squares fit of a quadratic over
each vertex's edge-connected neighbors (inverse-distance weights), dropping
to an affine fit when fewer than 5 neighbors are available. Affine data is
therefore reproduced exactly, and so is any quadratic when exact gradients
are supplied.

Evaluation outside the convex hull is undefined and returns NaN; the
benchmark protocol treats such predictions as missing rather than errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientNodes
from .geometry import LOCATE_TOL, Triangulation, as_points, locate, triangulate

__all__ = ["CubicSurface", "estimate_gradients", "fit_cubic", "eval_cubic"]

# Vertex order of the three subtriangles, as (outer_start, outer_end) pairs of
# macro-vertex slots; the split point is vertex 0 of every subtriangle.
_SUBS = ((0, 1), (1, 2), (2, 0))


def estimate_gradients(tri: Triangulation, values) -> np.ndarray:
    """Per-vertex surface gradients estimated from triangulation neighbors.

    Fits z - z_v = g . dx + 0.5 dx^T H dx by weighted least squares over the
    vertex's neighbors (affine model when fewer than 5 neighbors, or when the
    quadratic design is rank-deficient). Exact for data from any affine
    function; exact for quadratics at vertices with a well-posed 5-neighbor
    fit.
    """
    z = np.asarray(values, dtype=float)
    n = tri.n_vertices
    if z.shape != (n,):
        raise ValueError(f"expected {n} vertex values, got shape {z.shape}")
    neighbor_sets: list[set] = [set() for _ in range(n)]
    for a, b in tri.edges():
        neighbor_sets[a].add(b)
        neighbor_sets[b].add(a)
    grads = np.empty((n, 2))
    for v in range(n):
        nb = sorted(neighbor_sets[v])
        dx = tri.points[nb] - tri.points[v]
        dz = z[nb] - z[v]
        dist = np.hypot(dx[:, 0], dx[:, 1])
        scale = dist.mean()
        u = dx / scale
        w = 1.0 / dist
        coef = None
        if len(nb) >= 5:
            design = np.column_stack(
                [u[:, 0], u[:, 1], 0.5 * u[:, 0] ** 2, u[:, 0] * u[:, 1], 0.5 * u[:, 1] ** 2]
            )
            sol, _, rank, _ = np.linalg.lstsq(design * w[:, None], dz * w, rcond=None)
            if rank == 5:
                coef = sol[:2]
        if coef is None:
            design = np.column_stack([u[:, 0], u[:, 1]])
            coef = np.linalg.lstsq(design * w[:, None], dz * w, rcond=None)[0]
        grads[v] = coef / scale
    return grads


def _control_net(p1, p2, p3, f, g):
    """Bezier ordinates for one macro triangle's three subpatches.

    ``f`` and ``g`` hold the three corner values and gradient vectors. Returns
    a 3-tuple of 10-tuples ordered (b300, b210, b201, b120, b111, b102, b030,
    b021, b012, b003) w.r.t. subtriangle vertices (split point, Va, Vb).
    """
    verts = (p1, p2, p3)
    p0 = ((p1[0] + p2[0] + p3[0]) / 3.0, (p1[1] + p2[1] + p3[1]) / 3.0)

    # Boundary control points from corner data.
    e = {}  # e[(a, b)]: outer-edge point adjacent to corner a toward corner b
    t = []  # t[a]: split-edge point adjacent to corner a toward the centroid
    for a in range(3):
        pa, ga = verts[a], g[a]
        for b in range(3):
            if b != a:
                pb = verts[b]
                e[(a, b)] = f[a] + (ga[0] * (pb[0] - pa[0]) + ga[1] * (pb[1] - pa[1])) / 3.0
        t.append(f[a] + (ga[0] * (p0[0] - pa[0]) + ga[1] * (p0[1] - pa[1])) / 3.0)

    # Mid control point of each subpatch from the linear-normal-derivative
    # rule on its outer edge.
    m = []
    for a, b in _SUBS:
        pa, pb = verts[a], verts[b]
        nx, ny = -(pb[1] - pa[1]), pb[0] - pa[0]  # edge normal (any scale)
        d = (pa[0] - p0[0]) * (pb[1] - p0[1]) - (pa[1] - p0[1]) * (pb[0] - p0[0])
        d0 = ((pb[0] - pa[0]) * ny - (pb[1] - pa[1]) * nx) / d
        d1 = ((p0[0] - pb[0]) * ny - (p0[1] - pb[1]) * nx) / d
        d2 = ((pa[0] - p0[0]) * ny - (pa[1] - p0[1]) * nx) / d
        q20 = d0 * t[a] + d1 * f[a] + d2 * e[(a, b)]
        q02 = d0 * t[b] + d1 * e[(b, a)] + d2 * f[b]
        m.append((0.5 * (q20 + q02) - d1 * e[(a, b)] - d2 * e[(b, a)]) / d0)

    # C1 across the three split edges fixes the points around the centroid.
    a_to = [0.0, 0.0, 0.0]  # a_to[k]: split-edge point adjacent to centroid toward corner k
    for k in range(3):
        a_to[k] = (m[(k + 2) % 3] + m[k] + t[k]) / 3.0
    c = (a_to[0] + a_to[1] + a_to[2]) / 3.0

    nets = []
    for s, (a, b) in enumerate(_SUBS):
        nets.append((
            c,            # b300 (centroid)
            a_to[a],      # b210
            a_to[b],      # b201
            t[a],         # b120
            m[s],         # b111
            t[b],         # b102
            f[a],         # b030 (corner Va)
            e[(a, b)],    # b021
            e[(b, a)],    # b012
            f[b],         # b003 (corner Vb)
        ))
    return tuple(nets)


@dataclass(frozen=True)
class CubicSurface:
    """A fitted C1 cubic surface over the node set's convex hull."""

    tri: Triangulation
    values: np.ndarray
    gradients: np.ndarray
    nets: tuple = field(repr=False)

    def __call__(self, query) -> float:
        return eval_cubic(self, query)

    def evaluate(self, queries) -> np.ndarray:
        """Vectorized evaluation; NaN for queries outside the hull."""
        q = np.atleast_2d(np.asarray(queries, dtype=float))
        return np.array([eval_cubic(self, row) for row in q])


def fit_cubic(points, values, gradients=None) -> CubicSurface:
    """Fit the C1 cubic interpolant through (points, values).

    ``gradients`` overrides the per-vertex gradient estimate (one (du, dv)
    row per node); by default gradients are estimated from the data.
    Propagates triangulation failures (InsufficientNodes, DegenerateGeometry,
    DuplicateNodes).
    """
    pts = as_points(points)
    z = np.asarray(values, dtype=float)
    if z.shape != (pts.shape[0],):
        raise ValueError(f"expected {pts.shape[0]} values, got shape {z.shape}")
    tri = triangulate(pts)
    if gradients is None:
        grad = estimate_gradients(tri, z)
    else:
        grad = np.asarray(gradients, dtype=float)
        if grad.shape != (pts.shape[0], 2):
            raise ValueError(f"expected gradient shape ({pts.shape[0]}, 2), got {grad.shape}")
    nets = []
    for i, j, k in tri.triangles:
        nets.append(_control_net(
            tri.points[i], tri.points[j], tri.points[k],
            (z[i], z[j], z[k]),
            (grad[i], grad[j], grad[k]),
        ))
    return CubicSurface(tri=tri, values=z, gradients=grad, nets=tuple(nets))


def _eval_in_triangle(surface: CubicSurface, t: int, bary) -> float:
    """Evaluate macro triangle ``t`` at the given macro barycentric coords."""
    l1, l2, l3 = bary
    s = int(np.argmin(bary))  # smallest coordinate picks the subtriangle
    if s == 2:
        sub, u0, u1, u2 = 0, 3.0 * l3, l1 - l3, l2 - l3
    elif s == 0:
        sub, u0, u1, u2 = 1, 3.0 * l1, l2 - l1, l3 - l1
    else:
        sub, u0, u1, u2 = 2, 3.0 * l2, l3 - l2, l1 - l2
    u1 = max(u1, 0.0)
    u2 = max(u2, 0.0)
    b300, b210, b201, b120, b111, b102, b030, b021, b012, b003 = surface.nets[t][sub]
    return (
        b300 * u0 * u0 * u0
        + 3.0 * b210 * u0 * u0 * u1
        + 3.0 * b201 * u0 * u0 * u2
        + 3.0 * b120 * u0 * u1 * u1
        + 6.0 * b111 * u0 * u1 * u2
        + 3.0 * b102 * u0 * u2 * u2
        + b030 * u1 * u1 * u1
        + 3.0 * b021 * u1 * u1 * u2
        + 3.0 * b012 * u1 * u2 * u2
        + b003 * u2 * u2 * u2
    )


def eval_cubic(surface: CubicSurface, query, tol: float = LOCATE_TOL) -> float:
    """Surface value at a point; NaN when the point lies outside the hull."""
    hit = locate(surface.tri, query, tol=tol)
    if hit is None:
        return math.nan
    t, bary = hit
    return _eval_in_triangle(surface, t, bary)
