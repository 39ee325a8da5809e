"""Planar geometry substrate: Delaunay triangulation, point location, and
node-distribution descriptors (fill distance, separation distance, mesh ratio).

The triangulation is built by incremental insertion with Lawson edge flips.
Orientation and in-circle predicates snap to zero when the determinant is
below 1e-12 relative to its operand magnitude; above that band the floating
point sign is provably exact (the band sits far above the roundoff bound),
so no configuration is ever mis-signed. The snap treats nearly collinear
triples as collinear and nearly cocircular quadruples as cocircular, which
keeps sliver triangles out of grid-structured inputs whose levels do not
round to exactly even spacing. Cocircular quadrilaterals are canonicalized
to the diagonal connecting the lexicographically smallest vertex pair, which
makes the output deterministic for a fixed input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, DuplicateNodes, InsufficientNodes

__all__ = [
    "PointSet2",
    "Triangulation",
    "GeometryReport",
    "triangulate",
    "locate",
    "convex_hull_polygon",
    "polygon_area",
    "fill_distance",
    "separation_distance",
    "mesh_ratio",
    "geometry_report",
    "orient_sign",
    "incircle_sign",
]

DUPLICATE_TOL = 1e-12
LOCATE_TOL = 1e-9
FILL_GRID_RESOLUTION = 200

# Degeneracy band of the predicates, relative to operand magnitude. Well
# above the float roundoff bound for these determinants (~3.3e-16 relative),
# so any value outside the band carries a provably correct sign.
PREDICATE_EPS_REL = 1e-12


def orient_sign(pa, pb, pc) -> int:
    """Sign of the signed area of (pa, pb, pc): +1 for counterclockwise,
    0 when collinear within the relative degeneracy band.

    The band compares the determinant against the squared configuration
    size, so it is invariant under translation and scaling of the triple.
    """
    abx, aby = pb[0] - pa[0], pb[1] - pa[1]
    acx, acy = pc[0] - pa[0], pc[1] - pa[1]
    det = abx * acy - aby * acx
    scale = max(abx * abx + aby * aby, acx * acx + acy * acy,
                (acx - abx) ** 2 + (acy - aby) ** 2)
    if abs(det) <= PREDICATE_EPS_REL * scale:
        return 0
    return int(det > 0) - int(det < 0)


def incircle_sign(pa, pb, pc, pd) -> int:
    """+1 if pd lies strictly inside the circumcircle of CCW (pa, pb, pc),
    0 if the four points are cocircular (within the relative degeneracy
    band), -1 if strictly outside."""
    adx, ady = pa[0] - pd[0], pa[1] - pd[1]
    bdx, bdy = pb[0] - pd[0], pb[1] - pd[1]
    cdx, cdy = pc[0] - pd[0], pc[1] - pd[1]
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdxcdy - cdxbdy)
        + blift * (cdxady - adxcdy)
        + clift * (adxbdy - bdxady)
    )
    scale = max(alift, blift, clift) ** 2
    if abs(det) <= PREDICATE_EPS_REL * scale:
        return 0
    return int(det > 0) - int(det < 0)


@dataclass(frozen=True)
class PointSet2:
    """A validated planar node set: no two nodes within the duplicate tolerance."""

    points: np.ndarray
    duplicate_tol: float = DUPLICATE_TOL

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size and pts.shape[1] != 2:
            raise ValueError(f"expected (n, 2) coordinates, got shape {pts.shape}")
        object.__setattr__(self, "points", pts)
        pts.setflags(write=False)
        n = pts.shape[0]
        if n > 1:
            d = pts[:, None, :] - pts[None, :, :]
            dist = np.hypot(d[..., 0], d[..., 1])
            dist[np.diag_indices(n)] = np.inf
            if dist.min() < self.duplicate_tol:
                i, j = np.unravel_index(np.argmin(dist), dist.shape)
                raise DuplicateNodes(
                    f"nodes {i} and {j} coincide within tolerance {self.duplicate_tol:g}"
                )

    @property
    def n(self) -> int:
        return self.points.shape[0]


def as_points(points) -> np.ndarray:
    """Coerce a PointSet2 or array-like into a validated (n, 2) float array."""
    if isinstance(points, PointSet2):
        return points.points
    return PointSet2(np.asarray(points, dtype=float)).points


class Triangulation:
    """An immutable Delaunay triangulation of a planar node set.

    Attributes
    ----------
    points : (n, 2) array of node coordinates.
    triangles : (m, 3) int array, counterclockwise vertex indices.
    neighbors : (m, 3) int array; ``neighbors[t, k]`` is the triangle across
        the edge opposite ``triangles[t, k]``, or -1 on the hull.
    hull : int array of hull vertex indices in counterclockwise order,
        including vertices that lie on a hull edge (collinear boundary nodes).
    """

    def __init__(self, points: np.ndarray, triangles: np.ndarray, hull: np.ndarray):
        self.points = np.asarray(points, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.intp)
        self.hull = np.asarray(hull, dtype=np.intp)
        self.points.setflags(write=False)
        self.triangles.setflags(write=False)
        self.hull.setflags(write=False)
        self.neighbors = self._build_neighbors()
        # Per-triangle affine maps for barycentric point location.
        p0 = self.points[self.triangles[:, 0]]
        e1 = self.points[self.triangles[:, 1]] - p0
        e2 = self.points[self.triangles[:, 2]] - p0
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        self._origin = p0
        self._inv = np.empty((len(det), 2, 2))
        self._inv[:, 0, 0] = e2[:, 1] / det
        self._inv[:, 0, 1] = -e2[:, 0] / det
        self._inv[:, 1, 0] = -e1[:, 1] / det
        self._inv[:, 1, 1] = e1[:, 0] / det

    def _build_neighbors(self) -> np.ndarray:
        edge_owner = {}
        for t, (a, b, c) in enumerate(self.triangles):
            for u, v in ((a, b), (b, c), (c, a)):
                edge_owner[(u, v)] = t
        nbrs = np.full(self.triangles.shape, -1, dtype=np.intp)
        for t, (a, b, c) in enumerate(self.triangles):
            nbrs[t, 0] = edge_owner.get((c, b), -1)
            nbrs[t, 1] = edge_owner.get((a, c), -1)
            nbrs[t, 2] = edge_owner.get((b, a), -1)
        nbrs.setflags(write=False)
        return nbrs

    @property
    def n_vertices(self) -> int:
        return self.points.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def edges(self):
        """Undirected edges as sorted index pairs (deterministic order)."""
        seen = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                key = (min(u, v), max(u, v))
                if key not in seen:
                    seen.add(key)
                    yield key

    def triangle_areas(self) -> np.ndarray:
        p = self.points[self.triangles]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
        )

    def barycentric(self, query) -> np.ndarray:
        """Barycentric coordinates of ``query`` w.r.t. every triangle, (m, 3)."""
        q = np.asarray(query, dtype=float)
        d = q - self._origin
        u = self._inv[:, 0, 0] * d[:, 0] + self._inv[:, 0, 1] * d[:, 1]
        v = self._inv[:, 1, 0] * d[:, 0] + self._inv[:, 1, 1] * d[:, 1]
        return np.column_stack([1.0 - u - v, u, v])


def _pair_key(pts, i: int, j: int):
    a, b = (pts[i][0], pts[i][1]), (pts[j][0], pts[j][1])
    return (a, b) if a <= b else (b, a)


class _Builder:
    """Mutable state for incremental Delaunay construction."""

    def __init__(self, pts):
        self.pts = pts  # list of (x, y) tuples
        self.tris: list = []  # [a, b, c] or None tombstones
        self.edge: dict = {}  # directed edge (a, b) -> triangle index

    def add_tri(self, a: int, b: int, c: int) -> int:
        t = len(self.tris)
        self.tris.append([a, b, c])
        self.edge[(a, b)] = t
        self.edge[(b, c)] = t
        self.edge[(c, a)] = t
        return t

    def remove_tri(self, t: int) -> None:
        a, b, c = self.tris[t]
        for key in ((a, b), (b, c), (c, a)):
            if self.edge.get(key) == t:
                del self.edge[key]
        self.tris[t] = None

    def legalize(self, t: int, p: int) -> None:
        """Lawson flip propagation from the edge opposite ``p`` in triangle ``t``."""
        stack = [(t, p)]
        while stack:
            t, p = stack.pop()
            tri = self.tris[t]
            if tri is None or p not in tri:
                continue
            i = tri.index(p)
            u, v = tri[(i + 1) % 3], tri[(i + 2) % 3]
            t2 = self.edge.get((v, u))
            if t2 is None:
                continue
            tri2 = self.tris[t2]
            q = next(w for w in tri2 if w != u and w != v)
            if incircle_sign(self.pts[p], self.pts[u], self.pts[v], self.pts[q]) > 0:
                self.remove_tri(t)
                self.remove_tri(t2)
                t3 = self.add_tri(p, u, q)
                t4 = self.add_tri(p, q, v)
                stack.append((t3, p))
                stack.append((t4, p))

    def insert(self, p: int) -> None:
        pp = self.pts[p]
        located = None
        for t, tri in enumerate(self.tris):
            if tri is None:
                continue
            a, b, c = tri
            s_ab = orient_sign(self.pts[a], self.pts[b], pp)
            if s_ab < 0:
                continue
            s_bc = orient_sign(self.pts[b], self.pts[c], pp)
            if s_bc < 0:
                continue
            s_ca = orient_sign(self.pts[c], self.pts[a], pp)
            if s_ca < 0:
                continue
            located = (t, (s_ab, s_bc, s_ca))
            break
        if located is None:
            self._insert_outside(p)
            return
        t, signs = located
        zeros = signs.count(0)
        if zeros == 0:
            self._split_interior(t, p)
        elif zeros == 1:
            a, b, c = self.tris[t]
            edge = ((a, b), (b, c), (c, a))[signs.index(0)]
            self._split_edge(edge, p)
        else:
            raise DuplicateNodes(f"point {p} coincides with an existing vertex")

    def _split_interior(self, t: int, p: int) -> None:
        a, b, c = self.tris[t]
        self.remove_tri(t)
        t1 = self.add_tri(a, b, p)
        t2 = self.add_tri(b, c, p)
        t3 = self.add_tri(c, a, p)
        self.legalize(t1, p)
        self.legalize(t2, p)
        self.legalize(t3, p)

    def _split_edge(self, edge, p: int) -> None:
        a, b = edge
        t = self.edge[(a, b)]
        c = next(w for w in self.tris[t] if w != a and w != b)
        t_opp = self.edge.get((b, a))
        self.remove_tri(t)
        new = [self.add_tri(a, p, c), self.add_tri(p, b, c)]
        if t_opp is not None:
            d = next(w for w in self.tris[t_opp] if w != a and w != b)
            self.remove_tri(t_opp)
            new.append(self.add_tri(b, p, d))
            new.append(self.add_tri(p, a, d))
        for t_new in new:
            self.legalize(t_new, p)

    def _insert_outside(self, p: int) -> None:
        pp = self.pts[p]
        boundary = [e for e in self.edge if (e[1], e[0]) not in self.edge]
        visible = [
            (a, b) for a, b in boundary
            if orient_sign(self.pts[a], self.pts[b], pp) < 0
        ]
        if not visible:
            raise DegenerateGeometry(f"point {p} could not be located")
        new = [self.add_tri(b, a, p) for a, b in visible]
        for t_new in new:
            self.legalize(t_new, p)

    def canonicalize_cocircular(self) -> None:
        """Flip exactly-cocircular quads to the lexicographically preferred
        diagonal. Preserves the Delaunay property (both diagonals share the
        same circumcircle); each flip strictly lowers the edge-key multiset,
        so the loop terminates."""
        changed = True
        guard = 0
        while changed:
            changed = False
            guard += 1
            if guard > 4 * len(self.tris) + 16:
                raise RuntimeError("cocircular canonicalization failed to settle")
            for (u, v), t in list(self.edge.items()):
                if u > v or self.tris[t] is None:
                    continue
                t2 = self.edge.get((v, u))
                if t2 is None:
                    continue
                p = next(w for w in self.tris[t] if w != u and w != v)
                q = next(w for w in self.tris[t2] if w != u and w != v)
                if incircle_sign(self.pts[p], self.pts[u], self.pts[v], self.pts[q]) != 0:
                    continue
                if _pair_key(self.pts, p, q) < _pair_key(self.pts, u, v):
                    self.remove_tri(t)
                    self.remove_tri(t2)
                    self.add_tri(p, u, q)
                    self.add_tri(p, q, v)
                    changed = True


def triangulate(points) -> Triangulation:
    """Delaunay triangulation by incremental insertion in input order.

    Raises InsufficientNodes for fewer than 3 nodes, DegenerateGeometry when
    all nodes are collinear, DuplicateNodes for coincident nodes.
    """
    arr = as_points(points)
    n = arr.shape[0]
    if n < 3:
        raise InsufficientNodes(f"triangulation needs >= 3 nodes, got {n}")
    pts = [(float(x), float(y)) for x, y in arr]
    seed = next(
        (j for j in range(2, n) if orient_sign(pts[0], pts[1], pts[j]) != 0), None
    )
    if seed is None:
        raise DegenerateGeometry("all nodes are collinear")
    builder = _Builder(pts)
    if orient_sign(pts[0], pts[1], pts[seed]) > 0:
        builder.add_tri(0, 1, seed)
    else:
        builder.add_tri(1, 0, seed)
    for p in range(2, n):
        if p != seed:
            builder.insert(p)
    builder.canonicalize_cocircular()

    triangles = np.array([t for t in builder.tris if t is not None], dtype=np.intp)
    # Hull chain: boundary directed edges wind counterclockwise.
    succ = {a: b for (a, b) in builder.edge if (b, a) not in builder.edge}
    start = min(succ)
    hull = [start]
    cur = succ[start]
    while cur != start:
        hull.append(cur)
        cur = succ[cur]
        if len(hull) > len(succ):
            raise RuntimeError("hull walk did not close; triangulation is malformed")
    return Triangulation(arr, triangles, np.array(hull, dtype=np.intp))


def locate(tri: Triangulation, query, tol: float = LOCATE_TOL):
    """Containing triangle and barycentric coordinates of a query point.

    Returns ``(triangle_index, bary)`` with ``bary`` summing to 1 and each
    component in [-tol, 1 + tol], or ``None`` when the query lies outside the
    hull. Queries on shared edges resolve to the lowest-index triangle.
    """
    bary = tri.barycentric(query)
    inside = np.nonzero(bary.min(axis=1) >= -tol)[0]
    if inside.size == 0:
        return None
    t = int(inside[0])
    return t, bary[t]


def convex_hull_polygon(points) -> np.ndarray:
    """Extreme points of the convex hull, counterclockwise (monotone chain).

    Collinear boundary points are dropped; degenerate inputs yield fewer than
    3 vertices (a segment's endpoints, or a single point).
    """
    arr = as_points(points)
    if arr.shape[0] == 0:
        raise InsufficientNodes("hull of an empty point set")
    pts = sorted({(x, y) for x, y in arr})
    if len(pts) == 1:
        return np.array(pts)
    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and orient_sign(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain
    lower = half(pts)
    upper = half(reversed(pts))
    poly = lower[:-1] + upper[:-1]
    if len(poly) < 3:  # all collinear: keep the two extreme endpoints
        return np.array([pts[0], pts[-1]])
    return np.array(poly)


def polygon_area(poly) -> float:
    """Shoelace area of a simple polygon (positive when counterclockwise)."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _domain_polygon(arr: np.ndarray, domain) -> np.ndarray:
    if isinstance(domain, str):
        if domain == "hull":
            return convex_hull_polygon(arr)
        if domain == "bbox":
            lo, hi = arr.min(axis=0), arr.max(axis=0)
            return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        raise ValueError(f"unknown domain {domain!r}")
    return np.atleast_2d(np.asarray(domain, dtype=float))


def fill_distance(points, domain="hull", grid_resolution: int = FILL_GRID_RESOLUTION) -> float:
    """Largest distance from any domain point to its nearest node.

    The supremum over the domain is approximated by a uniform
    ``grid_resolution x grid_resolution`` grid clipped to the (convex) domain
    polygon; the approximation error is at most one grid-cell diagonal.
    ``domain`` is a polygon vertex array, or 'hull' / 'bbox' of the node set.
    """
    arr = as_points(points)
    if arr.shape[0] == 0:
        raise InsufficientNodes("fill distance of an empty node set")
    poly = _domain_polygon(arr, domain)
    if poly.shape[0] == 1:
        candidates = poly
    elif poly.shape[0] == 2:
        t = np.linspace(0.0, 1.0, grid_resolution)[:, None]
        candidates = poly[0] + t * (poly[1] - poly[0])
    else:
        lo, hi = poly.min(axis=0), poly.max(axis=0)
        gx, gy = np.meshgrid(
            np.linspace(lo[0], hi[0], grid_resolution),
            np.linspace(lo[1], hi[1], grid_resolution),
            indexing="ij",
        )
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        if polygon_area(poly) < 0:
            poly = poly[::-1]
        tol = 1e-12 * max(hi[0] - lo[0], hi[1] - lo[1], 1.0)
        inside = np.ones(grid.shape[0], dtype=bool)
        for k in range(poly.shape[0]):
            a, b = poly[k], poly[(k + 1) % poly.shape[0]]
            cross = (b[0] - a[0]) * (grid[:, 1] - a[1]) - (b[1] - a[1]) * (grid[:, 0] - a[0])
            inside &= cross >= -tol
        candidates = grid[inside]
    if candidates.shape[0] == 0:
        return 0.0
    d = candidates[:, None, :] - arr[None, :, :]
    nearest = np.hypot(d[..., 0], d[..., 1]).min(axis=1)
    return float(nearest.max())


def separation_distance(points) -> float:
    """Half the minimum pairwise node distance."""
    arr = as_points(points)
    n = arr.shape[0]
    if n < 2:
        raise InsufficientNodes(f"separation distance needs >= 2 nodes, got {n}")
    d = arr[:, None, :] - arr[None, :, :]
    dist = np.hypot(d[..., 0], d[..., 1])
    dist[np.diag_indices(n)] = np.inf
    return 0.5 * float(dist.min())


def mesh_ratio(points, domain="hull", grid_resolution: int = FILL_GRID_RESOLUTION) -> float:
    """Fill distance over separation distance; near 1 means quasi-uniform."""
    return fill_distance(points, domain, grid_resolution) / separation_distance(points)


@dataclass(frozen=True)
class GeometryReport:
    """Node-distribution descriptors for one slice domain."""

    fill_distance: float
    separation_distance: float
    mesh_ratio: float
    n_nodes: int
    n_hull: int

    def to_dict(self) -> dict:
        return {
            "fill_distance": self.fill_distance,
            "separation_distance": self.separation_distance,
            "mesh_ratio": self.mesh_ratio,
            "n_nodes": self.n_nodes,
            "n_hull": self.n_hull,
        }


def geometry_report(points, domain="hull", grid_resolution: int = FILL_GRID_RESOLUTION) -> GeometryReport:
    """Descriptors of a node set over its domain (default: convex hull).

    ``n_hull`` counts nodes lying on the hull boundary, including nodes
    interior to a hull edge.
    """
    arr = as_points(points)
    h = fill_distance(arr, domain, grid_resolution)
    q = separation_distance(arr)
    poly = convex_hull_polygon(arr)
    tol = 1e-9 * max(np.ptp(arr[:, 0]), np.ptp(arr[:, 1]), 1.0)
    n_hull = 0
    for p in arr:
        on_boundary = False
        m = poly.shape[0]
        for k in range(m):
            a = poly[k]
            b = poly[(k + 1) % m] if m > 1 else poly[k]
            ab = b - a
            seg_len2 = ab @ ab
            if seg_len2 == 0.0:
                on_boundary = np.hypot(*(p - a)) <= tol
            else:
                t = np.clip((p - a) @ ab / seg_len2, 0.0, 1.0)
                on_boundary = np.hypot(*(p - (a + t * ab))) <= tol
            if on_boundary:
                break
        n_hull += bool(on_boundary)
    return GeometryReport(
        fill_distance=h,
        separation_distance=q,
        mesh_ratio=h / q,
        n_nodes=arr.shape[0],
        n_hull=n_hull,
    )
