import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import min_separated
from surfbench.errors import DegenerateGeometry, DuplicateNodes, InsufficientNodes
from surfbench.geometry import (
    GeometryReport,
    PointSet2,
    convex_hull_polygon,
    fill_distance,
    geometry_report,
    incircle_sign,
    locate,
    mesh_ratio,
    orient_sign,
    polygon_area,
    separation_distance,
    triangulate,
)

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def circumcircle(a, b, c):
    """Independent oracle: circumcenter via the perpendicular-bisector solve."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    center = np.array([ux, uy])
    return center, float(np.hypot(*(a - center)))


def assert_delaunay(tri, rel_tol=1e-10):
    """Empty-circumcircle check against the independent circumcenter oracle."""
    for i, j, k in tri.triangles:
        center, radius = circumcircle(tri.points[i], tri.points[j], tri.points[k])
        for m in range(tri.n_vertices):
            if m in (i, j, k):
                continue
            dist = float(np.hypot(*(tri.points[m] - center)))
            assert dist >= radius * (1.0 - rel_tol), (
                f"vertex {m} strictly inside circumcircle of triangle ({i},{j},{k})"
            )


class TestPredicates:
    def test_orientation_signs(self):
        assert orient_sign((0, 0), (1, 0), (0, 1)) == 1
        assert orient_sign((0, 0), (0, 1), (1, 0)) == -1
        assert orient_sign((0, 0), (1, 1), (2, 2)) == 0

    def test_orientation_relative_epsilon_band(self):
        # offset far below 1e-12 relative: treated as collinear
        assert orient_sign((0, 0), (1, 0), (0.5, 1e-16)) == 0
        # offset far above the band: exact sign
        assert orient_sign((0, 0), (1, 0), (0.5, 1e-9)) == 1

    def test_incircle_signs(self):
        assert incircle_sign((0, 0), (1, 0), (0, 1), (0.2, 0.2)) == 1
        assert incircle_sign((0, 0), (1, 0), (0, 1), (5.0, 5.0)) == -1
        assert incircle_sign((0, 0), (1, 0), (1, 1), (0, 1)) == 0  # cocircular


class TestPointSet:
    def test_duplicate_rejected(self):
        with pytest.raises(DuplicateNodes):
            PointSet2(np.array([[0.0, 0.0], [1.0, 1.0], [1e-13, 0.0]]))

    def test_clean_set_accepted(self):
        ps = PointSet2(UNIT_SQUARE)
        assert ps.n == 4


class TestTriangulate:
    def test_unit_square_two_triangles_four_hull(self):
        tri = triangulate(UNIT_SQUARE)
        assert tri.n_triangles == 2
        assert len(tri.hull) == 4
        assert_delaunay(tri)

    def test_cocircular_tie_break_prefers_smallest_pair(self):
        # both diagonals are Delaunay; the canonical one joins (0,0)-(1,1)
        tri = triangulate(UNIT_SQUARE)
        assert (0, 2) in set(tri.edges())

    def test_three_points_one_triangle(self):
        tri = triangulate(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]))
        assert tri.n_triangles == 1

    def test_collinear_rejected(self):
        with pytest.raises(DegenerateGeometry):
            triangulate(np.array([[float(i), 2.0 * i] for i in range(5)]))

    def test_too_few_points(self):
        with pytest.raises(InsufficientNodes):
            triangulate(np.array([[0.0, 0.0], [1.0, 0.0]]))

    def test_grid_euler_count(self):
        xs = np.linspace(1.0, 2.0, 4)
        ys = np.linspace(0.5, 1.5, 4)
        grid = np.array([[x, y] for x in xs for y in ys])
        tri = triangulate(grid)
        assert tri.n_triangles == 2 * 16 - len(tri.hull) - 2
        assert len(tri.hull) == 12  # boundary nodes, including collinear ones
        assert_delaunay(tri)

    def test_deterministic_for_fixed_input(self):
        rng = np.random.default_rng(5)
        pts = min_separated(rng, 20, 0.05)
        a = triangulate(pts)
        b = triangulate(pts)
        np.testing.assert_array_equal(a.triangles, b.triangles)
        np.testing.assert_array_equal(a.hull, b.hull)

    def test_positive_areas_and_area_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            pts = min_separated(rng, int(rng.integers(4, 25)), 0.03)
            if len(pts) < 3:
                continue
            tri = triangulate(pts)
            areas = tri.triangle_areas()
            assert (areas > 0).all()
            hull_area = polygon_area(convex_hull_polygon(pts))
            assert areas.sum() == pytest.approx(hull_area, rel=1e-9)

    def test_neighbors_are_mutual(self):
        tri = triangulate(min_separated(np.random.default_rng(2), 15, 0.05))
        for t in range(tri.n_triangles):
            for k in range(3):
                n = tri.neighbors[t, k]
                if n >= 0:
                    assert t in tri.neighbors[n]

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_delaunay_property_random_sets(self, seed):
        rng = np.random.default_rng(seed)
        pts = min_separated(rng, int(rng.integers(3, 18)), 0.05)
        if len(pts) < 3:
            return
        try:
            tri = triangulate(pts)
        except DegenerateGeometry:
            return
        assert_delaunay(tri)
        assert tri.n_triangles == 2 * len(pts) - len(tri.hull) - 2


class TestLocate:
    def test_vertex_has_unit_barycentric(self):
        tri = triangulate(UNIT_SQUARE)
        t, bary = locate(tri, [0.0, 0.0])
        v = tri.triangles[t].tolist().index(0)
        assert bary[v] == pytest.approx(1.0, abs=1e-12)

    def test_centroid_is_uniform(self):
        tri = triangulate(np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]))
        t, bary = locate(tri, [1.0, 1.0])
        np.testing.assert_allclose(bary, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)

    def test_far_outside_is_none(self):
        tri = triangulate(UNIT_SQUARE)
        assert locate(tri, [10.0, -3.0]) is None

    def test_barycentric_reconstruction(self):
        rng = np.random.default_rng(9)
        pts = min_separated(rng, 14, 0.05)
        tri = triangulate(pts)
        for _ in range(50):
            q = rng.uniform(0, 1, 2)
            hit = locate(tri, q)
            if hit is None:
                continue
            t, bary = hit
            rebuilt = bary @ tri.points[tri.triangles[t]]
            np.testing.assert_allclose(rebuilt, q, rtol=1e-9, atol=1e-12)


class TestFillDistance:
    def test_unit_square_corners(self):
        # farthest domain point is the center at distance sqrt(2)/2
        cell_diag = math.sqrt(2.0) / 199.0
        assert fill_distance(UNIT_SQUARE) == pytest.approx(
            math.sqrt(2.0) / 2.0, abs=cell_diag
        )

    def test_single_point_degenerate_domain(self):
        assert fill_distance(np.array([[2.0, 3.0]])) == 0.0

    def test_regular_grid_is_half_diagonal(self):
        s = 0.25
        pts = np.array([[i * s, j * s] for i in range(5) for j in range(5)])
        cell_diag = math.hypot(1.0, 1.0) / 199.0
        assert fill_distance(pts) == pytest.approx(s / math.sqrt(2.0), abs=cell_diag)

    def test_empty_set_rejected(self):
        with pytest.raises(InsufficientNodes):
            fill_distance(np.empty((0, 2)))

    def test_refinement_is_monotone_up_to_cell_diagonal(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            pts = min_separated(rng, 12, 0.05)
            coarse = fill_distance(pts, grid_resolution=50)
            fine = fill_distance(pts, grid_resolution=100)
            poly = convex_hull_polygon(pts)
            w, h = np.ptp(poly[:, 0]), np.ptp(poly[:, 1])
            diag = math.hypot(w / 49.0, h / 49.0)
            assert fine >= coarse - diag

    def test_adding_a_point_weakly_decreases_fill(self):
        rng = np.random.default_rng(22)
        pts = min_separated(rng, 10, 0.08)
        domain = convex_hull_polygon(pts)
        base = fill_distance(pts, domain=domain)
        centroid = pts.mean(axis=0)
        augmented = np.vstack([pts, centroid])
        assert fill_distance(augmented, domain=domain) <= base + 1e-12

    def test_bbox_domain_flag(self):
        assert fill_distance(UNIT_SQUARE, domain="bbox") == fill_distance(UNIT_SQUARE)


class TestSeparation:
    def test_unit_square(self):
        assert separation_distance(UNIT_SQUARE) == 0.5

    def test_two_points(self):
        assert separation_distance(np.array([[0.0, 0.0], [3.0, 0.0]])) == 1.5

    def test_slice_grid_matches_brute_force(self, default_dataset):
        # the x3=2 slice projected to (x1, x2): separation is half the minimum spacing
        rows = default_dataset.x[:, 2] == 2.0
        pts = default_dataset.x[rows][:, :2]
        brute = min(
            math.hypot(*(pts[i] - pts[j]))
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
        )
        assert separation_distance(pts) == pytest.approx(0.5 * brute, rel=1e-12)
        assert separation_distance(pts) == pytest.approx(0.5 * (1.0 / 3.0), rel=1e-9)

    def test_single_point_rejected(self):
        with pytest.raises(InsufficientNodes):
            separation_distance(np.array([[0.0, 0.0]]))


class TestMeshRatio:
    def test_unit_square(self):
        assert mesh_ratio(UNIT_SQUARE) == pytest.approx(math.sqrt(2.0), abs=0.02)

    def test_two_point_segment(self):
        # exact ratio is 1 (midpoint argument); allow the segment-sampling slack
        pts = np.array([[0.0, 0.0], [2.0, 0.0]])
        sampling_slack = 2.0 / 199.0 / 2.0
        assert mesh_ratio(pts) >= 1.0 - sampling_slack / separation_distance(pts)

    def test_ratio_at_least_one(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            pts = min_separated(rng, int(rng.integers(4, 20)), 0.05)
            if len(pts) < 3:
                continue
            poly = convex_hull_polygon(pts)
            w, h = np.ptp(poly[:, 0]), np.ptp(poly[:, 1])
            slack = math.hypot(w / 199.0, h / 199.0)
            assert mesh_ratio(pts) >= 1.0 - slack / separation_distance(pts)


class TestGeometryReport:
    def test_report_keys_and_values(self):
        report = geometry_report(UNIT_SQUARE)
        payload = report.to_dict()
        assert set(payload) == {
            "fill_distance",
            "separation_distance",
            "mesh_ratio",
            "n_nodes",
            "n_hull",
        }
        assert payload["n_nodes"] == 4
        assert payload["n_hull"] == 4
        assert isinstance(report, GeometryReport)

    def test_grid_hull_counts_collinear_boundary_nodes(self):
        xs = np.linspace(0.0, 1.0, 4)
        grid = np.array([[x, y] for x in xs for y in xs])
        assert geometry_report(grid).n_hull == 12
