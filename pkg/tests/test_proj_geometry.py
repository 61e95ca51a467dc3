import math
from fractions import Fraction

import numpy as np
import pytest

from projgasket.lattice_tree import (E_C, E_T, NAMED_BASES, Basis, ProjPoint, child_basis,
                                     enumerate_tree, int_det, iter_levels, simplex_basis)
from projgasket.proj_geometry import (Chart, ChartError, PointAtInfinityError, basis_coordinates,
                                      body_diameter, body_facets, body_surface, body_triangulation,
                                      body_vertex_points, body_vertices, canonical_distance,
                                      default_chart, face_membership, inscribed_radius,
                                      level_measures, mu_body, mu_simplex, simplex_inradius,
                                      tetra_volume_over_surface, triangle_incircle_radius)


def _mc_volume(verts, samples, seed):
    """Monte Carlo volume of the convex hull of n+1 points (a simplex) in R^n."""
    rng = np.random.default_rng(seed)
    verts = np.asarray(verts, dtype=float)
    lo, hi = verts.min(0), verts.max(0)
    box = float(np.prod(hi - lo))
    T = (verts[1:] - verts[0]).T
    Tinv = np.linalg.inv(T)
    hits = 0
    chunk = 1_000_000
    for start in range(0, samples, chunk):
        x = lo + (hi - lo) * rng.random((min(chunk, samples - start), len(lo)))
        lam = (x - verts[0]) @ Tinv.T
        hits += int(np.count_nonzero((lam >= 0).all(1) & (lam.sum(1) <= 1)))
    p = hits / samples
    return box * p, box * math.sqrt(p * (1 - p) / samples)


@pytest.mark.parametrize("root,index", [(simplex_basis(2), (2, 1)), (E_C, (3,)),
                                        (simplex_basis(3), (1, 4)), (E_T, ())])
def test_mu_simplex_monte_carlo(root, index):
    b = root
    for k, i in enumerate(index):
        b = child_basis(b, i, index[:k])
    chart = default_chart(root)
    verts = chart.project_array(b.as_array().astype(float))
    est, sd = _mc_volume(verts, 10_000_000, seed=12345)
    assert abs(mu_simplex(b, chart) - est) < 5 * sd


def test_mu_body_monte_carlo_n2():
    b = child_basis(simplex_basis(2), 3)
    chart = default_chart(simplex_basis(2))
    verts = chart.project_array(np.array(body_vertices(b), dtype=float))
    est, sd = _mc_volume(verts, 10_000_000, seed=7)
    assert abs(mu_body(b, chart) - est) < 5 * sd


def test_known_values():
    ch = default_chart(E_C)
    assert ch.format() == "simplex"
    assert mu_simplex(E_C, ch) == pytest.approx(0.5)
    assert mu_body(E_C, ch) == pytest.approx(0.125)
    assert mu_body(E_C, Chart.sum_chart(3)) == pytest.approx(0.03125)
    # corner simplex in the last-axis chart: unit simplex, body = middle quarter
    assert mu_simplex(simplex_basis(2)) == pytest.approx(0.5)
    assert mu_body(simplex_basis(2)) == pytest.approx(0.125)
    assert mu_simplex(E_T) == pytest.approx(1 / 6)
    assert mu_body(E_T) == pytest.approx(1 / 12)


@pytest.mark.parametrize("root", [simplex_basis(2), E_C, E_T])
def test_partition_identity_small(root):
    ch = default_chart(root)
    for _, b in enumerate_tree(root, 3):
        parts = sum(mu_simplex(child_basis(b, i), ch) for i in range(1, len(b) + 1))
        assert mu_simplex(b, ch) == pytest.approx(parts + mu_body(b, ch), rel=1e-12, abs=1e-15)


def test_body_vertex_counts():
    assert len(body_vertex_points(E_T)) == 6
    assert len(body_vertices(E_C)) == 3
    assert len(body_facets(4)) == 8
    # the triangulation covers the body exactly: compare with simplex minus children
    assert len(body_triangulation(3)) == 1


def test_chart_basics():
    ch = Chart.axis_chart(3, 3)
    assert list(ch.project((2, 4, 2))) == [1.0, 2.0]
    assert ch.project_exact((1, 2, 3)) == (Fraction(1, 3), Fraction(2, 3))
    with pytest.raises(PointAtInfinityError):
        ch.project((1, 2, 0))
    with pytest.raises(ChartError):
        Chart.axis_chart(0, 3)
    with pytest.raises(ChartError):
        Chart.parse("simplex", 3)
    assert Chart.parse("sum", 3) == Chart.sum_chart(3)
    assert Chart.parse("2", 3) == Chart.axis_chart(2, 3)


def test_simplex_chart_sends_root_to_unit_simplex():
    for root in (E_C, simplex_basis(2), E_T, Basis(((2, 1, 0), (0, 1, 3), (1, 0, 1)))):
        ch = Chart.simplex_chart(root)
        P = ch.project_array(root.as_array().astype(float))
        n = root.n
        expect = np.vstack([np.eye(n), np.zeros(n)])
        assert np.allclose(P, expect)
    # coincides with the last-axis chart for the corner simplex bases
    assert np.allclose(Chart.simplex_chart(E_T).matrix(), Chart.axis_chart(4, 4).matrix())


def test_default_chart_choice():
    assert default_chart(simplex_basis(2)).format() == "3"
    assert default_chart(E_T).format() == "4"
    assert default_chart(E_C).format() == "simplex"


def test_level_measures_match_scalar_functions():
    for root in (E_C, E_T, simplex_basis(2)):
        ch = default_chart(root)
        det = abs(root.det())
        for d, arr in iter_levels(root, 3):
            meas = level_measures(arr, ch, det)
            for p in range(0, len(arr), 5):
                b = Basis.from_rows(arr[p].tolist())
                assert meas["volume"][p] == pytest.approx(mu_body(b, ch), rel=1e-10)
                assert meas["surface"][p] == pytest.approx(body_surface(b, ch), rel=1e-10)
                assert meas["radius"][p] == pytest.approx(inscribed_radius(b, ch), rel=1e-10)
                assert meas["diameter"][p] == pytest.approx(body_diameter(b), rel=1e-10)
                assert meas["simplex_volume"][p] == pytest.approx(mu_simplex(b, ch), rel=1e-10)


def test_simplex_inradius_against_formula():
    arr = E_T.as_array()[None]
    r = simplex_inradius(arr, default_chart(E_T), 1)[0]
    # unit corner tetrahedron: r = 1 / (3 + sqrt 3)
    assert r == pytest.approx(1 / (3 + math.sqrt(3)))


def test_inradius_helpers():
    assert triangle_incircle_radius([(0, 0), (3, 0), (0, 4)]) == pytest.approx(1.0)
    reg = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float)
    edge = 2 * math.sqrt(2)
    r_in = edge / math.sqrt(24)
    assert tetra_volume_over_surface(reg) == pytest.approx(r_in / 3)
    with pytest.raises(ValueError):
        inscribed_radius(NAMED_BASES["n1"])


def test_canonical_distance():
    assert canonical_distance((1, 0, 0), (0, 1, 0)) == pytest.approx(math.pi / 2)
    assert canonical_distance((1, 1, 0), (2, 2, 0)) == 0.0
    assert canonical_distance((1, 2, 3), (-1, -2, -3)) == 0.0
    p, q = (1, 2, 3), (3, 1, 2)
    assert canonical_distance(p, q) == pytest.approx(canonical_distance(q, p))
    assert canonical_distance(p, q) == pytest.approx(
        canonical_distance(tuple(map(float, p)), tuple(map(float, q))))


def test_face_membership():
    root = simplex_basis(2)
    e = root.vectors
    mid = tuple(a + b for a, b in zip(e[0], e[1]))
    assert face_membership(mid, root) == 3
    assert face_membership(tuple(sum(c) for c in zip(*e)), root) is None
    assert face_membership((1, 0, 0), root) is None  # outside S(E)
    c = basis_coordinates(ProjPoint((2, 1, 4)), root)
    assert sum(ci * np.array(v) for ci, v in zip(c, e)).tolist() == [2, 1, 4]


def test_unsuitable_chart_raises():
    with pytest.raises(ChartError):
        level_measures(E_C.as_array()[None], Chart.axis_chart(3, 3), abs(E_C.det()))


def test_triangulation_pieces_are_nondegenerate():
    for m in (3, 4, 5):
        for K in body_triangulation(m):
            assert int_det(K) != 0
