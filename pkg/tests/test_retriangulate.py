import numpy as np
import pytest
from shapely.geometry import Polygon

from meshmend import fixtures
from meshmend.errors import NegativeDeficit, StillIntersecting
from meshmend.geometry import triangle_area
from meshmend.intersect import all_intersections
from meshmend.retriangulate import (boundary_sync_points, build_subdivision,
                                    clean_data, disc_criterion_holds,
                                    extract_triangles,
                                    fix_planar_intersections,
                                    rebuild_complex, required_inner_edges,
                                    retriangulate_all, subdivide_face,
                                    triangulate_disc)

TRI = [(0, 0, 0), (2, 0, 0), (0, 2, 0)]


def _tri_area(t):
    return triangle_area(*t)


def _areas_conserve(face_pts, tris, rel=1e-6):
    want = triangle_area(*face_pts)
    got = sum(_tri_area(t) for t in tris)
    assert got == pytest.approx(want, rel=rel)


def _no_overlap_shapely(tris, rel=1e-7):
    """Oracle: pairwise positive-area overlap check in 2D (z dropped)."""
    polys = [Polygon([(p[0], p[1]) for p in t]) for t in tris]
    total = sum(p.area for p in polys)
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            inter = polys[i].intersection(polys[j]).area
            assert inter <= rel * total


def test_clean_data_merges_and_remaps(tol):
    sub = build_subdivision(TRI, [((1.0, 0, 0), (1.0 + 1e-12, 0, 0))], [], tol)
    # the two endpoints welded; zero-length edge dropped
    assert len(sub.verts3d) == 4
    assert all(a != b for a, b in sub.edges)


def test_clean_data_idempotent(tol):
    sub = build_subdivision(TRI, [((0.5, 0.5, 0), (1, 0.5, 0))], [], tol)
    v, e, b = sub.counts()
    again = clean_data(sub, tol)
    assert again.counts() == (v, e, b)


def test_fix_single_segment_crossing_two_sides(tol):
    sub = build_subdivision(TRI, [((1.0, 0, 0), (0, 1.0, 0))], [], tol)
    sub = fix_planar_intersections(sub, tol)
    v, e, b = sub.counts()
    assert v == 5
    assert b == 5            # two sides split into four pieces + one intact
    assert e == 6            # plus the interior segment


def test_fix_interior_x_crossing(tol):
    segs = [((0.5, 0.5, 0), (1.0, 0.2, 0)), ((0.5, 0.2, 0), (1.0, 0.5, 0))]
    sub = build_subdivision(TRI, segs, [], tol)
    before = len(sub.verts3d)
    sub = fix_planar_intersections(sub, tol)
    assert len(sub.verts3d) == before + 1      # one crossing vertex
    assert len(sub.edges) == 3 + 4             # boundary + both split in two


def test_fix_no_intersections_is_identity(tol):
    sub = build_subdivision(TRI, [], [], tol)
    fixed = fix_planar_intersections(sub, tol)
    assert fixed.counts() == (3, 3, 3)


def test_required_inner_edges_examples():
    assert required_inner_edges(3, 3, 3) == 0
    assert required_inner_edges(4, 3, 3) == 3   # cone over triangle
    assert required_inner_edges(4, 4, 4) == 1   # square needs one diagonal
    with pytest.raises(NegativeDeficit):
        required_inner_edges(3, 3, 10)


def test_criterion_examples():
    assert disc_criterion_holds(3, 3, 3)
    assert not disc_criterion_holds(4, 4, 4)
    assert disc_criterion_holds(4, 5, 4)        # square + diagonal


def test_quad_gets_shorter_diagonal(tol):
    # an asymmetric quad: candidates sorted by length force the short diagonal
    pts3 = [np.array(p, dtype=float) for p in
            [(0, 0, 0), (3, 0, 0), (3.4, 1, 0), (0, 1, 0)]]
    sub = build_subdivision([(-1, -1, 0), (10, -1, 0), (-1, 10, 0)], [], [], tol)
    # craft the subdivision directly: quad boundary inside a large triangle
    sub.verts3d = pts3
    sub.verts2d = np.array([[p[0], p[1]] for p in pts3])
    sub.edges = {(0, 1), (1, 2), (2, 3), (0, 3)}
    sub.boundary = set(sub.edges)
    sub.corner2d = np.array([[-1, -1], [10, -1], [-1, 10]], dtype=float)
    sub = triangulate_disc(sub, tol)
    # diagonal (1,3) has length sqrt(10) < sqrt(3.4^2 + 1) of (0,2)
    assert (1, 3) in sub.edges and (0, 2) not in sub.edges


def test_triangle_with_centroid_spokes(tol):
    tris = subdivide_face(TRI, [], [(2 / 3, 2 / 3, 0)], tol)
    assert len(tris) == 3
    _areas_conserve(TRI, tris)


def test_star_of_david_subdivision(tol):
    """Hexagram constraints inside a big triangle: triangulation terminates
    with F = (2E + E')/3 positive-area triangles tiling the face."""
    def hexagram_segments():
        a = [np.array([np.cos(t), np.sin(t), 0]) for t in
             (0, 2 * np.pi / 3, 4 * np.pi / 3)]
        b = [np.array([np.cos(t + np.pi / 3), np.sin(t + np.pi / 3), 0])
             for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
        segs = []
        for tri in (a, b):
            for k in range(3):
                segs.append((tri[k], tri[(k + 1) % 3]))
        return segs

    face = [(-4, -4, 0), (6, -4, 0), (-4, 6, 0)]
    sub = build_subdivision(face, hexagram_segments(), [], tol)
    sub = fix_planar_intersections(sub, tol)
    sub = triangulate_disc(sub, tol)
    v, e, b = sub.counts()
    assert disc_criterion_holds(v, e, b)
    tris = extract_triangles(sub)
    assert len(tris) == (2 * (e - b) + b) // 3
    assert all(_tri_area(t) > 0 for t in tris)
    _areas_conserve(face, tris)
    _no_overlap_shapely(tris)


def test_extract_examples(tol):
    assert len(subdivide_face(TRI, [], [], tol)) == 1
    tris = subdivide_face(TRI, [((1.0, 0, 0), (0, 1.0, 0))], [], tol)
    assert len(tris) == 3
    _areas_conserve(TRI, tris)


def test_gluing_two_discs_gives_sphere_counts(tol):
    """Doubling the triangulated disc across its boundary yields chi = 2."""
    segs = [((0.5, 0.5, 0), (1.2, 0.3, 0))]
    sub = build_subdivision(TRI, segs, [], tol)
    sub = fix_planar_intersections(sub, tol)
    sub = triangulate_disc(sub, tol)
    v, e_total, b = sub.counts()
    f = (2 * (e_total - b) + b) // 3
    v_boundary = b  # disc: boundary vertex count equals boundary edge count
    chi_double = (2 * v - v_boundary) - (2 * e_total - b) + 2 * f
    assert chi_double == 2


def test_random_subdivisions_invariants(rng, tol):
    for trial in range(60):
        segs = []
        for _ in range(rng.integers(1, 5)):
            p = rng.uniform(0.05, 0.9, size=2)
            q = rng.uniform(0.05, 0.9, size=2)
            # keep endpoints inside the face triangle x+y<2
            p = p / max(1.0, (p[0] + p[1]) / 1.8)
            q = q / max(1.0, (q[0] + q[1]) / 1.8)
            segs.append(((p[0], p[1], 0), (q[0], q[1], 0)))
        tris = subdivide_face(TRI, segs, [], tol)
        _areas_conserve(TRI, tris)
        _no_overlap_shapely(tris)


def _coordinate_face_keys(emb):
    keys = []
    for f in emb.faces:
        keys.append(tuple(sorted(tuple(np.round(emb.coords[v], 9)) for v in f)))
    return sorted(keys)


def test_rebuild_identity_when_intersection_free():
    ico = fixtures.regular_icosahedron()
    rebuilt = rebuild_complex(ico, {})
    assert rebuilt.counts() == ico.counts()
    # combinatorially identical up to vertex re-indexing
    assert _coordinate_face_keys(rebuilt) == _coordinate_face_keys(ico)


def test_rebuild_interlocked_tetrahedra_intersection_free(tol):
    emb = fixtures.interlocked_tetrahedra()
    rep = all_intersections(emb)
    extra = boundary_sync_points(emb, rep.by_face, emb.tol)
    tris = retriangulate_all(emb, rep.by_face, emb.tol, extra_points=extra)
    # per-face area conservation
    for fi, t_list in tris.items():
        _areas_conserve(emb.face_points(fi), t_list)
    rebuilt = rebuild_complex(emb, tris, strict_recheck=True)
    assert all_intersections(rebuilt).is_intersection_free


def test_rebuild_strict_recheck_raises_when_skipping_constraints():
    emb = fixtures.interlocked_tetrahedra()
    with pytest.raises(StillIntersecting):
        rebuild_complex(emb, {}, strict_recheck=True)


def test_minimality_no_steiner_points(tol):
    """Output vertex count equals corners + forced intersection vertices."""
    segs = [((0.6, 0.2, 0), (0.2, 0.6, 0))]
    sub = build_subdivision(TRI, segs, [], tol)
    sub = fix_planar_intersections(sub, tol)
    v_after_fix = len(sub.verts3d)
    sub = triangulate_disc(sub, tol)
    assert len(sub.verts3d) == v_after_fix
