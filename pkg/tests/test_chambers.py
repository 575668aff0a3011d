import numpy as np
import pytest

from meshmend import fixtures
from meshmend.chambers import (all_chambers, chamber_volume, exploded_view,
                               unbounded_side_map)
from meshmend.errors import PreconditionViolated


def test_tetrahedron_two_chambers():
    lab = all_chambers(fixtures.tetrahedron())
    assert len(lab.chambers) == 2
    assert len(lab.bounded_chambers()) == 1
    assert lab.bounded_chambers()[0].volume == pytest.approx(1 / 6)


def test_convex_complex_has_two_chambers(rng):
    emb = fixtures.random_convex_polytope(rng, 20)
    lab = all_chambers(emb)
    assert len(lab.chambers) == 2


def test_unit_cube_volume():
    lab = all_chambers(fixtures.box())
    assert lab.bounded_chambers()[0].volume == pytest.approx(1.0, abs=1e-9)


def test_cube_with_diaphragm_three_chambers():
    lab = all_chambers(fixtures.cube_with_diaphragm())
    vols = sorted(c.volume for c in lab.bounded_chambers())
    assert len(lab.chambers) == 3
    assert vols == pytest.approx([0.5, 0.5])


def test_nested_cubes_shell_merges_components():
    lab = all_chambers(fixtures.nested_cubes())
    assert len(lab.chambers) == 3
    vols = sorted(c.volume for c in lab.bounded_chambers())
    assert vols == pytest.approx([0.125, 0.875])
    shell = max(lab.bounded_chambers(), key=lambda c: c.volume)
    assert shell.n_components == 2


def test_label_coverage_and_uniqueness():
    for emb in (fixtures.tetrahedron(), fixtures.cube_with_diaphragm(),
                fixtures.nested_cubes()):
        lab = all_chambers(emb)
        assert len(lab.label) == 2 * len(emb.faces)
        keys = {(f, s) for f in range(len(emb.faces)) for s in (1, -1)}
        assert set(lab.label) == keys


def test_volume_conservation():
    for emb in (fixtures.tetrahedron(), fixtures.nested_cubes(),
                fixtures.cube_with_diaphragm()):
        lab = all_chambers(emb)
        bounded = sum(c.volume for c in lab.bounded_chambers())
        hull_sides = lab.chambers[lab.unbounded].sides
        enclosed = chamber_volume(emb, hull_sides)
        assert bounded == pytest.approx(enclosed, rel=1e-6)


def test_chamber_volume_tetrahedron_oriented():
    t = fixtures.tetrahedron()
    lab = all_chambers(t)
    inner = lab.bounded_chambers()[0]
    assert chamber_volume(t, inner.sides) == pytest.approx(1 / 6)


def test_unbounded_side_map_requires_hull():
    nc = fixtures.nested_cubes()
    with pytest.raises(PreconditionViolated):
        unbounded_side_map(nc)
    from meshmend.outerhull import outer_hull
    hull = outer_hull(nc)
    m = unbounded_side_map(hull)
    assert len(m) == len(hull.faces)


def test_exploded_view_zero_magnitude_identity():
    cd = fixtures.cube_with_diaphragm()
    lab = all_chambers(cd)
    out = exploded_view(cd, lab, 0.0)
    for ch, coords, faces_local, _ in out:
        verts = sorted({v for f in ch.faces for v in cd.faces[f]})
        assert np.allclose(coords, cd.coords[verts])


def test_exploded_view_linear_in_magnitude():
    cd = fixtures.cube_with_diaphragm()
    lab = all_chambers(cd)
    one = exploded_view(cd, lab, 1.0)
    two = exploded_view(cd, lab, 2.0)
    centre = cd.coords.mean(axis=0)
    for (ch1, c1, _, _), (ch2, c2, _, _) in zip(one, two):
        verts = sorted({v for f in ch1.faces for v in cd.faces[f]})
        base = cd.coords[verts]
        s1 = c1 - base
        s2 = c2 - base
        assert np.allclose(s2, 2 * s1)
        assert np.allclose(s1[0], ch1.centroid - centre)


def test_exploded_view_boxes_separate_along_axis():
    cd = fixtures.cube_with_diaphragm()
    lab = all_chambers(cd)
    out = exploded_view(cd, lab, 1.0)
    assert len(out) == 2
    (c1, a, _, _), (c2, b, _, _) = out
    # the two boxes move apart along z through the shared centre
    assert abs((c1.centroid - c2.centroid)[2]) > 0.4
    gap = min(abs(a[:, 2].min() - b[:, 2].max()),
              abs(b[:, 2].min() - a[:, 2].max()))
    assert gap > 0.4


def test_exploded_view_separation_at_magnitude_four():
    gi = fixtures.great_icosahedron()
    from meshmend.intersect import all_intersections
    from meshmend.retriangulate import (boundary_sync_points, rebuild_complex,
                                        retriangulate_all)
    rep = all_intersections(gi)
    extra = boundary_sync_points(gi, rep.by_face, gi.tol)
    rebuilt = rebuild_complex(
        gi, retriangulate_all(gi, rep.by_face, gi.tol, extra_points=extra))
    lab = all_chambers(rebuilt)
    out = exploded_view(rebuilt, lab, 4.0)
    # bounding boxes of the central chamber and a far chamber are disjoint
    centre = rebuilt.coords.mean(axis=0)
    ordered = sorted(out, key=lambda e: np.linalg.norm(e[0].centroid - centre))
    a = ordered[0][1]
    b = ordered[-1][1]
    disjoint = np.any(a.max(axis=0) < b.min(axis=0)) or \
        np.any(b.max(axis=0) < a.min(axis=0))
    assert disjoint
