import struct

import numpy as np
import pytest

from meshmend import fixtures
from meshmend.complexes import euler_characteristic, outward_orientation
from meshmend.errors import DegenerateFace, NotClosed, ParseError
from meshmend.meshio import load_mesh, save_mesh, sniff_format


def _face_keys(emb, decimals=5):
    out = []
    for f in emb.faces:
        out.append(tuple(sorted(tuple(np.round(emb.coords[v], decimals))
                                for v in f)))
    return sorted(out)


@pytest.mark.parametrize("fmt,suffix", [("off", ".off"),
                                        ("stl-ascii", ".stl"),
                                        ("stl-binary", ".stl")])
def test_roundtrip_tetrahedron(tmp_path, fmt, suffix):
    t = fixtures.tetrahedron()
    p = tmp_path / f"t{suffix}"
    save_mesh(t, p, fmt=fmt)
    back = load_mesh(p)
    assert back.counts() == t.counts()
    assert euler_characteristic(back.complex) == 2
    assert _face_keys(back) == _face_keys(t)


def test_cross_format_roundtrip(tmp_path):
    ico = fixtures.regular_icosahedron()
    pa = tmp_path / "a.stl"
    pb = tmp_path / "b.stl"
    save_mesh(ico, pa, fmt="stl-ascii")
    back = load_mesh(pa)
    save_mesh(back, pb, fmt="stl-binary")
    again = load_mesh(pb)
    assert again.counts() == ico.counts()
    # float32 storage: coordinates match to single precision
    assert _face_keys(again, decimals=5) == _face_keys(ico, decimals=5)


def test_off_icosahedron_counts(tmp_path):
    ico = fixtures.regular_icosahedron()
    p = tmp_path / "ico.off"
    save_mesh(ico, p, fmt="off")
    back = load_mesh(p)
    assert back.counts() == (12, 30, 20)
    assert euler_characteristic(back.complex) == 2


def test_binary_stl_golden_layout(tmp_path):
    t = fixtures.tetrahedron()
    p = tmp_path / "t.stl"
    save_mesh(t, p, fmt="stl-binary")
    data = p.read_bytes()
    assert len(data) == 84 + 50 * 4
    (count,) = struct.unpack("<I", data[80:84])
    assert count == 4
    windings = outward_orientation(t)
    for i in range(count):
        rec = data[84 + 50 * i: 84 + 50 * (i + 1)]
        floats = struct.unpack("<12f", rec[:48])
        (attr,) = struct.unpack("<H", rec[48:])
        assert attr == 0
        n = np.array(floats[:3])
        tri = np.array(floats[3:]).reshape(3, 3)
        a, b, c = tri
        rhr = np.cross(b - a, c - a)
        rhr = rhr / np.linalg.norm(rhr)
        assert np.allclose(n, rhr, atol=1e-6)
        # facet corners are vertices of the mesh
        for corner in tri:
            assert np.min(np.linalg.norm(t.coords - corner, axis=1)) < 1e-6


def test_sniff(tmp_path):
    t = fixtures.tetrahedron()
    for fmt, name in [("off", "a.off"), ("stl-ascii", "b.stl"),
                      ("stl-binary", "c.stl")]:
        p = tmp_path / name
        save_mesh(t, p, fmt=fmt)
        assert sniff_format(p) == fmt


def test_welding_is_order_independent(tmp_path, rng):
    ico = fixtures.regular_icosahedron()
    windings = outward_orientation(ico)
    order = list(range(20))
    rng.shuffle(order)
    p = tmp_path / "shuffled.stl"
    shuffled = [windings[i] for i in order]
    save_mesh(ico, p, fmt="stl-binary", windings=shuffled)
    back = load_mesh(p)
    assert back.counts() == (12, 30, 20)


def test_stl_with_hole_not_closed(tmp_path):
    t = fixtures.tetrahedron()
    windings = outward_orientation(t)
    p = tmp_path / "hole.stl"
    save_mesh(t, p, fmt="stl-binary",
              windings=[windings[i] for i in range(3)])  # drop one facet
    with pytest.raises(NotClosed):
        load_mesh(p)


def test_truncated_binary_stl(tmp_path):
    t = fixtures.tetrahedron()
    p = tmp_path / "trunc.stl"
    save_mesh(t, p, fmt="stl-binary")
    data = p.read_bytes()
    p.write_bytes(data[:-10])
    with pytest.raises(ParseError):
        load_mesh(p, fmt="stl-binary")


def test_bad_off_rejected(tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n4 0 1 2 3\n")
    with pytest.raises(ParseError):
        load_mesh(p)
    p.write_text("NOPE\n")
    with pytest.raises(ParseError):
        load_mesh(p)


def test_degenerate_soup_triangle_rejected(tmp_path):
    p = tmp_path / "degen.stl"
    with open(p, "w") as fh:
        fh.write("solid s\n")
        for tri in [
            [(0, 0, 0), (1, 0, 0), (1e-13, 0, 0)],
        ]:
            fh.write(" facet normal 0 0 1\n  outer loop\n")
            for v in tri:
                fh.write(f"   vertex {v[0]} {v[1]} {v[2]}\n")
            fh.write("  endloop\n endfacet\n")
        fh.write("endsolid s\n")
    with pytest.raises(DegenerateFace):
        load_mesh(p)


def test_fixture_counts():
    assert fixtures.regular_icosahedron().counts() == (12, 30, 20)
    gi = fixtures.great_icosahedron()
    assert gi.counts() == (12, 30, 20)
    assert euler_characteristic(gi.complex) == 2
    from meshmend.intersect import all_intersections
    assert not all_intersections(gi).is_intersection_free
    c23 = fixtures.cyclic_ring_surface(23)
    assert c23.counts() == (71, 207, 138)
    assert euler_characteristic(c23.complex) == 2
