"""Deterministic test and benchmark geometries.

Everything returns an EmbeddedComplex; the registry at the bottom maps CLI
names to constructors and, where known, to the symmetry group of the shape.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .complexes import EmbeddedComplex, build_complex
from .geometry import Tolerance
from .symmetry import cyclic_group_matrices, icosahedral_group_matrices

__all__ = [
    "tetrahedron",
    "regular_icosahedron",
    "great_icosahedron",
    "box",
    "nested_cubes",
    "cube_with_diaphragm",
    "interlocked_tetrahedra",
    "two_tetrahedra_shared_vertex",
    "two_tetrahedra_shared_edge",
    "chain_boxes",
    "cyclic_ring_surface",
    "open_fan_complex",
    "random_convex_polytope",
    "FIXTURES",
    "FIXTURE_GROUPS",
]

_PHI = (1 + math.sqrt(5)) / 2


def _embed(coords, faces, eps_rel=1e-9) -> EmbeddedComplex:
    coords = np.asarray(coords, dtype=float)
    return EmbeddedComplex(build_complex(faces), coords,
                           Tolerance.for_bbox(coords, eps_rel))


def tetrahedron() -> EmbeddedComplex:
    coords = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    faces = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return _embed(coords, faces)


def _icosahedron_vertices() -> np.ndarray:
    out = []
    for a, b in itertools.product((1.0, -1.0), repeat=2):
        out.append((0.0, a, b * _PHI))
        out.append((a, b * _PHI, 0.0))
        out.append((a * _PHI, 0.0, b))
    return np.array(out)


def _faces_at_squared_distance(coords, d2, tol=1e-9):
    faces = []
    n = len(coords)
    for i, j, k in itertools.combinations(range(n), 3):
        dd = (np.sum((coords[i] - coords[j]) ** 2),
              np.sum((coords[j] - coords[k]) ** 2),
              np.sum((coords[i] - coords[k]) ** 2))
        if all(abs(x - d2) <= tol for x in dd):
            faces.append((i, j, k))
    return faces


def regular_icosahedron(edge: float = 1.0) -> EmbeddedComplex:
    coords = _icosahedron_vertices() * (edge / 2.0)
    faces = _faces_at_squared_distance(coords, edge * edge, tol=1e-9 * edge * edge)
    assert len(faces) == 20
    return _embed(coords, faces)


def great_icosahedron() -> EmbeddedComplex:
    """Same 12 vertices as the icosahedron; faces join vertices at the
    larger non-antipodal distance, giving the star embedding."""
    coords = _icosahedron_vertices()
    faces = _faces_at_squared_distance(coords, 4 * _PHI * _PHI, tol=1e-9)
    assert len(faces) == 20
    return _embed(coords, faces)


def _box_mesh(lo, hi):
    """Corners and 12 triangles of an axis-aligned box."""
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    corners = [(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
               (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)]
    quads = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
             (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7)]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return corners, faces


def box(lo=(0, 0, 0), hi=(1, 1, 1)) -> EmbeddedComplex:
    corners, faces = _box_mesh(lo, hi)
    return _embed(corners, faces)


def nested_cubes() -> EmbeddedComplex:
    c1, f1 = _box_mesh((0, 0, 0), (1, 1, 1))
    c2, f2 = _box_mesh((0.25, 0.25, 0.25), (0.75, 0.75, 0.75))
    faces = f1 + [tuple(v + 8 for v in f) for f in f2]
    return _embed(c1 + c2, faces)


def cube_with_diaphragm() -> EmbeddedComplex:
    """Unit cube with an interior wall at half height.

    The four mid-level ring edges carry three faces each (lower wall,
    upper wall, diaphragm): four non-manifold edges by construction.
    """
    ring = [(0, 0), (1, 0), (1, 1), (0, 1)]
    coords = [(x, y, 0.0) for x, y in ring] + \
             [(x, y, 0.5) for x, y in ring] + \
             [(x, y, 1.0) for x, y in ring]
    faces = [(0, 1, 2), (0, 2, 3), (8, 9, 10), (8, 10, 11),
             (4, 5, 6), (4, 6, 7)]
    for i in range(4):
        j = (i + 1) % 4
        faces.append((i, j, j + 4))
        faces.append((i, j + 4, i + 4))
        faces.append((i + 4, j + 4, j + 8))
        faces.append((i + 4, j + 8, i + 8))
    return _embed(coords, faces)


def interlocked_tetrahedra() -> EmbeddedComplex:
    t1 = [(0, 0, 0), (2, 0, 0), (0, 2, 0), (0, 0, 2)]
    t2 = [(0.2, 0.2, 0.5), (2.2, 0.2, 0.5), (0.2, 2.2, 0.5), (0.2, 0.2, 2.5)]
    tf = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    faces = tf + [tuple(v + 4 for v in f) for f in tf]
    return _embed(t1 + t2, faces)


def two_tetrahedra_shared_vertex() -> EmbeddedComplex:
    coords = [(0, 0, 0),
              (1, 0, 0), (0, 1, 0), (0, 0, 1),
              (-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    faces = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3),
             (0, 4, 5), (0, 4, 6), (0, 5, 6), (4, 5, 6)]
    return _embed(coords, faces)


def two_tetrahedra_shared_edge() -> EmbeddedComplex:
    coords = [(0, 0, 0), (1, 0, 0),
              (0.5, 1, 0), (0.5, 0.5, 1),
              (0.5, -1, 0), (0.5, -0.5, -1)]
    faces = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3),
             (0, 1, 4), (0, 1, 5), (0, 4, 5), (1, 4, 5)]
    return _embed(coords, faces)


def chain_boxes() -> EmbeddedComplex:
    """Two long boxes sharing a collinear three-edge path.

    The shared line y=z=0, x in [0,3] is subdivided at x=1,2; all three
    path edges carry four faces (two per box): the middle one is inner,
    the end ones outer.
    """
    shared = [(0.0, 0, 0), (1.0, 0, 0), (2.0, 0, 0), (3.0, 0, 0)]   # ids 0..3

    def half_box(sign, base):
        s = float(sign)
        # corners away from the shared line
        c = {
            "y0z1": [(0, 0, s), (3, 0, s)],          # on the y=0 face
            "y1z0": [(0, s, 0), (3, s, 0)],          # on the z=0 face
            "y1z1": [(0, s, s), (3, s, s)],          # far edge
        }
        ids = {}
        coords = []
        for key, pts in c.items():
            ids[key] = []
            for p in pts:
                ids[key].append(base + len(coords))
                coords.append(p)
        a0, a1 = ids["y0z1"]
        b0, b1 = ids["y1z0"]
        d0, d1 = ids["y1z1"]
        faces = []
        # y = 0 wall: hexagon (0,1,2,3, a1, a0) fanned from a0
        for k in range(3):
            faces.append((a0, k, k + 1))
        faces.append((a0, 3, a1))
        # z = 0 wall: fan from b0
        for k in range(3):
            faces.append((b0, k, k + 1))
        faces.append((b0, 3, b1))
        # far wall y = s: quad (b0, b1, d1, d0)
        faces.append((b0, b1, d1))
        faces.append((b0, d1, d0))
        # far wall z = s: quad (a0, a1, d1, d0)
        faces.append((a0, a1, d1))
        faces.append((a0, d1, d0))
        # end caps x = 0: (0, a0, d0, b0); x = 3: (3, a1, d1, b1)
        faces.append((0, a0, d0))
        faces.append((0, d0, b0))
        faces.append((3, a1, d1))
        faces.append((3, d1, b1))
        return coords, faces

    ca, fa = half_box(+1, 4)
    cb, fb = half_box(-1, 4 + len(ca))
    return _embed(shared + ca + cb, fa + fb)


def cyclic_ring_surface(n: int = 23) -> EmbeddedComplex:
    """Closed surface with cyclic symmetry of order n and six face classes.

    A pinched vase: two rings of radius 1, a narrow middle ring, a bottom
    cone, and a top cone whose apex sits far below, so the top cone pierces
    the lower band.  6n faces, 3n+2 vertices, 9n edges.
    """
    coords = []
    for z, r in ((1.0, 1.0), (0.0, 0.4), (-1.0, 1.0)):
        for j in range(n):
            a = 2 * math.pi * j / n
            coords.append((r * math.cos(a), r * math.sin(a), z))
    apex_top = len(coords); coords.append((0.0, 0.0, -1.5))
    apex_bot = len(coords); coords.append((0.0, 0.0, -2.2))

    def ring(k, j):
        return k * n + j % n

    faces = []
    for j in range(n):
        faces.append((apex_top, ring(0, j), ring(0, j + 1)))
        faces.append((ring(0, j), ring(1, j), ring(1, j + 1)))
        faces.append((ring(0, j), ring(0, j + 1), ring(1, j + 1)))
        faces.append((ring(1, j), ring(2, j), ring(2, j + 1)))
        faces.append((ring(1, j), ring(1, j + 1), ring(2, j + 1)))
        faces.append((apex_bot, ring(2, j), ring(2, j + 1)))
    return _embed(coords, faces)


def open_fan_complex(angles_deg, axis_len: float = 1.0) -> EmbeddedComplex:
    """Open fan of faces around the segment (0,0,0)-(0,0,axis_len).

    Not closed; only for exercising edge-fan machinery directly.
    """
    coords = [(0.0, 0.0, 0.0), (0.0, 0.0, axis_len)]
    faces = []
    for a in angles_deg:
        r = math.radians(a)
        coords.append((math.cos(r), math.sin(r), axis_len / 2))
        faces.append((0, 1, len(coords) - 1))
    coords = np.asarray(coords, dtype=float)
    from .complexes import SimplicialComplex
    return EmbeddedComplex(SimplicialComplex([tuple(sorted(f)) for f in faces]),
                           coords, Tolerance.for_bbox(coords))


def random_convex_polytope(rng: np.random.Generator,
                           n_points: int = 30) -> EmbeddedComplex:
    from scipy.spatial import ConvexHull
    pts = rng.normal(size=(n_points, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts *= rng.uniform(0.9, 1.1, size=(n_points, 1))
    hull = ConvexHull(pts)
    used = sorted(set(hull.simplices.ravel().tolist()))
    remap = {v: i for i, v in enumerate(used)}
    faces = [tuple(sorted(remap[v] for v in s)) for s in hull.simplices]
    return _embed(pts[used], faces)


FIXTURES = {
    "tetrahedron": tetrahedron,
    "icosahedron": regular_icosahedron,
    "great-icosahedron": great_icosahedron,
    "cube": box,
    "nested-cubes": nested_cubes,
    "cube-diaphragm": cube_with_diaphragm,
    "interlocked-tetrahedra": interlocked_tetrahedra,
    "two-tetrahedra-vertex": two_tetrahedra_shared_vertex,
    "chain-boxes": chain_boxes,
    "c23-ring": cyclic_ring_surface,
}

FIXTURE_GROUPS = {
    "great-icosahedron": icosahedral_group_matrices,
    "c23-ring": lambda: cyclic_group_matrices(23),
    "icosahedron": icosahedral_group_matrices,
}
