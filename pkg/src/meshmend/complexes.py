"""Combinatorial simplicial complexes and their 3D embeddings.

A complex is determined by its set of triangular faces (unordered vertex-id
triples); edges and vertices are derived.  Closedness (every edge in at
least two faces) is enforced at construction.  Orientation is an overlay:
a complex stores no winding, ``orient`` computes one on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateFace, NonOrientable, NotASurface, NotClosed,
                     PreconditionViolated)
from .geometry import Tolerance, weld_points

__all__ = [
    "SimplicialComplex",
    "EmbeddedComplex",
    "build_complex",
    "euler_characteristic",
    "nonmanifold_edges",
    "nonmanifold_vertices",
    "is_simplicial_surface",
    "orient",
    "outward_orientation",
    "face_normal",
    "signed_volume",
]


class SimplicialComplex:
    """Faces plus derived incidence structure.  Immutable after construction."""

    def __init__(self, faces):
        self.faces: list[tuple[int, int, int]] = sorted(faces)
        self.edge_faces: dict[tuple[int, int], list[int]] = {}
        self.vertex_faces: dict[int, list[int]] = {}
        for fi, f in enumerate(self.faces):
            a, b, c = f
            for e in ((a, b), (a, c), (b, c)):
                self.edge_faces.setdefault(e, []).append(fi)
            for v in f:
                self.vertex_faces.setdefault(v, []).append(fi)
        self.edges: list[tuple[int, int]] = sorted(self.edge_faces)
        self.vertices: list[int] = sorted(self.vertex_faces)

    def __len__(self):
        return len(self.faces)

    def __repr__(self):
        return (f"SimplicialComplex(V={len(self.vertices)}, "
                f"E={len(self.edges)}, F={len(self.faces)})")

    def face_edges(self, fi: int):
        a, b, c = self.faces[fi]
        return (a, b), (a, c), (b, c)


@dataclass
class EmbeddedComplex:
    """A complex with vertex coordinates (rows of ``coords`` indexed by id)."""

    complex: SimplicialComplex
    coords: np.ndarray
    tol: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("non-finite vertex coordinate")
        ids = self.complex.vertices
        if ids and (ids[0] < 0 or ids[-1] >= len(self.coords)):
            raise ValueError("face vertex id outside coordinate table")
        _, index_map = weld_points(self.coords[ids], self.tol.eps_point)
        if len(set(index_map)) != len(ids):
            raise ValueError("embedding is not injective within eps_point")

    @property
    def faces(self):
        return self.complex.faces

    def face_points(self, fi: int) -> np.ndarray:
        return self.coords[list(self.complex.faces[fi])]

    def counts(self):
        c = self.complex
        return len(c.vertices), len(c.edges), len(c.faces)


def build_complex(face_triples, require_closed: bool = True) -> SimplicialComplex:
    """Validate face triples and derive the incidence structure.

    Raises DegenerateFace on repeated ids inside a triple or duplicated
    triples, NotClosed listing every edge with fewer than two faces.
    """
    canon = []
    seen = set()
    for t in face_triples:
        t = tuple(sorted(int(v) for v in t))
        if len(set(t)) != 3:
            raise DegenerateFace(f"face {t} repeats a vertex id")
        if t in seen:
            raise DegenerateFace(f"face {t} occurs more than once")
        seen.add(t)
        canon.append(t)
    x = SimplicialComplex(canon)
    if require_closed:
        bad = [e for e, fs in x.edge_faces.items() if len(fs) < 2]
        if bad:
            raise NotClosed(sorted(bad))
    return x


def euler_characteristic(x: SimplicialComplex) -> int:
    return len(x.vertices) - len(x.edges) + len(x.faces)


def nonmanifold_edges(x: SimplicialComplex) -> list[tuple[int, int]]:
    """Edges incident to three or more faces."""
    return sorted(e for e, fs in x.edge_faces.items() if len(fs) >= 3)


def _umbrella_components(x: SimplicialComplex, v: int) -> list[list[int]]:
    """Components of the faces at v, connected through edges containing v."""
    faces_at_v = x.vertex_faces[v]
    comp_of = {}
    comps = []
    for start in faces_at_v:
        if start in comp_of:
            continue
        comp = []
        stack = [start]
        comp_of[start] = len(comps)
        while stack:
            fi = stack.pop()
            comp.append(fi)
            for e in x.face_edges(fi):
                if v not in e:
                    continue
                for gi in x.edge_faces[e]:
                    if gi not in comp_of:
                        comp_of[gi] = len(comps)
                        stack.append(gi)
        comps.append(sorted(comp))
    return comps


def nonmanifold_vertices(x: SimplicialComplex) -> list[int]:
    """Vertices whose incident faces do not form a single closed umbrella.

    Requires every edge to have exactly two faces (repair edges first).
    """
    bad_edges = [e for e, fs in x.edge_faces.items() if len(fs) != 2]
    if bad_edges:
        raise PreconditionViolated(
            f"{len(bad_edges)} edge(s) without exactly two faces, "
            f"e.g. {bad_edges[:4]}")
    return sorted(v for v in x.vertices if len(_umbrella_components(x, v)) != 1)


def is_simplicial_surface(x: SimplicialComplex) -> bool:
    """Direct check: every edge has two faces, every vertex one umbrella."""
    if any(len(fs) != 2 for fs in x.edge_faces.values()):
        return False
    return all(len(_umbrella_components(x, v)) == 1 for v in x.vertices)


def orient(x: SimplicialComplex) -> dict[int, tuple[int, int, int]]:
    """A consistent winding per face id, or failure.

    Adjacent faces traverse their shared edge in opposite directions.  The
    result is deterministic: each connected component is anchored at its
    lowest face id with the sorted triple as its winding.
    """
    if any(len(fs) != 2 for fs in x.edge_faces.values()):
        raise NotASurface("orientation needs exactly two faces per edge")
    winding: dict[int, tuple[int, int, int]] = {}

    def directed_edges(tri):
        a, b, c = tri
        return ((a, b), (b, c), (c, a))

    for fi in range(len(x.faces)):
        if fi in winding:
            continue
        winding[fi] = x.faces[fi]
        queue = [fi]
        while queue:
            cur = queue.pop()
            for u, v in directed_edges(winding[cur]):
                e = (u, v) if u < v else (v, u)
                other = [g for g in x.edge_faces[e] if g != cur]
                for gi in other:
                    a, b, c = x.faces[gi]
                    # neighbour must traverse (v, u); find the winding doing so
                    want = None
                    for cand in ((a, b, c), (a, c, b)):
                        if (v, u) in directed_edges(cand):
                            want = cand
                            break
                    if want is None:
                        raise NonOrientable(f"edge {e} between faces {cur},{gi}")
                    if gi in winding:
                        if winding[gi] != want:
                            raise NonOrientable(
                                f"contradiction at edge {e} (faces {cur},{gi})")
                    else:
                        winding[gi] = want
                        queue.append(gi)
    return winding


def face_normal(coords: np.ndarray, tri) -> np.ndarray:
    """Unit right-hand-rule normal of a wound triple."""
    a, b, c = coords[list(tri)]
    n = np.cross(b - a, c - a)
    return n / np.linalg.norm(n)


def signed_volume(coords: np.ndarray, windings) -> float:
    """Sum of signed tetrahedron volumes against the origin."""
    total = 0.0
    for tri in windings:
        a, b, c = coords[list(tri)]
        total += np.dot(a, np.cross(b, c)) / 6.0
    return float(total)


def outward_orientation(emb: EmbeddedComplex) -> dict[int, tuple[int, int, int]]:
    """Orientation with right-hand-rule normals pointing out of the solid.

    Per connected component, the deterministic orientation is flipped when
    its signed volume is negative.
    """
    x = emb.complex
    winding = orient(x)
    comp_of: dict[int, int] = {}
    comps: list[list[int]] = []
    for fi in range(len(x.faces)):
        if fi in comp_of:
            continue
        comp = []
        stack = [fi]
        comp_of[fi] = len(comps)
        while stack:
            cur = stack.pop()
            comp.append(cur)
            for e in x.face_edges(cur):
                for gi in x.edge_faces[e]:
                    if gi not in comp_of:
                        comp_of[gi] = len(comps)
                        stack.append(gi)
        comps.append(comp)
    for comp in comps:
        vol = signed_volume(emb.coords, (winding[fi] for fi in comp))
        if vol < 0:
            for fi in comp:
                a, b, c = winding[fi]
                winding[fi] = (a, c, b)
    return winding
