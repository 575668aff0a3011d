"""Outer hull extraction by oriented walking over edge fans.

The walk needs a certified start: the face is found at the vertex of
maximal x-coordinate, along its flattest incident edge, taking the face
whose normal has the largest |x| component (negated to point along +x).
From there a BFS rotates around edge fans, always continuing to the next
face of the fan on the side the current oriented face exposes, which keeps
the walk on the boundary of a single chamber.

A face side is written (face, sigma) with sigma = +-1 against the face's
reference normal (right-hand rule on the sorted vertex triple).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexes import EmbeddedComplex, SimplicialComplex, face_normal
from .errors import OpenBoundary

__all__ = [
    "StartPair",
    "EdgeFan",
    "build_fans",
    "initial_face",
    "upward_continuation",
    "extract_chamber",
    "outer_hull",
    "restrict_to_faces",
]


@dataclass(frozen=True)
class StartPair:
    face: int
    normal: np.ndarray


@dataclass
class EdgeFan:
    """Faces around an edge, sorted by angle about the edge axis.

    ``ccw_side[i]`` is the sigma whose side normal points counterclockwise
    (at the face's fan angle + 90 degrees) for ``faces[i]``.
    """

    edge: tuple
    faces: list
    angles: list
    ccw_side: list

    def index_of(self, face: int) -> int:
        return self.faces.index(face)


def build_fans(emb: EmbeddedComplex) -> dict:
    """Angular fan for every edge of the complex."""
    x = emb.complex
    fans = {}
    for e, face_ids in x.edge_faces.items():
        a, b = e
        axis = emb.coords[b] - emb.coords[a]
        axis = axis / np.linalg.norm(axis)
        entries = []
        u = v = None
        for fi in sorted(face_ids):
            apex = next(w for w in x.faces[fi] if w not in e)
            m = emb.coords[apex] - emb.coords[a]
            m_perp = m - np.dot(m, axis) * axis
            m_perp = m_perp / np.linalg.norm(m_perp)
            if u is None:
                u = m_perp
                v = np.cross(axis, u)
            ang = math.atan2(float(np.dot(m_perp, v)), float(np.dot(m_perp, u)))
            if ang < 0:
                ang += 2 * math.pi
            n_ref = face_normal(emb.coords, x.faces[fi])
            ccw = 1 if np.dot(n_ref, np.cross(axis, m_perp)) > 0 else -1
            entries.append((ang, fi, ccw))
        entries.sort(key=lambda t: (t[0], t[1]))
        fans[e] = EdgeFan(edge=e,
                          faces=[fi for _, fi, _ in entries],
                          angles=[ang for ang, _, _ in entries],
                          ccw_side=[c for _, _, c in entries])
    return fans


def _random_rotation(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def initial_face(emb: EmbeddedComplex, seed: int = 0) -> StartPair:
    """A face on the outer hull with its normal oriented outwards.

    When several vertices tie for the maximal x-coordinate, the selection
    reruns on a seeded-randomly rotated copy (the criteria are rotation
    covariant) and the resulting normal is rotated back.
    """
    x = emb.complex
    coords = emb.coords
    rot = np.eye(3)
    eps = emb.tol.eps_point
    for attempt in range(8):
        xs = coords[x.vertices, 0]
        if np.sum(xs >= xs.max() - eps) == 1:
            break
        rot = _random_rotation(seed + attempt + 1)
        coords = emb.coords @ rot.T
    v0 = x.vertices[int(np.argmax(coords[x.vertices, 0]))]

    best_edge, best_ratio = None, None
    for e in x.edges:
        if v0 not in e:
            continue
        a, b = e
        d = coords[b] - coords[a]
        ratio = abs(d[0]) / np.linalg.norm(d)
        if best_ratio is None or ratio < best_ratio - 1e-15 or \
                (abs(ratio - best_ratio) <= 1e-15 and e < best_edge):
            best_edge, best_ratio = e, ratio

    best_face, best_nx, best_n = None, None, None
    for fi in sorted(x.edge_faces[best_edge]):
        n = face_normal(coords, x.faces[fi])
        if best_nx is None or abs(n[0]) > best_nx + 1e-15:
            best_face, best_nx, best_n = fi, abs(n[0]), n
    if best_n[0] < 0:
        best_n = -best_n
    return StartPair(face=best_face, normal=rot.T @ best_n)


def upward_continuation(fan: EdgeFan, from_face: int, side: int):
    """The next (face, side) reached by rotating around the edge.

    Rotation runs in the direction the given oriented side faces; the
    returned side is the one facing back into the traversed wedge.
    """
    i = fan.index_of(from_face)
    n = len(fan.faces)
    if side * fan.ccw_side[i] > 0:
        j = (i + 1) % n
        return fan.faces[j], -fan.ccw_side[j]
    j = (i - 1) % n
    return fan.faces[j], fan.ccw_side[j]


def extract_chamber(emb: EmbeddedComplex, start_face: int, start_side: int,
                    fans: dict | None = None) -> set:
    """All (face, side) pairs bounding the chamber at the given side.

    BFS over (face, edge) pairs; independent of which side of the chamber
    seeds the walk.
    """
    fans = fans if fans is not None else build_fans(emb)
    x = emb.complex
    marked = {(start_face, start_side)}
    queue = [(start_face, start_side, e) for e in x.face_edges(start_face)]
    while queue:
        face, side, edge = queue.pop()
        fan = fans.get(edge)
        if fan is None or len(fan.faces) < 2:
            raise OpenBoundary(f"edge {edge} has no continuation")
        nxt = upward_continuation(fan, face, side)
        if nxt in marked:
            continue
        marked.add(nxt)
        for e in x.face_edges(nxt[0]):
            if e != edge:
                queue.append((nxt[0], nxt[1], e))
    return marked


def side_of_normal(emb: EmbeddedComplex, face: int, normal) -> int:
    n_ref = face_normal(emb.coords, emb.faces[face])
    return 1 if np.dot(normal, n_ref) > 0 else -1


def restrict_to_faces(emb: EmbeddedComplex, face_ids) -> EmbeddedComplex:
    """Sub-complex on the given faces, vertices re-indexed densely."""
    face_ids = sorted(face_ids)
    used = sorted({v for fi in face_ids for v in emb.faces[fi]})
    remap = {v: i for i, v in enumerate(used)}
    triples = [tuple(sorted(remap[v] for v in emb.faces[fi])) for fi in face_ids]
    return EmbeddedComplex(SimplicialComplex(triples), emb.coords[used], emb.tol)


def outer_hull(emb: EmbeddedComplex, seed: int = 0) -> EmbeddedComplex:
    """Boundary of the unbounded chamber, as its own embedded complex.

    Seeds the walk at the certified start pair; further boundary components
    of the unbounded chamber (disconnected inputs standing side by side)
    are picked up by the chamber merge, so the result is the full boundary
    in the sense of the chamber definition.
    """
    from .chambers import all_chambers
    labeling = all_chambers(emb, seed=seed)
    return restrict_to_faces(emb, labeling.chambers[labeling.unbounded].faces)
