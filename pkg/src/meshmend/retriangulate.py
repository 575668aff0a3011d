"""Per-face planar repair and retriangulation.

Each affected face becomes a planar subdivision: its three corners, every
intersection endpoint, and the constraint edges between them.  The repair
first makes the subdivision crossing-free (vertices split edges, edge-edge
crossings become vertices), then inserts shortest non-crossing candidate
edges until the subdivided face is a triangulated disc:

    V - E_total + F = 1   with   F = (2 * E_inner + E_boundary) / 3

which also pins the number of inner edges at ``3V - 2E' - 3``.  All planar
predicates run in a 2D orthonormal frame of the face plane; results are
lifted back to the stored 3D vertices on extraction, so shared boundary
points stay bit-identical across neighbouring faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexes import EmbeddedComplex, build_complex
from .errors import (DegenerateFace, Exhausted, NegativeDeficit,
                     NonTriangularCell, StillIntersecting)
from .geometry import Tolerance, plane_of_triangle, weld_points

__all__ = [
    "PlanarSubdivision",
    "build_subdivision",
    "clean_data",
    "fix_planar_intersections",
    "required_inner_edges",
    "disc_criterion_holds",
    "triangulate_disc",
    "extract_triangles",
    "subdivide_face",
    "boundary_sync_points",
    "retriangulate_all",
    "rebuild_complex",
]


@dataclass
class PlanarSubdivision:
    """Coplanar vertices plus an edge list, with boundary marks."""

    verts3d: list            # authoritative coordinates, shared across faces
    verts2d: np.ndarray      # (V,2) coordinates in the face frame
    edges: set               # sorted index pairs
    boundary: set            # subset of edges on the original triangle sides
    plane: object
    frame: tuple             # (u, v) spanning the plane
    corner2d: np.ndarray     # original triangle in the 2D frame

    def counts(self):
        return len(self.verts3d), len(self.edges), len(self.boundary)

    def lift(self, p2d) -> np.ndarray:
        u, v = self.frame
        return self.plane.point + p2d[0] * u + p2d[1] * v


def _frame_of(plane):
    n = plane.normal
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) <= abs(n[2]) else np.array([0.0, 0.0, 1.0])
    u = np.cross(n, a)
    u /= np.linalg.norm(u)
    return u, np.cross(n, u)


def build_subdivision(face_pts, segments=(), extra_points=(),
                      tol: Tolerance | None = None) -> PlanarSubdivision:
    """Assemble the subdivision for one face.

    ``segments`` are (p0, p1) constraint edges, ``extra_points`` bare
    vertices (boundary synchronization injects these).
    """
    tol = tol or Tolerance()
    face_pts = np.asarray(face_pts, dtype=float)
    plane = plane_of_triangle(*face_pts, tol)
    u, v = _frame_of(plane)

    verts3d = [face_pts[0], face_pts[1], face_pts[2]]
    edges = {(0, 1), (1, 2), (0, 2)}
    boundary = set(edges)
    for p0, p1 in segments:
        i = len(verts3d); verts3d.append(np.asarray(p0, dtype=float))
        j = len(verts3d); verts3d.append(np.asarray(p1, dtype=float))
        edges.add((i, j))
    for p in extra_points:
        verts3d.append(np.asarray(p, dtype=float))

    rel = np.asarray(verts3d) - plane.point
    verts2d = np.stack([rel @ u, rel @ v], axis=1)
    sub = PlanarSubdivision(verts3d=verts3d, verts2d=verts2d, edges=edges,
                            boundary=boundary, plane=plane, frame=(u, v),
                            corner2d=verts2d[:3].copy())
    return clean_data(sub, tol)


def clean_data(sub: PlanarSubdivision, tol: Tolerance) -> PlanarSubdivision:
    """Weld duplicate vertices, remap edges, drop loops and repeats."""
    if not sub.verts3d:
        return sub
    _, index_map = weld_points(np.asarray(sub.verts3d), tol.eps_point)
    keep = {}
    new3d, rows = [], []
    for old, rep in enumerate(index_map):
        if rep not in keep:
            keep[rep] = len(new3d)
            new3d.append(sub.verts3d[old])
            rows.append(old)
    remap = {old: keep[rep] for old, rep in enumerate(index_map)}
    new_edges, new_boundary = set(), set()
    for a, b in sub.edges:
        i, j = remap[a], remap[b]
        if i == j:
            continue
        e = (i, j) if i < j else (j, i)
        new_edges.add(e)
        if (a, b) in sub.boundary:
            new_boundary.add(e)
    sub.verts3d = new3d
    sub.verts2d = sub.verts2d[rows]
    sub.edges = new_edges
    sub.boundary = new_boundary
    return sub


def _split_edges_at_vertices(sub: PlanarSubdivision, tol: Tolerance) -> bool:
    """Split every edge that contains a foreign vertex in its interior."""
    eps = tol.eps_point
    pts = sub.verts2d
    changed = False
    for a, b in list(sub.edges):
        pa, pb = pts[a], pts[b]
        d = pb - pa
        length = np.linalg.norm(d)
        if length <= eps:
            continue
        t = ((pts - pa) @ d) / (length * length)
        proj = pa + t[:, None] * d
        dist = np.linalg.norm(pts - proj, axis=1)
        margin = eps / length
        inside = (dist <= eps) & (t > margin) & (t < 1 - margin)
        inside[a] = inside[b] = False
        hits = np.nonzero(inside)[0]
        if len(hits) == 0:
            continue
        order = hits[np.argsort(t[hits])]
        was_boundary = (a, b) in sub.boundary
        sub.edges.discard((a, b))
        sub.boundary.discard((a, b))
        chain = [a, *order.tolist(), b]
        for i, j in zip(chain[:-1], chain[1:]):
            e = (i, j) if i < j else (j, i)
            sub.edges.add(e)
            if was_boundary:
                sub.boundary.add(e)
        changed = True
    return changed


def _find_crossings(sub: PlanarSubdivision, tol: Tolerance):
    """All proper interior crossing points between current edges."""
    eps = tol.eps_point
    pts = sub.verts2d
    edges = sorted(sub.edges)
    out = []
    ea = np.array([pts[a] for a, _ in edges])
    eb = np.array([pts[b] for _, b in edges])
    for idx, (a, b) in enumerate(edges):
        pa, pb = pts[a], pts[b]
        d = pb - pa
        ln = np.linalg.norm(d)
        if ln <= eps:
            continue
        # distances of all later edges' endpoints from this edge's line
        rest = slice(idx + 1, len(edges))
        qa, qb = ea[rest], eb[rest]
        cross_a = (d[0] * (qa[:, 1] - pa[1]) - d[1] * (qa[:, 0] - pa[0])) / ln
        cross_b = (d[0] * (qb[:, 1] - pa[1]) - d[1] * (qb[:, 0] - pa[0])) / ln
        straddle1 = ((cross_a > eps) & (cross_b < -eps)) | \
                    ((cross_a < -eps) & (cross_b > eps))
        if not np.any(straddle1):
            continue
        for off in np.nonzero(straddle1)[0]:
            jdx = idx + 1 + off
            c, e = edges[jdx]
            if len({a, b, c, e}) < 4:
                continue
            pc, pe = pts[c], pts[e]
            d2 = pe - pc
            ln2 = np.linalg.norm(d2)
            if ln2 <= eps:
                continue
            da = (d2[0] * (pa[1] - pc[1]) - d2[1] * (pa[0] - pc[0])) / ln2
            db = (d2[0] * (pb[1] - pc[1]) - d2[1] * (pb[0] - pc[0])) / ln2
            if not ((da > eps and db < -eps) or (da < -eps and db > eps)):
                continue
            t = da / (da - db)
            out.append(pa + t * d)
    return out


def fix_planar_intersections(sub: PlanarSubdivision, tol: Tolerance,
                             max_rounds: int = 64) -> PlanarSubdivision:
    """Make the subdivision crossing-free.

    Alternates vertex-splits-edge passes with crossing detection; each
    crossing becomes a new vertex, which the next split pass absorbs.
    """
    for _ in range(max_rounds):
        sub = clean_data(sub, tol)
        while _split_edges_at_vertices(sub, tol):
            sub = clean_data(sub, tol)
        crossings = _find_crossings(sub, tol)
        if not crossings:
            return sub
        known = sub.verts2d
        for p in crossings:
            if np.any(np.linalg.norm(known - p, axis=1) <= tol.eps_point):
                continue
            sub.verts3d.append(sub.lift(p))
            known = np.vstack([known, p])
        sub.verts2d = known
    raise Exhausted("crossing fixpoint not reached; tolerances inconsistent")


def required_inner_edges(v_count: int, e_boundary: int, e_total: int) -> int:
    """How many inner edges triangulation must still insert."""
    target_inner = 3 * v_count - 2 * e_boundary - 3
    deficit = target_inner - (e_total - e_boundary)
    if deficit < 0:
        raise NegativeDeficit(
            f"V={v_count}, E'={e_boundary}, E={e_total}: inner edge target "
            f"{target_inner} already exceeded")
    return deficit


def disc_criterion_holds(v_count: int, e_total: int, e_boundary: int) -> bool:
    """Whether V - E + F = 1 with F = (2*E_inner + E_boundary)/3, exactly."""
    num = 2 * (e_total - e_boundary) + e_boundary
    if num % 3 != 0:
        return False
    return v_count - e_total + num // 3 == 1


def _candidate_blocked(sub: PlanarSubdivision, i: int, j: int, eps: float) -> bool:
    pts = sub.verts2d
    pa, pb = pts[i], pts[j]
    d = pb - pa
    ln = np.linalg.norm(d)
    if ln <= eps:
        return True
    # passes through some vertex
    t = ((pts - pa) @ d) / (ln * ln)
    proj = pa + t[:, None] * d
    dist = np.linalg.norm(pts - proj, axis=1)
    margin = eps / ln
    inside = (dist <= eps) & (t > margin) & (t < 1 - margin)
    inside[i] = inside[j] = False
    if np.any(inside):
        return True
    # midpoint must stay inside the original face triangle
    mid = 0.5 * (pa + pb)
    c = sub.corner2d
    for k in range(3):
        p, q = c[k], c[(k + 1) % 3]
        e = q - p
        nn = np.array([-e[1], e[0]])
        if np.dot(nn, c[(k + 2) % 3] - p) < 0:
            nn = -nn
        nn /= np.linalg.norm(nn)
        if np.dot(nn, mid - p) < -eps:
            return True
    # proper crossing against an existing edge
    edges = sorted(sub.edges)
    qa = np.array([pts[a] for a, _ in edges])
    qb = np.array([pts[b] for _, b in edges])
    ca = (d[0] * (qa[:, 1] - pa[1]) - d[1] * (qa[:, 0] - pa[0])) / ln
    cb = (d[0] * (qb[:, 1] - pa[1]) - d[1] * (qb[:, 0] - pa[0])) / ln
    straddle = ((ca > eps) & (cb < -eps)) | ((ca < -eps) & (cb > eps))
    if not np.any(straddle):
        return False
    for off in np.nonzero(straddle)[0]:
        a, b = edges[off]
        if len({a, b, i, j}) < 4:
            continue
        pc, pe = pts[a], pts[b]
        d2 = pe - pc
        ln2 = np.linalg.norm(d2)
        da = (d2[0] * (pa[1] - pc[1]) - d2[1] * (pa[0] - pc[0])) / ln2
        db = (d2[0] * (pb[1] - pc[1]) - d2[1] * (pb[0] - pc[0])) / ln2
        if (da > eps and db < -eps) or (da < -eps and db > eps):
            return True
    return False


def triangulate_disc(sub: PlanarSubdivision, tol: Tolerance) -> PlanarSubdivision:
    """Insert shortest non-crossing vertex pairs until the disc criterion holds."""
    v_count = len(sub.verts3d)
    e_boundary = len(sub.boundary)
    if disc_criterion_holds(v_count, len(sub.edges), e_boundary):
        return sub
    pts = sub.verts2d
    ii, jj = np.triu_indices(v_count, k=1)
    lengths = np.linalg.norm(pts[ii] - pts[jj], axis=1)
    order = np.lexsort((jj, ii, lengths))
    eps = tol.eps_point
    for idx in order:
        i, j = int(ii[idx]), int(jj[idx])
        if (i, j) in sub.edges:
            continue
        if _candidate_blocked(sub, i, j, eps):
            continue
        sub.edges.add((i, j))
        if disc_criterion_holds(v_count, len(sub.edges), e_boundary):
            return sub
    raise Exhausted(
        f"candidates exhausted with V={v_count}, E={len(sub.edges)}, "
        f"E'={e_boundary}; tolerance inconsistency likely")


def extract_triangles(sub: PlanarSubdivision) -> list:
    """Walk the planar rotation system and return the triangle cells in 3D.

    Every interior cell of a triangulated disc is a 3-cycle; the single
    negative-area cycle is the outer boundary and is dropped.
    """
    pts = sub.verts2d
    nbrs: dict[int, list[int]] = {}
    for a, b in sub.edges:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    for v, ns in nbrs.items():
        ns.sort(key=lambda w: math.atan2(pts[w][1] - pts[v][1],
                                         pts[w][0] - pts[v][0]))
    pos = {(v, w): k for v, ns in nbrs.items() for k, w in enumerate(ns)}
    seen = set()
    triangles = []
    outer_cycles = 0
    for a, b in sorted(sub.edges):
        for u0, v0 in ((a, b), (b, a)):
            if (u0, v0) in seen:
                continue
            cycle = []
            u, v = u0, v0
            while (u, v) not in seen:
                seen.add((u, v))
                cycle.append(u)
                ns = nbrs[v]
                u, v = v, ns[(pos[(v, u)] - 1) % len(ns)]
            area2 = 0.0
            for k in range(len(cycle)):
                p, q = pts[cycle[k]], pts[cycle[(k + 1) % len(cycle)]]
                area2 += p[0] * q[1] - p[1] * q[0]
            if area2 <= 0:
                outer_cycles += 1
                continue
            if len(cycle) != 3:
                raise NonTriangularCell(
                    f"interior cell with {len(cycle)} sides: {cycle}")
            triangles.append(tuple(sub.verts3d[k] for k in cycle))
    if outer_cycles != 1:
        raise NonTriangularCell(
            f"expected one outer boundary cycle, found {outer_cycles}")
    return triangles


def subdivide_face(face_pts, segments, extra_points, tol: Tolerance) -> list:
    """Full per-face pipeline: build, fix, triangulate, extract."""
    sub = build_subdivision(face_pts, segments, extra_points, tol)
    sub = fix_planar_intersections(sub, tol)
    sub = triangulate_disc(sub, tol)
    return extract_triangles(sub)


def boundary_sync_points(emb: EmbeddedComplex, by_face: dict,
                         tol: Tolerance) -> dict:
    """Propagate constraint endpoints that land on a face edge to the
    neighbours sharing that edge, so subdivided boundaries match exactly."""
    eps = tol.eps_point
    extra: dict[int, list] = {}
    x = emb.complex
    for fi, segs in by_face.items():
        pts = []
        for s in segs:
            pts.extend((s.p0, s.p1))
        for p in pts:
            for e in x.face_edges(fi):
                a, b = emb.coords[e[0]], emb.coords[e[1]]
                if np.linalg.norm(p - a) <= eps or np.linalg.norm(p - b) <= eps:
                    continue
                d = b - a
                ln2 = float(d @ d)
                t = float((p - a) @ d) / ln2
                if t <= 0 or t >= 1:
                    continue
                if np.linalg.norm(p - (a + t * d)) <= eps:
                    for gi in x.edge_faces[e]:
                        if gi != fi:
                            extra.setdefault(gi, []).append(p)
    return extra


def retriangulate_all(emb: EmbeddedComplex, by_face: dict, tol: Tolerance,
                      extra_points: dict | None = None,
                      only_faces=None) -> dict:
    """Subdivide every affected face; identity for untouched ones."""
    extra_points = extra_points or {}
    touched = set(by_face) | set(extra_points)
    if only_faces is not None:
        touched &= set(only_faces)
    out = {}
    for fi in sorted(touched):
        segs = [(s.p0, s.p1) for s in by_face.get(fi, ())]
        out[fi] = subdivide_face(emb.face_points(fi), segs,
                                 extra_points.get(fi, ()), tol)
    return out


def rebuild_complex(emb: EmbeddedComplex, face_triangles: dict,
                    tol: Tolerance | None = None,
                    strict_recheck: bool = False) -> EmbeddedComplex:
    """Weld per-face triangles into one closed complex.

    Coordinates merge globally within eps_point; shared subdivision points
    on face boundaries therefore weld to single vertex ids and the result
    stays closed.
    """
    tol = tol or emb.tol
    corners = []
    tri_count = 0
    for fi in range(len(emb.faces)):
        tris = face_triangles.get(fi)
        if tris is None:
            tris = [tuple(emb.face_points(fi))]
        for t in tris:
            corners.extend(t)
            tri_count += 1
    unique, index_map = weld_points(np.asarray(corners), tol.eps_point)
    triples = []
    for k in range(tri_count):
        t = tuple(sorted(int(index_map[3 * k + m]) for m in range(3)))
        if len(set(t)) != 3:
            raise DegenerateFace(f"output triangle collapsed during welding: {t}")
        triples.append(t)
    x = build_complex(triples)
    result = EmbeddedComplex(x, unique, tol)
    if strict_recheck:
        from .intersect import all_intersections
        report = all_intersections(result, tol)
        if report.segments:
            raise StillIntersecting([(s.face_a, s.face_b) for s in report.segments])
    return result
