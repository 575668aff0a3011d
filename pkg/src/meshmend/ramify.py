"""Repair of non-manifold edges and vertices on an outer-hull complex.

Every face of an outer hull exposes one side to the unbounded chamber, so
the fan around a non-manifold edge decomposes into arcs of faces glued
through solid wedges, separated by wedges of outside space.  Splitting the
edge gives each arc its own copy; the shared vertices move by a small
multiple of the arc's split direction, the average of the apex offsets of
the arc's two bounding faces, which points into the arc's own solid wedge.

Vertices shared between non-manifold edges are split once per local face
component (faces connected around the vertex through manifold edges or
within one arc), so the surface stays locally connected exactly where it
was.  A second pass splits any remaining non-manifold vertices along the
average direction of each local umbrella.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .complexes import (EmbeddedComplex, build_complex, face_normal,
                        nonmanifold_edges, nonmanifold_vertices)
from .errors import (IsolatedNonManifoldEdge, NewIntersectionIntroduced,
                     PreconditionViolated)
from .geometry import Tolerance, bbox_diagonal
from .intersect import triangle_pair_intersection
from .outerhull import build_fans

__all__ = [
    "NonManifoldPath",
    "RepairReport",
    "classify_nonmanifold_edges",
    "nonmanifold_paths",
    "split_direction",
    "split_nonmanifold_paths",
    "split_nonmanifold_vertices",
    "repair_nonmanifold",
]


@dataclass
class NonManifoldPath:
    edges: list
    kind: str               # 'chain' or 'circle'
    junctions: list = field(default_factory=list)


@dataclass
class RepairReport:
    eps_used: float = 0.0
    attempts: int = 1
    paths: list = field(default_factory=list)
    edge_splits: int = 0
    path_vertex_splits: list = field(default_factory=list)   # (vertex, copies)
    umbrella_vertex_splits: list = field(default_factory=list)
    max_shift_norm: float = 0.0

    def lines(self):
        out = [f"eps {self.eps_used:.6g} attempts {self.attempts}"]
        for p in self.paths:
            out.append(f"path {p.kind} edges {len(p.edges)} "
                       f"junctions {len(p.junctions)}")
        for v, k in self.path_vertex_splits:
            out.append(f"edge-stage vertex {v} -> {k} copies")
        for v, k in self.umbrella_vertex_splits:
            out.append(f"vertex-stage vertex {v} -> {k} copies")
        return out


def classify_nonmanifold_edges(x) -> tuple[list, list]:
    """Partition non-manifold edges into inner and outer.

    Inner edges touch another non-manifold edge at both endpoints, outer at
    exactly one.  Isolated ones are unsupported and raise.
    """
    nm = nonmanifold_edges(x)
    nm_set = set(nm)
    at_vertex: dict[int, list] = {}
    for e in nm:
        for v in e:
            at_vertex.setdefault(v, []).append(e)

    def touches(v, e):
        return any(other != e for other in at_vertex.get(v, ()))

    inner, outer, isolated = [], [], []
    for e in nm:
        k = sum(1 for v in e if touches(v, e))
        (inner if k == 2 else outer if k == 1 else isolated).append(e)
    if isolated:
        raise IsolatedNonManifoldEdge(isolated)
    return inner, outer


def nonmanifold_paths(x, coords=None) -> list[NonManifoldPath]:
    """Edge paths through the non-manifold edges, for reporting.

    At a junction the walk continues along the straightest continuation
    (largest angle cosine, requires coordinates; edge id breaks ties);
    remaining branches start their own paths.
    """
    nm = nonmanifold_edges(x)
    if not nm:
        return []
    classify_nonmanifold_edges(x)  # reject isolated edges
    at_vertex: dict[int, list] = {}
    for e in nm:
        for v in e:
            at_vertex.setdefault(v, []).append(e)
    junction_vertices = {v for v, es in at_vertex.items() if len(es) >= 3}
    visited = set()
    paths = []

    def straightness(cur, cand, arrive):
        if coords is None:
            return 0.0
        u = next(v for v in cur if v != arrive)
        w = next(v for v in cand if v != arrive)
        d1 = coords[arrive] - coords[u]
        d2 = coords[w] - coords[arrive]
        return float(np.dot(d1, d2) /
                     (np.linalg.norm(d1) * np.linalg.norm(d2)))

    def walk(start_edge, from_vertex):
        path = [start_edge]
        visited.add(start_edge)
        junctions = []
        cur, v = start_edge, from_vertex
        while True:
            v = cur[0] if cur[1] == v else cur[1]   # vertex we arrive at
            nxt = [e for e in at_vertex[v] if e != cur and e not in visited]
            if not nxt:
                return path, junctions, v
            if len(nxt) > 1 or v in junction_vertices:
                junctions.append(v)
            cur = min(nxt, key=lambda e: (-straightness(cur, e, v), e))
            visited.add(cur)
            path.append(cur)

    free_starts = sorted(e for e in nm
                         if any(len(at_vertex[v]) == 1 for v in e))
    for e in free_starts:
        if e in visited:
            continue
        free_v = next(v for v in e if len(at_vertex[v]) == 1)
        edges, junctions, _ = walk(e, free_v)
        paths.append(NonManifoldPath(edges=edges, kind="chain",
                                     junctions=junctions))
    for e in sorted(nm):
        if e in visited:
            continue
        edges, junctions, last = walk(e, e[0])
        kind = "circle" if last in e else "chain"
        paths.append(NonManifoldPath(edges=edges, kind=kind,
                                     junctions=junctions))
    return paths


def _unbounded_side_map(emb: EmbeddedComplex, seed=0) -> dict:
    from .chambers import unbounded_side_map
    return unbounded_side_map(emb, seed=seed)


def _fan_geometry(emb: EmbeddedComplex, fan):
    """Per-face in-plane apex offsets and apex ids for one edge fan."""
    a, b = fan.edge
    axis = emb.coords[b] - emb.coords[a]
    axis = axis / np.linalg.norm(axis)
    apex, offset = {}, {}
    for fi in fan.faces:
        w = next(v for v in emb.faces[fi] if v not in fan.edge)
        m = emb.coords[w] - emb.coords[a]
        apex[fi] = w
        offset[fi] = m - np.dot(m, axis) * axis
    return axis, apex, offset


def _edge_arcs(emb: EmbeddedComplex, fan, unb_side):
    """Arcs of fan faces glued through solid wedges.

    Wedge i sits counterclockwise of faces[i]; it belongs to the unbounded
    chamber exactly when faces[i] exposes its unbounded side there.
    """
    k = len(fan.faces)
    open_wedge = []
    for i in range(k):
        fi = fan.faces[i]
        fj = fan.faces[(i + 1) % k]
        a = unb_side[fi] == fan.ccw_side[i]
        b = unb_side[fj] == -fan.ccw_side[(i + 1) % k]
        if a != b:
            raise PreconditionViolated(
                f"inconsistent chamber sides around edge {fan.edge}")
        open_wedge.append(a)
    cuts = [i for i in range(k) if open_wedge[i]]
    if not cuts:
        raise PreconditionViolated(
            f"edge {fan.edge} has no outside wedge; not an outer hull")
    arcs = []
    for j, cut in enumerate(cuts):
        start = (cut + 1) % k
        end = cuts[(j + 1) % len(cuts)]
        idxs = [start]
        while idxs[-1] != end:
            idxs.append((idxs[-1] + 1) % k)
        arcs.append([fan.faces[i] for i in idxs])
    return arcs


def _arc_direction(emb, fan, arc, endpoint):
    """Average apex offset of the arc's bounding faces, from ``endpoint``."""
    _, apex, _ = _fan_geometry(emb, fan)
    w1 = emb.coords[apex[arc[0]]]
    w2 = emb.coords[apex[arc[-1]]]
    v = emb.coords[endpoint]
    return 0.5 * (w1 - v) + 0.5 * (w2 - v)


def split_direction(emb: EmbeddedComplex, edge, endpoint=None,
                    unb_side=None, fans=None) -> np.ndarray:
    """Canonical split direction of a non-manifold edge.

    Selects the fan face whose inward normal satisfies the determinant
    condition det[v, e, n] > 0 (v the in-plane apex offset, e the edge
    vector from lower to higher vertex id, n the normal pointing away from
    the face's unbounded side), lowest face id first; the partner face is
    the fan neighbour that normal points to.
    """
    fans = fans if fans is not None else build_fans(emb)
    fan = fans[edge]
    if unb_side is None:
        unb_side = _unbounded_side_map(emb)
    endpoint = edge[0] if endpoint is None else endpoint
    a, b = edge
    e_vec = emb.coords[b] - emb.coords[a]
    axis, apex, offset = _fan_geometry(emb, fan)
    chosen = None
    for i, fi in sorted(enumerate(fan.faces), key=lambda t: t[1]):
        n_in = -unb_side[fi] * face_normal(emb.coords, emb.faces[fi])
        det = float(np.dot(offset[fi], np.cross(e_vec, n_in)))
        if det > 0:
            chosen = (i, fi, n_in)
            break
    if chosen is None:
        raise PreconditionViolated(f"no face at edge {edge} satisfies the "
                                   "determinant condition")
    i, f1, n_in = chosen
    k = len(fan.faces)
    # the partner is the fan neighbour in the direction n_in points
    ccw = fan.ccw_side[i] * (-unb_side[f1])  # +1 when n_in points ccw
    f2 = fan.faces[(i + 1) % k] if ccw > 0 else fan.faces[(i - 1) % k]
    v = emb.coords[endpoint]
    return 0.5 * (emb.coords[apex[f1]] - v) + 0.5 * (emb.coords[apex[f2]] - v)


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def split_nonmanifold_paths(emb: EmbeddedComplex, eps_shift: float,
                            seed: int = 0):
    """Split the shared vertices of non-manifold edge paths.

    Each vertex on two or more non-manifold edges splits into one copy per
    local face component; a copy's shift is the mean of the arc directions
    it carries.  Free chain ends stay single.  Returns the new complex and
    a RepairReport fragment.
    """
    x = emb.complex
    report = RepairReport(eps_used=eps_shift)
    nm = nonmanifold_edges(x)
    if not nm:
        return emb, report
    classify_nonmanifold_edges(x)
    report.paths = nonmanifold_paths(x, emb.coords)
    fans = build_fans(emb)
    unb = _unbounded_side_map(emb, seed=seed)
    nm_set = set(nm)

    arcs_of: dict[tuple, list] = {}
    for e in nm:
        arcs_of[e] = _edge_arcs(emb, fans[e], unb)
        report.edge_splits += len(arcs_of[e]) - 1

    at_vertex: dict[int, list] = {}
    for e in nm:
        for v in e:
            at_vertex.setdefault(v, []).append(e)
    split_vertices = sorted(v for v, es in at_vertex.items() if len(es) >= 2)

    edges_at_vertex: dict[int, set] = {}
    for e in x.edges:
        for v in e:
            edges_at_vertex.setdefault(v, set()).add(e)

    new_coords = [emb.coords[i] for i in range(len(emb.coords))]
    corner_replacement: dict[tuple[int, int], int] = {}  # (face, vertex) -> new id

    for v in split_vertices:
        faces_at = sorted(x.vertex_faces[v])
        uf = _UnionFind(faces_at)
        for h in sorted(edges_at_vertex[v]):
            fs = x.edge_faces[h]
            if h not in nm_set:
                for fa, fb in zip(fs, fs[1:]):
                    uf.union(fa, fb)
            else:
                for arc in arcs_of[h]:
                    for fa, fb in zip(arc, arc[1:]):
                        uf.union(fa, fb)
        comps: dict[int, list] = {}
        for f in faces_at:
            comps.setdefault(uf.find(f), []).append(f)
        made = 0
        for root in sorted(comps):
            comp = set(comps[root])
            dirs = []
            for h in sorted(at_vertex[v]):
                for arc in arcs_of[h]:
                    if arc[0] in comp:
                        dirs.append(_arc_direction(emb, fans[h], arc, v))
            if not dirs:
                continue  # faces not touching the paths keep the original id
            new_id = len(new_coords)
            shift = eps_shift * np.mean(dirs, axis=0)
            report.max_shift_norm = max(report.max_shift_norm,
                                        float(np.linalg.norm(shift)))
            new_coords.append(emb.coords[v] + shift)
            made += 1
            for f in comps[root]:
                corner_replacement[(f, v)] = new_id
        if made:
            report.path_vertex_splits.append((v, made))

    triples = []
    for fi, f in enumerate(x.faces):
        triples.append(tuple(sorted(corner_replacement.get((fi, v), v)
                                    for v in f)))
    used = sorted({v for t in triples for v in t})
    remap = {v: i for i, v in enumerate(used)}
    new = build_complex([tuple(sorted(remap[v] for v in t)) for t in triples])
    coords = np.array([new_coords[v] for v in used])
    return EmbeddedComplex(new, coords, emb.tol), report


def split_nonmanifold_vertices(emb: EmbeddedComplex, eps_shift: float,
                               max_rounds: int = 16):
    """Split vertices with several local umbrellas until none remain.

    Each umbrella component moves along the average of its faces' corner
    offsets.  Requires all edges manifold.
    """
    report = RepairReport(eps_used=eps_shift)
    for _ in range(max_rounds):
        x = emb.complex
        bad = nonmanifold_vertices(x)
        if not bad:
            return emb, report
        new_coords = [emb.coords[i] for i in range(len(emb.coords))]
        corner_replacement: dict[tuple[int, int], int] = {}
        for v in bad:
            comps: dict[int, list] = {}
            uf = _UnionFind(x.vertex_faces[v])
            for h, fs in x.edge_faces.items():
                if v in h:
                    for fa, fb in zip(fs, fs[1:]):
                        uf.union(fa, fb)
            for f in x.vertex_faces[v]:
                comps.setdefault(uf.find(f), []).append(f)
            report.umbrella_vertex_splits.append((v, len(comps)))
            for root in sorted(comps):
                acc = np.zeros(3)
                for f in comps[root]:
                    others = [w for w in x.faces[f] if w != v]
                    acc += 0.5 * (emb.coords[others[0]] - emb.coords[v])
                    acc += 0.5 * (emb.coords[others[1]] - emb.coords[v])
                p = acc / len(comps[root])
                shift = eps_shift * p
                report.max_shift_norm = max(report.max_shift_norm,
                                            float(np.linalg.norm(shift)))
                new_id = len(new_coords)
                new_coords.append(emb.coords[v] + shift)
                for f in comps[root]:
                    corner_replacement[(f, v)] = new_id
        triples = []
        for fi, f in enumerate(x.faces):
            triples.append(tuple(sorted(corner_replacement.get((fi, v), v)
                                        for v in f)))
        used = sorted({v for t in triples for v in t})
        remap = {v: i for i, v in enumerate(used)}
        new = build_complex([tuple(sorted(remap[v] for v in t)) for t in triples])
        emb = EmbeddedComplex(new, np.array([new_coords[v] for v in used]),
                              emb.tol)
    raise PreconditionViolated("umbrella splitting did not reach a fixed point")


def _new_intersections(emb: EmbeddedComplex, original_coords,
                       tol: Tolerance) -> list:
    """Pairs that intersect and involve at least one moved face."""
    tree = cKDTree(np.asarray(original_coords))
    dist, _ = tree.query(emb.coords)
    moved_vertices = set(np.nonzero(dist > tol.eps_point)[0].tolist())
    moved_faces = sorted({fi for v in moved_vertices
                          for fi in emb.complex.vertex_faces.get(v, ())})
    if not moved_faces:
        return []
    faces = emb.faces
    tris = emb.coords[np.asarray(faces)]
    lo, hi = tris.min(axis=1), tris.max(axis=1)
    eps = tol.eps_point
    bad = []
    for fi in moved_faces:
        ok = np.all(lo <= hi[fi] + eps, axis=1) & np.all(hi >= lo[fi] - eps, axis=1)
        for fj in np.nonzero(ok)[0]:
            fj = int(fj)
            if fj == fi or (fj in moved_faces and fj < fi):
                continue
            shared = [emb.coords[v] for v in set(faces[fi]) & set(faces[fj])]
            res = triangle_pair_intersection(
                emb.face_points(fi), emb.face_points(fj), tol,
                shared_points=shared, face_a=fi, face_b=fj)
            if res is not None and getattr(res, "kind", None) != "none":
                bad.append((fi, fj))
    return bad


def repair_nonmanifold(emb: EmbeddedComplex, eps_shift: float | None = None,
                       max_backoff: int = 8, seed: int = 0):
    """Both split passes with geometric back-off on the shift parameter.

    Halves eps and retries when a shift introduces an intersection; the
    final complex satisfies both manifoldness conditions exactly.
    """
    eps = eps_shift if eps_shift is not None else 1e-4 * bbox_diagonal(emb.coords)
    original_coords = emb.coords.copy()
    last_exc = None
    for attempt in range(max_backoff + 1):
        try:
            cur, rep1 = split_nonmanifold_paths(emb, eps, seed=seed)
            for _ in range(4):
                if not nonmanifold_edges(cur.complex):
                    break
                cur, more = split_nonmanifold_paths(cur, eps, seed=seed)
                rep1.path_vertex_splits += more.path_vertex_splits
                rep1.edge_splits += more.edge_splits
            cur, rep2 = split_nonmanifold_vertices(cur, eps)
            bad = _new_intersections(cur, original_coords, emb.tol)
            if bad:
                raise NewIntersectionIntroduced(
                    f"{len(bad)} crossing pair(s) after shifting, e.g. {bad[:4]}")
            report = RepairReport(
                eps_used=eps, attempts=attempt + 1, paths=rep1.paths,
                edge_splits=rep1.edge_splits,
                path_vertex_splits=rep1.path_vertex_splits,
                umbrella_vertex_splits=rep2.umbrella_vertex_splits,
                max_shift_norm=max(rep1.max_shift_norm, rep2.max_shift_norm))
            return cur, report
        except NewIntersectionIntroduced as exc:
            last_exc = exc
            eps *= 0.5
    raise last_exc
