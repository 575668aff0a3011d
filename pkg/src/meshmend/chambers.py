"""Full chamber decomposition: every oriented face side gets a chamber.

Chambers are the connected components of space minus the face triangles.
The fan walk partitions face sides into connected boundary components, but
one chamber may be bounded by several of them (a shell around holes), so
components are merged afterwards: a component whose chamber-facing sides
enclose negative signed volume is an inner boundary, and a ray cast from
its extреme face lands on another boundary of the same chamber (or escapes
to infinity, identifying the unbounded chamber).

Volumes come from the divergence theorem with windings oriented away from
each chamber; a chamber's volume is the signed sum over its components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import EmbeddedComplex, face_normal
from .errors import PreconditionViolated
from .outerhull import (build_fans, extract_chamber, initial_face,
                        restrict_to_faces, side_of_normal)

__all__ = [
    "Chamber",
    "ChamberLabeling",
    "all_chambers",
    "chamber_volume",
    "chamber_windings",
    "exploded_view",
]


@dataclass
class Chamber:
    id: int
    sides: list          # (face, sigma) pairs; the sigma side faces this chamber
    faces: list
    bounded: bool
    volume: float        # math.inf for the unbounded chamber
    euler: int
    centroid: np.ndarray
    n_components: int = 1


@dataclass
class ChamberLabeling:
    chambers: list
    label: dict          # (face, sigma) -> chamber id
    unbounded: int

    def bounded_chambers(self):
        return [c for c in self.chambers if c.bounded]


def chamber_windings(emb: EmbeddedComplex, sides):
    """Windings oriented away from the chamber the sides face."""
    out = []
    for face, sigma in sides:
        a, b, c = emb.faces[face]
        out.append((a, b, c) if sigma < 0 else (a, c, b))
    return out


def _signed_outflux(emb: EmbeddedComplex, sides) -> float:
    total = 0.0
    for tri in chamber_windings(emb, sides):
        a, b, c = emb.coords[list(tri)]
        total += float(np.dot(a, np.cross(b, c))) / 6.0
    return total


def chamber_volume(emb: EmbeddedComplex, sides) -> float:
    """Enclosed volume of a closed oriented boundary, by divergence."""
    return abs(_signed_outflux(emb, sides))


def _ray_first_hit(emb: EmbeddedComplex, origin, direction, skip_face: int,
                   seed: int = 0):
    """First face properly hit by the ray, with the side facing the origin.

    Retries with a slightly jittered direction when the best hit grazes a
    triangle boundary (a tie there could sit on two non-coplanar faces).
    """
    tris = emb.coords[np.asarray(emb.faces)]
    v0, e1, e2 = tris[:, 0], tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]
    eps_t = 10 * emb.tol.eps_point
    rng = np.random.default_rng(seed)
    direction = np.asarray(direction, dtype=float)
    for attempt in range(8):
        d = direction
        if attempt:
            d = direction + rng.normal(scale=1e-5, size=3)
        d = d / np.linalg.norm(d)
        h = np.cross(d, e2)
        a = np.einsum("ij,ij->i", e1, h)
        safe = np.abs(a) > 1e-300
        inv = np.where(safe, 1.0 / np.where(safe, a, 1.0), 0.0)
        s = origin - v0
        u = inv * np.einsum("ij,ij->i", s, h)
        q = np.cross(s, e1)
        v = inv * (q @ d)
        t = inv * np.einsum("ij,ij->i", e2, q)
        ok = safe & (u >= -1e-12) & (v >= -1e-12) & (u + v <= 1 + 1e-12) & (t > eps_t)
        ok[skip_face] = False
        if not np.any(ok):
            return None
        idx = int(np.nonzero(ok)[0][np.argmin(t[ok])])
        margin = 1e-9
        if (u[idx] > margin and v[idx] > margin
                and u[idx] + v[idx] < 1 - margin):
            n_ref = face_normal(emb.coords, emb.faces[idx])
            sigma = -1 if np.dot(n_ref, d) > 0 else 1
            return idx, sigma
    # grazing hit that never cleared: accept it (coplanar ties are harmless)
    n_ref = face_normal(emb.coords, emb.faces[idx])
    sigma = -1 if np.dot(n_ref, d) > 0 else 1
    return idx, sigma


def _component_probe(emb: EmbeddedComplex, comp_faces, seed: int = 0):
    """A face of the component plus the outward probe direction, found by
    the same extreme-vertex criterion that certifies the outer start face."""
    comp_faces = sorted(comp_faces)
    sub = restrict_to_faces(emb, comp_faces)
    sp = initial_face(sub, seed=seed)
    face = comp_faces[sp.face]
    return face, sp.normal


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def all_chambers(emb: EmbeddedComplex, seed: int = 0) -> ChamberLabeling:
    """Label every (face, side) of the complex with its chamber."""
    fans = build_fans(emb)
    sp = initial_face(emb, seed=seed)
    start_key = (sp.face, side_of_normal(emb, sp.face, sp.normal))

    comp_of: dict = {}
    comps: list[set] = []
    order = [start_key] + [(f, s) for f in range(len(emb.faces)) for s in (1, -1)]
    for key in order:
        if key in comp_of:
            continue
        sides = extract_chamber(emb, key[0], key[1], fans=fans)
        cid = len(comps)
        for k in sides:
            if k in comp_of:
                raise AssertionError(f"side {k} walked twice")
            comp_of[k] = cid
        comps.append(sides)

    outflux = [_signed_outflux(emb, c) for c in comps]
    uf = _UnionFind(len(comps) + 1)
    infinity = len(comps)
    uf.union(comp_of[start_key], infinity)
    for cid, comp in enumerate(comps):
        if outflux[cid] >= 0 or cid == comp_of[start_key]:
            continue
        face, normal = _component_probe(emb, {f for f, _ in comp}, seed=seed)
        origin = emb.coords[list(emb.faces[face])].mean(axis=0)
        hit = _ray_first_hit(emb, origin, normal, skip_face=face, seed=seed)
        if hit is None:
            uf.union(cid, infinity)
        else:
            uf.union(cid, comp_of[hit])

    groups: dict[int, list[int]] = {}
    for cid in range(len(comps)):
        groups.setdefault(uf.find(cid), []).append(cid)
    unbounded_root = uf.find(infinity)

    chambers = []
    label = {}
    roots = sorted(groups, key=lambda r: (r != unbounded_root, r))
    for new_id, root in enumerate(roots):
        members = groups[root]
        sides = []
        for cid in members:
            sides.extend(comps[cid])
        sides.sort()
        bounded = root != unbounded_root
        faces = sorted({f for f, _ in sides})
        if len(faces) != len(sides):
            raise PreconditionViolated(
                "a face bounds one chamber with both sides (sheet); "
                "input cannot be closed and intersection-free")
        verts = sorted({v for f in faces for v in emb.faces[f]})
        edges = {e for f in faces for e in emb.complex.face_edges(f)}
        volume = float("inf")
        if bounded:
            volume = sum(outflux[cid] for cid in members)
            if volume <= 0:
                raise AssertionError("bounded chamber with non-positive volume")
        chambers.append(Chamber(
            id=new_id, sides=sides, faces=faces, bounded=bounded,
            volume=volume, euler=len(verts) - len(edges) + len(faces),
            centroid=emb.coords[verts].mean(axis=0), n_components=len(members)))
        for k in sides:
            label[k] = new_id
    return ChamberLabeling(chambers=chambers, label=label, unbounded=0)


def unbounded_side_map(emb: EmbeddedComplex, seed: int = 0) -> dict:
    """Per face, the side exposed to the unbounded chamber.

    Every face must expose one: the complex has to be reduced to its outer
    hull first.
    """
    labeling = all_chambers(emb, seed=seed)
    out = {}
    for f, sigma in labeling.chambers[labeling.unbounded].sides:
        out[f] = sigma
    if len(out) != len(emb.faces):
        raise PreconditionViolated(
            "complex is not reduced to its outer hull; run hull extraction first")
    return out


def exploded_view(emb: EmbeddedComplex, labeling: ChamberLabeling,
                  magnitude: float, centre=None):
    """Bounded chambers translated by magnitude * (centroid - centre).

    Returns (chamber, shifted vertex coords, local face triples, windings)
    per bounded chamber; windings are local-index triples oriented away
    from the chamber so emitted meshes face outward.
    """
    centre = (np.asarray(centre, dtype=float) if centre is not None
              else emb.coords.mean(axis=0))
    out = []
    for ch in labeling.bounded_chambers():
        shift = magnitude * (ch.centroid - centre)
        verts = sorted({v for f in ch.faces for v in emb.faces[f]})
        remap = {v: i for i, v in enumerate(verts)}
        coords = emb.coords[verts] + shift
        faces_local = [tuple(sorted(remap[v] for v in emb.faces[f]))
                       for f in ch.faces]
        windings_local = [tuple(remap[v] for v in tri)
                          for tri in chamber_windings(emb, ch.sides)]
        out.append((ch, coords, faces_local, windings_local))
    return out
