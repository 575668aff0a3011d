"""Orbit machinery for symmetry-accelerated intersection testing.

A symmetry group is supplied as orthogonal 3x3 matrices (never detected).
Each matrix induces a vertex permutation by nearest-image matching and from
it a face permutation; all orbit computations then run on these integer
permutations.  Intersection tests are performed only on face-pair orbit
representatives and transferred to the rest of the orbit by applying the
witness matrices to the segment endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .complexes import EmbeddedComplex
from .errors import MissingRep, NotAGroup, NotInvariant, NotOrthogonal, ParseError
from .geometry import Tolerance, plane_of_triangle
from .intersect import (CoplanarOverlap, IntersectionReport,
                        IntersectionSegment, triangle_pair_intersection)

__all__ = [
    "SymmetryGroup",
    "OrbitDecomposition",
    "verify_group",
    "face_orbits",
    "burnside_orbit_count",
    "symmetric_all_intersections",
    "transfer_retriangulations",
    "load_group_file",
    "save_group_file",
    "rotation_matrix",
    "cyclic_group_matrices",
    "dihedral_group_matrices",
    "icosahedral_group_matrices",
]


@dataclass
class SymmetryGroup:
    """Verified orthogonal matrices with their induced permutations."""

    matrices: list
    vertex_perms: list          # tuples: perm[v] = image vertex id
    face_perms: list            # tuples: perm[f] = image face id
    identity_index: int

    @property
    def order(self) -> int:
        return len(self.matrices)


@dataclass
class OrbitDecomposition:
    """Face transversal, witnesses, and stabilizer pair representatives."""

    face_reps: list
    orbit_of: dict              # face -> (rep, witness element index)
    pair_reps: dict = field(default_factory=dict)  # rep -> sorted face list


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about ``axis`` by ``angle`` radians."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def cyclic_group_matrices(n: int, axis=(0.0, 0.0, 1.0)) -> list:
    return [rotation_matrix(axis, 2 * math.pi * j / n) for j in range(n)]


def dihedral_group_matrices(n: int, axis=(0.0, 0.0, 1.0),
                            flip_axis=(1.0, 0.0, 0.0)) -> list:
    rots = cyclic_group_matrices(n, axis)
    flip = rotation_matrix(flip_axis, math.pi)
    return rots + [r @ flip for r in rots]


def _closure(generators, limit: int = 10000) -> list:
    def key(m):
        return (np.round(m, 9) + 0.0).tobytes()

    elems = {key(np.eye(3)): np.eye(3)}
    frontier = [np.eye(3)]
    while frontier:
        nxt = []
        for m in frontier:
            for g in generators:
                p = g @ m
                k = key(p)
                if k not in elems:
                    elems[k] = p
                    nxt.append(p)
                    if len(elems) > limit:
                        raise NotAGroup("generator closure did not terminate")
        frontier = nxt
    return list(elems.values())


_PHI = (1 + math.sqrt(5)) / 2


def icosahedral_group_matrices(full: bool = True) -> list:
    """The icosahedral symmetry group in the (0, +-1, +-phi) frame.

    60 rotations, or all 120 orthogonal symmetries with ``full``.
    """
    cycle = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    five = rotation_matrix((0.0, 1.0, _PHI), 2 * math.pi / 5)
    gens = [cycle, five]
    if full:
        gens.append(-np.eye(3))
    elems = _closure(gens)
    want = 120 if full else 60
    if len(elems) != want:
        raise NotAGroup(f"icosahedral closure yielded {len(elems)} elements")
    return elems


def load_group_file(path) -> list:
    """One matrix per line: nine reals, row-major; '#' starts a comment."""
    matrices = []
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 9:
                raise ParseError(f"{path}:{ln}: expected 9 reals, got {len(parts)}")
            try:
                vals = [float(p) for p in parts]
            except ValueError as exc:
                raise ParseError(f"{path}:{ln}: {exc}") from exc
            matrices.append(np.array(vals).reshape(3, 3))
    if not matrices:
        raise ParseError(f"{path}: no matrices found")
    return matrices


def save_group_file(matrices, path) -> None:
    with open(path, "w") as fh:
        for m in matrices:
            fh.write(" ".join(f"{x:.17g}" for x in np.asarray(m).ravel()) + "\n")


def _induced_vertex_perm(emb: EmbeddedComplex, matrix, tree, tol) -> tuple:
    mapped = emb.coords @ np.asarray(matrix, dtype=float).T
    dist, idx = tree.query(mapped)
    if np.any(dist > tol.eps_point):
        v = int(np.argmax(dist))
        raise NotInvariant(
            f"matrix does not map vertex {v} onto the vertex set "
            f"(distance {dist[v]:.3g})")
    if len(set(idx.tolist())) != len(idx):
        raise NotInvariant("matrix maps two vertices onto one")
    return tuple(int(i) for i in idx)


def verify_group(emb: EmbeddedComplex, matrices,
                 tol: Tolerance | None = None) -> SymmetryGroup:
    """Check orthogonality and invariance, close the set under products,
    induce permutations, and verify the group axioms on them.

    A generator set is enough: once every supplied matrix is orthogonal
    and maps the embedded vertex set to itself, the closure is a subgroup
    of the (finite) symmetry group of the complex.
    """
    tol = tol or emb.tol
    if len(matrices) == 0:
        raise NotAGroup("empty matrix list")
    tree = cKDTree(emb.coords)
    face_index = {f: i for i, f in enumerate(emb.faces)}

    def induce(m):
        vp = _induced_vertex_perm(emb, m, tree, tol)
        fp = []
        for f in emb.faces:
            img = tuple(sorted(vp[v] for v in f))
            fi = face_index.get(img)
            if fi is None:
                raise NotInvariant(f"face {f} maps to {img}, not a face")
            fp.append(fi)
        return vp, tuple(fp)

    gens = []
    for m in matrices:
        m = np.asarray(m, dtype=float)
        if np.max(np.abs(m.T @ m - np.eye(3))) > tol.eps_angle:
            raise NotOrthogonal(f"matrix is not orthogonal:\n{m}")
        induce(m)  # raises NotInvariant before closure can run away
        gens.append(m)
    elements = _closure(gens)
    vertex_perms, face_perms, kept = [], [], []
    for m in elements:
        vp, fp = induce(m)
        kept.append(m)
        vertex_perms.append(vp)
        face_perms.append(fp)
    perm_index = {p: i for i, p in enumerate(vertex_perms)}
    n_verts = len(emb.coords)
    identity = tuple(range(n_verts))
    if identity not in perm_index:
        raise NotAGroup("identity element missing")
    for pa in vertex_perms:
        for pb in vertex_perms:
            comp = tuple(pa[pb[v]] for v in range(n_verts))
            if comp not in perm_index:
                raise NotAGroup("closure fails on induced permutations")
    for p in vertex_perms:
        inv = tuple(sorted(range(n_verts), key=lambda v: p[v]))
        if inv not in perm_index:
            raise NotAGroup("inverse missing from induced permutations")
    return SymmetryGroup(matrices=kept, vertex_perms=vertex_perms,
                         face_perms=face_perms,
                         identity_index=perm_index[identity])


def face_orbits(emb: EmbeddedComplex, group: SymmetryGroup) -> OrbitDecomposition:
    """Transversal of the face action plus stabilizer pair representatives."""
    n = len(emb.faces)
    orbit_of: dict[int, tuple[int, int]] = {}
    reps = []
    for f in range(n):
        if f in orbit_of:
            continue
        reps.append(f)
        for k, fp in enumerate(group.face_perms):
            img = fp[f]
            if img not in orbit_of:
                orbit_of[img] = (f, k)
        orbit_of[f] = (f, group.identity_index)
    pair_reps: dict[int, list[int]] = {}
    for rep in reps:
        stab = [fp for fp in group.face_perms if fp[rep] == rep]
        seen = set()
        out = []
        for f in range(n):
            if f == rep or f in seen:
                continue
            out.append(f)
            for fp in stab:
                seen.add(fp[f])
        pair_reps[rep] = out
    return OrbitDecomposition(face_reps=reps, orbit_of=orbit_of,
                              pair_reps=pair_reps)


def burnside_orbit_count(perms, set_size: int) -> int:
    """Orbit count as the average number of fixed points over the group."""
    total = sum(sum(1 for x in range(set_size) if p[x] == x) for p in perms)
    if total % len(perms) != 0:
        raise NotAGroup("fixed-point average is not an integer; not a group action")
    return total // len(perms)


def _pair_records(res, fa: int, fb: int):
    """Normalize a pair outcome into (records_for_a, records_for_b, marker)."""
    if res is None:
        return [], [], None
    if isinstance(res, IntersectionSegment):
        return [(res.p0, res.p1, "transversal")], \
               [(res.p0, res.p1, "transversal")], res
    if isinstance(res, CoplanarOverlap):
        if res.kind == "none":
            return [], [], None
        rec_a = [(p, q, "coplanar") for p, q in res.pieces_in_1]
        rec_b = [(p, q, "coplanar") for p, q in res.pieces_in_2]
        src = res.pieces_in_1 or res.pieces_in_2
        marker = IntersectionSegment(fa, fb, src[0][0], src[0][1], kind="coplanar")
        return rec_a, rec_b, marker
    raise TypeError(f"unexpected pair outcome {type(res)}")


def symmetric_all_intersections(emb: EmbeddedComplex, group: SymmetryGroup,
                                orbits: OrbitDecomposition | None = None,
                                tol: Tolerance | None = None) -> IntersectionReport:
    """Intersections of all face pairs, testing one pair per pair-orbit.

    Results match brute force as a multiset of segments within eps_point;
    ``pairs_tested`` counts the actual geometric tests.
    """
    tol = tol or emb.tol
    orbits = orbits or face_orbits(emb, group)
    faces = emb.faces
    n = len(faces)
    planes = [plane_of_triangle(*emb.face_points(i), tol) for i in range(n)]
    tris = emb.coords[np.asarray(faces)]
    box_lo, box_hi = tris.min(axis=1), tris.max(axis=1)
    report = IntersectionReport(by_face={}, segments=[], pairs_tested=0,
                                pairs_total=n * (n - 1) // 2)
    done: set[frozenset] = set()
    for rep in orbits.face_reps:
        for other in orbits.pair_reps[rep]:
            key = frozenset((rep, other))
            if key in done:
                continue
            # a disjoint representative pair certifies its whole orbit empty
            if np.any(box_lo[rep] > box_hi[other] + tol.eps_point) or \
                    np.any(box_hi[rep] < box_lo[other] - tol.eps_point):
                for fp in group.face_perms:
                    done.add(frozenset((fp[rep], fp[other])))
                continue
            shared = [emb.coords[v] for v in set(faces[rep]) & set(faces[other])]
            res = triangle_pair_intersection(
                emb.face_points(rep), emb.face_points(other), tol,
                shared_points=shared, face_a=rep, face_b=other,
                plane1=planes[rep], plane2=planes[other])
            report.pairs_tested += 1
            rec_a, rec_b, marker = _pair_records(res, rep, other)
            for k in range(group.order):
                fp = group.face_perms[k]
                fa, fb = fp[rep], fp[other]
                ukey = frozenset((fa, fb))
                if ukey in done:
                    continue
                done.add(ukey)
                if marker is None:
                    continue
                m = np.asarray(group.matrices[k], dtype=float)
                if marker.kind == "transversal":
                    seg = IntersectionSegment(min(fa, fb), max(fa, fb),
                                              m @ marker.p0, m @ marker.p1)
                    report.segments.append(seg)
                    report.by_face.setdefault(fa, []).append(seg)
                    report.by_face.setdefault(fb, []).append(seg)
                else:
                    report.coplanar_pairs += 1
                    report.segments.append(
                        IntersectionSegment(min(fa, fb), max(fa, fb),
                                            m @ marker.p0, m @ marker.p1,
                                            kind="coplanar"))
                    for p, q, kind in rec_a:
                        report.by_face.setdefault(fa, []).append(
                            IntersectionSegment(fa, fb, m @ p, m @ q, kind=kind))
                    for p, q, kind in rec_b:
                        report.by_face.setdefault(fb, []).append(
                            IntersectionSegment(fa, fb, m @ p, m @ q, kind=kind))
    return report


def transfer_retriangulations(emb: EmbeddedComplex, group: SymmetryGroup,
                              orbits: OrbitDecomposition,
                              rep_triangulations: dict,
                              required_faces=()) -> dict:
    """Per-face triangle lists for the whole complex from the reps' lists.

    Faces whose rep has no entry stay untouched; a face in
    ``required_faces`` with a missing rep raises MissingRep.
    """
    required = set(required_faces)
    out = {}
    for f in range(len(emb.faces)):
        rep, k = orbits.orbit_of[f]
        tris = rep_triangulations.get(rep)
        if tris is None:
            if f in required:
                raise MissingRep(f"face {f}: no retriangulation for its rep {rep}")
            continue
        m = np.asarray(group.matrices[k], dtype=float)
        out[f] = [tuple(m @ p for p in tri) for tri in tris]
    return out
