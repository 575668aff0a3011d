"""Triangle-triangle intersection of embedded face pairs.

The pair test runs every edge of each triangle against the other triangle's
plane, keeps the hits that land inside the triangle, removes points that
coincide with shared vertices of the pair, and reports a segment when two
points remain.  Coplanar pairs take a separate 2D route whose result is a
set of constraint edges per face rather than a single segment.

One extension beyond the two-points-remain rule: when the pair shares a
vertex and exactly one non-shared hit remains, the faces may still cross
along a segment that *starts* at the shared corner (star polyhedra do this
at every vertex).  That segment is emitted when its midpoint is strictly
interior to both triangles.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complexes import EmbeddedComplex
from .geometry import (Plane, Tolerance, dedupe_points, plane_of_triangle,
                       point_in_triangle, segment_plane_alpha)

log = logging.getLogger(__name__)

__all__ = [
    "IntersectionSegment",
    "CoplanarOverlap",
    "triangle_pair_intersection",
    "coplanar_intersection",
    "all_intersections",
    "IntersectionReport",
    "dump_segments",
]


@dataclass(frozen=True)
class IntersectionSegment:
    """Where a face pair crosses; both endpoints lie on both faces."""

    face_a: int
    face_b: int
    p0: np.ndarray
    p1: np.ndarray
    kind: str = "transversal"  # or "coplanar"

    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))


@dataclass
class CoplanarOverlap:
    """Outcome of the coplanar case: no overlap, crossing, or containment."""

    kind: str                      # 'none' | 'crossing' | 'contained'
    contained: int | None = None   # 1 or 2: which triangle lies inside the other
    crossing_points: list = field(default_factory=list)
    pieces_in_1: list = field(default_factory=list)  # clipped edges of t2 inside t1
    pieces_in_2: list = field(default_factory=list)  # clipped edges of t1 inside t2


def _planar_frame(plane: Plane):
    """Orthonormal (u, v) spanning the plane, for 2D work."""
    n = plane.normal
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) <= abs(n[2]) else np.array([0.0, 0.0, 1.0])
    u = np.cross(n, a)
    u = u / np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v


def _to_2d(points, plane: Plane):
    u, v = _planar_frame(plane)
    rel = np.asarray(points, dtype=float) - plane.point
    return np.stack([rel @ u, rel @ v], axis=-1)


def _clip_segment_to_triangle_2d(a, b, tri2d, eps):
    """Parameter range [t0,t1] of segment a->b inside a 2D triangle, or None."""
    d = b - a
    t0, t1 = 0.0, 1.0
    for k in range(3):
        p, q = tri2d[k], tri2d[(k + 1) % 3]
        e = q - p
        nn = np.array([-e[1], e[0]])  # left normal
        # orient inward: third vertex must satisfy the constraint
        r = tri2d[(k + 2) % 3]
        if np.dot(nn, r - p) < 0:
            nn = -nn
        nn = nn / np.linalg.norm(nn)
        num = np.dot(nn, a - p)
        den = np.dot(nn, d)
        if abs(den) < 1e-300:
            if num < -eps:
                return None
            continue
        t_hit = -num / den
        if den > 0:
            t0 = max(t0, t_hit)
        else:
            t1 = min(t1, t_hit)
        if t0 > t1:
            return None
    return t0, t1


def _segment_crossing_2d(a, b, c, d, eps):
    """Proper interior crossing point of 2D segments ab and cd, or None."""
    r = b - a
    s = d - c
    denom = r[0] * s[1] - r[1] * s[0]
    scale = max(np.linalg.norm(r), np.linalg.norm(s), 1e-300)
    if abs(denom) <= 1e-14 * scale * scale:
        return None
    q = c - a
    t = (q[0] * s[1] - q[1] * s[0]) / denom
    u = (q[0] * r[1] - q[1] * r[0]) / denom
    lo, hi = -eps, 1 + eps
    if lo <= t <= hi and lo <= u <= hi:
        return a + t * r
    return None


def _clip_polygon_2d(subject, tri2d, eps):
    """Sutherland-Hodgman clip of a 2D polygon against a 2D triangle."""
    poly = [np.asarray(p, dtype=float) for p in subject]
    for k in range(3):
        if not poly:
            return []
        p, q = tri2d[k], tri2d[(k + 1) % 3]
        e = q - p
        nn = np.array([-e[1], e[0]])
        if np.dot(nn, tri2d[(k + 2) % 3] - p) < 0:
            nn = -nn
        nn = nn / np.linalg.norm(nn)
        out = []
        for i in range(len(poly)):
            a, b = poly[i], poly[(i + 1) % len(poly)]
            da, db = np.dot(nn, a - p), np.dot(nn, b - p)
            if da >= -eps:
                out.append(a)
            if (da >= -eps) != (db >= -eps) and abs(da - db) > 1e-300:
                t = da / (da - db)
                out.append(a + t * (b - a))
        poly = out
    return poly


def _polygon_area_2d(poly) -> float:
    total = 0.0
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        total += a[0] * b[1] - a[1] * b[0]
    return abs(total) / 2.0


def coplanar_intersection(t1, t2, tol: Tolerance) -> CoplanarOverlap:
    """Classify two coplanar triangles: none / crossing / contained.

    Boundary-only contact (shared edges, a touching corner) counts as no
    overlap: the test is the area of the convex polygon intersection.
    Crossing pieces are the parts of each triangle's edges that lie inside
    the other triangle; they feed face subdivision like transversal segments.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    plane = plane_of_triangle(*t1, tol)
    q1 = _to_2d(t1, plane)
    q2 = _to_2d(t2, plane)
    eps = tol.eps_point

    overlap = _clip_polygon_2d(q2, q1, eps)
    diameter = max(np.linalg.norm(q1[i] - q1[j]) for i in range(3) for j in range(i))
    if _polygon_area_2d(overlap) <= 4 * eps * max(diameter, 1.0):
        return CoplanarOverlap(kind="none")

    def pieces(src2d, src3d, dst2d):
        out = []
        for k in range(3):
            a2, b2 = src2d[k], src2d[(k + 1) % 3]
            rng = _clip_segment_to_triangle_2d(a2, b2, dst2d, eps)
            if rng is None:
                continue
            t0, t1_ = rng
            a3, b3 = src3d[k], src3d[(k + 1) % 3]
            if (t1_ - t0) * np.linalg.norm(b3 - a3) <= eps:
                continue
            out.append((a3 + t0 * (b3 - a3), a3 + t1_ * (b3 - a3)))
        return out

    pieces_in_1 = pieces(q2, t2, q1)
    pieces_in_2 = pieces(q1, t1, q2)

    def fully_inside(src2d, dst2d):
        for k in range(3):
            rng = _clip_segment_to_triangle_2d(src2d[k], src2d[(k + 1) % 3],
                                               dst2d, eps)
            if rng is None or rng[0] > 1e-7 or rng[1] < 1 - 1e-7:
                return False
        return True

    if fully_inside(q2, q1):
        return CoplanarOverlap(kind="contained", contained=2,
                               pieces_in_1=pieces_in_1, pieces_in_2=pieces_in_2)
    if fully_inside(q1, q2):
        return CoplanarOverlap(kind="contained", contained=1,
                               pieces_in_1=pieces_in_1, pieces_in_2=pieces_in_2)
    u, v = _planar_frame(plane)
    crossings = []
    for i in range(3):
        for j in range(3):
            p = _segment_crossing_2d(q1[i], q1[(i + 1) % 3],
                                     q2[j], q2[(j + 1) % 3], tol.eps_param)
            if p is not None:
                crossings.append(plane.point + p[0] * u + p[1] * v)
    crossings = dedupe_points(crossings, tol)
    return CoplanarOverlap(kind="crossing", crossing_points=crossings,
                           pieces_in_1=pieces_in_1, pieces_in_2=pieces_in_2)


def _edge_hits(tri_src, plane_dst: Plane, tri_dst, tol: Tolerance):
    """Hits of tri_src's edges on tri_dst (transversal and in-plane edges)."""
    hits = []
    dst2d = _to_2d(tri_dst, plane_dst)
    for k in range(3):
        a, b = tri_src[k], tri_src[(k + 1) % 3]
        alpha = segment_plane_alpha(a, b, plane_dst, tol)
        if alpha is not None:
            p = alpha * b + (1 - alpha) * a
            if point_in_triangle(p, *tri_dst, tol):
                hits.append(p)
            continue
        # parallel edge: meaningful only when it lies in the plane
        if (abs(plane_dst.signed_distance(a)) <= tol.eps_point
                and abs(plane_dst.signed_distance(b)) <= tol.eps_point):
            a2, b2 = _to_2d(np.array([a, b]), plane_dst)
            rng = _clip_segment_to_triangle_2d(a2, b2, dst2d, tol.eps_point)
            if rng is not None:
                t0, t1 = rng
                hits.append(a + t0 * (b - a))
                if (t1 - t0) * np.linalg.norm(b - a) > tol.eps_point:
                    hits.append(a + t1 * (b - a))
    return hits


def triangle_pair_intersection(t1, t2, tol: Tolerance, shared_points=(),
                               face_a: int = -1, face_b: int = -1,
                               plane1: Plane | None = None,
                               plane2: Plane | None = None,
                               touches: list | None = None):
    """Intersection of two embedded triangles.

    Returns an IntersectionSegment, a CoplanarOverlap, or None.  Points
    within eps_point of a shared vertex image in ``shared_points`` never
    count as evidence of intersection on their own.  A lone contact point
    is dropped (it induces no retriangulation edge) but appended to the
    ``touches`` accumulator when one is supplied.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    plane1 = plane1 or plane_of_triangle(*t1, tol)
    plane2 = plane2 or plane_of_triangle(*t2, tol)
    eps = tol.eps_point

    d1 = np.array([plane2.signed_distance(p) for p in t1])
    d2 = np.array([plane1.signed_distance(p) for p in t2])
    if np.max(np.abs(d1)) <= eps and np.max(np.abs(d2)) <= eps:
        return coplanar_intersection(t1, t2, tol)
    if np.all(d1 > eps) or np.all(d1 < -eps):
        return None
    if np.all(d2 > eps) or np.all(d2 < -eps):
        return None

    raw = _edge_hits(t1, plane2, t2, tol) + _edge_hits(t2, plane1, t1, tol)
    pts = dedupe_points(raw, tol)
    shared = [np.asarray(s, dtype=float) for s in shared_points]
    rest = [p for p in pts
            if not any(np.linalg.norm(p - s) <= eps for s in shared)]

    if len(rest) >= 2:
        if len(rest) > 2:
            # should only happen inside the tolerance band; keep the extremes
            best = max(((i, j) for i in range(len(rest)) for j in range(i + 1, len(rest))),
                       key=lambda ij: np.linalg.norm(rest[ij[0]] - rest[ij[1]]))
            log.warning("pair (%d,%d): %d intersection points after dedupe, "
                        "keeping the two farthest apart", face_a, face_b, len(rest))
            rest = [rest[best[0]], rest[best[1]]]
        return IntersectionSegment(face_a, face_b, rest[0], rest[1])

    if len(rest) == 1:
        if shared:
            hit_shared = [s for s in shared
                          if any(np.linalg.norm(p - s) <= eps for p in pts)]
            if hit_shared:
                q = max(hit_shared, key=lambda s: np.linalg.norm(rest[0] - s))
                p = rest[0]
                if np.linalg.norm(p - q) > 10 * eps:
                    mid = 0.5 * (p + q)
                    margin = 10 * eps
                    if (point_in_triangle(mid, *t1, tol, margin=margin)
                            and point_in_triangle(mid, *t2, tol, margin=margin)):
                        return IntersectionSegment(face_a, face_b, q, p)
        if touches is not None:
            touches.append((face_a, face_b))
    return None


@dataclass
class IntersectionReport:
    """Per-face constraint segments plus pair-level bookkeeping."""

    by_face: dict[int, list[IntersectionSegment]]
    segments: list[IntersectionSegment]      # one entry per intersecting pair
    pairs_tested: int
    pairs_total: int
    touch_pairs: int = 0
    coplanar_pairs: int = 0

    @property
    def is_intersection_free(self) -> bool:
        return not self.segments


def _face_boxes(emb: EmbeddedComplex):
    tris = emb.coords[np.asarray(emb.faces)]
    return tris.min(axis=1), tris.max(axis=1)


def candidate_pairs(emb: EmbeddedComplex, eps: float):
    """Face pairs whose bounding boxes overlap, ascending pair order."""
    lo, hi = _face_boxes(emb)
    n = len(emb.faces)
    out = []
    for i in range(n - 1):
        ok = np.all(lo[i + 1:] <= hi[i] + eps, axis=1) & \
             np.all(hi[i + 1:] >= lo[i] - eps, axis=1)
        for j in np.nonzero(ok)[0]:
            out.append((i, int(j) + i + 1))
    return out


def _record_pair(report: IntersectionReport, res, i, j):
    if res is None:
        return
    if isinstance(res, IntersectionSegment):
        report.segments.append(res)
        report.by_face.setdefault(i, []).append(res)
        report.by_face.setdefault(j, []).append(res)
        return
    # coplanar outcome
    if res.kind == "none":
        return
    report.coplanar_pairs += 1
    marker = IntersectionSegment(i, j, res.pieces_in_1[0][0], res.pieces_in_1[0][1],
                                 kind="coplanar") if res.pieces_in_1 else \
             IntersectionSegment(i, j, res.pieces_in_2[0][0], res.pieces_in_2[0][1],
                                 kind="coplanar")
    report.segments.append(marker)
    for a, b in res.pieces_in_1:
        report.by_face.setdefault(i, []).append(
            IntersectionSegment(i, j, a, b, kind="coplanar"))
    for a, b in res.pieces_in_2:
        report.by_face.setdefault(j, []).append(
            IntersectionSegment(i, j, a, b, kind="coplanar"))


def all_intersections(emb: EmbeddedComplex, tol: Tolerance | None = None,
                      jobs: int = 1) -> IntersectionReport:
    """Test every face pair (bounding-box prefiltered) of the complex.

    The by_face map records each transversal segment under both faces;
    coplanar overlaps contribute clipped constraint edges per face.
    """
    tol = tol or emb.tol
    faces = emb.faces
    n = len(faces)
    planes = [plane_of_triangle(*emb.face_points(i), tol) for i in range(n)]
    pairs = candidate_pairs(emb, tol.eps_point)
    report = IntersectionReport(by_face={}, segments=[],
                                pairs_tested=len(pairs),
                                pairs_total=n * (n - 1) // 2)
    touches: list = []

    def run(pair):
        i, j = pair
        shared = [emb.coords[v] for v in set(faces[i]) & set(faces[j])]
        return triangle_pair_intersection(
            emb.face_points(i), emb.face_points(j), tol, shared_points=shared,
            face_a=i, face_b=j, plane1=planes[i], plane2=planes[j],
            touches=touches)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, pairs, chunksize=64))
    else:
        results = [run(p) for p in pairs]
    for (i, j), res in zip(pairs, results):
        _record_pair(report, res, i, j)
    report.touch_pairs = len(touches)
    return report


def dump_segments(report: IntersectionReport) -> str:
    """Line-oriented dump: face_a face_b kind x0 y0 z0 x1 y1 z1."""
    lines = []
    for s in report.segments:
        coords = " ".join(f"{c:.17g}" for c in (*s.p0, *s.p1))
        lines.append(f"{s.face_a} {s.face_b} {s.kind} {coords}")
    return "\n".join(lines) + ("\n" if lines else "")
