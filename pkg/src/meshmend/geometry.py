"""Tolerance-aware 3D geometry kernel.

Points and vectors are numpy arrays of shape (3,), float64 throughout.
Everything here is a pure function over immutable inputs; all other modules
build on these predicates, so the tolerance semantics are fixed here once:

* ``eps_point``  -- absolute distance below which two points coincide,
* ``eps_param``  -- slack on the segment parameter test ``alpha in [0, 1]``,
* ``eps_angle``  -- threshold on unit-vector dot products for parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriangle

__all__ = [
    "Tolerance",
    "Plane",
    "as_point",
    "plane_of_triangle",
    "segment_plane_alpha",
    "point_in_triangle",
    "dedupe_points",
    "weld_points",
    "triangle_area",
    "bbox_diagonal",
]


@dataclass(frozen=True)
class Tolerance:
    """Resolved absolute tolerances for one run.

    ``eps_point`` should be small against the shortest edge of whatever mesh
    is being processed; ``for_bbox`` derives it from the bounding box.
    """

    eps_point: float = 1e-9
    eps_param: float = 1e-9
    eps_angle: float = 1e-12

    def __post_init__(self):
        if not (self.eps_point > 0 and self.eps_param > 0 and self.eps_angle > 0):
            raise ValueError("tolerances must be strictly positive")

    @classmethod
    def for_bbox(cls, coords, eps_point_rel: float = 1e-9,
                 eps_param: float = 1e-9, eps_angle: float = 1e-12) -> "Tolerance":
        """Scale the coincidence tolerance by the bounding-box diagonal."""
        diag = bbox_diagonal(coords)
        return cls(eps_point=eps_point_rel * max(diag, 1.0),
                   eps_param=eps_param, eps_angle=eps_angle)


@dataclass(frozen=True)
class Plane:
    """A plane in normal form: unit ``normal`` and a base ``point`` on it."""

    point: np.ndarray
    normal: np.ndarray

    def signed_distance(self, p) -> float:
        return float(np.dot(np.asarray(p, dtype=float) - self.point, self.normal))


def as_point(p) -> np.ndarray:
    """Coerce to a float64 3-vector, rejecting NaN/inf."""
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite coordinate")
    return a


def bbox_diagonal(coords) -> float:
    a = np.asarray(coords, dtype=float).reshape(-1, 3)
    if len(a) == 0:
        return 0.0
    return float(np.linalg.norm(a.max(axis=0) - a.min(axis=0)))


def triangle_area(a, b, c) -> float:
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    return 0.5 * float(np.linalg.norm(np.cross(b - a, c - a)))


def plane_of_triangle(a, b, c, tol: Tolerance | None = None) -> Plane:
    """Plane spanned by a triangle, normal by the right-hand rule on (a,b,c).

    Raises DegenerateTriangle when the points are (nearly) collinear.
    """
    tol = tol or Tolerance()
    a, b, c = as_point(a), as_point(b), as_point(c)
    n = np.cross(b - a, c - a)
    if 0.5 * np.linalg.norm(n) <= tol.eps_point ** 2:
        raise DegenerateTriangle(f"triangle area below eps_point^2: {a}, {b}, {c}")
    return Plane(point=a, normal=n / np.linalg.norm(n))


def segment_plane_alpha(v_i, v_j, plane: Plane, tol: Tolerance) -> float | None:
    """Parameter alpha where segment v_i -> v_j meets the plane, or None.

    The crossing point is ``alpha * v_j + (1 - alpha) * v_i``.  Returns None
    when the segment is parallel to the plane (within eps_angle) or the
    crossing parameter falls outside ``[-eps_param, 1 + eps_param]``.
    """
    v_i, v_j = as_point(v_i), as_point(v_j)
    d = v_j - v_i
    length = np.linalg.norm(d)
    denom = float(np.dot(d, plane.normal))
    if abs(denom) <= tol.eps_angle * length:
        return None
    alpha = float(np.dot(plane.point - v_i, plane.normal)) / denom
    if -tol.eps_param <= alpha <= 1.0 + tol.eps_param:
        return alpha
    return None


def point_in_triangle(p, a, b, c, tol: Tolerance, margin: float = 0.0) -> bool:
    """Whether p (assumed on the triangle's plane) lies in the triangle.

    Tests p against the three inward side-plane normals; a point passes when
    each signed distance is ``>= margin - eps_point``.  A positive margin
    demands strict interiority by that distance.
    """
    a, b, c = as_point(a), as_point(b), as_point(c)
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n)
    if 0.5 * nn <= tol.eps_point ** 2:
        raise DegenerateTriangle("side test on a degenerate triangle")
    n = n / nn
    p = as_point(p)
    for base, tip in ((a, b), (b, c), (c, a)):
        side = np.cross(n, tip - base)
        side = side / np.linalg.norm(side)
        if np.dot(side, p - base) < margin - tol.eps_point:
            return False
    return True


def dedupe_points(ps, tol: Tolerance) -> list[np.ndarray]:
    """Collapse eps_point-duplicates, first occurrence as the representative.

    Suitable for the small per-face point sets; quadratic in len(ps).
    """
    out: list[np.ndarray] = []
    for p in ps:
        p = as_point(p)
        if not any(np.linalg.norm(p - q) <= tol.eps_point for q in out):
            out.append(p)
    return out


def weld_points(coords, eps: float):
    """Weld nearly-coincident rows of an (n,3) array via a spatial grid.

    Returns ``(unique_coords, index_map)`` where ``index_map[i]`` is the row
    in ``unique_coords`` representing input row i.  First occurrence wins, so
    representatives sit exactly on input geometry.
    """
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    n = len(coords)
    index_map = np.empty(n, dtype=int)
    reps: list[np.ndarray] = []
    cell = max(eps, 1e-300)
    grid: dict[tuple[int, int, int], list[int]] = {}
    for i in range(n):
        p = coords[i]
        key = tuple(int(math.floor(x / cell)) for x in p)
        found = -1
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for j in grid.get((key[0] + dx, key[1] + dy, key[2] + dz), ()):
                        if np.linalg.norm(p - reps[j]) <= eps:
                            found = j
                            break
                    if found >= 0:
                        break
                if found >= 0:
                    break
            if found >= 0:
                break
        if found < 0:
            found = len(reps)
            reps.append(p.copy())
            grid.setdefault(key, []).append(found)
        index_map[i] = found
    unique = np.array(reps).reshape(-1, 3)
    return unique, index_map
