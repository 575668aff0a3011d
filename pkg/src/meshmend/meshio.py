"""Mesh file ingestion and emission: STL (ASCII and binary) and OFF.

Triangle soups are welded into shared vertex ids at load time (STL carries
no topology, so welding defines it); the resulting complex must be closed.
Binary STL layout: 80-byte header, little-endian uint32 triangle count,
then 50 bytes per triangle (12 float32: normal + 3 vertices, plus a 2-byte
attribute word).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .complexes import EmbeddedComplex, build_complex, face_normal, outward_orientation
from .errors import DegenerateFace, ParseError
from .geometry import Tolerance, weld_points

__all__ = ["load_mesh", "save_mesh", "sniff_format"]

_BINARY_HEADER = b"meshmend binary stl"


def sniff_format(path) -> str:
    path = Path(path)
    if path.suffix.lower() == ".off":
        return "off"
    size = path.stat().st_size
    with open(path, "rb") as fh:
        head = fh.read(84)
    if len(head) >= 84:
        (count,) = struct.unpack("<I", head[80:84])
        if size == 84 + 50 * count:
            return "stl-binary"
    if head[:5].lower() == b"solid":
        return "stl-ascii"
    raise ParseError(f"{path}: cannot determine mesh format")


def _read_off(path):
    with open(path) as fh:
        tokens = []
        for ln, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if body:
                tokens.extend((ln, t) for t in body.split())
    if not tokens or tokens[0][1] != "OFF":
        raise ParseError(f"{path}: missing OFF header")
    pos = 1

    def take(n=1):
        nonlocal pos
        if pos + n > len(tokens):
            ln = tokens[-1][0] if tokens else 0
            raise ParseError(f"{path}:{ln}: unexpected end of file")
        out = tokens[pos:pos + n]
        pos += n
        return out

    try:
        nv, nf, _ = (int(t) for _, t in take(3))
        coords = np.array([[float(t) for _, t in take(3)] for _ in range(nv)])
        faces = []
        for _ in range(nf):
            ((ln, cnt),) = (take(1)[0],)
            if int(cnt) != 3:
                raise ParseError(f"{path}:{ln}: only triangular faces supported")
            faces.append(tuple(int(t) for _, t in take(3)))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if any(v < 0 or v >= nv for f in faces for v in f):
        raise ParseError(f"{path}: face references vertex outside table")
    return coords, faces


def _read_stl_ascii(path):
    tris = []
    cur = []
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "vertex":
                if len(parts) != 4:
                    raise ParseError(f"{path}:{ln}: malformed vertex line")
                try:
                    cur.append([float(x) for x in parts[1:]])
                except ValueError as exc:
                    raise ParseError(f"{path}:{ln}: {exc}") from exc
            elif parts[0] == "endloop":
                if len(cur) != 3:
                    raise ParseError(f"{path}:{ln}: facet with {len(cur)} vertices")
                tris.append(cur)
                cur = []
    if not tris:
        raise ParseError(f"{path}: no facets found")
    return np.array(tris, dtype=float)


def _read_stl_binary(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 84:
        raise ParseError(f"{path}: truncated binary STL (at byte {len(data)})")
    (count,) = struct.unpack("<I", data[80:84])
    want = 84 + 50 * count
    if len(data) != want:
        raise ParseError(f"{path}: expected {want} bytes for {count} triangles, "
                         f"got {len(data)}")
    tris = np.empty((count, 3, 3), dtype=float)
    off = 84
    for i in range(count):
        vals = struct.unpack_from("<12f", data, off)
        tris[i] = np.array(vals[3:], dtype=float).reshape(3, 3)
        off += 50
    return tris


def load_mesh(path, fmt: str | None = None, eps_point_rel: float | None = None,
              tol: Tolerance | None = None) -> EmbeddedComplex:
    """Read a mesh file and weld it into a closed embedded complex.

    STL facet normals are ignored; topology comes from welding coincident
    corners within eps_point.  When ``eps_point_rel`` is not given it is
    chosen per format: binary STL stores float32, so its coincidence
    tolerance must dominate that rounding noise (1e-6 of the bounding-box
    diagonal); full-precision text formats get 1e-9.  The tolerance must
    stay well below the shortest input edge, which is checked after
    welding.
    """
    fmt = fmt or sniff_format(path)
    if eps_point_rel is None:
        eps_point_rel = 1e-6 if fmt == "stl-binary" else 1e-9
    if fmt == "off":
        coords, faces = _read_off(path)
        tol = tol or Tolerance.for_bbox(coords, eps_point_rel)
        unique, index_map = weld_points(coords, tol.eps_point)
        triples = [tuple(sorted(int(index_map[v]) for v in f)) for f in faces]
    elif fmt in ("stl-ascii", "stl-binary"):
        tris = (_read_stl_ascii(path) if fmt == "stl-ascii"
                else _read_stl_binary(path))
        tol = tol or Tolerance.for_bbox(tris.reshape(-1, 3), eps_point_rel)
        unique, index_map = weld_points(tris.reshape(-1, 3), tol.eps_point)
        triples = [tuple(sorted(int(v) for v in index_map[3 * k:3 * k + 3]))
                   for k in range(len(tris))]
    else:
        raise ParseError(f"unknown format {fmt!r}")
    for t in triples:
        if len(set(t)) != 3:
            raise DegenerateFace(f"triangle collapsed under welding: {t}")
    x = build_complex(triples)
    emb = EmbeddedComplex(x, unique, tol)
    if x.edges:
        shortest = min(
            float(np.linalg.norm(unique[a] - unique[b])) for a, b in x.edges)
        if shortest <= 10 * tol.eps_point:
            raise ValueError(
                f"eps_point {tol.eps_point:.3g} is not small against the "
                f"shortest edge {shortest:.3g}; lower --eps-point")
    return emb


def _resolve_windings(emb: EmbeddedComplex, windings):
    if windings is not None:
        return list(windings)
    oriented = outward_orientation(emb)
    return [oriented[fi] for fi in range(len(emb.faces))]


def save_mesh(emb: EmbeddedComplex, path, fmt: str | None = None,
              windings=None) -> None:
    """Write OFF or STL.  STL needs an orientation; when ``windings`` is
    not given, the outward orientation is computed (surface inputs only)."""
    path = Path(path)
    if fmt is None:
        fmt = "off" if path.suffix.lower() == ".off" else "stl-binary"
    if fmt == "off":
        with open(path, "w") as fh:
            fh.write("OFF\n")
            fh.write(f"{len(emb.coords)} {len(emb.faces)} 0\n")
            for p in emb.coords:
                fh.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
            for f in emb.faces:
                fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")
        return
    tris = _resolve_windings(emb, windings)
    if fmt == "stl-ascii":
        with open(path, "w") as fh:
            fh.write("solid meshmend\n")
            for tri in tris:
                n = face_normal(emb.coords, tri)
                fh.write(f"  facet normal {n[0]:.17g} {n[1]:.17g} {n[2]:.17g}\n")
                fh.write("    outer loop\n")
                for v in tri:
                    p = emb.coords[v]
                    fh.write(f"      vertex {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
                fh.write("    endloop\n  endfacet\n")
            fh.write("endsolid meshmend\n")
        return
    if fmt == "stl-binary":
        with open(path, "wb") as fh:
            fh.write(_BINARY_HEADER.ljust(80, b"\0"))
            fh.write(struct.pack("<I", len(tris)))
            for tri in tris:
                n = face_normal(emb.coords, tri)
                vals = [*n]
                for v in tri:
                    vals.extend(emb.coords[v])
                fh.write(struct.pack("<12f", *vals))
                fh.write(struct.pack("<H", 0))
        return
    raise ParseError(f"unknown format {fmt!r}")
