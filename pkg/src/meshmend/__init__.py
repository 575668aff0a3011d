"""meshmend: repair toolkit for self-intersecting closed triangle meshes.

Takes a closed embedded simplicial complex that may self-intersect and
produces a valid embedded simplicial surface: detects all triangle pair
intersections (optionally accelerated by a known symmetry group),
retriangulates affected faces with the minimal number of triangles,
extracts the outer hull and the interior chambers, and splits non-manifold
edges and vertices.
"""

__version__ = "0.1.0"

from .complexes import (EmbeddedComplex, SimplicialComplex, build_complex,
                        euler_characteristic, is_simplicial_surface,
                        nonmanifold_edges, nonmanifold_vertices, orient)
from .geometry import Tolerance
from .intersect import all_intersections, triangle_pair_intersection
from .retriangulate import rebuild_complex, retriangulate_all
from .outerhull import initial_face, outer_hull
from .chambers import all_chambers, chamber_volume, exploded_view
from .ramify import repair_nonmanifold
from .symmetry import (face_orbits, symmetric_all_intersections, verify_group)
from .pipeline import PipelineConfig, repair_pipeline
from .meshio import load_mesh, save_mesh

__all__ = [
    "__version__",
    "EmbeddedComplex",
    "SimplicialComplex",
    "Tolerance",
    "build_complex",
    "euler_characteristic",
    "is_simplicial_surface",
    "nonmanifold_edges",
    "nonmanifold_vertices",
    "orient",
    "all_intersections",
    "triangle_pair_intersection",
    "retriangulate_all",
    "rebuild_complex",
    "initial_face",
    "outer_hull",
    "all_chambers",
    "chamber_volume",
    "exploded_view",
    "repair_nonmanifold",
    "verify_group",
    "face_orbits",
    "symmetric_all_intersections",
    "PipelineConfig",
    "repair_pipeline",
    "load_mesh",
    "save_mesh",
]
