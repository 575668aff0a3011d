"""End-to-end repair orchestration.

The four stages: detect intersections (brute force or via a supplied
symmetry group), retriangulate and rebuild, reduce to the outer hull,
repair non-manifold parts.  The outcome records per-stage counts so runs
are comparable and reruns verifiable.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .chambers import all_chambers
from .complexes import (EmbeddedComplex, euler_characteristic,
                        is_simplicial_surface, nonmanifold_edges,
                        nonmanifold_vertices)
from .geometry import Tolerance, bbox_diagonal
from .intersect import all_intersections
from .outerhull import restrict_to_faces
from .ramify import repair_nonmanifold
from .retriangulate import (boundary_sync_points, rebuild_complex,
                            retriangulate_all)
from .symmetry import (face_orbits, symmetric_all_intersections,
                       transfer_retriangulations, verify_group)

__all__ = ["PipelineConfig", "StageCounts", "RepairOutcome", "repair_pipeline"]


@dataclass
class PipelineConfig:
    eps_point_rel: float | None = None   # None: per-format default at load
    eps_param: float = 1e-9
    eps_angle: float = 1e-12
    eps_split_rel: float = 1e-4      # ramify shift, relative to bbox diagonal
    group_file: str | None = None
    out_format: str = "stl-binary"
    jobs: int = 1
    strict_recheck: bool = False
    seed: int = 0

    def tolerance_for(self, coords) -> Tolerance:
        return Tolerance.for_bbox(coords, self.eps_point_rel or 1e-9,
                                  self.eps_param, self.eps_angle)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        return cls(**json.loads(text))


@dataclass
class StageCounts:
    vertices: int
    edges: int
    faces: int
    euler: int

    @classmethod
    def of(cls, emb: EmbeddedComplex) -> "StageCounts":
        v, e, f = emb.counts()
        return cls(v, e, f, euler_characteristic(emb.complex))


@dataclass
class RepairOutcome:
    input: StageCounts
    input_nonmanifold_edges: int = 0
    intersecting_pairs: int = 0
    pairs_tested: int = 0
    pairs_total: int = 0
    group_order: int | None = None
    face_orbit_count: int | None = None
    retriangulated_faces: int = 0
    rebuilt: StageCounts | None = None
    bounded_chambers: int = 0
    hull: StageCounts | None = None
    nonmanifold_edges: int = 0
    nonmanifold_vertices: int = 0
    eps_split_used: float = 0.0
    repair_attempts: int = 0
    final: StageCounts | None = None

    def lines(self):
        def fmt(tag, sc):
            return (f"{tag}: {sc.vertices} vertices, {sc.edges} edges, "
                    f"{sc.faces} faces, chi={sc.euler}")
        out = [fmt("input", self.input),
               f"input non-manifold edges: {self.input_nonmanifold_edges}",
               f"intersections: {self.intersecting_pairs} pair(s) "
               f"({self.pairs_tested} of {self.pairs_total} pairs tested)"]
        if self.group_order:
            out.append(f"symmetry: group order {self.group_order}, "
                       f"{self.face_orbit_count} face orbit(s)")
        out.append(f"retriangulated faces: {self.retriangulated_faces}")
        if self.rebuilt:
            out.append(fmt("rebuilt", self.rebuilt))
        out.append(f"bounded chambers: {self.bounded_chambers}")
        if self.hull:
            out.append(fmt("outer hull", self.hull))
        out.append(f"non-manifold: {self.nonmanifold_edges} edge(s), "
                   f"{self.nonmanifold_vertices} vertex/vertices")
        if self.final:
            out.append(f"split shift: {self.eps_split_used:.6g} "
                       f"({self.repair_attempts} attempt(s))")
            out.append(fmt("output", self.final))
        return out


def repair_pipeline(emb: EmbeddedComplex, config: PipelineConfig | None = None,
                    matrices=None):
    """Run detection, retriangulation, hull extraction, and repair.

    Returns (repaired complex, RepairOutcome).
    """
    config = config or PipelineConfig()
    tol = emb.tol
    outcome = RepairOutcome(
        input=StageCounts.of(emb),
        input_nonmanifold_edges=len(nonmanifold_edges(emb.complex)))

    group = orbits = None
    if matrices is not None:
        group = verify_group(emb, matrices, tol)
        orbits = face_orbits(emb, group)
        outcome.group_order = group.order
        outcome.face_orbit_count = len(orbits.face_reps)
        report = symmetric_all_intersections(emb, group, orbits, tol)
    else:
        report = all_intersections(emb, tol, jobs=config.jobs)
    outcome.intersecting_pairs = len(report.segments)
    outcome.pairs_tested = report.pairs_tested
    outcome.pairs_total = report.pairs_total

    if report.segments:
        extra = boundary_sync_points(emb, report.by_face, tol)
        touched = sorted(set(report.by_face) | set(extra))
        if group is not None:
            reps_needed = sorted({orbits.orbit_of[f][0] for f in touched})
            rep_tris = retriangulate_all(emb, report.by_face, tol,
                                         extra_points=extra,
                                         only_faces=reps_needed)
            face_tris = transfer_retriangulations(emb, group, orbits, rep_tris,
                                                  required_faces=touched)
        else:
            face_tris = retriangulate_all(emb, report.by_face, tol,
                                          extra_points=extra)
        outcome.retriangulated_faces = len(face_tris)
        rebuilt = rebuild_complex(emb, face_tris, tol,
                                  strict_recheck=config.strict_recheck)
    else:
        rebuilt = emb
    outcome.rebuilt = StageCounts.of(rebuilt)

    labeling = all_chambers(rebuilt, seed=config.seed)
    outcome.bounded_chambers = len(labeling.bounded_chambers())
    hull = restrict_to_faces(rebuilt, labeling.chambers[labeling.unbounded].faces)
    outcome.hull = StageCounts.of(hull)

    nm_edges = nonmanifold_edges(hull.complex)
    outcome.nonmanifold_edges = len(nm_edges)
    needs_repair = bool(nm_edges)
    if not nm_edges:
        bad = nonmanifold_vertices(hull.complex)
        outcome.nonmanifold_vertices = len(bad)
        needs_repair = bool(bad)
    if needs_repair:
        eps_split = config.eps_split_rel * bbox_diagonal(hull.coords)
        final, rep = repair_nonmanifold(hull, eps_split, seed=config.seed)
        outcome.eps_split_used = rep.eps_used
        outcome.repair_attempts = rep.attempts
        if nm_edges:
            outcome.nonmanifold_vertices = len(rep.umbrella_vertex_splits)
    else:
        final = hull
    assert is_simplicial_surface(final.complex)
    outcome.final = StageCounts.of(final)
    return final, outcome
