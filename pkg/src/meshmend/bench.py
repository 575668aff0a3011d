"""Symmetry speedup benchmark.

For each fixture with a known group, times the brute-force pair sweep
against the orbit-based sweep over repeated runs.  Wall-clock numbers are
hardware-bound and printed for orientation only; the deterministic signal
is the pair-test count ratio, which CI asserts instead.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .fixtures import FIXTURE_GROUPS, FIXTURES
from .intersect import all_intersections
from .symmetry import (burnside_orbit_count, face_orbits,
                       symmetric_all_intersections, verify_group)

__all__ = ["BenchRow", "run_bench", "BENCH_HEADER"]

BENCH_HEADER = ["fixture", "group_order", "face_orbits", "pairs_total",
                "pairs_brute", "pairs_sym", "op_ratio",
                "t_brute_med_ms", "t_brute_mean_ms",
                "t_sym_med_ms", "t_sym_mean_ms", "speedup_med"]


@dataclass
class BenchRow:
    fixture: str
    group_order: int
    face_orbits: int
    pairs_total: int
    pairs_brute: int
    pairs_sym: int
    op_ratio: float
    t_brute_med_ms: float
    t_brute_mean_ms: float
    t_sym_med_ms: float
    t_sym_mean_ms: float
    speedup_med: float

    def values(self):
        return [self.fixture, self.group_order, self.face_orbits,
                self.pairs_total, self.pairs_brute, self.pairs_sym,
                f"{self.op_ratio:.3f}",
                f"{self.t_brute_med_ms:.3f}", f"{self.t_brute_mean_ms:.3f}",
                f"{self.t_sym_med_ms:.3f}", f"{self.t_sym_mean_ms:.3f}",
                f"{self.speedup_med:.3f}"]


def run_bench(names=None, repeats: int = 10, group_files=None) -> list[BenchRow]:
    """Benchmark the listed fixtures (default: all with known groups)."""
    from .symmetry import load_group_file
    names = list(names) if names else sorted(FIXTURE_GROUPS)
    group_files = group_files or {}
    rows = []
    for name in names:
        if name in group_files:
            matrices = load_group_file(group_files[name])
        elif name in FIXTURE_GROUPS:
            matrices = FIXTURE_GROUPS[name]()
        else:
            raise KeyError(f"no symmetry group known for fixture {name!r}")
        emb = FIXTURES[name]()
        group = verify_group(emb, matrices)
        orbits = face_orbits(emb, group)
        n_orbits = burnside_orbit_count(group.face_perms, len(emb.faces))
        assert n_orbits == len(orbits.face_reps)

        t_brute, t_sym = [], []
        counts = set()
        for _ in range(repeats):
            t0 = time.perf_counter()
            rb = all_intersections(emb)
            t_brute.append((time.perf_counter() - t0) * 1e3)
            t0 = time.perf_counter()
            rs = symmetric_all_intersections(emb, group, orbits)
            t_sym.append((time.perf_counter() - t0) * 1e3)
            counts.add((rb.pairs_tested, rs.pairs_tested))
        if len(counts) != 1:
            raise AssertionError(f"{name}: pair-test counts varied across "
                                 f"repetitions: {sorted(counts)}")
        pairs_brute, pairs_sym = counts.pop()
        rows.append(BenchRow(
            fixture=name, group_order=group.order,
            face_orbits=len(orbits.face_reps),
            pairs_total=len(emb.faces) * (len(emb.faces) - 1) // 2,
            pairs_brute=pairs_brute, pairs_sym=pairs_sym,
            op_ratio=pairs_brute / max(pairs_sym, 1),
            t_brute_med_ms=statistics.median(t_brute),
            t_brute_mean_ms=statistics.fmean(t_brute),
            t_sym_med_ms=statistics.median(t_sym),
            t_sym_mean_ms=statistics.fmean(t_sym),
            speedup_med=statistics.median(t_brute) / max(statistics.median(t_sym), 1e-9)))
    return rows
