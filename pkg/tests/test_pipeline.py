import numpy as np

from meshmend import fixtures
from meshmend.bench import run_bench
from meshmend.complexes import euler_characteristic, is_simplicial_surface
from meshmend.pipeline import PipelineConfig, repair_pipeline
from meshmend.symmetry import icosahedral_group_matrices, save_group_file


def test_config_json_roundtrip():
    cfg = PipelineConfig(eps_point_rel=1e-8, jobs=3, strict_recheck=True)
    back = PipelineConfig.from_json(cfg.to_json())
    assert back == cfg


def test_convex_input_is_a_noop():
    ico = fixtures.regular_icosahedron()
    final, outcome = repair_pipeline(ico)
    assert final.counts() == ico.counts()
    assert outcome.intersecting_pairs == 0
    assert outcome.retriangulated_faces == 0
    assert outcome.nonmanifold_edges == 0
    assert outcome.bounded_chambers == 1


def test_diaphragm_routed_through_hull():
    cd = fixtures.cube_with_diaphragm()
    final, outcome = repair_pipeline(cd)
    assert outcome.input_nonmanifold_edges == 4
    assert is_simplicial_surface(final.complex)
    assert final.counts() == (12, 30, 20)   # interior wall dropped by the hull


def test_symmetric_and_bruteforce_pipelines_agree():
    g = fixtures.great_icosahedron()
    brute_final, brute_out = repair_pipeline(g)
    sym_final, sym_out = repair_pipeline(
        fixtures.great_icosahedron(), matrices=icosahedral_group_matrices())
    assert brute_final.counts() == sym_final.counts()
    assert brute_out.bounded_chambers == sym_out.bounded_chambers == 413
    assert euler_characteristic(brute_final.complex) == \
        euler_characteristic(sym_final.complex) == 2
    assert sym_out.pairs_tested < brute_out.pairs_tested / 20


def test_outcome_report_lines_mention_every_stage():
    cd = fixtures.cube_with_diaphragm()
    _, outcome = repair_pipeline(cd)
    text = "\n".join(outcome.lines())
    for token in ("input:", "intersections:", "bounded chambers",
                  "outer hull", "non-manifold", "output:"):
        assert token in text


def test_bench_trivial_group_ratio_is_one(tmp_path):
    grp = tmp_path / "trivial.grp"
    save_group_file([np.eye(3)], grp)
    rows = run_bench(["interlocked-tetrahedra"], repeats=2,
                     group_files={"interlocked-tetrahedra": grp})
    assert rows[0].group_order == 1
    assert rows[0].op_ratio == 1.0


def test_bench_c23_op_ratio_at_least_twenty():
    rows = run_bench(["c23-ring"], repeats=2)
    assert rows[0].op_ratio >= 20
    assert rows[0].face_orbits == 6
