import json

import numpy as np

from meshmend import fixtures
from meshmend.cli import main
from meshmend.meshio import load_mesh, save_mesh
from meshmend.symmetry import cyclic_group_matrices, save_group_file


def test_inspect_fixture(capsys):
    assert main(["inspect", "fixture:icosahedron"]) == 0
    out = capsys.readouterr().out
    assert "12 30 20 chi=2" in out
    assert "intersecting face pairs: 0" in out


def test_inspect_file(tmp_path, capsys):
    p = tmp_path / "t.off"
    save_mesh(fixtures.tetrahedron(), p, fmt="off")
    assert main(["inspect", str(p)]) == 0
    assert "4 6 4 chi=2" in capsys.readouterr().out


def test_unknown_fixture_is_parse_error(capsys):
    assert main(["inspect", "fixture:nope"]) == 2


def test_unreadable_file_is_parse_error(tmp_path):
    p = tmp_path / "garbage.off"
    p.write_text("not a mesh\n")
    assert main(["inspect", str(p)]) == 2


def test_intersect_dump(tmp_path, capsys):
    out = tmp_path / "segs.txt"
    assert main(["intersect", "fixture:interlocked-tetrahedra",
                 "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    assert (tmp_path / "segs.config.json").exists()


def test_repair_writes_mesh_report_config(tmp_path, capsys):
    out = tmp_path / "fixed.stl"
    assert main(["repair", "fixture:interlocked-tetrahedra",
                 "-o", str(out)]) == 0
    assert out.exists()
    back = load_mesh(out)
    from meshmend.complexes import is_simplicial_surface
    assert is_simplicial_surface(back.complex)
    report = (tmp_path / "fixed.report.txt").read_text()
    assert "bounded chambers" in report
    cfg = json.loads((tmp_path / "fixed.config.json").read_text())
    assert cfg["eps_split_rel"] == 1e-4


def test_repair_idempotent_combinatorially(tmp_path):
    out1 = tmp_path / "r1.off"
    out2 = tmp_path / "r2.off"
    assert main(["repair", "fixture:interlocked-tetrahedra", "--format", "off",
                 "-o", str(out1)]) == 0
    assert main(["repair", str(out1), "--format", "off",
                 "-o", str(out2)]) == 0
    a = load_mesh(out1)
    b = load_mesh(out2)
    assert a.counts() == b.counts()

    def keys(emb):
        return sorted(tuple(sorted(map(tuple, np.round(emb.coords[list(f)], 6))))
                      for f in emb.faces)

    assert keys(a) == keys(b)


def test_repair_unsupported_isolated_edge(tmp_path):
    out = tmp_path / "x.stl"
    code = main(["fix-nonmanifold", "fixture:two-tetrahedra-edge-legacy",
                 "-o", str(out)])
    assert code == 2  # unknown fixture name -> parse error
    p = tmp_path / "shared_edge.off"
    save_mesh(fixtures.two_tetrahedra_shared_edge(), p, fmt="off")
    code = main(["fix-nonmanifold", str(p), "-o", str(out)])
    assert code == 4


def test_outer_hull_command(tmp_path, capsys):
    p = tmp_path / "nc.off"
    save_mesh(fixtures.nested_cubes(), p, fmt="off")
    out = tmp_path / "hull.off"
    assert main(["outer-hull", str(p), "-o", str(out), "--format", "off"]) == 0
    hull = load_mesh(out)
    assert hull.counts() == (8, 18, 12)


def test_outer_hull_rejects_intersecting(tmp_path):
    out = tmp_path / "hull.off"
    code = main(["outer-hull", "fixture:great-icosahedron",
                 "-o", str(out), "--format", "off"])
    assert code == 3


def test_chambers_command(tmp_path, capsys):
    outdir = tmp_path / "ch"
    assert main(["chambers", "fixture:cube-diaphragm", "-o", str(outdir)]) == 0
    rows = (outdir / "chambers.tsv").read_text().strip().splitlines()
    assert rows[0].split("\t") == ["chamber", "volume", "euler",
                                   "tx", "ty", "tz", "file"]
    assert len(rows) == 3  # header + 2 bounded chambers
    assert (outdir / "chambers.png").exists()
    assert (outdir / "chambers.config.json").exists()


def test_chambers_rejects_intersecting_without_flag(tmp_path):
    outdir = tmp_path / "ch"
    code = main(["chambers", "fixture:great-icosahedron", "-o", str(outdir)])
    assert code == 3


def test_explode_command_m0(tmp_path):
    outdir = tmp_path / "ex"
    assert main(["explode", "fixture:cube-diaphragm", "-o", str(outdir),
                 "-m", "0", "--format", "off"]) == 0
    rows = (outdir / "chambers.tsv").read_text().strip().splitlines()[1:]
    assert len(rows) == 2
    for row in rows:
        cols = row.split("\t")
        assert [float(c) for c in cols[3:6]] == [0.0, 0.0, 0.0]
        piece = load_mesh(outdir / cols[6])
        assert len(piece.faces) == 12
    assert (outdir / "explode.png").exists()


def test_fix_nonmanifold_command(tmp_path):
    p = tmp_path / "cb.off"
    save_mesh(fixtures.chain_boxes(), p, fmt="off")
    out = tmp_path / "fixed.off"
    assert main(["fix-nonmanifold", str(p), "-o", str(out),
                 "--format", "off"]) == 0
    fixed = load_mesh(out)
    from meshmend.complexes import is_simplicial_surface
    assert is_simplicial_surface(fixed.complex)
    assert (tmp_path / "fixed.report.txt").exists()


def test_bench_command(tmp_path, capsys):
    outdir = tmp_path / "bench"
    assert main(["bench", "--fixtures", "c23-ring", "--repeats", "2",
                 "-o", str(outdir)]) == 0
    rows = (outdir / "bench.tsv").read_text().strip().splitlines()
    assert len(rows) == 2
    header = rows[0].split("\t")
    vals = dict(zip(header, rows[1].split("\t")))
    assert vals["fixture"] == "c23-ring"
    assert int(vals["group_order"]) == 23
    assert int(vals["face_orbits"]) == 6
    assert float(vals["op_ratio"]) >= 0.8 * 23
    assert (outdir / "bench.png").exists()


def test_group_flag_on_intersect(tmp_path, capsys):
    grp = tmp_path / "c23.grp"
    save_group_file(cyclic_group_matrices(23), grp)
    out = tmp_path / "segs.txt"
    assert main(["intersect", "fixture:c23-ring", "--group", str(grp),
                 "-o", str(out)]) == 0
    n_sym = len(out.read_text().strip().splitlines())
    assert main(["intersect", "fixture:c23-ring", "-o", str(out)]) == 0
    n_brute = len(out.read_text().strip().splitlines())
    assert n_sym == n_brute


def test_rerun_reproduces_identical_output(tmp_path):
    out1 = tmp_path / "a.off"
    out2 = tmp_path / "b.off"
    args = ["repair", "fixture:great-icosahedron", "--format", "off"]
    assert main(args + ["-o", str(out1)]) == 0
    assert main(args + ["-o", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
