"""Command-line interface.

Inputs are mesh files (STL/OFF) or generated fixtures via ``fixture:NAME``.
Report-producing commands write a tab-separated table plus a PNG figure and
echo the resolved configuration as JSON next to their outputs.

Exit codes: 0 success, 2 parse or validation failure, 3 geometric failure,
4 unsupported input class.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bench import BENCH_HEADER, run_bench
from .chambers import all_chambers, exploded_view
from .complexes import (EmbeddedComplex, SimplicialComplex,
                        euler_characteristic, nonmanifold_edges)
from .errors import (IsolatedNonManifoldEdge, MeshmendError, NotClosed,
                     ParseError, StillIntersecting)
from .fixtures import FIXTURES
from .geometry import bbox_diagonal
from .intersect import all_intersections, dump_segments
from .meshio import load_mesh, save_mesh
from .outerhull import outer_hull
from .pipeline import PipelineConfig, repair_pipeline
from .ramify import repair_nonmanifold
from .report import (bench_figure, chambers_figure, explode_figure,
                     write_chamber_manifest, write_config, write_tsv)
from .symmetry import load_group_file

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_GEOMETRY = 3
EXIT_UNSUPPORTED = 4


def _load_input(source: str, config: PipelineConfig) -> EmbeddedComplex:
    if source.startswith("fixture:"):
        name = source.split(":", 1)[1]
        if name not in FIXTURES:
            raise ParseError(f"unknown fixture {name!r}; "
                             f"available: {', '.join(sorted(FIXTURES))}")
        emb = FIXTURES[name]()
        if config.eps_point_rel is not None:
            tol = config.tolerance_for(emb.coords)
            emb = EmbeddedComplex(emb.complex, emb.coords, tol)
        return emb
    return load_mesh(source, eps_point_rel=config.eps_point_rel)


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        eps_point_rel=args.eps_point,
        eps_split_rel=args.eps_split,
        group_file=getattr(args, "group", None),
        out_format=getattr(args, "format", "stl-binary"),
        jobs=args.jobs,
        strict_recheck=args.strict_recheck,
        seed=args.seed,
    )


def _echo_config(out_path, config, **extra):
    write_config(Path(out_path).with_suffix(".config.json"), config, extra)


def cmd_inspect(args) -> int:
    config = _config_from_args(args)
    emb = _load_input(args.input, config)
    v, e, f = emb.counts()
    chi = euler_characteristic(emb.complex)
    nm = nonmanifold_edges(emb.complex)
    rep = all_intersections(emb, jobs=config.jobs)
    print(f"{v} {e} {f} chi={chi}")
    print(f"non-manifold edges: {len(nm)}")
    if nm:
        print("  " + " ".join(str(t) for t in nm[:12]) +
              (" ..." if len(nm) > 12 else ""))
    print(f"intersecting face pairs: {len(rep.segments)} "
          f"({rep.pairs_tested}/{rep.pairs_total} pairs tested)")
    return EXIT_OK


def cmd_intersect(args) -> int:
    config = _config_from_args(args)
    emb = _load_input(args.input, config)
    if config.group_file:
        from .symmetry import symmetric_all_intersections, verify_group
        group = verify_group(emb, load_group_file(config.group_file))
        rep = symmetric_all_intersections(emb, group)
    else:
        rep = all_intersections(emb, jobs=config.jobs)
    text = dump_segments(rep)
    if args.output:
        Path(args.output).write_text(text)
        _echo_config(args.output, config, input=args.input,
                     segments=len(rep.segments))
    else:
        sys.stdout.write(text)
    print(f"{len(rep.segments)} intersecting pair(s), "
          f"{rep.pairs_tested} tested", file=sys.stderr)
    return EXIT_OK


def cmd_repair(args) -> int:
    config = _config_from_args(args)
    emb = _load_input(args.input, config)
    matrices = load_group_file(config.group_file) if config.group_file else None
    final, outcome = repair_pipeline(emb, config, matrices=matrices)
    save_mesh(final, args.output, fmt=config.out_format)
    report_path = Path(args.output).with_suffix(".report.txt")
    report_path.write_text("\n".join(outcome.lines()) + "\n")
    _echo_config(args.output, config, input=args.input)
    for line in outcome.lines():
        print(line)
    return EXIT_OK


def cmd_outer_hull(args) -> int:
    config = _config_from_args(args)
    emb = _load_input(args.input, config)
    rep = all_intersections(emb, jobs=config.jobs)
    if rep.segments:
        print(f"input has {len(rep.segments)} intersecting pair(s); "
              "run 'repair' first", file=sys.stderr)
        return EXIT_GEOMETRY
    hull = outer_hull(emb, seed=config.seed)
    save_mesh(hull, args.output, fmt=config.out_format)
    _echo_config(args.output, config, input=args.input)
    v, e, f = hull.counts()
    print(f"outer hull: {v} {e} {f} chi={euler_characteristic(hull.complex)}")
    return EXIT_OK


def _chambers_of(args, config):
    emb = _load_input(args.input, config)
    rep = all_intersections(emb, jobs=config.jobs)
    if rep.segments:
        if not args.retriangulate:
            raise StillIntersecting(
                [(s.face_a, s.face_b) for s in rep.segments])
        from .retriangulate import (boundary_sync_points, rebuild_complex,
                                    retriangulate_all)
        extra = boundary_sync_points(emb, rep.by_face, emb.tol)
        tris = retriangulate_all(emb, rep.by_face, emb.tol, extra_points=extra)
        emb = rebuild_complex(emb, tris, emb.tol,
                              strict_recheck=config.strict_recheck)
    return emb, all_chambers(emb, seed=config.seed)


def cmd_chambers(args) -> int:
    config = _config_from_args(args)
    emb, labeling = _chambers_of(args, config)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for ch in labeling.bounded_chambers():
        entries.append({"id": ch.id, "volume": ch.volume, "euler": ch.euler,
                        "shift": (0.0, 0.0, 0.0), "file": "-"})
    write_chamber_manifest(outdir / "chambers.tsv", entries)
    chambers_figure(labeling, outdir / "chambers.png")
    write_config(outdir / "chambers.config.json", config, {"input": args.input})
    print(f"{len(entries)} bounded chamber(s); "
          f"manifest: {outdir / 'chambers.tsv'}")
    return EXIT_OK


def cmd_explode(args) -> int:
    config = _config_from_args(args)
    emb, labeling = _chambers_of(args, config)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = {"off": ".off", "stl-ascii": ".stl", "stl-binary": ".stl"}
    exploded = exploded_view(emb, labeling, args.magnitude)
    entries = []
    for ch, coords, faces_local, windings in exploded:
        name = f"chamber_{ch.id:04d}{ext[config.out_format]}"
        piece = EmbeddedComplex(SimplicialComplex(faces_local), coords, emb.tol)
        save_mesh(piece, outdir / name, fmt=config.out_format,
                  windings=windings)
        entries.append({"id": ch.id, "volume": ch.volume, "euler": ch.euler,
                        "shift": tuple(args.magnitude * (ch.centroid -
                                                         emb.coords.mean(axis=0))),
                        "file": name})
    write_chamber_manifest(outdir / "chambers.tsv", entries)
    explode_figure(exploded, outdir / "explode.png")
    write_config(outdir / "explode.config.json", config,
                 {"input": args.input, "magnitude": args.magnitude})
    print(f"wrote {len(entries)} chamber mesh(es) to {outdir}")
    return EXIT_OK


def cmd_fix_nonmanifold(args) -> int:
    config = _config_from_args(args)
    emb = _load_input(args.input, config)
    eps = config.eps_split_rel * bbox_diagonal(emb.coords)
    final, rep = repair_nonmanifold(emb, eps, seed=config.seed)
    save_mesh(final, args.output, fmt=config.out_format)
    report_path = Path(args.output).with_suffix(".report.txt")
    report_path.write_text("\n".join(rep.lines()) + "\n")
    _echo_config(args.output, config, input=args.input)
    v, e, f = final.counts()
    print(f"repaired: {v} {e} {f} chi={euler_characteristic(final.complex)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _config_from_args(args)
    names = args.fixtures.split(",") if args.fixtures else None
    rows = run_bench(names, repeats=args.repeats)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_tsv(outdir / "bench.tsv", BENCH_HEADER, [r.values() for r in rows])
    bench_figure(rows, outdir / "bench.png")
    write_config(outdir / "bench.config.json", config,
                 {"repeats": args.repeats,
                  "fixtures": [r.fixture for r in rows]})
    widths = [max(len(str(h)), 10) for h in BENCH_HEADER]
    print("  ".join(h.ljust(w) for h, w in zip(BENCH_HEADER, widths)))
    for r in rows:
        print("  ".join(str(v).ljust(w) for v, w in zip(r.values(), widths)))
    return EXIT_OK


def _add_common(p, output=True):
    p.add_argument("input", help="mesh file or fixture:NAME")
    if output:
        p.add_argument("-o", "--output", required=True)
    p.add_argument("--eps-point", type=float, default=None,
                   help="coincidence tolerance, relative to the bbox diagonal "
                        "(default: per input format; 1e-6 for binary STL, "
                        "1e-9 otherwise)")
    p.add_argument("--eps-split", type=float, default=1e-4,
                   help="non-manifold split shift, relative to the bbox diagonal")
    p.add_argument("--group", help="symmetry group file (9 reals per line)")
    p.add_argument("--format", default="stl-binary",
                   choices=["stl-ascii", "stl-binary", "off"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict-recheck", action="store_true")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the tie-break rotation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshmend",
        description="Repair self-intersecting closed triangle meshes: "
                    "intersection removal, outer hull, chambers, "
                    "non-manifold repair.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="print counts and defect inventory")
    _add_common(p, output=False)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("intersect", help="dump intersection segments")
    _add_common(p, output=False)
    p.add_argument("-o", "--output", help="write the dump here instead of stdout")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("repair", help="full repair pipeline")
    _add_common(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("outer-hull", help="extract the outer hull")
    _add_common(p)
    p.set_defaults(func=cmd_outer_hull)

    p = sub.add_parser("chambers", help="chamber manifest and figure")
    _add_common(p)
    p.add_argument("--retriangulate", action="store_true",
                   help="retriangulate self-intersecting input first")
    p.set_defaults(func=cmd_chambers)

    p = sub.add_parser("explode", help="write translated chamber meshes")
    _add_common(p)
    p.add_argument("-m", "--magnitude", type=float, default=1.0)
    p.add_argument("--retriangulate", action="store_true")
    p.set_defaults(func=cmd_explode)

    p = sub.add_parser("fix-nonmanifold", help="split non-manifold edges/vertices")
    _add_common(p)
    p.set_defaults(func=cmd_fix_nonmanifold)

    p = sub.add_parser("bench", help="symmetry speedup benchmark")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--fixtures", help="comma-separated fixture names")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--eps-point", type=float, default=None)
    p.add_argument("--eps-split", type=float, default=1e-4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict-recheck", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NotClosed, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IsolatedNonManifoldEdge as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except MeshmendError as exc:
        print(f"geometric failure: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
