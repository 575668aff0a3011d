"""Delimited outputs and the figures rendered next to them.

Every report path emits a tab-separated table; the same data is also drawn
to a PNG so a run leaves something a human can glance at.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "write_tsv",
    "write_config",
    "write_chamber_manifest",
    "chambers_figure",
    "explode_figure",
    "bench_figure",
]


def write_tsv(path, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write("\t".join(str(h) for h in header) + "\n")
        for row in rows:
            fh.write("\t".join(str(v) for v in row) + "\n")


def write_config(path, config, extra=None) -> None:
    data = json.loads(config.to_json())
    data.update(extra or {})
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_chamber_manifest(path, entries) -> None:
    """One record per chamber: id, volume, euler, translation, file name."""
    write_tsv(path,
              ["chamber", "volume", "euler", "tx", "ty", "tz", "file"],
              [[e["id"], f"{e['volume']:.12g}", e["euler"],
                f"{e['shift'][0]:.12g}", f"{e['shift'][1]:.12g}",
                f"{e['shift'][2]:.12g}", e["file"]] for e in entries])


def chambers_figure(labeling, path) -> None:
    vols = sorted(c.volume for c in labeling.bounded_chambers())
    fig, ax = plt.subplots(figsize=(7, 4.2))
    if vols:
        lo, hi = min(vols), max(vols)
        if hi <= lo * (1 + 1e-9):
            bins = np.linspace(lo * 0.9, hi * 1.1 + 1e-12, 10)
        elif hi / max(lo, 1e-300) > 50:
            bins = np.geomspace(max(lo, 1e-12), hi, 30)
            ax.set_xscale("log")
        else:
            bins = 30
        ax.hist(vols, bins=bins, color="#4878d0", edgecolor="black", lw=0.4)
    ax.set_xlabel("chamber volume")
    ax.set_ylabel("count")
    ax.set_title(f"{len(vols)} bounded chambers, "
                 f"total volume {sum(vols):.4g}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def explode_figure(exploded, path) -> None:
    """Translated chamber centroids, marker area scaled by volume."""
    fig = plt.figure(figsize=(6.5, 6))
    ax = fig.add_subplot(projection="3d")
    if exploded:
        pts = np.array([coords.mean(axis=0) for _, coords, _, _ in exploded])
        vols = np.array([ch.volume for ch, _, _, _ in exploded])
        size = 8 + 120 * vols / vols.max()
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=size, alpha=0.7,
                   c=vols, cmap="viridis")
    ax.set_title(f"{len(exploded)} chambers (marker ~ volume)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def bench_figure(rows, path) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    names = [r.fixture for r in rows]
    x = np.arange(len(rows))
    ax1.bar(x - 0.2, [r.t_brute_med_ms for r in rows], width=0.4,
            label="brute force", color="#d65f5f")
    ax1.bar(x + 0.2, [r.t_sym_med_ms for r in rows], width=0.4,
            label="with group", color="#4878d0")
    ax1.set_xticks(x, names, rotation=20, ha="right")
    ax1.set_ylabel("median wall time (ms)")
    ax1.legend()
    ax2.bar(x, [r.op_ratio for r in rows], color="#6acc64", width=0.5,
            label="pair-test ratio")
    ax2.plot(x, [r.group_order for r in rows], "k.--", label="group order")
    ax2.set_xticks(x, names, rotation=20, ha="right")
    ax2.set_ylabel("brute pairs / symmetric pairs")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
