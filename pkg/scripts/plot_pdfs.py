#!/usr/bin/env python3
"""Render the density exports of a report directory as PNG figures.

Marginal curves (pdf_<feature>_<class>.csv) become step plots with both
classes overlaid; joint grids (joint_<a>_<b>.csv) become one heatmap per
class. Requires matplotlib (``pip install losid[plot]``).

Usage:
    python scripts/plot_pdfs.py --report results/report --out results/figures
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_marginals(report_dir: Path, out_dir: Path) -> None:
    curves = defaultdict(dict)
    for path in sorted(report_dir.glob("pdf_*.csv")):
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        feature, cls = rows[0]["feature"], rows[0]["class"]
        lo = np.array([float(r["bin_lo"]) for r in rows])
        hi = np.array([float(r["bin_hi"]) for r in rows])
        density = np.array([float(r["density"]) for r in rows])
        curves[feature][cls] = (np.append(lo, hi[-1]), np.append(density, density[-1]))
    for feature, by_class in curves.items():
        fig, ax = plt.subplots(figsize=(6, 4))
        for cls, (edges, density) in sorted(by_class.items()):
            ax.step(edges, density, where="post", label=cls)
        ax.set_xlabel(feature)
        ax.set_ylabel("density")
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_dir / f"pdf_{feature}.png", dpi=150)
        plt.close(fig)


def plot_joints(report_dir: Path, out_dir: Path) -> None:
    for path in sorted(report_dir.glob("joint_*.csv")):
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        name_a, name_b = rows[0]["feature_a"], rows[0]["feature_b"]
        for cls in ("LOS", "NLOS"):
            sub = [r for r in rows if r["class"] == cls]
            xs = sorted({float(r["value_a"]) for r in sub})
            ys = sorted({float(r["value_b"]) for r in sub})
            grid = np.zeros((len(ys), len(xs)))
            xi = {v: i for i, v in enumerate(xs)}
            yi = {v: i for i, v in enumerate(ys)}
            for r in sub:
                grid[yi[float(r["value_b"])], xi[float(r["value_a"])]] = float(r["density"])
            fig, ax = plt.subplots(figsize=(5.5, 4.5))
            im = ax.pcolormesh(xs, ys, grid, shading="nearest")
            fig.colorbar(im, ax=ax, label="density")
            ax.set_xlabel(name_a)
            ax.set_ylabel(name_b)
            ax.set_title(f"{cls} joint density")
            fig.tight_layout()
            fig.savefig(out_dir / f"joint_{name_a}_{name_b}_{cls}.png", dpi=150)
            plt.close(fig)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--report", required=True, help="report directory with CSV exports")
    parser.add_argument("--out", required=True, help="directory for PNG output")
    args = parser.parse_args()
    report_dir, out_dir = Path(args.report), Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    plot_marginals(report_dir, out_dir)
    plot_joints(report_dir, out_dir)
    print(f"figures written to {out_dir}")


if __name__ == "__main__":
    main()
