#!/usr/bin/env python3
"""End-to-end experiment: generate the default synthetic dataset (1000
realizations per class on the 0..10 grid), fit the model, and write the
accuracy table plus density exports.

Usage:
    python scripts/run_pipeline.py --out results [--seed 0] [--n-per-class 1000]
                                   [--holdout]
"""

import argparse
import sys
from pathlib import Path

from losid.cli import main as losid_main


def run(argv) -> None:
    code = losid_main([str(a) for a in argv])
    if code != 0:
        sys.exit(code)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-per-class", type=int, default=1000)
    parser.add_argument("--holdout", action="store_true",
                        help="fit on a 50%% split and report on the held-out half")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dataset = out / "dataset.csv"
    features = out / "features.csv"
    model = out / "model.json"
    report = out / "report"

    run(["generate", "--out", dataset, "--n-per-class", args.n_per_class,
         "--seed", args.seed])
    run(["extract", "--dataset", dataset, "--out", features])
    fit = ["fit", "--dataset", dataset, "--out", model, "--seed", args.seed]
    rep = ["report", "--model", model, "--dataset", dataset, "--out", report,
           "--seed", args.seed]
    if args.holdout:
        fit.append("--holdout")
        rep.append("--holdout")
    run(fit)
    run(rep)
    print(f"\nartifacts: {dataset}, {features}, {model}, {report}/")


if __name__ == "__main__":
    main()
