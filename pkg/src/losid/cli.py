"""Command-line front end: generate, extract, fit, classify, report.

All randomness flows from --seed; reruns with the same flags produce
byte-identical output files. Options may also come from a key=value config
file (--config); explicit flags win over config-file entries. Exit codes:
0 success, 2 usage/parameter error, 3 data or format error, 4 degenerate
signal.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass

from ._util import atomic_write_text
from .cir import (
    DEFAULT_GRID,
    GeneratorParams,
    TimeGrid,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from .classify import COV_SELECTOR, Method, classify_record, load_model, save_model
from .errors import (
    DegenerateSignalError,
    FormatError,
    GridMismatchError,
    ParameterError,
    UnsupportedCombinationError,
)
from .evaluation import (
    FitConfig,
    evaluate,
    export_joint_grids,
    export_pdf_curves,
    fit_model,
    render_csv,
    render_text,
    split,
)
from .features import extract_all, save_feature_table

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_DEGENERATE = 4


def _parse_bool(text: str) -> bool:
    return text.lower() in ("1", "true", "yes")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one run: flags win over config file over defaults.

    Numeric constraints are enforced by the owning types (TimeGrid,
    GeneratorParams, FitConfig) when the accessors below construct them;
    unknown config-file keys are rejected at parse time.
    """

    seed: int = 0
    n_per_class: int = 1000
    t_start: float = DEFAULT_GRID.t_start
    dt: float = DEFAULT_GRID.dt
    n: int = DEFAULT_GRID.n
    cluster_rate: float = GeneratorParams.cluster_arrival_rate
    ray_rate: float = GeneratorParams.ray_arrival_rate
    cluster_decay: float = GeneratorParams.cluster_decay_constant
    ray_decay: float = GeneratorParams.ray_decay_constant
    los_gain: float = GeneratorParams.los_direct_gain
    nlos_delay_mean: float = GeneratorParams.nlos_first_path_delay_mean
    noise_sigma: float = GeneratorParams.noise_floor_sigma
    bins: int = FitConfig.bins
    floor: float = FitConfig.floor
    rel_eps: float = FitConfig.rel_eps
    train_fraction: float = 0.5
    holdout: bool = False

    def grid(self) -> TimeGrid:
        return TimeGrid(self.t_start, self.dt, self.n)

    def generator_params(self) -> GeneratorParams:
        return GeneratorParams(
            cluster_arrival_rate=self.cluster_rate,
            ray_arrival_rate=self.ray_rate,
            cluster_decay_constant=self.cluster_decay,
            ray_decay_constant=self.ray_decay,
            los_direct_gain=self.los_gain,
            nlos_first_path_delay_mean=self.nlos_delay_mean,
            noise_floor_sigma=self.noise_sigma,
            seed=self.seed,
        )

    def fit_config(self) -> FitConfig:
        return FitConfig(bins=self.bins, floor=self.floor, rel_eps=self.rel_eps)


_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_CONFIG_PARSERS = {"int": int, "float": float, "bool": _parse_bool}


def _read_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path!r}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise ParameterError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[_CONFIG_FIELDS[key]](text.strip())
        except ValueError as exc:
            raise ParameterError(f"config line {lineno}: {exc}") from exc
    return values


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = _read_config(args.config) if getattr(args, "config", None) else {}
    for key in _CONFIG_FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values)


def _cmd_generate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    grid = cfg.grid()
    ds = generate_dataset(cfg.generator_params(), cfg.n_per_class, grid)
    save_dataset(ds, args.out)
    print(f"wrote {len(ds)} records ({cfg.n_per_class} per class) to {args.out}")
    print(f"grid: t_start={grid.t_start} dt={grid.dt} n={grid.n}")
    return EXIT_OK


def _cmd_extract(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ds = load_dataset(args.dataset)
    rows = []
    skipped = 0
    for i, rec in enumerate(ds.records):
        try:
            rows.append((rec.label, extract_all(rec.cir, cfg.rel_eps)))
        except DegenerateSignalError as exc:
            if not args.skip_degenerate:
                raise DegenerateSignalError(f"record {i}: {exc}") from exc
            print(f"record {i} skipped: {exc}", file=sys.stderr)
            skipped += 1
    save_feature_table(args.out, rows)
    print(f"wrote {len(rows)} feature rows to {args.out}"
          + (f" ({skipped} degenerate records skipped)" if skipped else ""))
    return EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ds = load_dataset(args.dataset)
    if cfg.holdout:
        ds, _ = split(ds, cfg.train_fraction, cfg.seed)
    model = fit_model(ds, cfg.fit_config())
    save_model(model, args.out)
    print(f"fitted on {len(ds)} records; wrote model to {args.out}")
    return EXIT_OK


def _parse_selector(text: str):
    if text == COV_SELECTOR:
        return COV_SELECTOR
    names = tuple(part.strip() for part in text.split(","))
    return names[0] if len(names) == 1 else names


def _cmd_classify(args: argparse.Namespace) -> int:
    _run_config(args)  # classify has no knobs, but a bad --config should still fail
    model = load_model(args.model)
    ds = load_dataset(args.dataset)
    selector = _parse_selector(args.selector)
    method = Method(args.method.upper())
    lines = ["index,label,predicted"]
    for i, rec in enumerate(ds.records):
        predicted = classify_record(model, rec.cir, method, selector)
        lines.append(f"{i},{rec.label.value},{predicted.value}")
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        print(f"wrote {len(ds)} decisions to {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    model = load_model(args.model)
    ds = load_dataset(args.dataset)
    if cfg.holdout:
        _, ds = split(ds, cfg.train_fraction, cfg.seed)
    report = evaluate(model, ds)
    os.makedirs(args.out, exist_ok=True)
    text = render_text(report)
    atomic_write_text(os.path.join(args.out, "report.txt"), text)
    atomic_write_text(os.path.join(args.out, "report.csv"), render_csv(report))
    export_pdf_curves(model, args.out)
    export_joint_grids(model, args.out)
    print(text, end="")
    print(f"report written to {args.out}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags win")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="losid",
        description="Statistical LOS/NLOS classification of UWB channel impulse responses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic labeled dataset CSV")
    _add_common(p)
    p.add_argument("--out", required=True, help="output dataset CSV path")
    p.add_argument("--n-per-class", type=int, dest="n_per_class")
    p.add_argument("--t-start", type=float, dest="t_start")
    p.add_argument("--dt", type=float)
    p.add_argument("--n", type=int, help="samples per record")
    p.add_argument("--cluster-rate", type=float, dest="cluster_rate")
    p.add_argument("--ray-rate", type=float, dest="ray_rate")
    p.add_argument("--cluster-decay", type=float, dest="cluster_decay")
    p.add_argument("--ray-decay", type=float, dest="ray_decay")
    p.add_argument("--los-gain", type=float, dest="los_gain")
    p.add_argument("--nlos-delay-mean", type=float, dest="nlos_delay_mean")
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("extract", help="extract the feature table from a dataset")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="output feature CSV path")
    p.add_argument("--rel-eps", type=float, dest="rel_eps")
    p.add_argument("--skip-degenerate", action="store_true",
                   help="skip degenerate records instead of failing")
    p.set_defaults(handler=_cmd_extract)

    p = sub.add_parser("fit", help="fit densities and thresholds; write model JSON")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--bins", type=int)
    p.add_argument("--floor", type=float)
    p.add_argument("--rel-eps", type=float, dest="rel_eps")
    p.add_argument("--holdout", action="store_const", const=True,
                   help="fit on the training split only")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("classify", help="label a dataset with one selector and method")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--selector", required=True,
                   help="feature name, comma-joined pair, or cov_mean")
    p.add_argument("--method", required=True, choices=["ratio", "hypothesis"])
    p.add_argument("--out", help="output decisions CSV (default: stdout)")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("report", help="evaluate a model and write the accuracy table")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--holdout", action="store_const", const=True,
                   help="evaluate on the held-out split instead of in-sample")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except (ParameterError, UnsupportedCombinationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, GridMismatchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DegenerateSignalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
