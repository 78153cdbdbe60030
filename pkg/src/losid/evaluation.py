"""Train/test orchestration and Table-style accuracy reporting.

The report has one row per statistic in a fixed order, each carrying the
cells that its decision rules support: single features get ratio and
hypothesis columns, the energy ratio and the covariance-mean statistic get
hypothesis columns only, and the two joint selectors get ratio columns only.
Missing cells render as "-".
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text, fmt_float
from .cir import Dataset, Label
from .classify import (
    COV_SELECTOR,
    FittedModel,
    Method,
    ThresholdRule,
    hypothesis_classify,
    ratio_classify,
    select_threshold,
)
from .density import (
    DEFAULT_BINS,
    DEFAULT_FLOOR,
    ClassDensities,
    fit_histogram,
    joint_likelihood_ratio,
    likelihood_ratio,
)
from .errors import DegenerateSignalError, ParameterError
from .features import FEATURE_NAMES, FeatureVector, cov_mean_statistic, extract_all

#: Report rows in table order: selector and the methods it runs.
ROW_PLAN: tuple[tuple[str | tuple[str, str], tuple[Method, ...]], ...] = (
    ("skewness", (Method.RATIO, Method.HYPOTHESIS)),
    ("kurtosis", (Method.RATIO, Method.HYPOTHESIS)),
    ("energy", (Method.RATIO, Method.HYPOTHESIS)),
    ("energy_ratio", (Method.HYPOTHESIS,)),
    ("rds", (Method.RATIO, Method.HYPOTHESIS)),
    ("med", (Method.RATIO, Method.HYPOTHESIS)),
    (COV_SELECTOR, (Method.HYPOTHESIS,)),
    (("rds", "med"), (Method.RATIO,)),
    (("amp_mean", "med"), (Method.RATIO,)),
)

_ROW_LABELS = {
    "skewness": "Skewness",
    "kurtosis": "Kurtosis",
    "energy": "Energy",
    "energy_ratio": "Energy Ratio",
    "rds": "RMS delay",
    "med": "MED",
    COV_SELECTOR: "Mean of Covariance Matrix",
    ("rds", "med"): "RDS & MED",
    ("amp_mean", "med"): "Mean & MED",
}


@dataclass(frozen=True)
class FitConfig:
    """Histogram, threshold and joint-selector settings used by fit_model."""

    bins: int = DEFAULT_BINS
    floor: float = DEFAULT_FLOOR
    rel_eps: float = 0.01
    pad_fraction: float = 0.01
    joint_pairs: tuple[tuple[str, str], ...] = (("rds", "med"), ("amp_mean", "med"))


@dataclass
class ReportRow:
    selector: str | tuple[str, str]
    ratio_los: float | None = None
    ratio_nlos: float | None = None
    hyp_los: float | None = None
    hyp_nlos: float | None = None
    threshold: float | None = None


@dataclass
class AccuracyReport:
    rows: list[ReportRow] = field(default_factory=list)

    def row(self, selector) -> ReportRow:
        key = tuple(selector) if not isinstance(selector, str) else selector
        for row in self.rows:
            if row.selector == key:
                return row
        raise KeyError(selector)


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified, seeded train/test split; union is the input, disjoint."""
    if not (0.0 < train_fraction < 1.0):
        raise ParameterError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(2,)))
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in (Label.LOS, Label.NLOS):
        idx = np.array([i for i, r in enumerate(ds.records) if r.label is label])
        perm = rng.permutation(idx.size)
        k = int(round(train_fraction * idx.size))
        train_idx.extend(idx[perm[:k]])
        test_idx.extend(idx[perm[k:]])
    train_idx.sort()
    test_idx.sort()
    return (
        Dataset(tuple(ds.records[i] for i in train_idx), ds.grid),
        Dataset(tuple(ds.records[i] for i in test_idx), ds.grid),
    )


def _extract_features(ds: Dataset, rel_eps: float) -> list[FeatureVector]:
    out = []
    for i, rec in enumerate(ds.records):
        try:
            out.append(extract_all(rec.cir, rel_eps))
        except DegenerateSignalError as exc:
            raise DegenerateSignalError(f"record {i}: {exc}") from exc
    return out


def fit_model(train: Dataset, config: FitConfig = FitConfig()) -> FittedModel:
    """Fit densities, per-feature thresholds, and the covariance rule."""
    labels = [r.label for r in train.records]
    if Label.LOS not in labels or Label.NLOS not in labels:
        raise ParameterError("training set must contain both LOS and NLOS records")

    vectors = _extract_features(train, config.rel_eps)
    is_los = np.array([lab is Label.LOS for lab in labels])

    densities: dict[str, ClassDensities] = {}
    rules: dict[str, ThresholdRule] = {}
    for name in FEATURE_NAMES:
        values = np.array([getattr(fv, name) for fv in vectors])
        lo, hi = float(values.min()), float(values.max())
        pad = config.pad_fraction * (hi - lo)
        if pad == 0.0:  # constant feature; open a token window around it
            pad = config.pad_fraction * max(1.0, abs(lo))
        los_pdf = fit_histogram(values[is_los], config.bins, lo - pad, hi + pad, config.floor)
        nlos_pdf = fit_histogram(values[~is_los], config.bins, lo - pad, hi + pad, config.floor)
        densities[name] = ClassDensities(name, los_pdf, nlos_pdf)
        rules[name] = select_threshold(values[is_los], values[~is_los])

    reference = Dataset(
        tuple(r for r in train.records if r.label is Label.LOS), train.grid
    )
    cov_values = np.array(
        [cov_mean_statistic(r.cir, reference) for r in train.records]
    )
    cov_rule = select_threshold(cov_values[is_los], cov_values[~is_los])

    return FittedModel(
        densities=densities,
        rules=rules,
        cov_reference=reference,
        cov_rule=cov_rule,
        joint_pairs=config.joint_pairs,
        rel_eps=config.rel_eps,
        metadata={
            "bins": config.bins,
            "floor": config.floor,
            "n_train_los": int(is_los.sum()),
            "n_train_nlos": int((~is_los).sum()),
        },
    )


def _accuracy(decisions: list[Label], truths: list[Label], label: Label) -> float | None:
    total = sum(1 for t in truths if t is label)
    if total == 0:  # class absent from the test set; leave the cell empty
        return None
    correct = sum(1 for d, t in zip(decisions, truths) if t is label and d is label)
    return 100.0 * correct / total


def evaluate(model: FittedModel, test: Dataset) -> AccuracyReport:
    """Per-selector, per-method LOS%/NLOS% accuracies on a labeled dataset."""
    if len(test) == 0:
        raise ParameterError("test dataset must be non-empty")
    truths = [r.label for r in test.records]
    vectors = _extract_features(test, model.rel_eps)
    cov_values = [cov_mean_statistic(r.cir, model.cov_reference) for r in test.records]

    report = AccuracyReport()
    for selector, methods in ROW_PLAN:
        row = ReportRow(selector=selector)
        if selector == COV_SELECTOR:
            row.threshold = model.cov_rule.threshold
            decisions = [hypothesis_classify(v, model.cov_rule) for v in cov_values]
            row.hyp_los = _accuracy(decisions, truths, Label.LOS)
            row.hyp_nlos = _accuracy(decisions, truths, Label.NLOS)
        elif isinstance(selector, str):
            values = [getattr(fv, selector) for fv in vectors]
            if Method.RATIO in methods:
                cd = model.densities[selector]
                decisions = [ratio_classify(likelihood_ratio(cd, v)) for v in values]
                row.ratio_los = _accuracy(decisions, truths, Label.LOS)
                row.ratio_nlos = _accuracy(decisions, truths, Label.NLOS)
            if Method.HYPOTHESIS in methods:
                rule = model.rules[selector]
                row.threshold = rule.threshold
                decisions = [hypothesis_classify(v, rule) for v in values]
                row.hyp_los = _accuracy(decisions, truths, Label.LOS)
                row.hyp_nlos = _accuracy(decisions, truths, Label.NLOS)
        else:
            cds = [model.densities[name] for name in selector]
            decisions = [
                ratio_classify(joint_likelihood_ratio(
                    cds, [getattr(fv, name) for name in selector]))
                for fv in vectors
            ]
            row.ratio_los = _accuracy(decisions, truths, Label.LOS)
            row.ratio_nlos = _accuracy(decisions, truths, Label.NLOS)
        report.rows.append(row)
    return report


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{value:.1f}"


def render_text(report: AccuracyReport) -> str:
    """Fixed-width table with Parameter / Ratio / Hypothesis / Threshold columns."""
    name_w = max(len(_ROW_LABELS[r.selector]) for r in report.rows)
    lines = [
        f"{'Parameter':<{name_w}} | Ratio Test    | Hypothesis test | Threshold",
        f"{'':<{name_w}} | LOS     NLOS  | LOS     NLOS    |",
        f"{'-' * name_w}-+---------------+-----------------+----------",
    ]
    for row in report.rows:
        threshold = "-" if row.threshold is None else f"{row.threshold:.6g}"
        lines.append(
            f"{_ROW_LABELS[row.selector]:<{name_w}} | "
            f"{_cell(row.ratio_los):<7} {_cell(row.ratio_nlos):<5} | "
            f"{_cell(row.hyp_los):<7} {_cell(row.hyp_nlos):<7} | "
            f"{threshold}"
        )
    return "\n".join(lines) + "\n"


def _selector_id(selector) -> str:
    return selector if isinstance(selector, str) else "+".join(selector)


def render_csv(report: AccuracyReport) -> str:
    """CSV mirror: one row per (selector, method, class) that was run."""
    lines = ["selector,method,class,accuracy_pct,threshold"]
    for row in report.rows:
        threshold = "" if row.threshold is None else fmt_float(row.threshold)
        cells = (
            ("ratio", "LOS", row.ratio_los),
            ("ratio", "NLOS", row.ratio_nlos),
            ("hypothesis", "LOS", row.hyp_los),
            ("hypothesis", "NLOS", row.hyp_nlos),
        )
        for method, cls, value in cells:
            if value is not None:
                lines.append(
                    f"{_selector_id(row.selector)},{method},{cls},{fmt_float(value)},{threshold}"
                )
    return "\n".join(lines) + "\n"


def render_report(report: AccuracyReport) -> tuple[str, str]:
    """(fixed-width text table, CSV mirror) for one report."""
    return render_text(report), render_csv(report)


def export_pdf_curves(model: FittedModel, out_dir: str | os.PathLike) -> list[str]:
    """Write one density-curve CSV per feature per class; returns the paths."""
    paths = []
    for name, cd in model.densities.items():
        for cls, pdf in (("LOS", cd.los), ("NLOS", cd.nlos)):
            lines = ["feature,class,bin_lo,bin_hi,density"]
            for lo, hi, d in zip(pdf.edges[:-1], pdf.edges[1:], pdf.densities):
                lines.append(f"{name},{cls},{fmt_float(lo)},{fmt_float(hi)},{fmt_float(d)}")
            path = os.path.join(os.fspath(out_dir), f"pdf_{name}_{cls}.csv")
            atomic_write_text(path, "\n".join(lines) + "\n")
            paths.append(path)
    return paths


def export_joint_grids(model: FittedModel, out_dir: str | os.PathLike) -> list[str]:
    """Write one product-form joint-density grid per joint pair.

    Rows are evaluated on the bin-center grid; a class column distinguishes
    the LOS and NLOS surfaces within each file.
    """
    paths = []
    for name_a, name_b in model.joint_pairs:
        cd_a, cd_b = model.densities[name_a], model.densities[name_b]
        lines = ["feature_a,feature_b,class,value_a,value_b,density"]
        for cls in ("LOS", "NLOS"):
            pdf_a = cd_a.los if cls == "LOS" else cd_a.nlos
            pdf_b = cd_b.los if cls == "LOS" else cd_b.nlos
            for va, da in zip(pdf_a.centers(), pdf_a.densities):
                for vb, db in zip(pdf_b.centers(), pdf_b.densities):
                    lines.append(
                        f"{name_a},{name_b},{cls},"
                        f"{fmt_float(va)},{fmt_float(vb)},{fmt_float(da * db)}"
                    )
        path = os.path.join(os.fspath(out_dir), f"joint_{name_a}_{name_b}.csv")
        atomic_write_text(path, "\n".join(lines) + "\n")
        paths.append(path)
    return paths
