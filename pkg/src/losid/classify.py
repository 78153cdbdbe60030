"""Decision rules and the fitted classification model.

Two rules are provided. The ratio test labels a record LOS when the LOS/NLOS
likelihood ratio of the observed statistic is >= 1 (ties go to LOS). The
hypothesis test compares one statistic against a fixed threshold with a fixed
direction; under LESS_OR_EQUAL_IS_LOS a value exactly on the threshold falls
on the LOS side, under GREATER_IS_LOS it falls on the NLOS side.

Thresholds are selected by exhaustive empirical error minimization over the
midpoints between adjacent pooled training values plus one candidate beyond
each extreme (so the degenerate all-LOS / all-NLOS rules are always in the
candidate set).
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text
from .cir import Cir, Dataset, Label, LabeledCir, TimeGrid
from .density import ClassDensities, HistogramPdf, joint_likelihood_ratio
from .errors import FormatError, ParameterError, UnsupportedCombinationError
from .features import FEATURE_NAMES, cov_mean_statistic, feature_value

MODEL_FORMAT_VERSION = 1

#: Selector name of the covariance-mean statistic (hypothesis test only).
COV_SELECTOR = "cov_mean"


class Direction(enum.Enum):
    GREATER_IS_LOS = "GREATER_IS_LOS"
    LESS_OR_EQUAL_IS_LOS = "LESS_OR_EQUAL_IS_LOS"


class Method(enum.Enum):
    RATIO = "RATIO"
    HYPOTHESIS = "HYPOTHESIS"


@dataclass(frozen=True)
class ThresholdRule:
    threshold: float
    direction: Direction

    def __post_init__(self):
        if not np.isfinite(self.threshold):
            raise ParameterError(f"threshold must be finite, got {self.threshold}")


def ratio_classify(ratio: float) -> Label:
    """LOS when the likelihood ratio is >= 1, NLOS otherwise."""
    if not ratio > 0:
        raise ParameterError(f"likelihood ratio must be positive, got {ratio}")
    return Label.LOS if ratio >= 1.0 else Label.NLOS


def hypothesis_classify(value: float, rule: ThresholdRule) -> Label:
    """Threshold test with the rule's direction and tie convention."""
    if rule.direction is Direction.LESS_OR_EQUAL_IS_LOS:
        return Label.LOS if value <= rule.threshold else Label.NLOS
    return Label.LOS if value > rule.threshold else Label.NLOS


def _error_counts(los: np.ndarray, nlos: np.ndarray, threshold: float,
                  direction: Direction) -> int:
    if direction is Direction.LESS_OR_EQUAL_IS_LOS:
        return int((los > threshold).sum() + (nlos <= threshold).sum())
    return int((los <= threshold).sum() + (nlos > threshold).sum())


def select_threshold(los_values, nlos_values) -> ThresholdRule:
    """Minimal-training-error threshold rule for one scalar feature.

    Candidates are the midpoints between adjacent distinct pooled values plus
    one point below the minimum and one above the maximum. Ties are broken by
    smaller threshold, then by LESS_OR_EQUAL_IS_LOS.
    """
    los = np.asarray(los_values, dtype=np.float64)
    nlos = np.asarray(nlos_values, dtype=np.float64)
    if los.size == 0 or nlos.size == 0:
        raise ParameterError("both classes need at least one training value")
    if not (np.all(np.isfinite(los)) and np.all(np.isfinite(nlos))):
        raise ParameterError("training values must be finite")

    pooled = np.unique(np.concatenate([los, nlos]))
    candidates = np.concatenate(
        ([pooled[0] - 1.0], 0.5 * (pooled[:-1] + pooled[1:]), [pooled[-1] + 1.0])
    )
    best: tuple[int, float, Direction] | None = None
    for threshold in candidates:
        for direction in (Direction.LESS_OR_EQUAL_IS_LOS, Direction.GREATER_IS_LOS):
            errors = _error_counts(los, nlos, threshold, direction)
            if best is None or errors < best[0]:
                best = (errors, float(threshold), direction)
    return ThresholdRule(best[1], best[2])


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Everything needed to classify a CIR: densities, rules, references.

    ``densities`` and ``rules`` are keyed by feature name; ``cov_reference``
    holds the LOS training CIRs that the covariance-mean statistic is taken
    against. Every feature named in ``joint_pairs`` must be fitted.
    """

    densities: dict[str, ClassDensities]
    rules: dict[str, ThresholdRule]
    cov_reference: Dataset
    cov_rule: ThresholdRule
    joint_pairs: tuple[tuple[str, str], ...]
    rel_eps: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for pair in self.joint_pairs:
            for name in pair:
                if name not in self.densities:
                    raise ParameterError(f"joint pair {pair} names unfitted feature {name!r}")


def _normalize_selector(selector) -> tuple[str, ...] | str:
    if isinstance(selector, str):
        if selector == COV_SELECTOR:
            return COV_SELECTOR
        return (selector,)
    names = tuple(selector)
    if not names:
        raise ParameterError("empty selector")
    return names


def classify_record(model: FittedModel, cir: Cir, method: Method, selector) -> Label:
    """Classify one CIR with a given statistic selector and decision method.

    ``selector`` is a feature name, an iterable of feature names (joint ratio
    test), or ``"cov_mean"``. The covariance statistic supports only the
    hypothesis test; joint selectors support only the ratio test.
    """
    selector = _normalize_selector(selector)
    if selector == COV_SELECTOR:
        if method is Method.RATIO:
            raise UnsupportedCombinationError(
                "the covariance-mean statistic has no ratio test; use HYPOTHESIS"
            )
        stat = cov_mean_statistic(cir, model.cov_reference)
        return hypothesis_classify(stat, model.cov_rule)

    for name in selector:
        if name not in model.densities:
            raise ParameterError(f"unknown selector {name!r}; fitted: {sorted(model.densities)}")
    values = [feature_value(cir, name, model.rel_eps) for name in selector]

    if method is Method.RATIO:
        cds = [model.densities[name] for name in selector]
        return ratio_classify(joint_likelihood_ratio(cds, values))
    if len(selector) != 1:
        raise UnsupportedCombinationError(
            "the hypothesis test applies to a single feature, not a joint selector"
        )
    return hypothesis_classify(values[0], model.rules[selector[0]])


def _rule_to_json(rule: ThresholdRule) -> dict:
    return {"threshold": rule.threshold, "direction": rule.direction.value}


def _rule_from_json(obj: dict) -> ThresholdRule:
    return ThresholdRule(float(obj["threshold"]), Direction(obj["direction"]))


def save_model(model: FittedModel, path: str | os.PathLike) -> None:
    """Persist a model as one self-describing JSON document."""
    grid = model.cov_reference.grid
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "rel_eps": model.rel_eps,
        "features": {
            name: {
                "edges": cd.los.edges.tolist(),
                "floor": cd.los.floor,
                "los_densities": cd.los.densities.tolist(),
                "nlos_densities": cd.nlos.densities.tolist(),
                "rule": _rule_to_json(model.rules[name]),
            }
            for name, cd in model.densities.items()
        },
        "joint_pairs": [list(pair) for pair in model.joint_pairs],
        "metadata": model.metadata,
        "covariance": {
            "rule": _rule_to_json(model.cov_rule),
            "reference_grid": {"t_start": grid.t_start, "dt": grid.dt, "n": grid.n},
            "reference_taps": [r.cir.taps.tolist() for r in model.cov_reference.records],
        },
    }
    atomic_write_text(path, json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def load_model(path: str | os.PathLike) -> FittedModel:
    """Load a model saved by :func:`save_model`."""
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read model file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file {path!r} is not valid JSON: {exc}") from exc

    try:
        if doc["version"] != MODEL_FORMAT_VERSION:
            raise FormatError(
                f"unsupported model version {doc['version']!r} "
                f"(this build reads version {MODEL_FORMAT_VERSION})"
            )
        densities: dict[str, ClassDensities] = {}
        rules: dict[str, ThresholdRule] = {}
        for name, entry in doc["features"].items():
            if name not in FEATURE_NAMES:
                raise FormatError(f"model names unknown feature {name!r}")
            edges = np.array(entry["edges"])
            floor = float(entry["floor"])
            densities[name] = ClassDensities(
                name,
                HistogramPdf(edges, np.array(entry["los_densities"]), floor),
                HistogramPdf(edges, np.array(entry["nlos_densities"]), floor),
            )
            rules[name] = _rule_from_json(entry["rule"])
        cov = doc["covariance"]
        grid = TimeGrid(float(cov["reference_grid"]["t_start"]),
                        float(cov["reference_grid"]["dt"]),
                        int(cov["reference_grid"]["n"]))
        reference = Dataset(
            tuple(LabeledCir(Cir(grid, np.array(taps)), Label.LOS)
                  for taps in cov["reference_taps"]),
            grid,
        )
        return FittedModel(
            densities=densities,
            rules=rules,
            cov_reference=reference,
            cov_rule=_rule_from_json(cov["rule"]),
            joint_pairs=tuple(tuple(p) for p in doc["joint_pairs"]),
            rel_eps=float(doc["rel_eps"]),
            metadata=dict(doc.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"model file {path!r} is malformed: {exc}") from exc
