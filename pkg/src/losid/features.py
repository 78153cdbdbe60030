"""Scalar statistics of a CIR used for LOS/NLOS discrimination.

Conventions: moment statistics use population (1/N) normalization with no
Bessel correction; time integrals are discretized as dt-weighted sums over
the grid. Skewness acts on the signed tap amplitudes, kurtosis on their
absolute values. Degenerate inputs (zero variance, zero energy, all-zero
taps) raise :class:`DegenerateSignalError` naming the statistic.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

import numpy as np

from ._util import atomic_write_text, fmt_float
from .cir import Cir, Dataset, Label, first_significant_index
from .errors import (
    DegenerateSignalError,
    FormatError,
    GridMismatchError,
    ParameterError,
)

#: Column order of feature tables and the canonical selector names.
FEATURE_NAMES = ("skewness", "kurtosis", "med", "rds", "energy", "energy_ratio", "amp_mean")


@dataclass(frozen=True)
class FeatureVector:
    """The seven per-record statistics, in FEATURE_NAMES order."""

    skewness: float
    kurtosis: float
    med: float
    rds: float
    energy: float
    energy_ratio: float
    amp_mean: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def skewness(cir: Cir) -> float:
    """Third standardized moment of the signed taps."""
    x = cir.taps
    d = x - x.mean()
    var = float(np.mean(d * d))
    if var == 0.0:
        raise DegenerateSignalError("skewness undefined: zero standard deviation")
    m3 = float(np.mean(d ** 3))
    return m3 / var ** 1.5


def kurtosis(cir: Cir) -> float:
    """Fourth standardized moment of the absolute taps (no -3 offset)."""
    a = np.abs(cir.taps)
    d = a - a.mean()
    var = float(np.mean(d * d))
    if var == 0.0:
        raise DegenerateSignalError("kurtosis undefined: zero variance of |taps|")
    m4 = float(np.mean(d ** 4))
    return m4 / var ** 2


def energy(cir: Cir) -> float:
    """Total energy, sum of squared taps weighted by dt."""
    return float(np.sum(cir.taps ** 2) * cir.grid.dt)


def mean_excess_delay(cir: Cir) -> float:
    """Energy-weighted mean arrival time."""
    w = cir.taps ** 2 * cir.grid.dt
    total = float(w.sum())
    if total == 0.0:
        raise DegenerateSignalError("mean excess delay undefined: zero signal energy")
    return float((cir.grid.times() * w).sum() / total)


def rms_delay_spread(cir: Cir) -> float:
    """Energy-weighted standard deviation of arrival times."""
    w = cir.taps ** 2 * cir.grid.dt
    total = float(w.sum())
    if total == 0.0:
        raise DegenerateSignalError("rms delay spread undefined: zero signal energy")
    med = float((cir.grid.times() * w).sum() / total)
    return float(np.sqrt(((cir.grid.times() - med) ** 2 * w).sum() / total))


def energy_ratio(cir: Cir, rel_eps: float = 0.01) -> float:
    """First significant sample's energy over total energy, in (0, 1]."""
    total = energy(cir)
    if total == 0.0:
        raise DegenerateSignalError("energy ratio undefined: zero signal energy")
    i = first_significant_index(cir, rel_eps)
    return float(cir.taps[i] ** 2 * cir.grid.dt / total)


def amp_mean(cir: Cir) -> float:
    """Mean absolute tap amplitude."""
    return float(np.mean(np.abs(cir.taps)))


def cov_mean_statistic(test: Cir, reference: Dataset) -> float:
    """Mean cross-covariance between a test CIR and a reference class.

    For each reference record, the population covariance over the sample
    index of (test, reference) tap pairs is computed; the statistic is the
    mean of those covariances over the reference set.
    """
    if len(reference) == 0:
        raise ParameterError("reference dataset must be non-empty")
    if reference.grid != test.grid:
        raise GridMismatchError(
            f"reference grid {reference.grid} != test grid {test.grid}"
        )
    ref_centered = _centered_matrix(reference)
    test_centered = test.taps - test.taps.mean()
    per_record = ref_centered @ test_centered / test.grid.n
    return float(per_record.mean())


def _centered_matrix(reference: Dataset) -> np.ndarray:
    """Row-centered tap matrix of a dataset, memoized on the instance."""
    cached = getattr(reference, "_centered_matrix", None)
    if cached is None:
        ref = reference.tap_matrix()
        cached = ref - ref.mean(axis=1, keepdims=True)
        cached.flags.writeable = False
        object.__setattr__(reference, "_centered_matrix", cached)
    return cached


def extract_all(cir: Cir, rel_eps: float = 0.01) -> FeatureVector:
    """Compute all seven features; componentwise equal to the single ops."""
    return FeatureVector(
        skewness=skewness(cir),
        kurtosis=kurtosis(cir),
        med=mean_excess_delay(cir),
        rds=rms_delay_spread(cir),
        energy=energy(cir),
        energy_ratio=energy_ratio(cir, rel_eps),
        amp_mean=amp_mean(cir),
    )


def feature_value(cir: Cir, name: str, rel_eps: float = 0.01) -> float:
    """Evaluate one named feature (see FEATURE_NAMES)."""
    if name == "energy_ratio":
        return energy_ratio(cir, rel_eps)
    funcs = {
        "skewness": skewness,
        "kurtosis": kurtosis,
        "med": mean_excess_delay,
        "rds": rms_delay_spread,
        "energy": energy,
        "amp_mean": amp_mean,
    }
    if name not in funcs:
        raise ParameterError(f"unknown feature {name!r}; expected one of {FEATURE_NAMES}")
    return funcs[name](cir)


def save_feature_table(path: str | os.PathLike,
                       rows: list[tuple[Label, FeatureVector]]) -> None:
    """Write one CSV row of full-precision features per record."""
    lines = ["label," + ",".join(FEATURE_NAMES)]
    for label, fv in rows:
        values = fv.as_dict()
        lines.append(label.value + "," + ",".join(fmt_float(values[n]) for n in FEATURE_NAMES))
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_feature_table(path: str | os.PathLike) -> list[tuple[Label, FeatureVector]]:
    """Read a feature table written by :func:`save_feature_table`."""
    try:
        with open(path, "r", newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read feature table {path!r}: {exc}") from exc
    expected_header = "label," + ",".join(FEATURE_NAMES)
    if not lines or lines[0].strip() != expected_header:
        raise FormatError(f"line 1: expected header {expected_header!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 1 + len(FEATURE_NAMES):
            raise FormatError(f"line {lineno}: expected {1 + len(FEATURE_NAMES)} fields")
        if parts[0] not in ("LOS", "NLOS"):
            raise FormatError(f"line {lineno}: unknown label {parts[0]!r}")
        try:
            values = [float(v) for v in parts[1:]]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        rows.append((Label(parts[0]), FeatureVector(*values)))
    return rows
