"""Empirical per-feature densities and likelihood ratios.

The estimator is a uniform-bin histogram normalized to unit mass, with every
bin density clamped up to a small positive floor so that likelihood ratios
stay finite and positive everywhere. Out-of-range samples accumulate into the
nearest edge bin at fit time; out-of-range evaluation returns the floor.
Interior bin edges belong to the right bin and the final bin is right-closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

DEFAULT_BINS = 50
DEFAULT_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class HistogramPdf:
    """Piecewise-constant density over ``edges`` with a positive floor."""

    edges: np.ndarray
    densities: np.ndarray
    floor: float

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.float64).copy()
        densities = np.asarray(self.densities, dtype=np.float64).copy()
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ParameterError("edges must be strictly increasing with >= 2 entries")
        if densities.shape != (edges.size - 1,):
            raise ParameterError("densities must have one entry per bin")
        if not (np.isfinite(self.floor) and self.floor > 0):
            raise ParameterError(f"floor must be positive, got {self.floor}")
        if np.any(densities < self.floor):
            raise ParameterError("densities must be >= floor")
        edges.flags.writeable = False
        densities.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "densities", densities)

    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


@dataclass(frozen=True, eq=False)
class ClassDensities:
    """LOS and NLOS histograms for one feature, on shared edges."""

    feature: str
    los: HistogramPdf
    nlos: HistogramPdf

    def __post_init__(self):
        if not np.array_equal(self.los.edges, self.nlos.edges):
            raise ParameterError(f"{self.feature}: LOS and NLOS histograms must share edges")


def fit_histogram(samples, bins: int, lo: float, hi: float,
                  floor: float = DEFAULT_FLOOR) -> HistogramPdf:
    """Histogram density over ``bins`` uniform bins spanning [lo, hi].

    Counts are normalized to unit mass by bin width, then clamped up to
    ``floor``. Samples outside [lo, hi] count toward the nearest edge bin.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ParameterError("samples must be non-empty")
    if not np.all(np.isfinite(samples)):
        raise ParameterError("samples must be finite")
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ParameterError(f"need lo < hi, got lo={lo}, hi={hi}")
    if bins < 2:
        raise ParameterError(f"bins must be >= 2, got {bins}")
    if not (np.isfinite(floor) and floor > 0):
        raise ParameterError(f"floor must be positive, got {floor}")
    counts, edges = np.histogram(np.clip(samples, lo, hi), bins=bins, range=(lo, hi))
    width = (hi - lo) / bins
    densities = counts / (samples.size * width)
    return HistogramPdf(edges, np.maximum(densities, floor), floor)


def pdf_eval(pdf: HistogramPdf, x: float) -> float:
    """Density of the bin containing ``x``; the floor outside the support."""
    edges = pdf.edges
    if math.isnan(x) or x < edges[0] or x > edges[-1]:
        return pdf.floor
    i = int(np.searchsorted(edges, x, side="right")) - 1
    if i == pdf.densities.size:  # x exactly on the last edge
        i -= 1
    return float(pdf.densities[i])


def likelihood_ratio(cd: ClassDensities, x: float) -> float:
    """P_LOS(x) / P_NLOS(x); finite and positive thanks to the floor."""
    return pdf_eval(cd.los, x) / pdf_eval(cd.nlos, x)


def joint_likelihood_ratio(cds: list[ClassDensities], xs) -> float:
    """Product of per-feature likelihood ratios (independence assumption)."""
    xs = list(xs)
    if len(cds) != len(xs):
        raise ParameterError(f"got {len(cds)} densities but {len(xs)} values")
    if not cds:
        raise ParameterError("need at least one (density, value) pair")
    return math.prod(likelihood_ratio(cd, x) for cd, x in zip(cds, xs))
