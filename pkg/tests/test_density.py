"""Histogram density estimation and likelihood ratios."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from losid import (
    ClassDensities,
    HistogramPdf,
    ParameterError,
    fit_histogram,
    joint_likelihood_ratio,
    likelihood_ratio,
    pdf_eval,
)


def point_mass_pdf(c=0.0):
    # every sample equal to c, 2 bins spanning [c-1, c+1]
    return fit_histogram([c] * 100, bins=2, lo=c - 1, hi=c + 1, floor=1e-9)


class TestFitHistogram:
    def test_point_mass(self):
        pdf = point_mass_pdf(0.0)
        # all mass lands in the right bin (0.0 sits on the interior edge)
        assert pdf.densities[1] == pytest.approx(1.0)
        assert pdf.densities[0] == 1e-9

    def test_uniform_samples_are_flat(self):
        rng = np.random.default_rng(0)
        samples = rng.uniform(0, 1, 1000)
        pdf = fit_histogram(samples, bins=10, lo=0.0, hi=1.0)
        assert np.all(np.abs(pdf.densities - 1.0) < 0.5)

    def test_out_of_range_samples_go_to_edge_bins(self):
        pdf = fit_histogram([-10.0, 10.0], bins=4, lo=0.0, hi=1.0, floor=1e-9)
        assert pdf.densities[0] == pytest.approx(2.0)  # 0.5 sample / width 0.25
        assert pdf.densities[-1] == pytest.approx(2.0)

    @pytest.mark.parametrize("kwargs", [
        {"samples": []},
        {"bins": 0},
        {"bins": 1},
        {"lo": 1.0, "hi": 1.0},
        {"lo": 2.0, "hi": 1.0},
        {"floor": 0.0},
    ])
    def test_invalid_inputs_rejected(self, kwargs):
        base = {"samples": [0.1, 0.2], "bins": 4, "lo": 0.0, "hi": 1.0, "floor": 1e-9}
        with pytest.raises(ParameterError):
            fit_histogram(**{**base, **kwargs})

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=200),
           st.integers(2, 40))
    @settings(max_examples=100, deadline=None)
    def test_mass_conservation(self, samples, bins):
        # with a negligible floor, the histogram integrates to one
        pdf = fit_histogram(samples, bins=bins, lo=-60.0, hi=60.0, floor=1e-300)
        widths = np.diff(pdf.edges)
        assert float(pdf.densities @ widths) == pytest.approx(1.0, abs=1e-9)

    def test_floored_mass_stays_within_floor_budget(self):
        # flooring can only add mass, at most floor * total range
        samples = [0.5] * 50
        bins, lo, hi, floor = 10, 0.0, 1.0, 0.01
        pdf = fit_histogram(samples, bins=bins, lo=lo, hi=hi, floor=floor)
        mass = float(pdf.densities @ np.diff(pdf.edges))
        assert 1.0 - 1e-12 <= mass <= 1.0 + bins * floor * (hi - lo) + 1e-12

    def test_multinomial_consistency(self):
        # two-component mixture: bin masses recovered within 3 sigma
        rng = np.random.default_rng(1)
        n = 5000
        samples = np.where(rng.uniform(size=n) < 0.3,
                           rng.uniform(0.0, 0.5, n), rng.uniform(0.5, 1.0, n))
        pdf = fit_histogram(samples, bins=2, lo=0.0, hi=1.0)
        for density, p in zip(pdf.densities, (0.3, 0.7)):
            mass = density * 0.5
            sigma = np.sqrt(p * (1 - p) / n)
            assert abs(mass - p) < 3 * sigma


class TestHistogramPdfValidation:
    def test_unsorted_edges_rejected(self):
        with pytest.raises(ParameterError):
            HistogramPdf(np.array([0.0, 1.0, 0.5]), np.array([1.0, 1.0]), 1e-9)

    def test_density_below_floor_rejected(self):
        with pytest.raises(ParameterError):
            HistogramPdf(np.array([0.0, 1.0]), np.array([0.0]), 1e-9)


class TestPdfEval:
    def test_point_mass_at_center(self):
        assert pdf_eval(point_mass_pdf(0.0), 0.0) == pytest.approx(1.0)

    def test_far_outside_returns_floor(self):
        pdf = point_mass_pdf(0.0)
        assert pdf_eval(pdf, 1e9) == 1e-9
        assert pdf_eval(pdf, -1e9) == 1e-9

    def test_interior_edge_belongs_to_right_bin(self):
        pdf = HistogramPdf(np.array([0.0, 1.0, 2.0]), np.array([0.25, 0.75]), 1e-9)
        assert pdf_eval(pdf, 1.0) == 0.75

    def test_last_bin_right_closed(self):
        pdf = HistogramPdf(np.array([0.0, 1.0, 2.0]), np.array([0.25, 0.75]), 1e-9)
        assert pdf_eval(pdf, 2.0) == 0.75
        assert pdf_eval(pdf, 0.0) == 0.25


class TestLikelihoodRatio:
    def _cd(self, los, nlos):
        edges = np.linspace(0, 1, len(los) + 1)
        return ClassDensities(
            "f",
            HistogramPdf(edges, np.array(los), 1e-9),
            HistogramPdf(edges, np.array(nlos), 1e-9),
        )

    def test_direct_quotient(self):
        cd = self._cd([0.3, 1.7], [0.1, 1.9])
        assert likelihood_ratio(cd, 0.25) == pytest.approx(3.0)

    def test_identical_histograms_give_one_everywhere(self):
        cd = self._cd([0.5, 1.5], [0.5, 1.5])
        for x in np.linspace(-1, 2, 30):
            assert likelihood_ratio(cd, x) == 1.0

    def test_both_floored_gives_one(self):
        cd = self._cd([1.0, 1.0], [1.0, 1.0])
        assert likelihood_ratio(cd, 42.0) == 1.0

    @given(st.floats(allow_nan=False, allow_infinity=False))
    @settings(max_examples=200)
    def test_always_positive_and_finite(self, x):
        cd = self._cd([1.9, 1e-9], [1e-9, 1.9])
        r = likelihood_ratio(cd, x)
        assert np.isfinite(r) and r > 0

    def test_common_density_scaling_preserves_decision_sign(self):
        edges = np.array([0.0, 0.5, 1.0])
        los = np.array([1.6, 0.4])
        nlos = np.array([0.4, 1.6])
        for scale in (0.01, 1.0, 100.0):
            cd = ClassDensities(
                "f",
                HistogramPdf(edges, los * scale, 1e-12),
                HistogramPdf(edges, nlos * scale, 1e-12),
            )
            assert likelihood_ratio(cd, 0.25) > 1
            assert likelihood_ratio(cd, 0.75) < 1


class TestJointLikelihoodRatio:
    def _cd(self, los, nlos):
        edges = np.linspace(0, 1, len(los) + 1)
        return ClassDensities(
            "f",
            HistogramPdf(edges, np.array(los), 1e-9),
            HistogramPdf(edges, np.array(nlos), 1e-9),
        )

    def test_single_feature_equals_marginal(self):
        cd = self._cd([0.3, 1.7], [0.1, 1.9])
        assert joint_likelihood_ratio([cd], [0.25]) == likelihood_ratio(cd, 0.25)

    def test_product_of_two(self):
        a = self._cd([0.3, 1.7], [0.1, 1.9])   # ratio 3 at 0.25
        b = self._cd([0.5, 1.5], [1.0, 1.0])   # ratio 0.5 at 0.25
        assert joint_likelihood_ratio([a, b], [0.25, 0.25]) == pytest.approx(1.5)

    def test_permutation_invariance(self):
        a = self._cd([0.3, 1.7], [0.1, 1.9])
        b = self._cd([0.5, 1.5], [1.0, 1.0])
        assert joint_likelihood_ratio([a, b], [0.25, 0.75]) == pytest.approx(
            joint_likelihood_ratio([b, a], [0.75, 0.25]))

    def test_length_mismatch_rejected(self):
        cd = self._cd([0.3, 1.7], [0.1, 1.9])
        with pytest.raises(ParameterError):
            joint_likelihood_ratio([cd], [0.1, 0.2])
        with pytest.raises(ParameterError):
            joint_likelihood_ratio([], [])


class TestClassDensities:
    def test_mismatched_edges_rejected(self):
        a = HistogramPdf(np.array([0.0, 1.0]), np.array([1.0]), 1e-9)
        b = HistogramPdf(np.array([0.0, 2.0]), np.array([0.5]), 1e-9)
        with pytest.raises(ParameterError):
            ClassDensities("f", a, b)
