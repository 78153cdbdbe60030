"""Decision rules, threshold selection, and the fitted model."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from losid import (
    Direction,
    GeneratorParams,
    Label,
    Method,
    ParameterError,
    ThresholdRule,
    TimeGrid,
    UnsupportedCombinationError,
    classify_record,
    generate_dataset,
    hypothesis_classify,
    load_model,
    ratio_classify,
    save_model,
    select_threshold,
)
from losid.density import joint_likelihood_ratio, likelihood_ratio
from losid.evaluation import FitConfig, fit_model
from losid.features import feature_value


# ---------------------------------------------------------------------------
# Exhaustive-scan oracle for threshold selection: dumb loops over the same
# candidate grid (midpoints plus one point beyond each extreme); the error of
# any real-valued threshold is achieved on this grid.
# ---------------------------------------------------------------------------

def oracle_min_error(los, nlos):
    pooled = sorted(set(los) | set(nlos))
    candidates = [pooled[0] - 1.0]
    for a, b in zip(pooled, pooled[1:]):
        candidates.append((a + b) / 2.0)
    candidates.append(pooled[-1] + 1.0)
    best = None
    for t in candidates:
        for greater_is_los in (False, True):
            errors = 0
            for v in los:
                decided_los = (v > t) if greater_is_los else (v <= t)
                errors += 0 if decided_los else 1
            for v in nlos:
                decided_los = (v > t) if greater_is_los else (v <= t)
                errors += 1 if decided_los else 0
            if best is None or errors < best:
                best = errors
    return best


def rule_error(rule, los, nlos):
    errors = sum(1 for v in los if hypothesis_classify(v, rule) is not Label.LOS)
    errors += sum(1 for v in nlos if hypothesis_classify(v, rule) is not Label.NLOS)
    return errors


class TestRatioClassify:
    def test_above_one_is_los(self):
        assert ratio_classify(3.0) is Label.LOS

    def test_below_one_is_nlos(self):
        assert ratio_classify(0.2) is Label.NLOS

    def test_tie_goes_to_los(self):
        assert ratio_classify(1.0) is Label.LOS

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_non_positive_rejected(self, bad):
        with pytest.raises(ParameterError):
            ratio_classify(bad)


class TestHypothesisClassify:
    def test_greater_is_los(self):
        rule = ThresholdRule(3.0, Direction.GREATER_IS_LOS)
        assert hypothesis_classify(5.0, rule) is Label.LOS
        assert hypothesis_classify(2.0, rule) is Label.NLOS

    def test_boundary_follows_direction(self):
        le = ThresholdRule(3.0, Direction.LESS_OR_EQUAL_IS_LOS)
        gt = ThresholdRule(3.0, Direction.GREATER_IS_LOS)
        assert hypothesis_classify(3.0, le) is Label.LOS
        assert hypothesis_classify(3.0, gt) is Label.NLOS

    @given(st.floats(-100, 100), st.floats(-100, 100), st.floats(0, 10))
    @settings(max_examples=100)
    def test_raising_threshold_never_flips_nlos_to_los_under_greater(self, v, t, bump):
        low = ThresholdRule(t, Direction.GREATER_IS_LOS)
        high = ThresholdRule(t + bump, Direction.GREATER_IS_LOS)
        if hypothesis_classify(v, low) is Label.NLOS:
            assert hypothesis_classify(v, high) is Label.NLOS


class TestSelectThreshold:
    def test_separated_classes_smallest_midpoint(self):
        rule = select_threshold([1.0, 2.0], [10.0, 11.0])
        assert rule.threshold == 6.0
        assert rule.direction is Direction.LESS_OR_EQUAL_IS_LOS
        assert rule_error(rule, [1.0, 2.0], [10.0, 11.0]) == 0

    def test_identical_single_points(self):
        rule = select_threshold([5.0], [5.0])
        assert rule_error(rule, [5.0], [5.0]) == oracle_min_error([5.0], [5.0]) == 1

    def test_perfect_separation_zero_error(self):
        los = [0.1, 0.2, 0.3]
        nlos = [5.0, 6.0]
        rule = select_threshold(los, nlos)
        assert rule_error(rule, los, nlos) == 0

    def test_reversed_direction_learned(self):
        los = [10.0, 11.0]
        nlos = [1.0, 2.0]
        rule = select_threshold(los, nlos)
        assert rule.direction is Direction.GREATER_IS_LOS
        assert rule_error(rule, los, nlos) == 0

    def test_empty_inputs_rejected(self):
        with pytest.raises(ParameterError):
            select_threshold([], [1.0])
        with pytest.raises(ParameterError):
            select_threshold([1.0], [])

    @given(
        st.lists(st.integers(-20, 20), min_size=1, max_size=30),
        st.lists(st.integers(-20, 20), min_size=1, max_size=30),
    )
    @settings(max_examples=150, deadline=None)
    def test_matches_exhaustive_scan(self, los, nlos):
        los = [float(v) for v in los]
        nlos = [float(v) for v in nlos]
        rule = select_threshold(los, nlos)
        assert rule_error(rule, los, nlos) == oracle_min_error(los, nlos)

    def test_never_worse_than_constant_classifier(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            los = rng.normal(0, 1, 15)
            nlos = rng.normal(0.2, 1, 12)
            rule = select_threshold(los, nlos)
            assert rule_error(rule, los, nlos) <= min(los.size, nlos.size)


@pytest.fixture(scope="module")
def small_model():
    ds = generate_dataset(GeneratorParams(seed=21), 60, TimeGrid(0, 0.02, 200))
    return ds, fit_model(ds, FitConfig(bins=20))


class TestClassifyRecord:
    def test_ratio_single_feature_matches_manual_composition(self, small_model):
        ds, model = small_model
        cd = model.densities["energy_ratio"]
        for rec in ds.records[:20]:
            x = feature_value(rec.cir, "energy_ratio", model.rel_eps)
            expected = ratio_classify(likelihood_ratio(cd, x))
            assert classify_record(model, rec.cir, Method.RATIO, "energy_ratio") is expected

    def test_joint_ratio_matches_manual_composition(self, small_model):
        ds, model = small_model
        cds = [model.densities["rds"], model.densities["med"]]
        for rec in ds.records[:20]:
            xs = [feature_value(rec.cir, n, model.rel_eps) for n in ("rds", "med")]
            expected = ratio_classify(joint_likelihood_ratio(cds, xs))
            got = classify_record(model, rec.cir, Method.RATIO, ("rds", "med"))
            assert got is expected

    def test_hypothesis_single_feature(self, small_model):
        ds, model = small_model
        rule = model.rules["kurtosis"]
        rec = ds.records[0]
        expected = hypothesis_classify(feature_value(rec.cir, "kurtosis"), rule)
        assert classify_record(model, rec.cir, Method.HYPOTHESIS, "kurtosis") is expected

    def test_covariance_requires_hypothesis(self, small_model):
        ds, model = small_model
        with pytest.raises(UnsupportedCombinationError):
            classify_record(model, ds.records[0].cir, Method.RATIO, "cov_mean")
        label = classify_record(model, ds.records[0].cir, Method.HYPOTHESIS, "cov_mean")
        assert label in (Label.LOS, Label.NLOS)

    def test_joint_hypothesis_unsupported(self, small_model):
        ds, model = small_model
        with pytest.raises(UnsupportedCombinationError):
            classify_record(model, ds.records[0].cir, Method.HYPOTHESIS, ("rds", "med"))

    def test_unknown_selector_rejected(self, small_model):
        ds, model = small_model
        with pytest.raises(ParameterError):
            classify_record(model, ds.records[0].cir, Method.RATIO, "entropy")

    def test_deterministic(self, small_model):
        ds, model = small_model
        rec = ds.records[5]
        first = classify_record(model, rec.cir, Method.RATIO, "med")
        for _ in range(5):
            assert classify_record(model, rec.cir, Method.RATIO, "med") is first


class TestModelPersistence:
    def test_round_trip_preserves_decisions(self, small_model, tmp_path):
        ds, model = small_model
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        probes = ds.records[::3]
        selectors = ["skewness", "energy_ratio", "cov_mean", ("rds", "med")]
        for rec in probes:
            for sel in selectors:
                method = Method.HYPOTHESIS if sel == "cov_mean" else Method.RATIO
                assert classify_record(model, rec.cir, method, sel) is \
                    classify_record(loaded, rec.cir, method, sel)

    def test_save_is_byte_deterministic(self, small_model, tmp_path):
        _, model = small_model
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        save_model(model, p1)
        save_model(model, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_version_field_present_and_checked(self, small_model, tmp_path):
        import json

        from losid import FormatError
        _, model = small_model
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = json.loads(path.read_text())
        assert doc["version"] == 1
        doc["version"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(FormatError):
            load_model(path)

    def test_garbage_file_rejected(self, tmp_path):
        from losid import FormatError
        path = tmp_path / "model.json"
        path.write_text("{not json")
        with pytest.raises(FormatError):
            load_model(path)
