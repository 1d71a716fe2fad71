import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from activeids.situation import (
    DetectionParams,
    HostState,
    SituationError,
    aggregate_run,
    binom_cdf,
    binom_cdf_direct,
    binom_pmf,
    host_probability,
    update,
)

P = 0.325


def cdf_row(n: int, p: float) -> np.ndarray:
    """Oracle: full CDF over d = 0..n by direct log-space summation."""
    ks = np.arange(n + 1, dtype=np.float64)
    logc = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(k + 1) for k in range(n + 1)])
        - np.array([math.lgamma(n - k + 1) for k in range(n + 1)])
    )
    logs = logc + ks * math.log(p) + (n - ks) * math.log1p(-p)
    pmf = np.exp(logs)
    return np.minimum(1.0, np.cumsum(pmf))


class TestPmf:
    def test_one_trial_no_success(self):
        assert binom_pmf(1, 0, P) == pytest.approx(0.675, abs=1e-12)

    def test_two_trials_no_success(self):
        # 0.675^2, golden host-table value 0.456
        assert binom_pmf(2, 0, P) == pytest.approx(0.675**2, abs=1e-12)
        assert binom_pmf(2, 0, P) == pytest.approx(0.456, abs=5e-4)

    def test_certain_success(self):
        assert binom_pmf(5, 5, 1.0) == 1.0

    def test_rejects_d_above_n(self):
        with pytest.raises(SituationError):
            binom_pmf(3, 4, 0.5)

    def test_normalization_sweep(self):
        # sum over d of pmf(n, d, p) == 1 for every n <= 500
        for n in range(0, 501):
            total = sum(binom_pmf(n, d, P) for d in range(n + 1))
            assert total == pytest.approx(1.0, abs=1e-9), f"n={n}"

    @given(
        n=st.integers(min_value=1, max_value=400),
        d=st.integers(min_value=0, max_value=400),
        p=st.floats(min_value=0.01, max_value=0.99),
    )
    @settings(max_examples=200, deadline=None)
    def test_pmf_is_cdf_difference(self, n, d, p):
        d = min(d, n)
        lower = binom_cdf(n, d - 1, p) if d > 0 else 0.0
        assert binom_pmf(n, d, p) == pytest.approx(binom_cdf(n, d, p) - lower, abs=1e-10)


class TestCdf:
    def test_golden_run1_cells(self):
        # golden run-1 probabilities for hosts with 1,2,3,4,8 records and no detections
        for n, expected in [(1, 0.675), (2, 0.456), (3, 0.308), (4, 0.208), (8, 0.043)]:
            assert binom_cdf(n, 0, P) == pytest.approx(expected, abs=5e-4)

    def test_golden_run2_cells(self):
        assert binom_cdf(6, 2, P) == pytest.approx(0.697, abs=5e-4)
        assert binom_cdf(16, 3, P) == pytest.approx(0.184, abs=5e-4)

    def test_full_support_is_one(self):
        for n in (1, 7, 100):
            for p in (0.1, 0.5, 0.99):
                assert binom_cdf(n, n, p) == 1.0

    def test_rejects_d_above_n(self):
        with pytest.raises(SituationError):
            binom_cdf(2, 3, 0.5)

    def test_matches_direct_summation(self):
        for n in (1, 2, 5, 17, 100, 999):
            for d in range(0, n + 1, max(1, n // 7)):
                assert binom_cdf(n, d, P) == pytest.approx(
                    binom_cdf_direct(n, d, P), abs=1e-10
                )

    def test_oracle_equivalence_sweep(self):
        # incomplete-beta route vs summation oracle, every d, n <= 1000
        for n in range(1, 1001):
            row = cdf_row(n, P)
            got = np.array([binom_cdf(n, d, P) for d in range(n + 1)])
            assert np.abs(got - row).max() < 1e-10, f"n={n}"

    def test_monotone_in_d(self):
        for n in (3, 10, 250):
            values = [binom_cdf(n, d, P) for d in range(n + 1)]
            assert all(b >= a for a, b in zip(values, values[1:]))
            assert values[-1] == 1.0

    @given(
        n=st.integers(min_value=1, max_value=300),
        p=st.floats(min_value=0.01, max_value=0.99),
    )
    @settings(max_examples=100, deadline=None)
    def test_cdf_agrees_with_scipy(self, n, p):
        scipy_stats = pytest.importorskip("scipy.stats")
        d = n // 2
        assert binom_cdf(n, d, p) == pytest.approx(
            float(scipy_stats.binom.cdf(d, n, p)), abs=1e-10
        )


class TestDetectionParams:
    def test_defaults_match_measured_sensitivity(self):
        params = DetectionParams()
        assert params.p == 0.325
        assert params.q == pytest.approx(0.675)
        assert params.mode == "cdf"

    def test_p_bounds(self):
        with pytest.raises(SituationError):
            DetectionParams(p=0.0)
        with pytest.raises(SituationError):
            DetectionParams(p=1.0)

    def test_pmf_mode(self):
        params = DetectionParams(p=0.325, mode="pmf")
        assert host_probability(1, 0, params) == pytest.approx(0.675, abs=1e-12)


class TestAggregateRun:
    def test_single_host(self):
        counts = aggregate_run([1, 0, 1], ["a", "a", "a"])
        assert counts == {"a": (3, 2)}

    def test_all_normal(self):
        counts = aggregate_run([0, 0, 0, 0], ["a", "b", "a", "c"])
        assert all(d == 0 for _, d in counts.values())

    def test_hand_counted_two_hosts(self):
        predictions = [1, 0, 0, 1, 1, 0, 1]
        srcips = ["a", "b", "a", "b", "b", "a", "a"]
        # hand count: a rows 0,2,5,6 -> preds 1,0,0,1; b rows 1,3,4 -> 0,1,1
        assert aggregate_run(predictions, srcips) == {"a": (4, 2), "b": (3, 2)}

    def test_conserves_mass(self):
        rng = np.random.default_rng(3)
        predictions = rng.integers(0, 2, size=500)
        srcips = [f"h{int(i)}" for i in rng.integers(0, 17, size=500)]
        counts = aggregate_run(predictions, srcips)
        assert sum(n for n, _ in counts.values()) == 500
        assert sum(d for _, d in counts.values()) == int(predictions.sum())

    def test_length_mismatch(self):
        with pytest.raises(SituationError):
            aggregate_run([1, 0], ["a"])


class TestUpdate:
    def test_prefix_sums(self):
        params = DetectionParams()
        hosts = update({}, {"a": (3, 1)}, params)
        hosts = update(hosts, {"a": (3, 2)}, params)
        assert hosts["a"].n_r == 6
        assert hosts["a"].d_r == 3
        assert hosts["a"].history == ((3, 1), (3, 2))

    def test_single_trial_no_detection(self):
        hosts = update({}, {"a": (1, 0)}, DetectionParams(p=0.325))
        assert hosts["a"].probability == pytest.approx(0.675, abs=5e-4)

    def test_golden_trajectory_eight_records_per_run(self):
        # 8 records per run: run 1 d=0 -> 0.043; run 2 with d_r=3, n_r=16 -> 0.184
        params = DetectionParams(p=0.325)
        hosts = update({}, {"h": (8, 0)}, params)
        assert hosts["h"].probability == pytest.approx(0.043, abs=5e-4)
        hosts = update(hosts, {"h": (8, 3)}, params)
        assert hosts["h"].n_r == 16
        assert hosts["h"].d_r == 3
        assert hosts["h"].probability == pytest.approx(0.184, abs=5e-4)

    def test_rejects_d_above_n(self):
        with pytest.raises(SituationError):
            update({}, {"a": (2, 3)}, DetectionParams())

    def test_missing_host_keeps_state(self):
        params = DetectionParams()
        hosts = update({}, {"a": (5, 1), "b": (2, 0)}, params)
        hosts = update(hosts, {"a": (5, 2)}, params)
        assert hosts["b"].history == ((2, 0),)

    def test_permuting_history_leaves_probability_unchanged(self):
        params = DetectionParams()
        runs = [(10, 2), (7, 0), (10, 6), (3, 3)]
        forward = HostState.from_history("a", runs, params)
        backward = HostState.from_history("a", runs[::-1], params)
        assert forward.probability == backward.probability
        assert (forward.n_r, forward.d_r) == (backward.n_r, backward.d_r)

    def test_input_hosts_not_mutated(self):
        params = DetectionParams()
        original = update({}, {"a": (1, 0)}, params)
        update(original, {"a": (1, 1)}, params)
        assert original["a"].history == ((1, 0),)
