import io

import numpy as np
import pytest

from activeids.active_learning import (
    KMeansBaggingSampling,
    KMeansSampling,
    OracleQuery,
    RandomSampling,
    SamplingError,
    SimulatedOracle,
    TerminalOracle,
    bagging_draw,
    run_iteration,
    sample_kmeans,
    sample_kmeans_bagging,
    sample_random,
)
from activeids.dataset import SynthConfig, encode, synth_generate
from activeids.seeds import derive_seed


@pytest.fixture(scope="module")
def small_rs():
    return synth_generate(
        SynthConfig(n_hosts=10, n_attack_hosts=2, records_per_host=30,
                    n_features=40, separation=2.0),
        seed=5,
    )


@pytest.fixture(scope="module")
def small_m(small_rs):
    return encode(small_rs)


def assert_valid_indices(indices, n):
    indices = np.asarray(indices)
    assert len(np.unique(indices)) == len(indices)
    assert indices.min() >= 0 and indices.max() < n


class TestSampleRandom:
    def test_forty_distinct_in_range(self):
        indices = sample_random(range(1000), 40, seed=1)
        assert len(indices) == 40
        assert_valid_indices(indices, 1000)

    def test_full_size_is_all_indices(self):
        indices = sample_random(range(25), 25, seed=9)
        assert sorted(indices.tolist()) == list(range(25))

    def test_deterministic(self):
        a = sample_random(range(500), 40, seed=3)
        b = sample_random(range(500), 40, seed=3)
        assert np.array_equal(a, b)

    def test_oversize_rejected(self):
        with pytest.raises(SamplingError):
            sample_random(range(10), 11, seed=0)


class TestSampleKMeans:
    def test_exactly_k_one_per_cluster(self, small_m):
        indices = sample_kmeans(small_m, 40, seed=2)
        assert len(indices) == 40
        assert_valid_indices(indices, small_m.rows)

    def test_k_equals_rows(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(15, 3))
        indices = sample_kmeans(X, 15, seed=4)
        assert sorted(indices.tolist()) == list(range(15))

    def test_two_blobs_one_from_each(self, blob_points):
        X, membership = blob_points
        X2 = X[membership < 2]
        m2 = membership[membership < 2]
        for seed in range(5):
            indices = sample_kmeans(X2, 2, seed=seed)
            assert sorted(m2[indices].tolist()) == [0, 1]

    def test_oversize_rejected(self, small_m):
        with pytest.raises(Exception):
            sample_kmeans(small_m.values[:10], 11, seed=0)


class TestSampleKMeansBagging:
    def test_contract_sizes(self, synth_matrix):
        for seed in range(5):
            indices = sample_kmeans_bagging(synth_matrix, (20, 35), (30, 50), seed=seed)
            assert 30 <= len(indices) <= 50
            assert_valid_indices(indices, synth_matrix.rows)
            features, k = bagging_draw(synth_matrix.cols, (20, 35), (30, 50), seed=seed)
            assert 20 <= len(features) <= 35
            assert len(indices) == k

    def test_range_collapse_degenerates_to_kmeans(self, small_m):
        cols = small_m.cols
        collapsed = sample_kmeans_bagging(small_m, (cols, cols), (12, 12), seed=6)
        assert len(collapsed) == 12

    def test_distinct_draws_across_seeds(self, small_m):
        pairs = {
            (len(bagging_draw(small_m.cols, (20, 35), (30, 50), seed=s)[0]),
             bagging_draw(small_m.cols, (20, 35), (30, 50), seed=s)[1])
            for s in range(30)
        }
        assert len(pairs) >= 2

    def test_infeasible_ranges_rejected(self, small_m):
        with pytest.raises(SamplingError):
            bagging_draw(small_m.cols, (20, small_m.cols + 1), (30, 50), seed=0)


class TestOracles:
    def test_simulated_oracle_fills_truth(self, tiny_rs):
        oracle = SimulatedOracle(tiny_rs.labels)
        answered = oracle.answer(OracleQuery((0, 1)))
        assert answered.responses == (0, 1)

    def test_empty_query(self, tiny_rs):
        oracle = SimulatedOracle(tiny_rs.labels)
        assert oracle.answer(OracleQuery(())).responses == ()

    def test_duplicate_indices_rejected(self):
        with pytest.raises(SamplingError):
            OracleQuery((1, 1))

    def test_terminal_oracle_parses_labels(self, tiny_rs):
        inputs = iter(["bogus", "1", "0"])
        output = io.StringIO()
        oracle = TerminalOracle(tiny_rs, input_fn=lambda _: next(inputs),
                                output_fn=lambda s: output.write(s + "\n"))
        answered = oracle.answer(OracleQuery((1, 2)))
        assert answered.responses == (1, 0)
        assert "please answer 0 or 1" in output.getvalue()


class TestRunIteration:
    def test_run_on_synth_fixture(self, synth_rs, synth_matrix):
        oracle = SimulatedOracle(synth_rs.labels)
        result = run_iteration(synth_rs, synth_matrix, KMeansBaggingSampling(),
                               oracle, seed=42)
        assert len(result.predictions) == len(synth_rs)
        assert sum(result.sample_labels) >= 1
        assert 30 <= len(result.sample_indices) <= 50

    def test_strategy_output_sizes(self, synth_rs, synth_matrix):
        oracle = SimulatedOracle(synth_rs.labels)
        for strategy, check in [
            (RandomSampling(), lambda n: n == 40),
            (KMeansSampling(), lambda n: n == 40),
            (KMeansBaggingSampling(), lambda n: 30 <= n <= 50),
        ]:
            result = run_iteration(synth_rs, synth_matrix, strategy, oracle, seed=8)
            assert check(len(result.sample_indices)), strategy.name

    def test_no_attacks_flags_after_retry_cap(self, small_m):
        rs = synth_generate(
            SynthConfig(n_hosts=5, n_attack_hosts=0, records_per_host=20, n_features=40),
            seed=2,
        )
        m = encode(rs)
        oracle = SimulatedOracle(rs.labels)
        result = run_iteration(rs, m, RandomSampling(size=10), oracle,
                               min_attack_labels=1, retry_cap=5, seed=0)
        assert result.degraded
        assert result.attempts == 5
        assert (result.predictions == 0).all()  # constant all-normal model

    def test_zero_min_attacks_single_attempt(self, small_rs, small_m):
        oracle = SimulatedOracle(small_rs.labels)
        result = run_iteration(small_rs, small_m, RandomSampling(size=10), oracle,
                               min_attack_labels=0, seed=1)
        assert result.attempts == 1

    def test_deterministic_under_simulated_oracle(self, small_rs, small_m):
        oracle = SimulatedOracle(small_rs.labels)
        a = run_iteration(small_rs, small_m, KMeansBaggingSampling((10, 20), (5, 15)),
                          oracle, seed=77)
        b = run_iteration(small_rs, small_m, KMeansBaggingSampling((10, 20), (5, 15)),
                          oracle, seed=77)
        assert a.sample_indices == b.sample_indices
        assert a.sample_labels == b.sample_labels
        assert np.array_equal(a.predictions, b.predictions)
        assert a.metrics == b.metrics
        assert a.attempts == b.attempts

    def test_sample_labels_match_ground_truth(self, small_rs, small_m):
        oracle = SimulatedOracle(small_rs.labels)
        result = run_iteration(small_rs, small_m, RandomSampling(size=15), oracle, seed=5)
        for idx, label in zip(result.sample_indices, result.sample_labels):
            assert label == int(small_rs.labels[idx])

    def test_oracle_asked_once_per_index(self, small_rs, small_m):
        asked: list[int] = []

        class CountingOracle(SimulatedOracle):
            def answer(self, query):
                asked.extend(query.indices)
                return super().answer(query)

        oracle = CountingOracle(small_rs.labels)
        result = run_iteration(small_rs, small_m, RandomSampling(size=20), oracle,
                               min_attack_labels=3, retry_cap=50, seed=123)
        assert len(asked) == len(set(asked))
        assert result.labels_requested == len(set(asked))
