"""Query sampling strategies, oracles, and the per-run learning iteration.

One iteration: draw a sample with the configured strategy, ask the oracle
for labels, redraw until the labeled sample contains the minimum number of
attack labels (bounded by a retry cap), then train a forest on the labeled
sample and classify the entire dataset.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from . import forest
from .clustering import kmeans_fit
from .evaluation import ConfusionMatrix, confusion
from .seeds import derive_seed


class SamplingError(ValueError):
    pass


class OracleTimeoutError(TimeoutError):
    """Raised when a human oracle does not answer in time; carries the
    labels collected so far."""

    def __init__(self, message: str, partial: dict[int, int]):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class RandomSampling:
    size: int = 40
    name: str = field(default="random", init=False)


@dataclass(frozen=True)
class KMeansSampling:
    k: int = 40
    name: str = field(default="kmeans", init=False)


@dataclass(frozen=True)
class KMeansBaggingSampling:
    feature_range: tuple[int, int] = (20, 35)
    cluster_range: tuple[int, int] = (30, 50)
    name: str = field(default="kmeans_bagging", init=False)


SamplingStrategy = RandomSampling | KMeansSampling | KMeansBaggingSampling

STRATEGIES = {
    "random": RandomSampling,
    "kmeans": KMeansSampling,
    "kmeans_bagging": KMeansBaggingSampling,
}


@dataclass(frozen=True)
class OracleQuery:
    indices: tuple[int, ...]
    responses: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise SamplingError("query indices must be distinct")
        if self.responses is not None and len(self.responses) != len(self.indices):
            raise SamplingError("responses must cover exactly the queried indices")


class Oracle(ABC):
    """Supplies ground-truth labels for queried record indices."""

    @abstractmethod
    def answer(self, query: OracleQuery) -> OracleQuery:
        ...


class SimulatedOracle(Oracle):
    """Answers from the dataset's ground truth; always correct."""

    def __init__(self, labels):
        self.labels = np.asarray(labels, dtype=np.int8)

    def answer(self, query: OracleQuery) -> OracleQuery:
        for i in query.indices:
            if not 0 <= i < len(self.labels):
                raise SamplingError(f"query index {i} out of range")
        return OracleQuery(query.indices, tuple(int(self.labels[i]) for i in query.indices))


class TerminalOracle(Oracle):
    """Prompts a human at the terminal for each queried record."""

    def __init__(self, rs, input_fn=None, output_fn=print):
        self.rs = rs
        self.input_fn = input_fn if input_fn is not None else (lambda prompt: input(prompt))
        self.output_fn = output_fn

    def answer(self, query: OracleQuery) -> OracleQuery:
        responses = []
        for i in query.indices:
            record = self.rs.record(i)
            names = [name for name, _ in self.rs.schema.feature_columns]
            self.output_fn(f"--- record {i} (srcip {record.srcip}) ---")
            for name, value in zip(names, record.features):
                self.output_fn(f"  {name}: {value}")
            while True:
                answer = self.input_fn(f"label record {i} [0=normal, 1=attack]: ").strip()
                if answer in ("0", "1"):
                    responses.append(int(answer))
                    break
                self.output_fn("please answer 0 or 1")
        return OracleQuery(query.indices, tuple(responses))


def sample_random(rs, size: int, seed: int) -> np.ndarray:
    """`size` distinct uniformly-chosen record indices."""
    n = len(rs)
    if size > n:
        raise SamplingError(f"sample size {size} exceeds dataset size {n}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=size, replace=False))


def _one_per_cluster(clustering, rng: np.random.Generator) -> np.ndarray:
    picks = []
    for c in range(clustering.k):
        members = clustering.members(c)
        picks.append(int(members[rng.integers(len(members))]))
    return np.sort(np.asarray(picks, dtype=np.int64))


def sample_kmeans(m, k: int, seed: int) -> np.ndarray:
    """Cluster all encoded features into k groups and pick one member per
    cluster uniformly; returns exactly k indices."""
    clustering = kmeans_fit(m, k, seed=derive_seed(seed, "fit"))
    rng = np.random.default_rng(derive_seed(seed, "pick"))
    return _one_per_cluster(clustering, rng)


def bagging_draw(n_cols: int, feature_range, cluster_range, seed: int):
    """The bagging randomness: a feature subset and a cluster count.

    Exposed separately so run manifests can record what each run drew.
    """
    f_lo, f_hi = feature_range
    k_lo, k_hi = cluster_range
    if not (1 <= f_lo <= f_hi <= n_cols):
        raise SamplingError(f"feature range [{f_lo}, {f_hi}] infeasible for {n_cols} columns")
    if not (1 <= k_lo <= k_hi):
        raise SamplingError(f"cluster range [{k_lo}, {k_hi}] infeasible")
    rng = np.random.default_rng(derive_seed(seed, "bagging"))
    n_features = int(rng.integers(f_lo, f_hi + 1))
    features = np.sort(rng.choice(n_cols, size=n_features, replace=False))
    k = int(rng.integers(k_lo, k_hi + 1))
    return features, k


def sample_kmeans_bagging(m, feature_range, cluster_range, seed: int) -> np.ndarray:
    """Project onto a random feature subset, cluster with a random k, and
    pick one member per cluster."""
    values = m.values if hasattr(m, "values") else np.asarray(m)
    features, k = bagging_draw(values.shape[1], feature_range, cluster_range, seed)
    if k > values.shape[0]:
        raise SamplingError(f"cluster count {k} exceeds row count {values.shape[0]}")
    projected = np.ascontiguousarray(values[:, features])
    clustering = kmeans_fit(projected, k, seed=derive_seed(seed, "fit"))
    rng = np.random.default_rng(derive_seed(seed, "pick"))
    return _one_per_cluster(clustering, rng)


def draw_sample(m, strategy: SamplingStrategy, seed: int):
    """Dispatch on strategy; returns (indices, info dict for the manifest)."""
    if isinstance(strategy, RandomSampling):
        n = m.values.shape[0] if hasattr(m, "values") else np.asarray(m).shape[0]
        indices = sample_random(range(n), strategy.size, seed)
        return indices, {}
    if isinstance(strategy, KMeansSampling):
        return sample_kmeans(m, strategy.k, seed), {"k": strategy.k}
    if isinstance(strategy, KMeansBaggingSampling):
        values = m.values if hasattr(m, "values") else np.asarray(m)
        features, k = bagging_draw(values.shape[1], strategy.feature_range,
                                   strategy.cluster_range, seed)
        indices = sample_kmeans_bagging(m, strategy.feature_range, strategy.cluster_range, seed)
        return indices, {"k": k, "n_features": len(features),
                         "features": features.tolist()}
    raise SamplingError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class RunResult:
    """One active-learning iteration: the accepted sample, the trained
    model's predictions over all records, and the resulting metrics."""

    strategy: str
    sample_indices: tuple[int, ...]
    sample_labels: tuple[int, ...]
    predictions: np.ndarray
    metrics: ConfusionMatrix
    attempts: int
    degraded: bool
    labels_requested: int
    sample_info: dict
    seed: int
    elapsed: float


def run_iteration(rs, m, strategy: SamplingStrategy, oracle: Oracle,
                  min_attack_labels: int = 1, retry_cap: int = 100, seed: int = 0,
                  forest_params: forest.ForestParams = forest.ForestParams()) -> RunResult:
    """Sample, query, retry until enough attack labels, train, classify.

    Oracle responses are cached by record index within the run, so a
    retried sample never asks twice for the same record. If the retry cap
    is exhausted the result is flagged degraded rather than aborting.
    """
    start = time.perf_counter()
    cache: dict[int, int] = {}
    attempts = 0
    while True:
        attempts += 1
        indices, info = draw_sample(m, strategy, derive_seed(seed, "attempt", attempts))
        unknown = tuple(int(i) for i in indices if int(i) not in cache)
        if unknown:
            answered = oracle.answer(OracleQuery(unknown))
            cache.update(zip(answered.indices, answered.responses))
        labels = tuple(cache[int(i)] for i in indices)
        if sum(labels) >= min_attack_labels:
            degraded = False
            break
        if attempts >= retry_cap:
            degraded = True
            break

    model = forest.train(
        (m.values if hasattr(m, "values") else np.asarray(m))[indices],
        labels,
        forest_params,
        seed=derive_seed(seed, "forest"),
    )
    predictions = forest.predict(model, m)
    metrics = confusion(predictions, rs.labels)
    return RunResult(
        strategy=strategy.name,
        sample_indices=tuple(int(i) for i in indices),
        sample_labels=labels,
        predictions=predictions,
        metrics=metrics,
        attempts=attempts,
        degraded=degraded,
        labels_requested=len(cache),
        sample_info=info,
        seed=seed,
        elapsed=time.perf_counter() - start,
    )
