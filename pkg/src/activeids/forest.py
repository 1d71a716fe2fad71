"""From-scratch Random Forest binary classifier.

Trees split on Gini impurity decrease with midpoint thresholds between
consecutive distinct feature values. Each tree trains on a bootstrap
resample and considers a random feature subset per split. Prediction is a
majority vote over trees; ties go to class 0 (a tie is not evidence of
attack).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .kernels import forest_votes
from .seeds import derive_seed


class ForestError(ValueError):
    pass


def gini(counts) -> float:
    """Gini impurity 1 - sum((c_i/n)^2) of a two-class count vector."""
    counts = np.asarray(counts, dtype=np.float64)
    if (counts < 0).any():
        raise ForestError("negative class counts")
    total = counts.sum()
    if total == 0:
        raise ForestError("all-zero class counts")
    frac = counts / total
    return float(1.0 - (frac * frac).sum())


@dataclass(frozen=True)
class TreeNode:
    """Split node (feature, threshold, children) or leaf (klass, counts)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    klass: int = 0
    counts: tuple[int, int] = (0, 0)

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    # None means ceil(sqrt(cols)), resolved at train time.
    features_per_split: int | None = None
    # Test hook: disabling the bootstrap trains every tree on the full sample.
    bootstrap: bool = True


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]
    params: ForestParams
    seed: int
    n_features: int
    # Set when training saw a single class; the model is constant.
    single_class: bool = False
    _flat: "_FlatForest | None" = field(default=None, compare=False, repr=False)


class _FlatForest:
    """Array form of the trees for the prediction kernels."""

    def __init__(self, trees):
        feat: list[int] = []
        thresh: list[float] = []
        left: list[int] = []
        right: list[int] = []
        leaf: list[int] = []
        roots: list[int] = []

        def emit(node: TreeNode) -> int:
            idx = len(feat)
            feat.append(node.feature)
            thresh.append(node.threshold)
            left.append(-1)
            right.append(-1)
            leaf.append(node.klass)
            if not node.is_leaf:
                left[idx] = emit(node.left)
                right[idx] = emit(node.right)
            return idx

        for tree in trees:
            roots.append(emit(tree))
        self.feat = np.asarray(feat, dtype=np.int32)
        self.thresh = np.asarray(thresh, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.leaf = np.asarray(leaf, dtype=np.int8)
        self.roots = np.asarray(roots, dtype=np.int32)


def _leaf(y: np.ndarray) -> TreeNode:
    ones = int(y.sum())
    zeros = int(len(y) - ones)
    return TreeNode(klass=1 if ones > zeros else 0, counts=(zeros, ones))


def _best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray):
    """Best (feature, threshold) by Gini decrease over midpoint candidates.

    Returns None when no candidate improves on the parent impurity.
    Deterministic: features scanned in the given order, thresholds in
    increasing order, strict improvement required.
    """
    n = len(y)
    parent = gini(np.bincount(y, minlength=2))
    total_ones = int(y.sum())
    best = None
    best_gain = 0.0
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        distinct = np.flatnonzero(xs[1:] > xs[:-1]) + 1
        if len(distinct) == 0:
            continue
        ones_prefix = np.cumsum(ys)
        n_left = distinct
        ones_left = ones_prefix[distinct - 1]
        zeros_left = n_left - ones_left
        n_right = n - n_left
        ones_right = total_ones - ones_left
        zeros_right = n_right - ones_right

        gini_left = 1.0 - ((ones_left / n_left) ** 2 + (zeros_left / n_left) ** 2)
        gini_right = 1.0 - ((ones_right / n_right) ** 2 + (zeros_right / n_right) ** 2)
        weighted = (n_left * gini_left + n_right * gini_right) / n
        gains = parent - weighted
        i = int(np.argmax(gains))
        if gains[i] > best_gain + 1e-12:
            cut = distinct[i]
            best_gain = float(gains[i])
            best = (int(f), float((xs[cut - 1] + xs[cut]) / 2.0))
    return best


def _grow(X, y, rng, params: ForestParams, n_sub: int, depth: int) -> TreeNode:
    if len(np.unique(y)) == 1 or len(y) < params.min_samples_split:
        return _leaf(y)
    if params.max_depth is not None and depth >= params.max_depth:
        return _leaf(y)
    n_features = X.shape[1]
    if n_sub >= n_features:
        features = np.arange(n_features)
    else:
        features = rng.choice(n_features, size=n_sub, replace=False)
    split = _best_split(X, y, features)
    if split is None:
        return _leaf(y)
    f, threshold = split
    mask = X[:, f] <= threshold
    return TreeNode(
        feature=f,
        threshold=threshold,
        left=_grow(X[mask], y[mask], rng, params, n_sub, depth + 1),
        right=_grow(X[~mask], y[~mask], rng, params, n_sub, depth + 1),
        counts=(int((y == 0).sum()), int((y == 1).sum())),
    )


def train(samples, labels, params: ForestParams = ForestParams(), seed: int = 0) -> ForestModel:
    """Train a forest on the labeled sample; deterministic given the seed."""
    X = np.ascontiguousarray(samples, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int8)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ForestError("empty or malformed training sample")
    if len(y) != X.shape[0]:
        raise ForestError("labels not aligned to samples")
    if not np.isin(y, (0, 1)).all():
        raise ForestError("labels must be 0 or 1")

    single_class = len(np.unique(y)) == 1
    n_sub = params.features_per_split
    if n_sub is None:
        n_sub = int(np.ceil(np.sqrt(X.shape[1])))

    trees = []
    n = X.shape[0]
    for t in range(params.n_trees):
        rng = np.random.default_rng(derive_seed(seed, "tree", t))
        if params.bootstrap:
            idx = rng.integers(0, n, size=n)
            trees.append(_grow(X[idx], y[idx], rng, params, n_sub, depth=0))
        else:
            trees.append(_grow(X, y, rng, params, n_sub, depth=0))

    trees = tuple(trees)
    return ForestModel(
        trees=trees,
        params=params,
        seed=seed,
        n_features=X.shape[1],
        single_class=single_class,
        _flat=_FlatForest(trees),
    )


def _flat(model: ForestModel) -> _FlatForest:
    return model._flat if model._flat is not None else _FlatForest(model.trees)


def tree_votes(model: ForestModel, m) -> np.ndarray:
    """Per-row count of trees voting attack (exposed for vote-consistency tests)."""
    X = m.values if hasattr(m, "values") else m
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[1] != model.n_features:
        raise ForestError(f"expected {model.n_features} feature columns, got {X.shape[1]}")
    flat = _flat(model)
    return forest_votes(flat.feat, flat.thresh, flat.left, flat.right, flat.leaf,
                        flat.roots, X)


def predict(model: ForestModel, m) -> np.ndarray:
    """Majority vote over trees per row; ties predict 0 (normal)."""
    votes = tree_votes(model, m)
    return (2 * votes > len(model.trees)).astype(np.int8)


def _node_to_obj(node: TreeNode):
    if node.is_leaf:
        return {"class": node.klass, "counts": list(node.counts)}
    return {
        "feature": node.feature,
        # float hex preserves the threshold bit-exactly
        "threshold": node.threshold.hex(),
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
        "counts": list(node.counts),
    }


def _node_from_obj(obj) -> TreeNode:
    if "feature" not in obj:
        return TreeNode(klass=int(obj["class"]), counts=tuple(obj["counts"]))
    return TreeNode(
        feature=int(obj["feature"]),
        threshold=float.fromhex(obj["threshold"]),
        left=_node_from_obj(obj["left"]),
        right=_node_from_obj(obj["right"]),
        counts=tuple(obj["counts"]),
    )


def save_model(model: ForestModel, path) -> None:
    """Serialize the forest (nested JSON, thresholds at full precision)."""
    obj = {
        "params": {
            "n_trees": model.params.n_trees,
            "max_depth": model.params.max_depth,
            "min_samples_split": model.params.min_samples_split,
            "features_per_split": model.params.features_per_split,
            "bootstrap": model.params.bootstrap,
        },
        "seed": model.seed,
        "n_features": model.n_features,
        "single_class": model.single_class,
        "trees": [_node_to_obj(t) for t in model.trees],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def load_model(path) -> ForestModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    trees = tuple(_node_from_obj(t) for t in obj["trees"])
    return ForestModel(
        trees=trees,
        params=ForestParams(**obj["params"]),
        seed=obj["seed"],
        n_features=obj["n_features"],
        single_class=obj["single_class"],
        _flat=_FlatForest(trees),
    )
