"""Random-forest classifier, F1 / percent-increase metrics, and the repeated
stratified-split evaluation harness.

The forest is a standard bagging ensemble of CART trees: every tree trains on
a bootstrap sample, splits minimize Gini impurity, and each node considers a
random feature subset. Everything is seeded through numpy SeedSequence
streams, so a fixed master seed reproduces identical reports regardless of
how the work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .features import PCA, FeatureMatrix


def f1_score(predictions: Sequence, truth: Sequence, positive_class) -> float:
    """Harmonic mean of precision and recall for the positive class.

    Returns 0 when precision + recall is 0. Raises on length mismatch or
    empty input.
    """
    if len(predictions) != len(truth):
        raise ValueError(
            f"got {len(predictions)} predictions for {len(truth)} truth labels"
        )
    if not truth:
        raise ValueError("f1_score needs at least one sample")
    tp = fp = fn = 0
    for p, t in zip(predictions, truth):
        if p == positive_class and t == positive_class:
            tp += 1
        elif p == positive_class:
            fp += 1
        elif t == positive_class:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def percent_increase(f1_model: float, f1_baseline: float) -> float:
    """Relative F1 improvement over a baseline, in percent."""
    if f1_baseline <= 0:
        raise ValueError("percent_increase needs a positive baseline F1")
    return (f1_model - f1_baseline) / f1_baseline * 100.0


@dataclass(frozen=True)
class ForestConfig:
    """Random-forest hyperparameters.

    The defaults (100 trees, unlimited depth, leaf size 1, sqrt features per
    split) are standard; everything is overridable.
    """

    n_trees: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    features_per_split: str = "sqrt"
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.features_per_split not in ("sqrt", "all"):
            raise ValueError("features_per_split must be 'sqrt' or 'all'")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "probs")

    def __init__(self):
        self.feature = None
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.probs = None


class RandomForest:
    """Gini-split CART bagging ensemble, deterministic for a fixed seed."""

    def __init__(self, config: ForestConfig):
        self.config = config
        self.classes_: tuple | None = None
        self._trees: list[_Node] = []

    def fit(self, x: np.ndarray, labels: Sequence) -> "RandomForest":
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] != len(labels):
            raise ValueError("x must be (n_samples, n_features) aligned with labels")
        if x.size and not np.isfinite(x).all():
            raise ValueError("training features contain non-finite values")
        classes = tuple(sorted(set(labels)))
        if len(classes) < 2:
            raise ValueError("training data contains a single class")
        self.classes_ = classes
        code = {c: i for i, c in enumerate(classes)}
        y = np.fromiter((code[v] for v in labels), dtype=np.int64, count=len(labels))
        n = len(y)
        self._trees = []
        for t in range(self.config.n_trees):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=self.config.seed, spawn_key=(t,))
            )
            boot = rng.integers(0, n, size=n)
            self._trees.append(self._grow(x[boot], y[boot], rng))
        return self

    def predict(self, x: np.ndarray) -> list:
        """Soft-vote prediction; argmax ties go to the smallest class label."""
        if self.classes_ is None:
            raise ValueError("predict called before fit")
        x = np.asarray(x, dtype=float)
        votes = np.zeros((x.shape[0], len(self.classes_)))
        for root in self._trees:
            for i in range(x.shape[0]):
                node = root
                row = x[i]
                while node.feature is not None:
                    node = node.left if row[node.feature] <= node.threshold else node.right
                votes[i] += node.probs
        return [self.classes_[int(np.argmax(v))] for v in votes]

    def _grow(self, x: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> _Node:
        n_classes = len(self.classes_)
        n_features = x.shape[1]
        if self.config.features_per_split == "all":
            k = n_features
        else:
            k = max(1, int(math.sqrt(n_features)))
        min_leaf = self.config.min_samples_leaf
        max_depth = self.config.max_depth

        root = _Node()
        # explicit stack instead of recursion: depth can approach n_samples
        work = [(np.arange(len(y)), 0, root)]
        while work:
            idx, depth, node = work.pop()
            counts = np.bincount(y[idx], minlength=n_classes)
            m = len(idx)
            if (
                counts.max() == m
                or m < 2 * min_leaf
                or (max_depth is not None and depth >= max_depth)
            ):
                node.probs = counts / m
                continue
            parent_gini = 1.0 - float(((counts / m) ** 2).sum())
            best = self._best_split(x, y, idx, k, min_leaf, n_classes, rng)
            if best is None or parent_gini - best[0] <= 1e-12:
                node.probs = counts / m
                continue
            _, feature, threshold = best
            mask = x[idx, feature] <= threshold
            node.feature = feature
            node.threshold = threshold
            node.left = _Node()
            node.right = _Node()
            work.append((idx[mask], depth + 1, node.left))
            work.append((idx[~mask], depth + 1, node.right))
        return root

    def _best_split(self, x, y, idx, k, min_leaf, n_classes, rng):
        features = rng.choice(x.shape[1], size=k, replace=False)
        m = len(idx)
        onehot = np.zeros((m, n_classes))
        onehot[np.arange(m), y[idx]] = 1.0
        sizes_left = np.arange(1, m, dtype=float)
        sizes_right = m - sizes_left
        best = None
        for feature in features:
            vals = x[idx, feature]
            order = np.argsort(vals, kind="stable")
            sv = vals[order]
            valid = (
                (sv[1:] > sv[:-1])
                & (sizes_left >= min_leaf)
                & (sizes_right >= min_leaf)
            )
            if not valid.any():
                continue
            cum = np.cumsum(onehot[order], axis=0)
            left = cum[:-1]
            right = cum[-1] - left
            gini_left = 1.0 - ((left / sizes_left[:, None]) ** 2).sum(axis=1)
            gini_right = 1.0 - ((right / sizes_right[:, None]) ** 2).sum(axis=1)
            score = (sizes_left * gini_left + sizes_right * gini_right) / m
            score[~valid] = np.inf
            pos = int(np.argmin(score))
            if best is None or score[pos] < best[0]:
                threshold = (sv[pos] + sv[pos + 1]) / 2.0
                if threshold >= sv[pos + 1]:  # fp rounding collapsed the midpoint
                    threshold = sv[pos]
                best = (float(score[pos]), int(feature), float(threshold))
        return best


@dataclass(frozen=True)
class EvalReport:
    """Mean/std F1 over repeated splits for one (dataset, variant) pair."""

    dataset: str
    variant: str
    mean_f1: float
    std_f1: float
    n_repeats: int
    seed: int
    baseline_variant: str | None = None
    pct_increase: float | None = None

    def with_baseline(self, baseline: "EvalReport") -> "EvalReport":
        return replace(
            self,
            baseline_variant=baseline.variant,
            pct_increase=percent_increase(self.mean_f1, baseline.mean_f1),
        )


def stratified_split(
    labels: np.ndarray,
    train_fraction: float,
    rng: np.random.Generator,
    max_retries: int = 10,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class random split keeping every class on both sides.

    Retries with fresh draws a bounded number of times before raising (which
    only happens when some class has a single member).
    """
    classes = sorted(set(labels))
    for _ in range(max_retries):
        train: list[np.ndarray] = []
        test: list[np.ndarray] = []
        for c in classes:
            idx = np.flatnonzero(labels == c)
            perm = rng.permutation(idx)
            k = int(round(train_fraction * len(idx)))
            train.append(perm[:k])
            test.append(perm[k:])
        train_idx = np.sort(np.concatenate(train))
        test_idx = np.sort(np.concatenate(test))
        train_classes = set(labels[train_idx])
        test_classes = set(labels[test_idx])
        if len(train_classes) == len(classes) and len(test_classes) == len(classes):
            return train_idx, test_idx
    raise ValueError("a class was absent from a split after stratification retries")


def evaluate(
    dataset: FeatureMatrix,
    config: ForestConfig,
    n_repeats: int = 300,
    train_fraction: float = 0.9,
    *,
    pca_dim: int | None = None,
    positive_class: str = "phishing",
    dataset_name: str = "",
    variant: str = "tn",
) -> EvalReport:
    """Repeated stratified-split evaluation of a feature matrix.

    Each repeat draws its own seeded split (stream derived from the master
    seed by repeat index, so repeats are order-independent), optionally fits a
    PCA projection on the training rows only, trains a forest, and scores F1
    on the held-out rows. Reports the mean and the population (ddof=0)
    standard deviation over repeats.
    """
    if n_repeats < 1:
        raise ValueError("n_repeats must be >= 1")
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    labels = np.array(dataset.labels)
    scores = np.zeros(n_repeats)
    for i in range(n_repeats):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=config.seed, spawn_key=(i,))
        )
        train_idx, test_idx = stratified_split(labels, train_fraction, rng)
        x_train = dataset.values[train_idx]
        x_test = dataset.values[test_idx]
        if pca_dim is not None:
            projector = PCA(pca_dim).fit(x_train)
            x_train = projector.transform(x_train)
            x_test = projector.transform(x_test)
        forest_seed = int(rng.integers(2**62))
        forest = RandomForest(replace(config, seed=forest_seed))
        forest.fit(x_train, list(labels[train_idx]))
        predictions = forest.predict(x_test)
        scores[i] = f1_score(predictions, list(labels[test_idx]), positive_class)
    return EvalReport(
        dataset=dataset_name,
        variant=variant,
        mean_f1=float(scores.mean()),
        std_f1=float(scores.std()),
        n_repeats=n_repeats,
        seed=config.seed,
    )
