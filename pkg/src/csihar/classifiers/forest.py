"""Random forest of Gini decision trees, built from scratch.

Each tree trains on a bootstrap resample and considers a random subset of
ceil(sqrt(n_features)) features per split.  Node importance is the weighted
impurity decrease

    importance(j) = W_j * C_j - W_left * C_left - W_right * C_right

with W the fraction of the tree's training rows reaching the node and C the
Gini impurity.  Feature importances sum these terms per feature across all
trees, then normalize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..data import DesignMatrix
from ..errors import DegenerateData, WidthMismatch

_MIN_DECREASE = 1e-12


@dataclass
class TreeNode:
    class_counts: np.ndarray  # rows per label reaching this node
    weighted_samples: float  # W_j
    impurity: float  # C_j (Gini)
    feature_index: int | None = None
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature_index is None


@dataclass
class ForestModel:
    kind: str = field(default="forest", init=False)
    trees: list[TreeNode]
    n_trees: int
    max_depth: int | None
    feature_subset_size: int
    seed: int
    feature_importances: np.ndarray
    label_dictionary: list[str]
    feature_width: int

    def predict(self, rows: np.ndarray) -> list[str]:
        return predict_forest(self, rows)


def _gini(counts: np.ndarray, n: int) -> float:
    p = counts / n
    return float(1.0 - np.dot(p, p))


def _best_split(X, y, idx, counts, parent_gini, feats, n_classes):
    """Scan all candidate thresholds of the feature subset at once.

    Candidate quality is scored in float32 (the winner is re-checked in
    float64 by the caller).  Returns (feature, threshold) or None when no
    threshold separates distinct values.
    """
    n = idx.size
    sub = X[np.ix_(idx, feats)]  # (n, m)
    # unstable sort is fine: prefix counts at run boundaries do not depend on
    # the order of equal values, and equal-value positions are masked out
    order = np.argsort(sub, axis=0)
    xs = np.take_along_axis(sub, order, axis=0)
    ys = y[idx][order]  # (n, m)

    nl = np.arange(1, n, dtype=np.float32)[:, None]
    nr = np.float32(n) - nl
    if n_classes == 2:
        left_ones = np.cumsum(ys, axis=0, dtype=np.int32)[:-1].astype(np.float32)
        p_left = left_ones / nl
        gini_left = 2.0 * p_left * (1.0 - p_left)
        p_right = (np.float32(counts[1]) - left_ones) / nr
        gini_right = 2.0 * p_right * (1.0 - p_right)
    else:
        onehot = ys[:, :, None] == np.arange(n_classes, dtype=ys.dtype)
        left = np.cumsum(onehot, axis=0, dtype=np.int32)[:-1].astype(np.float32)
        gini_left = 1.0 - np.square(left / nl[:, :, None]).sum(axis=2)
        right = counts.astype(np.float32)[None, None, :] - left
        gini_right = 1.0 - np.square(right / nr[:, :, None]).sum(axis=2)
    children = (nl * gini_left + nr * gini_right) / np.float32(n)  # (n-1, m)

    decrease = np.float32(parent_gini) - children
    valid = xs[1:] > xs[:-1]  # only split between distinct values
    decrease = np.where(valid, decrease, -np.inf)

    pos, j = np.unravel_index(np.argmax(decrease), decrease.shape)
    if not np.isfinite(decrease[pos, j]):
        return None
    lo, hi = xs[pos, j], xs[pos + 1, j]
    threshold = 0.5 * (lo + hi)
    if threshold >= hi:  # adjacent floats: keep the boundary below hi
        threshold = lo
    return int(feats[j]), float(threshold)


def _grow_tree(X, y, n_classes, subset_size, max_depth, rng):
    """Build one tree iteratively (no recursion limit on deep noise splits).

    Returns (root, per-feature importance mass of this tree, unnormalized).
    """
    n_total = y.size
    importances = np.zeros(X.shape[1], dtype=np.float64)
    root = None
    # work items: (parent, side, row indices, depth)
    stack: list[tuple[TreeNode | None, str, np.ndarray, int]] = [(None, "", np.arange(n_total), 0)]
    while stack:
        parent, side, idx, depth = stack.pop()
        n = idx.size
        counts = np.bincount(y[idx], minlength=n_classes)
        weight = n / n_total
        impurity = _gini(counts, n)
        node = TreeNode(class_counts=counts, weighted_samples=weight, impurity=impurity)

        can_split = (
            counts.max() < n  # not pure
            and n >= 2
            and (max_depth is None or depth < max_depth)
        )
        if can_split:
            feats = rng.choice(X.shape[1], size=subset_size, replace=False)
            found = _best_split(X, y, idx, counts, impurity, feats, n_classes)
            if found is not None:
                feature, threshold = found
                mask = X[idx, feature] <= threshold
                left_idx, right_idx = idx[mask], idx[~mask]
                # exact float64 impurity decrease of the candidate the scan picked
                left_counts = np.bincount(y[left_idx], minlength=n_classes)
                decrease = impurity - (
                    left_idx.size * _gini(left_counts, left_idx.size)
                    + right_idx.size * _gini(counts - left_counts, right_idx.size)
                ) / n
                if decrease > _MIN_DECREASE:
                    importances[feature] += weight * decrease
                    node.feature_index = feature
                    node.threshold = threshold
                    stack.append((node, "left", left_idx, depth + 1))
                    stack.append((node, "right", right_idx, depth + 1))

        if parent is None:
            root = node
        elif side == "left":
            parent.left = node
        else:
            parent.right = node
    return root, importances


def _build_tree_batch(X, y, n_classes, subset_size, max_depth, seed, tree_indices):
    """Grow a contiguous batch of trees; per-tree seeds depend only on the
    tree index, so any batching produces identical trees."""
    n = y.size
    out = []
    for i in tree_indices:
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        boot = rng.integers(0, n, size=n)
        out.append(_grow_tree(X[boot], y[boot], n_classes, subset_size, max_depth, rng))
    return out


def fit_forest(
    data: DesignMatrix,
    n_trees: int = 100,
    max_depth: int | None = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> ForestModel:
    if data.n_rows == 0:
        raise DegenerateData("cannot fit a forest on zero rows")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    dictionary = data.label_dictionary
    code = {label: i for i, label in enumerate(dictionary)}
    y = np.array([code[label] for label in data.labels], dtype=np.int64)
    # float32 features: sorting dominates the build, and split thresholds
    # derived from float32 values stay exact through serialization
    X = data.rows.astype(np.float32)
    n, d = X.shape
    subset_size = min(d, math.ceil(math.sqrt(d)))
    n_classes = len(dictionary)

    if n_jobs > 1 and n_trees > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = np.array_split(np.arange(n_trees), min(n_jobs, n_trees))
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [
                pool.submit(_build_tree_batch, X, y, n_classes, subset_size, max_depth, seed, c)
                for c in chunks
            ]
            grown = [item for f in futures for item in f.result()]
    else:
        grown = _build_tree_batch(X, y, n_classes, subset_size, max_depth, seed, range(n_trees))

    trees = [root for root, _ in grown]
    importances = np.zeros(d, dtype=np.float64)
    for _, tree_importances in grown:  # fixed tree order: parallel == serial
        importances += tree_importances
    total = importances.sum()
    if total > 0:
        importances /= total

    return ForestModel(
        trees=trees,
        n_trees=n_trees,
        max_depth=max_depth,
        feature_subset_size=subset_size,
        seed=seed,
        feature_importances=importances,
        label_dictionary=dictionary,
        feature_width=d,
    )


def _apply_tree(root: TreeNode, X: np.ndarray, n_classes: int) -> np.ndarray:
    """Leaf class counts for every row, shape (n, n_classes)."""
    out = np.zeros((X.shape[0], n_classes), dtype=np.float64)
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = node.class_counts
            continue
        mask = X[idx, node.feature_index] <= node.threshold
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out


def predict_forest(model: ForestModel, rows: np.ndarray) -> list[str]:
    """Plurality vote over trees; ties go to the label with the higher
    aggregated leaf count, then lexicographically first."""
    rows = np.asarray(rows, dtype=np.float32)  # same precision as training
    if rows.ndim != 2 or rows.shape[1] != model.feature_width:
        raise WidthMismatch(
            f"expected rows of width {model.feature_width}, got {rows.shape}"
        )
    n_classes = len(model.label_dictionary)
    votes = np.zeros((rows.shape[0], n_classes), dtype=np.int64)
    aggregated = np.zeros((rows.shape[0], n_classes), dtype=np.float64)
    for tree in model.trees:
        leaf_counts = _apply_tree(tree, rows, n_classes)
        votes[np.arange(rows.shape[0]), leaf_counts.argmax(axis=1)] += 1
        aggregated += leaf_counts

    top = votes == votes.max(axis=1, keepdims=True)
    agg_masked = np.where(top, aggregated, -1.0)
    winners = agg_masked == agg_masked.max(axis=1, keepdims=True)
    pred = winners.argmax(axis=1)  # first True = lexicographically first label
    return [model.label_dictionary[c] for c in pred]
