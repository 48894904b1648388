"""Interval forest over three per-channel series representations.

Each tree draws its own attribute subset and its own random intervals from
the base values, the first difference and the periodogram of a windowed,
normalized series. Interval features feed an exhaustive-threshold entropy
tree; the ensemble predicts by majority hard vote, so every probability is
votes / n_trees.

Determinism contract: all randomness of tree ``i`` comes from
``rng.substream(config.seed, i)``, with a fixed draw order (attribute subset
first, then per representation in order base, diff, periodogram, and per
interval channel, then length, then start). Fitting with any thread count
therefore yields the identical model.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DrCifConfig, Dataset, NormalizationParams
from .features import N_ATTRIBUTES
from .preprocess import apply_normalization, first_difference, periodogram, to_window
from .rng import substream

__all__ = [
    "REPRESENTATIONS",
    "IntervalSpec",
    "DecisionTree",
    "TreeSpec",
    "DrCifModel",
    "rep_lengths",
    "interval_count",
    "sample_tree_spec",
    "build_feature_matrix",
    "fit_tree",
    "fit",
    "model_to_dict",
    "model_from_dict",
]

REPRESENTATIONS = ("base", "diff", "periodogram")


@dataclass(frozen=True)
class IntervalSpec:
    """One sampled interval: representation, channel, start, length."""

    rep: int
    channel: int
    start: int
    length: int


@dataclass(frozen=True)
class DecisionTree:
    """Flat node arrays; ``feature[i] < 0`` marks node i as a leaf.

    ``counts`` holds training class counts per node; ``votes`` the majority
    class per node with ties resolved to the lowest class index.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray
    votes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]


@dataclass(frozen=True)
class TreeSpec:
    """One ensemble member: attribute subset, intervals, fitted tree."""

    attributes: np.ndarray
    intervals: tuple[IntervalSpec, ...]
    tree: DecisionTree


def rep_lengths(window_len: int) -> tuple[int, int, int]:
    """Lengths of (base, diff, periodogram) for a given window."""
    return window_len, window_len - 1, window_len // 2


def interval_count(rep_len: int, n_channels: int, min_interval_len: int = 3) -> int:
    """Intervals drawn per tree from one representation.

    k = 4 + floor(sqrt(rep_len) * sqrt(n_channels) / 3); 0 when the
    representation is shorter than the minimum interval (it is then skipped).
    """
    if rep_len < min_interval_len:
        return 0
    return 4 + int(math.floor(math.sqrt(rep_len) * math.sqrt(n_channels) / 3.0))


def sample_tree_spec(
    window_len: int, n_channels: int, config: DrCifConfig, tree_index: int
) -> tuple[np.ndarray, tuple[IntervalSpec, ...]]:
    """Draw the attribute subset and intervals for one tree.

    Interval lengths are uniform on [min_interval_len, max(min_interval_len,
    floor(max_interval_frac * rep_len))] and starts uniform over the valid
    positions. The draw order is part of the model contract (see module doc).
    """
    rng = substream(config.seed, tree_index)
    attributes = rng.choice(N_ATTRIBUTES, size=config.n_attributes, replace=False)
    attributes = attributes.astype(np.int64)
    intervals: list[IntervalSpec] = []
    for rep, rep_len in enumerate(rep_lengths(window_len)):
        k = interval_count(rep_len, n_channels, config.min_interval_len)
        if k == 0:
            continue
        max_len = max(
            config.min_interval_len,
            int(math.floor(config.max_interval_frac * rep_len)),
        )
        for _ in range(k):
            channel = int(rng.integers(n_channels))
            length = int(rng.integers(config.min_interval_len, max_len + 1))
            start = int(rng.integers(0, rep_len - length + 1))
            intervals.append(IntervalSpec(rep, channel, start, length))
    if not intervals:
        raise ValueError(
            f"window of length {window_len} leaves no usable representation"
        )
    return attributes, tuple(intervals)


def build_feature_matrix(
    reps: tuple[np.ndarray, np.ndarray, np.ndarray],
    attributes: np.ndarray,
    intervals: tuple[IntervalSpec, ...],
) -> np.ndarray:
    """Evaluate every (interval, attribute) pair for every series.

    Column order: intervals in draw order (representations already come in
    base, diff, periodogram order), attributes in subset order within each
    interval, i.e. column j * n_attributes + f.
    """
    n = reps[0].shape[0]
    a = attributes.shape[0]
    x = np.empty((n, a * len(intervals)))
    block = np.empty((n, a))
    for j, iv in enumerate(intervals):
        segments = np.ascontiguousarray(
            reps[iv.rep][:, iv.channel, iv.start : iv.start + iv.length]
        )
        _kernels.eval_block(segments, attributes, block)
        x[:, j * a : (j + 1) * a] = block
    return x


def fit_tree(x: np.ndarray, y: np.ndarray, n_classes: int) -> DecisionTree:
    """Grow an entropy tree with exhaustive midpoint thresholds.

    Split ties resolve to the lowest feature index, then the lowest
    threshold. A node becomes a leaf when pure, when fewer than 2 rows
    remain, or when no feature has two distinct values; an impure node with a
    valid split is always split, even at zero gain, so e.g. an XOR-style
    dataset is still fit exactly.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    counts: list[np.ndarray] = []

    def new_node(node_counts: np.ndarray) -> int:
        node_id = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(node_counts)
        return node_id

    def grow(rows: np.ndarray) -> int:
        node_counts = np.bincount(y[rows], minlength=n_classes)
        node_id = new_node(node_counts)
        if rows.shape[0] < 2 or int(np.count_nonzero(node_counts)) <= 1:
            return node_id
        f, thr, _gain = _kernels.best_split(x[rows], y[rows], n_classes)
        if f < 0:
            return node_id
        mask = x[rows, f] <= thr
        feature[node_id] = int(f)
        threshold[node_id] = float(thr)
        left[node_id] = grow(rows[mask])
        right[node_id] = grow(rows[~mask])
        return node_id

    grow(np.arange(x.shape[0]))
    counts_arr = np.array(counts, dtype=np.int64)
    return DecisionTree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        counts=counts_arr,
        votes=np.argmax(counts_arr, axis=1).astype(np.int32),
    )


def _series_reps(prepared: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # prepared: normalized (n_channels, window_len) values
    return prepared, first_difference(prepared), periodogram(prepared)


def _stack_reps(
    prepared: list[np.ndarray],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    base = np.stack(prepared)
    diff = np.stack([first_difference(p) for p in prepared])
    per = np.stack([periodogram(p) for p in prepared])
    return base, diff, per


@dataclass(frozen=True)
class DrCifModel:
    """A fitted forest for one window length, self-contained for prediction."""

    config: DrCifConfig
    classes: tuple[str, ...]
    channel_names: tuple[str, ...]
    window_len: int
    norm: NormalizationParams
    trees: tuple[TreeSpec, ...]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def prepare(self, values: np.ndarray) -> np.ndarray:
        """Window and normalize raw (n_channels, length) values."""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != len(self.channel_names):
            raise ValueError(
                f"expected (n_channels={len(self.channel_names)}, length) "
                f"values, got shape {values.shape}"
            )
        return apply_normalization(to_window(values, self.window_len), self.norm)

    def vote_counts(self, values: np.ndarray) -> np.ndarray:
        """Per-class tree votes for raw (n_channels, length) values."""
        return self.vote_counts_prepared(self.prepare(values))

    def vote_counts_prepared(self, prepared: np.ndarray) -> np.ndarray:
        """Per-class tree votes for already windowed+normalized values."""
        if prepared.shape != (len(self.channel_names), self.window_len):
            raise ValueError(
                f"prepared values must have shape "
                f"({len(self.channel_names)}, {self.window_len})"
            )
        reps = _series_reps(np.ascontiguousarray(prepared, dtype=np.float64))
        votes = np.zeros(self.n_classes, dtype=np.int64)
        for spec in self.trees:
            votes[_tree_vote(spec, reps)] += 1
        return votes

    def predict_proba(self, values: np.ndarray) -> np.ndarray:
        """Vote shares per class; entries are multiples of 1 / n_trees."""
        return self.vote_counts(values) / self.config.n_trees

    def predict_proba_prepared(self, prepared: np.ndarray) -> np.ndarray:
        return self.vote_counts_prepared(prepared) / self.config.n_trees

    def predict(self, values: np.ndarray) -> str:
        """Predicted class name; probability ties go to the lowest index."""
        return self.classes[int(np.argmax(self.predict_proba(values)))]


def _tree_vote(
    spec: TreeSpec, reps: tuple[np.ndarray, np.ndarray, np.ndarray]
) -> int:
    # walk the tree, evaluating only the attributes on the path
    tree = spec.tree
    a = spec.attributes.shape[0]
    node = 0
    while tree.feature[node] >= 0:
        f = int(tree.feature[node])
        iv = spec.intervals[f // a]
        attr_id = int(spec.attributes[f % a])
        segment = reps[iv.rep][iv.channel, iv.start : iv.start + iv.length]
        value = _kernels.eval_attr(segment, attr_id)
        node = int(tree.left[node]) if value <= tree.threshold[node] else int(
            tree.right[node]
        )
    return int(tree.votes[node])


def _fit_trees(
    reps: tuple[np.ndarray, np.ndarray, np.ndarray],
    y: np.ndarray,
    n_classes: int,
    n_channels: int,
    window_len: int,
    config: DrCifConfig,
    n_jobs: int,
) -> tuple[TreeSpec, ...]:
    def fit_one(tree_index: int) -> TreeSpec:
        attributes, intervals = sample_tree_spec(
            window_len, n_channels, config, tree_index
        )
        x = build_feature_matrix(reps, attributes, intervals)
        tree = fit_tree(x, y, n_classes)
        return TreeSpec(attributes=attributes, intervals=intervals, tree=tree)

    indices = range(config.n_trees)
    if n_jobs <= 1:
        return tuple(fit_one(i) for i in indices)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return tuple(pool.map(fit_one, indices))


def fit_values(
    values_list: list[np.ndarray],
    labels: list[str],
    classes: tuple[str, ...],
    channel_names: tuple[str, ...],
    norm: NormalizationParams,
    window_len: int,
    config: DrCifConfig,
    n_jobs: int = 1,
) -> DrCifModel:
    """Fit a forest on explicit raw series values (used by sweeps and LOO)."""
    if not values_list:
        raise ValueError("cannot fit on an empty training set")
    class_index = {c: i for i, c in enumerate(classes)}
    y = np.array([class_index[lbl] for lbl in labels], dtype=np.int64)
    prepared = [
        apply_normalization(to_window(v, window_len), norm) for v in values_list
    ]
    reps = _stack_reps(prepared)
    trees = _fit_trees(
        reps, y, len(classes), len(channel_names), window_len, config, n_jobs
    )
    return DrCifModel(
        config=config,
        classes=tuple(classes),
        channel_names=tuple(channel_names),
        window_len=window_len,
        norm=norm,
        trees=trees,
    )


def fit(
    dataset: Dataset, window_len: int, config: DrCifConfig, n_jobs: int = 1
) -> DrCifModel:
    """Fit a forest on the dataset's training split at one window length."""
    train = dataset.train_series()
    return fit_values(
        [s.values for s in train],
        [s.label for s in train],
        dataset.classes,
        dataset.channel_names,
        dataset.norm,
        window_len,
        config,
        n_jobs=n_jobs,
    )


# ---------------------------------------------------------------------------
# serialization

MODEL_FORMAT = "drcif-model"
MODEL_VERSION = 1


def _tree_nodes_to_list(tree: DecisionTree) -> list:
    nodes = []
    for i in range(tree.n_nodes):
        if tree.feature[i] < 0:
            nodes.append({"counts": [int(c) for c in tree.counts[i]]})
        else:
            nodes.append(
                {
                    "split": [
                        int(tree.feature[i]),
                        float(tree.threshold[i]),
                        int(tree.left[i]),
                        int(tree.right[i]),
                    ]
                }
            )
    return nodes


def _tree_nodes_from_list(nodes: list, n_classes: int) -> DecisionTree:
    n = len(nodes)
    feature = np.full(n, -1, dtype=np.int32)
    threshold = np.zeros(n, dtype=np.float64)
    left = np.full(n, -1, dtype=np.int32)
    right = np.full(n, -1, dtype=np.int32)
    counts = np.zeros((n, n_classes), dtype=np.int64)
    for i, node in enumerate(nodes):
        if "split" in node:
            f, thr, lo, hi = node["split"]
            feature[i] = f
            threshold[i] = thr
            left[i] = lo
            right[i] = hi
        else:
            counts[i] = node["counts"]
    return DecisionTree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        counts=counts,
        votes=np.argmax(counts, axis=1).astype(np.int32),
    )


def model_to_dict(model: DrCifModel) -> dict:
    """Structured, versioned form of a model; stable field order."""
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "window_len": model.window_len,
        "classes": list(model.classes),
        "channels": list(model.channel_names),
        "config": {
            "n_trees": model.config.n_trees,
            "n_attributes": model.config.n_attributes,
            "min_interval_len": model.config.min_interval_len,
            "max_interval_frac": model.config.max_interval_frac,
            "seed": model.config.seed,
        },
        "norm": {
            "mins": [float(v) for v in model.norm.mins],
            "maxs": [float(v) for v in model.norm.maxs],
        },
        "trees": [
            {
                "attributes": [int(v) for v in spec.attributes],
                "intervals": [
                    [iv.rep, iv.channel, iv.start, iv.length]
                    for iv in spec.intervals
                ],
                "nodes": _tree_nodes_to_list(spec.tree),
            }
            for spec in model.trees
        ],
    }


def model_from_dict(payload: dict) -> DrCifModel:
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError("not a serialized forest model")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    config = DrCifConfig(**payload["config"])
    classes = tuple(payload["classes"])
    trees = tuple(
        TreeSpec(
            attributes=np.array(entry["attributes"], dtype=np.int64),
            intervals=tuple(IntervalSpec(*iv) for iv in entry["intervals"]),
            tree=_tree_nodes_from_list(entry["nodes"], len(classes)),
        )
        for entry in payload["trees"]
    )
    return DrCifModel(
        config=config,
        classes=classes,
        channel_names=tuple(payload["channels"]),
        window_len=int(payload["window_len"]),
        norm=NormalizationParams(
            mins=np.array(payload["norm"]["mins"]),
            maxs=np.array(payload["norm"]["maxs"]),
        ),
        trees=trees,
    )
