"""Core domain types for multivariate time-series classification.

A dataset is a collection of variable-length multivariate series, each tagged
with a class label and a group id (used for leave-one-group-out evaluation).
Class order is pinned to lexicographic order over class names so that every
derived artifact (probability vectors, confusion matrices) has deterministic
axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChannelSpec",
    "MultivariateSeries",
    "NormalizationParams",
    "Dataset",
    "DrCifConfig",
    "stratified_split",
]


@dataclass(frozen=True)
class ChannelSpec:
    """A named input channel at a fixed position in the value matrix."""

    index: int
    name: str


@dataclass(frozen=True)
class MultivariateSeries:
    """One labelled series with values of shape (n_channels, length).

    Parameters
    ----------
    series_id : str
        Unique id within a dataset.
    group_id : str
        Group tag, e.g. a pseudo-user id. Never used as a feature.
    label : str
        Class name.
    values : np.ndarray
        Float matrix of shape (n_channels, length). Must be finite.
    """

    series_id: str
    group_id: str
    label: str
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(
                f"series {self.series_id!r}: values must be 2-D "
                f"(channels, time), got shape {values.shape}"
            )
        if values.shape[1] < 1:
            raise ValueError(f"series {self.series_id!r}: empty series")
        if not np.all(np.isfinite(values)):
            ch, t = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(
                f"series {self.series_id!r}: non-finite value at "
                f"channel {ch}, time index {t}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class NormalizationParams:
    """Per-channel (min, max) scaling parameters.

    Fitted on the training split only. A constant channel is stored as
    (min, min + 1) so that scaling maps it to 0 instead of dividing by zero.
    """

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self) -> None:
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins and maxs must be 1-D arrays of equal length")
        if np.any(maxs <= mins):
            raise ValueError("each channel must satisfy max > min")
        mins.setflags(write=False)
        maxs.setflags(write=False)
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def n_channels(self) -> int:
        return self.mins.shape[0]

    @classmethod
    def fit(cls, series: list[MultivariateSeries]) -> "NormalizationParams":
        """Fit per-channel min/max over all time steps of the given series."""
        if not series:
            raise ValueError("cannot fit normalization on an empty series list")
        n_channels = series[0].n_channels
        mins = np.full(n_channels, np.inf)
        maxs = np.full(n_channels, -np.inf)
        for s in series:
            if s.n_channels != n_channels:
                raise ValueError(
                    f"series {s.series_id!r} has {s.n_channels} channels, "
                    f"expected {n_channels}"
                )
            np.minimum(mins, s.values.min(axis=1), out=mins)
            np.maximum(maxs, s.values.max(axis=1), out=maxs)
        constant = maxs <= mins
        maxs[constant] = mins[constant] + 1.0
        return cls(mins=mins, maxs=maxs)


@dataclass(frozen=True)
class Dataset:
    """An immutable labelled collection of multivariate series.

    Invariants enforced at construction:

    * every series has exactly ``len(channels)`` channels;
    * every label appears in ``classes``;
    * ``classes`` is lexicographically sorted;
    * ``split`` assigns every series id to ``"train"`` or ``"test"``;
    * ``norm`` is fitted from the training split only.
    """

    dataset_id: str
    channels: tuple[ChannelSpec, ...]
    classes: tuple[str, ...]
    series: tuple[MultivariateSeries, ...]
    split: dict[str, str] = field(default_factory=dict)
    norm: NormalizationParams | None = None

    def __post_init__(self) -> None:
        if list(self.classes) != sorted(self.classes):
            raise ValueError("classes must be lexicographically sorted")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("duplicate class names")
        class_set = set(self.classes)
        seen_ids: set[str] = set()
        for s in self.series:
            if s.series_id in seen_ids:
                raise ValueError(f"duplicate series id {s.series_id!r}")
            seen_ids.add(s.series_id)
            if s.n_channels != len(self.channels):
                raise ValueError(
                    f"series {s.series_id!r} has {s.n_channels} channels, "
                    f"dataset declares {len(self.channels)}"
                )
            if s.label not in class_set:
                raise ValueError(
                    f"series {s.series_id!r} has unknown label {s.label!r}"
                )
        split = dict(self.split) if self.split else {s.series_id: "train" for s in self.series}
        for sid, tag in split.items():
            if sid not in seen_ids:
                raise ValueError(f"split references unknown series id {sid!r}")
            if tag not in ("train", "test"):
                raise ValueError(f"split tag for {sid!r} must be 'train' or 'test'")
        missing = seen_ids - set(split)
        if missing:
            raise ValueError(f"split does not cover series: {sorted(missing)}")
        object.__setattr__(self, "split", split)
        norm = self.norm
        if norm is None:
            norm = NormalizationParams.fit(
                [s for s in self.series if split[s.series_id] == "train"]
            )
        if norm.n_channels != len(self.channels):
            raise ValueError("normalization channel count does not match dataset")
        object.__setattr__(self, "norm", norm)

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def channel_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.channels)

    def class_index(self, label: str) -> int:
        return self.classes.index(label)

    def train_series(self) -> list[MultivariateSeries]:
        return [s for s in self.series if self.split[s.series_id] == "train"]

    def test_series(self) -> list[MultivariateSeries]:
        return [s for s in self.series if self.split[s.series_id] == "test"]

    def series_by_id(self, series_id: str) -> MultivariateSeries:
        for s in self.series:
            if s.series_id == series_id:
                return s
        raise KeyError(series_id)

    def max_length(self) -> int:
        return max(s.length for s in self.series)

    def group_ids(self) -> tuple[str, ...]:
        return tuple(sorted({s.group_id for s in self.series}))


@dataclass(frozen=True)
class DrCifConfig:
    """Forest configuration.

    Parameters
    ----------
    n_trees : int
        Ensemble size.
    n_attributes : int
        Attributes drawn per tree, without replacement, from the pool of 29.
    min_interval_len : int
        Shortest admissible interval, also the shortest usable representation.
    max_interval_frac : float
        Interval length is capped at
        max(min_interval_len, floor(max_interval_frac * rep_length)).
    seed : int
        Root seed; all per-tree randomness is derived from (seed, tree_index).
    """

    n_trees: int = 200
    n_attributes: int = 10
    min_interval_len: int = 3
    max_interval_frac: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 1 <= self.n_attributes <= 29:
            raise ValueError("n_attributes must be in 1..29")
        if self.min_interval_len < 3:
            raise ValueError("min_interval_len must be >= 3")
        if not 0.0 < self.max_interval_frac <= 1.0:
            raise ValueError("max_interval_frac must be in (0, 1]")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(dataset: Dataset, test_frac: float, seed: int) -> Dataset:
    """Assign train/test tags class by class with a seeded shuffle.

    For each class (processed in lexicographic order) the members are shuffled
    with a generator seeded from ``seed`` and the first
    ``round(test_frac * class_count)`` become test series, clamped so every
    class keeps at least one training series. Deterministic for fixed inputs.

    Parameters
    ----------
    dataset : Dataset
    test_frac : float
        Must satisfy 0 < test_frac < 1.
    seed : int

    Returns
    -------
    Dataset
        A new dataset with a fresh split and normalization refitted on the
        new training split.
    """
    if not 0.0 < test_frac < 1.0:
        raise ValueError("test_frac must be in (0, 1)")
    members: dict[str, list[str]] = {c: [] for c in dataset.classes}
    for s in dataset.series:
        members[s.label].append(s.series_id)
    for label, ids in members.items():
        if len(ids) < 2:
            raise ValueError(
                f"class {label!r} has {len(ids)} series, need at least 2 to split"
            )
    rng = np.random.Generator(np.random.PCG64(seed))
    split: dict[str, str] = {}
    for label in dataset.classes:
        ids = members[label]
        order = rng.permutation(len(ids))
        n_test = min(max(_round_half_up(test_frac * len(ids)), 0), len(ids) - 1)
        test_ids = {ids[i] for i in order[:n_test]}
        for sid in ids:
            split[sid] = "test" if sid in test_ids else "train"
    return Dataset(
        dataset_id=dataset.dataset_id,
        channels=dataset.channels,
        classes=dataset.classes,
        series=dataset.series,
        split=split,
        norm=None,
    )
