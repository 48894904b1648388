"""Growing-window training sweeps and their evaluation summaries.

One forest is trained per window length on a fixed grid (default 10, 20, ...
up to the dataset maximum rounded up to a full step). Test-split vote shares
are cached per (series, window) at training time; every curve, confusion
matrix and temporal probability matrix is derived from that cache, so
serialized sweeps are self-contained and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import drcif
from .core import Dataset, DrCifConfig, NormalizationParams
from .preprocess import fit_normalization

__all__ = [
    "WindowGrid",
    "CurvePoint",
    "ConfusionMatrix",
    "WindowSweep",
    "train_sweep",
    "accuracy_curve",
    "length_histogram",
    "confusion",
    "temporal_probabilities",
    "LooFold",
    "LooResult",
    "leave_one_out",
]


@dataclass(frozen=True)
class WindowGrid:
    """Window lengths start, start + step, ..., end (inclusive)."""

    start: int
    step: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 2 or self.step < 1:
            raise ValueError("grid needs start >= 2 and step >= 1")
        if self.end < self.start or (self.end - self.start) % self.step != 0:
            raise ValueError("grid end must be start + k * step for some k >= 0")

    @classmethod
    def for_max_length(
        cls, max_length: int, start: int = 10, step: int = 10
    ) -> "WindowGrid":
        """Grid covering a dataset: end is the smallest start + k * step that
        is >= max_length (k >= 0)."""
        end = start + int(math.ceil(max(max_length - start, 0) / step)) * step
        return cls(start=start, step=step, end=end)

    @property
    def windows(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.end + 1, self.step))

    def index_of(self, window_len: int) -> int:
        try:
            return self.windows.index(window_len)
        except ValueError:
            raise KeyError(f"window {window_len} is not on the grid") from None


@dataclass(frozen=True)
class CurvePoint:
    """Test accuracy at one window, plus how many series are still shorter."""

    window_len: int
    accuracy: float
    n_shorter_all: int
    n_shorter_test: int


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with true classes on rows and predicted classes on columns."""

    window_len: int
    classes: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.classes), len(self.classes)):
            raise ValueError("counts must be square over the class list")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / float(self.counts.sum())


@dataclass
class WindowSweep:
    """Models for every window on the grid plus the cached test vote counts.

    ``votes[series_id]`` is an (n_windows, n_classes) integer array aligned
    with ``grid.windows``; probabilities are votes / n_trees.
    """

    dataset_id: str
    classes: tuple[str, ...]
    channel_names: tuple[str, ...]
    config: DrCifConfig
    grid: WindowGrid
    series_meta: tuple[dict, ...]  # id, label, group, length, split for all series
    models: dict[int, drcif.DrCifModel]
    votes: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def test_meta(self) -> tuple[dict, ...]:
        return tuple(m for m in self.series_meta if m["split"] == "test")

    def probs(self, series_id: str) -> np.ndarray:
        return self.votes[series_id] / self.config.n_trees

    def all_lengths(self) -> list[int]:
        return [m["length"] for m in self.series_meta]

    def test_lengths(self) -> list[int]:
        return [m["length"] for m in self.test_meta]


def train_sweep(
    dataset: Dataset,
    config: DrCifConfig,
    step: int = 10,
    start: int = 10,
    n_jobs: int = 1,
    on_window: Callable[[int, int, int], None] | None = None,
) -> WindowSweep:
    """Train one forest per window and cache test-split votes.

    ``on_window(window_len, done, total)`` is called after each window
    finishes, for progress reporting.
    """
    test = dataset.test_series()
    if not test:
        raise ValueError("dataset has no test split; apply stratified_split first")
    grid = WindowGrid.for_max_length(dataset.max_length(), start=start, step=step)
    windows = grid.windows
    models: dict[int, drcif.DrCifModel] = {}
    votes: dict[str, np.ndarray] = {
        s.series_id: np.zeros((len(windows), len(dataset.classes)), dtype=np.int64)
        for s in test
    }
    for wi, window_len in enumerate(windows):
        model = drcif.fit(dataset, window_len, config, n_jobs=n_jobs)
        models[window_len] = model
        for s in test:
            votes[s.series_id][wi] = model.vote_counts(s.values)
        if on_window is not None:
            on_window(window_len, wi + 1, len(windows))
    series_meta = tuple(
        {
            "id": s.series_id,
            "label": s.label,
            "group": s.group_id,
            "length": s.length,
            "split": dataset.split[s.series_id],
        }
        for s in dataset.series
    )
    return WindowSweep(
        dataset_id=dataset.dataset_id,
        classes=dataset.classes,
        channel_names=dataset.channel_names,
        config=config,
        grid=grid,
        series_meta=series_meta,
        models=models,
        votes=votes,
    )


def _predictions_at(sweep: WindowSweep, window_index: int) -> tuple[list[int], list[int]]:
    class_index = {c: i for i, c in enumerate(sweep.classes)}
    y_true = []
    y_pred = []
    for meta in sweep.test_meta:
        y_true.append(class_index[meta["label"]])
        y_pred.append(int(np.argmax(sweep.votes[meta["id"]][window_index])))
    return y_true, y_pred


def accuracy_curve(sweep: WindowSweep) -> list[CurvePoint]:
    """Test accuracy per window; argmax ties go to the lowest class index."""
    all_lengths = sweep.all_lengths()
    test_lengths = sweep.test_lengths()
    points = []
    for wi, window_len in enumerate(sweep.grid.windows):
        y_true, y_pred = _predictions_at(sweep, wi)
        correct = sum(1 for t, p in zip(y_true, y_pred) if t == p)
        points.append(
            CurvePoint(
                window_len=window_len,
                accuracy=correct / len(y_true),
                n_shorter_all=sum(1 for n in all_lengths if n < window_len),
                n_shorter_test=sum(1 for n in test_lengths if n < window_len),
            )
        )
    return points


def length_histogram(lengths: list[int], bin_width: int = 10) -> dict[int, int]:
    """Counts per [b, b + bin_width) bin keyed by bin start, empty bins omitted."""
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    out: dict[int, int] = {}
    for n in lengths:
        b = (n // bin_width) * bin_width
        out[b] = out.get(b, 0) + 1
    return dict(sorted(out.items()))


def confusion(sweep: WindowSweep, window_len: int) -> ConfusionMatrix:
    """Confusion matrix of the cached test predictions at one window."""
    wi = sweep.grid.index_of(window_len)
    y_true, y_pred = _predictions_at(sweep, wi)
    counts = np.zeros((len(sweep.classes), len(sweep.classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[t, p] += 1
    return ConfusionMatrix(
        window_len=window_len, classes=sweep.classes, counts=counts
    )


def temporal_probabilities(sweep: WindowSweep, series_id: str) -> np.ndarray:
    """(n_classes, n_windows) class probabilities of one test series."""
    if series_id not in sweep.votes:
        raise KeyError(f"no cached probabilities for series {series_id!r}")
    return (sweep.votes[series_id] / sweep.config.n_trees).T


# ---------------------------------------------------------------------------
# leave-one-group-out


@dataclass(frozen=True)
class LooFold:
    """One held-out group: which groups trained the models, accuracy per window."""

    group: str
    train_groups: tuple[str, ...]
    n_test: int
    accuracies: dict[int, float]


@dataclass(frozen=True)
class LooResult:
    grid: WindowGrid
    folds: tuple[LooFold, ...]

    def summary(self) -> dict[int, dict[str, float]]:
        """Per window: mean, sample std, min, quartiles (type-7), max."""
        out: dict[int, dict[str, float]] = {}
        for window_len in self.grid.windows:
            acc = np.array([f.accuracies[window_len] for f in self.folds])
            out[window_len] = {
                "mean": float(np.mean(acc)),
                "std": float(np.std(acc, ddof=1)) if acc.size > 1 else 0.0,
                "min": float(np.min(acc)),
                "q1": float(np.quantile(acc, 0.25)),
                "median": float(np.quantile(acc, 0.5)),
                "q3": float(np.quantile(acc, 0.75)),
                "max": float(np.max(acc)),
            }
        return out


def leave_one_out(
    dataset: Dataset,
    config: DrCifConfig,
    step: int = 10,
    start: int = 10,
    n_jobs: int = 1,
    on_fold: Callable[[str, int, int], None] | None = None,
) -> LooResult:
    """Leave-one-group-out evaluation over the full window grid.

    Fold g trains on every series whose group differs from g (the dataset's
    train/test split is ignored) with normalization refitted on that fold,
    then scores group g. The window grid is computed once from the full
    dataset so summaries align across folds.
    """
    groups = dataset.group_ids()
    if len(groups) < 2:
        raise ValueError("leave-one-out needs at least 2 groups")
    grid = WindowGrid.for_max_length(dataset.max_length(), start=start, step=step)
    class_index = {c: i for i, c in enumerate(dataset.classes)}
    folds = []
    for gi, group in enumerate(groups):
        train = [s for s in dataset.series if s.group_id != group]
        held_out = [s for s in dataset.series if s.group_id == group]
        if not train or not held_out:
            raise ValueError(f"group {group!r} leaves an empty fold")
        train_labels = {s.label for s in train}
        missing = set(dataset.classes) - train_labels
        if missing:
            raise ValueError(
                f"fold {group!r} has no training series for classes {sorted(missing)}"
            )
        norm = fit_normalization(train)
        y_true = np.array([class_index[s.label] for s in held_out])
        accuracies: dict[int, float] = {}
        for window_len in grid.windows:
            model = drcif.fit_values(
                [s.values for s in train],
                [s.label for s in train],
                dataset.classes,
                dataset.channel_names,
                norm,
                window_len,
                config,
                n_jobs=n_jobs,
            )
            y_pred = np.array(
                [int(np.argmax(model.vote_counts(s.values))) for s in held_out]
            )
            accuracies[window_len] = float(np.mean(y_pred == y_true))
        folds.append(
            LooFold(
                group=group,
                train_groups=tuple(g for g in groups if g != group),
                n_test=len(held_out),
                accuracies=accuracies,
            )
        )
        if on_fold is not None:
            on_fold(group, gi + 1, len(groups))
    return LooResult(grid=grid, folds=tuple(folds))
