import numpy as np
import pytest

from conftest import SMALL_FOREST, SMALL_SYNTH
from xmtc.core import ChannelSpec, Dataset, DrCifConfig, MultivariateSeries
from xmtc.data_io import synthesize
from xmtc.drcif import fit_values
from xmtc.earlyclass import (
    ConfusionMatrix,
    WindowGrid,
    accuracy_curve,
    confusion,
    leave_one_out,
    length_histogram,
    temporal_probabilities,
    train_sweep,
)

# ---------------------------------------------------------------------------
# window grid


class TestWindowGrid:
    def test_windows_inclusive(self):
        grid = WindowGrid(start=10, step=10, end=40)
        assert grid.windows == (10, 20, 30, 40)
        assert WindowGrid(start=10, step=10, end=10).windows == (10,)

    def test_index_of(self):
        grid = WindowGrid(start=10, step=10, end=40)
        assert grid.index_of(30) == 2
        with pytest.raises(KeyError, match="window 15 is not on the grid"):
            grid.index_of(15)
        with pytest.raises(KeyError):
            grid.index_of(50)

    @pytest.mark.parametrize(
        "start, step, end",
        [(1, 10, 10), (10, 0, 10), (20, 10, 10), (10, 10, 45)],
    )
    def test_rejects_malformed_grids(self, start, step, end):
        with pytest.raises(ValueError):
            WindowGrid(start=start, step=step, end=end)

    @pytest.mark.parametrize(
        "max_length, end",
        [(65, 70), (70, 70), (71, 80), (100, 100), (101, 110), (7, 10), (1, 10)],
    )
    def test_for_max_length_rounds_up(self, max_length, end):
        grid = WindowGrid.for_max_length(max_length)
        assert (grid.start, grid.step, grid.end) == (10, 10, end)

    def test_for_max_length_custom_step(self):
        grid = WindowGrid.for_max_length(130, start=25, step=50)
        assert grid.windows == (25, 75, 125, 175)


def test_confusion_matrix_requires_square_counts():
    with pytest.raises(ValueError, match="square"):
        ConfusionMatrix(
            window_len=10, classes=("a", "b"), counts=np.zeros((2, 3), dtype=np.int64)
        )


def test_confusion_matrix_accuracy_is_diagonal_share():
    counts = np.array([[3, 1], [2, 4]], dtype=np.int64)
    cm = ConfusionMatrix(window_len=10, classes=("a", "b"), counts=counts)
    assert cm.accuracy == 7 / 10


# ---------------------------------------------------------------------------
# sweep training


def test_train_sweep_requires_test_split():
    dataset = synthesize(SMALL_SYNTH)  # all-train by default
    with pytest.raises(ValueError, match="no test split"):
        train_sweep(dataset, SMALL_FOREST)


def test_sweep_grid_covers_dataset(small_dataset, small_sweep):
    grid = WindowGrid.for_max_length(small_dataset.max_length())
    assert small_sweep.grid == grid
    assert set(small_sweep.models) == set(grid.windows)
    for window_len, model in small_sweep.models.items():
        assert model.window_len == window_len
        assert model.classes == small_dataset.classes


def test_sweep_votes_cached_for_every_test_series(small_dataset, small_sweep):
    test_ids = {s.series_id for s in small_dataset.test_series()}
    assert set(small_sweep.votes) == test_ids
    n_windows = len(small_sweep.grid.windows)
    n_classes = len(small_dataset.classes)
    for votes in small_sweep.votes.values():
        assert votes.shape == (n_windows, n_classes)
        assert votes.dtype == np.int64
        assert (votes.sum(axis=1) == SMALL_FOREST.n_trees).all()


def test_sweep_votes_match_fresh_predictions(small_dataset, small_sweep):
    # the cache must hold exactly what the stored model would predict
    wi = small_sweep.grid.index_of(30)
    model = small_sweep.models[30]
    for series in small_dataset.test_series():
        assert np.array_equal(
            small_sweep.votes[series.series_id][wi],
            model.vote_counts(series.values),
        )


def test_sweep_series_meta_covers_dataset(small_dataset, small_sweep):
    by_id = {m["id"]: m for m in small_sweep.series_meta}
    assert set(by_id) == {s.series_id for s in small_dataset.series}
    for series in small_dataset.series:
        meta = by_id[series.series_id]
        assert meta["label"] == series.label
        assert meta["group"] == series.group_id
        assert meta["length"] == series.length
        assert meta["split"] == small_dataset.split[series.series_id]


def test_train_sweep_reports_progress(small_dataset):
    seen = []
    train_sweep(
        small_dataset,
        DrCifConfig(n_trees=2, seed=1),
        on_window=lambda w, done, total: seen.append((w, done, total)),
    )
    windows = WindowGrid.for_max_length(small_dataset.max_length()).windows
    assert [w for w, _, _ in seen] == list(windows)
    assert [done for _, done, _ in seen] == list(range(1, len(windows) + 1))
    assert all(total == len(windows) for _, _, total in seen)


# ---------------------------------------------------------------------------
# curves and matrices


def test_accuracy_curve_shape_and_bounds(small_sweep):
    curve = accuracy_curve(small_sweep)
    assert [p.window_len for p in curve] == list(small_sweep.grid.windows)
    for p in curve:
        assert 0.0 <= p.accuracy <= 1.0


def test_accuracy_curve_shorter_counts(small_sweep):
    all_lengths = small_sweep.all_lengths()
    test_lengths = small_sweep.test_lengths()
    for p in accuracy_curve(small_sweep):
        assert p.n_shorter_all == sum(1 for n in all_lengths if n < p.window_len)
        assert p.n_shorter_test == sum(1 for n in test_lengths if n < p.window_len)


def test_confusion_agrees_with_curve_at_every_window(small_sweep):
    for point in accuracy_curve(small_sweep):
        cm = confusion(small_sweep, point.window_len)
        assert cm.accuracy == point.accuracy  # exact, same integer counts


def test_confusion_row_sums_are_class_counts(small_dataset, small_sweep):
    labels = [s.label for s in small_dataset.test_series()]
    cm = confusion(small_sweep, 20)
    for i, cls in enumerate(small_dataset.classes):
        assert cm.counts[i].sum() == labels.count(cls)
    assert cm.counts.sum() == len(labels)


def test_confusion_rejects_off_grid_window(small_sweep):
    with pytest.raises(KeyError, match="not on the grid"):
        confusion(small_sweep, 33)


def test_temporal_probabilities(small_dataset, small_sweep):
    sid = small_dataset.test_series()[0].series_id
    probs = temporal_probabilities(small_sweep, sid)
    n_windows = len(small_sweep.grid.windows)
    assert probs.shape == (len(small_dataset.classes), n_windows)
    assert np.array_equal(probs, (small_sweep.votes[sid] / SMALL_FOREST.n_trees).T)
    assert np.allclose(probs.sum(axis=0), 1.0, atol=1e-12)


def test_temporal_probabilities_unknown_series(small_dataset, small_sweep):
    train_id = small_dataset.train_series()[0].series_id
    with pytest.raises(KeyError, match="no cached probabilities"):
        temporal_probabilities(small_sweep, train_id)
    with pytest.raises(KeyError):
        temporal_probabilities(small_sweep, "nope")


def test_length_histogram():
    assert length_histogram([10, 19, 20, 95]) == {10: 2, 20: 1, 90: 1}
    assert length_histogram([]) == {}
    assert length_histogram([3, 4, 4], bin_width=1) == {3: 1, 4: 2}
    assert list(length_histogram([95, 10, 20]).keys()) == [10, 20, 90]
    with pytest.raises(ValueError, match="bin_width"):
        length_histogram([10], bin_width=0)


# ---------------------------------------------------------------------------
# leave-one-group-out


def _loo_config():
    return DrCifConfig(n_trees=2, seed=5)


def test_leave_one_out_structure(small_dataset):
    result = leave_one_out(small_dataset, _loo_config())
    groups = small_dataset.group_ids()
    assert [f.group for f in result.folds] == list(groups)
    grid = WindowGrid.for_max_length(small_dataset.max_length())
    assert result.grid == grid
    for fold in result.folds:
        # structural guarantee: the held-out group never trains its own fold
        assert fold.group not in fold.train_groups
        assert set(fold.train_groups) == set(groups) - {fold.group}
        assert fold.n_test == sum(
            1 for s in small_dataset.series if s.group_id == fold.group
        )
        assert set(fold.accuracies) == set(grid.windows)
        assert all(0.0 <= a <= 1.0 for a in fold.accuracies.values())


def test_leave_one_out_summary(small_dataset):
    result = leave_one_out(small_dataset, _loo_config())
    summary = result.summary()
    assert set(summary) == set(result.grid.windows)
    for window_len, stats in summary.items():
        acc = np.array([f.accuracies[window_len] for f in result.folds])
        assert stats["mean"] == pytest.approx(float(np.mean(acc)))
        assert stats["std"] == pytest.approx(float(np.std(acc, ddof=1)))
        assert stats["min"] == float(np.min(acc))
        assert stats["max"] == float(np.max(acc))
        assert stats["q1"] <= stats["median"] <= stats["q3"]


def test_leave_one_out_ignores_train_test_split(small_dataset):
    # the split tags must not leak into fold membership: retagging the split
    # leaves the result unchanged
    flipped = Dataset(
        dataset_id=small_dataset.dataset_id,
        channels=small_dataset.channels,
        classes=small_dataset.classes,
        series=small_dataset.series,
        split={
            sid: ("train" if tag == "test" else tag)
            for sid, tag in small_dataset.split.items()
        },
    )
    a = leave_one_out(small_dataset, _loo_config())
    b = leave_one_out(flipped, _loo_config())
    assert [f.accuracies for f in a.folds] == [f.accuracies for f in b.folds]


def _tiny_series(sid, label, group, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return MultivariateSeries(
        series_id=sid, group_id=group, label=label, values=rng.random((2, 12))
    )


def test_leave_one_out_needs_two_groups():
    series = tuple(
        _tiny_series(f"s{i}", "ab"[i % 2], "g0", i) for i in range(4)
    )
    dataset = Dataset(
        dataset_id="d",
        channels=(ChannelSpec(0, "c0"), ChannelSpec(1, "c1")),
        classes=("a", "b"),
        series=series,
        split={},
    )
    with pytest.raises(ValueError, match="at least 2 groups"):
        leave_one_out(dataset, _loo_config())


def test_leave_one_out_rejects_fold_missing_a_class():
    # all of class "b" lives in one group, so the other fold can train but
    # the b-group's complement cannot
    series = (
        _tiny_series("s0", "a", "g0", 0),
        _tiny_series("s1", "a", "g0", 1),
        _tiny_series("s2", "b", "g1", 2),
        _tiny_series("s3", "b", "g1", 3),
    )
    dataset = Dataset(
        dataset_id="d",
        channels=(ChannelSpec(0, "c0"), ChannelSpec(1, "c1")),
        classes=("a", "b"),
        series=series,
        split={},
    )
    with pytest.raises(ValueError, match="no training series for classes"):
        leave_one_out(dataset, _loo_config())


def test_leave_one_out_reports_progress(small_dataset):
    seen = []
    leave_one_out(
        small_dataset,
        _loo_config(),
        on_fold=lambda g, done, total: seen.append((g, done, total)),
    )
    groups = list(small_dataset.group_ids())
    assert [g for g, _, _ in seen] == groups
    assert [done for _, done, _ in seen] == list(range(1, len(groups) + 1))


def test_leave_one_out_fold_accuracy_reproducible(small_dataset):
    # recompute one fold by hand and compare to the library's numbers
    config = _loo_config()
    result = leave_one_out(small_dataset, config)
    fold = result.folds[0]
    train = [s for s in small_dataset.series if s.group_id != fold.group]
    held_out = [s for s in small_dataset.series if s.group_id == fold.group]
    from xmtc.preprocess import fit_normalization

    norm = fit_normalization(train)
    window_len = result.grid.windows[-1]
    model = fit_values(
        [s.values for s in train],
        [s.label for s in train],
        small_dataset.classes,
        small_dataset.channel_names,
        norm,
        window_len,
        config,
    )
    correct = sum(1 for s in held_out if model.predict(s.values) == s.label)
    assert fold.accuracies[window_len] == correct / len(held_out)
