import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xmtc.core import MultivariateSeries, NormalizationParams
from xmtc.preprocess import (
    apply_normalization,
    first_difference,
    fit_normalization,
    periodogram,
    to_window,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, width=64)


def channel_matrix(max_channels=4, max_len=40):
    return st.integers(1, max_channels).flatmap(
        lambda d: st.integers(1, max_len).flatmap(
            lambda l: arrays(np.float64, (d, l), elements=finite)
        )
    )


class TestToWindow:
    def test_truncates_long_series_exactly(self):
        values = np.arange(20.0).reshape(2, 10)
        out = to_window(values, 6)
        assert np.array_equal(out, values[:, :6])

    def test_equal_length_is_identity(self):
        values = np.random.default_rng(0).normal(size=(3, 8))
        assert np.array_equal(to_window(values, 8), values)

    def test_stretch_pins_endpoints_exactly(self):
        values = np.random.default_rng(1).normal(size=(2, 5))
        out = to_window(values, 12)
        assert np.array_equal(out[:, 0], values[:, 0])
        assert np.array_equal(out[:, -1], values[:, -1])

    def test_stretch_matches_linear_interpolation(self):
        values = np.array([[0.0, 1.0, 4.0]])
        out = to_window(values, 5)
        # sample positions j * (L - 1) / (W - 1) for j = 0..4
        assert np.allclose(out[0], [0.0, 0.5, 1.0, 2.5, 4.0])

    def test_length_one_series_repeats(self):
        values = np.array([[7.0], [2.0]])
        out = to_window(values, 4)
        assert np.array_equal(out, [[7.0] * 4, [2.0] * 4])

    def test_rejects_window_below_two(self):
        with pytest.raises(ValueError):
            to_window(np.zeros((1, 5)), 1)

    @settings(max_examples=60, deadline=None)
    @given(values=channel_matrix(), window=st.integers(2, 50))
    def test_output_shape_and_value_range(self, values, window):
        out = to_window(values, window)
        assert out.shape == (values.shape[0], window)
        # linear interpolation cannot exceed the original value range
        assert np.all(out.min(axis=1) >= values.min(axis=1) - 1e-9)
        assert np.all(out.max(axis=1) <= values.max(axis=1) + 1e-9)

    @settings(max_examples=40, deadline=None)
    @given(values=channel_matrix(max_len=20), window=st.integers(20, 60))
    def test_stretch_endpoints_always_exact(self, values, window):
        # stretching (window >= length) must pin both endpoints exactly
        out = to_window(values, window)
        assert np.array_equal(out[:, 0], values[:, 0])
        assert np.array_equal(out[:, -1], values[:, -1])


class TestNormalization:
    def test_affine_inside_range(self):
        norm = NormalizationParams(mins=np.array([0.0]), maxs=np.array([4.0]))
        out = apply_normalization(np.array([[0.0, 1.0, 4.0]]), norm)
        assert np.allclose(out, [[0.0, 0.25, 1.0]])

    def test_clamps_outside_training_range(self):
        norm = NormalizationParams(mins=np.array([0.0]), maxs=np.array([1.0]))
        out = apply_normalization(np.array([[-3.0, 0.5, 9.0]]), norm)
        assert np.allclose(out, [[0.0, 0.5, 1.0]])

    def test_constant_channel_maps_to_zero(self):
        s = MultivariateSeries("x", "g", "a", np.full((1, 5), 2.5))
        norm = fit_normalization([s])
        out = apply_normalization(s.values, norm)
        assert np.all(out == 0.0)

    @settings(max_examples=60, deadline=None)
    @given(values=channel_matrix(max_channels=3, max_len=25))
    def test_output_always_in_unit_interval(self, values):
        s = MultivariateSeries("x", "g", "a", values)
        norm = fit_normalization([s])
        shifted = values * 1.7 - 0.3
        out = apply_normalization(shifted, norm)
        assert np.all(out >= 0.0) and np.all(out <= 1.0)


class TestDerivedRepresentations:
    def test_first_difference(self):
        values = np.array([[1.0, 4.0, 2.0], [0.0, 0.0, 5.0]])
        out = first_difference(values)
        assert np.array_equal(out, [[3.0, -2.0], [0.0, 5.0]])

    def test_periodogram_shape_keeps_dc_drops_nyquist(self):
        values = np.random.default_rng(2).normal(size=(2, 10))
        out = periodogram(values)
        assert out.shape == (2, 5)
        assert np.allclose(out[:, 0], np.abs(values.sum(axis=1)))

    def test_periodogram_matches_naive_dft(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=(1, 17))
        n = values.shape[1]
        k = np.arange(n // 2)
        t = np.arange(n)
        naive = np.abs(
            (values[0] * np.exp(-2j * np.pi * np.outer(k, t) / n)).sum(axis=1)
        )
        assert np.allclose(periodogram(values)[0], naive, atol=1e-9)

    def test_single_cosine_concentrates_at_its_bin(self):
        t = np.arange(32.0)
        values = np.cos(2 * np.pi * 4 * t / 32)[None, :]
        out = periodogram(values)[0]
        assert np.argmax(out) == 4
        assert out[4] == pytest.approx(16.0)
