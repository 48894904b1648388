"""Windowing, scaling and the per-channel series representations.

The early-classification pipeline trains one model per growing window. A
series is adapted to a window of length W by truncation when it is longer and
by linear-interpolation stretching when it is shorter; a full-length series
therefore passes through window W = L unchanged.

Three representations of a windowed series feed the interval forest:

* base: the values as given;
* first difference: d[t] = v[t + 1] - v[t] (one value shorter);
* periodogram: DFT magnitudes |X_k| for k = 0 .. floor(W / 2) - 1, DC term
  included, computed per channel without detrending or windowing.
"""

from __future__ import annotations

import numpy as np

from .core import MultivariateSeries, NormalizationParams

__all__ = [
    "fit_normalization",
    "apply_normalization",
    "to_window",
    "first_difference",
    "periodogram",
]


def fit_normalization(series: list[MultivariateSeries]) -> NormalizationParams:
    """Per-channel min/max over every time step of the given (training) series.

    A constant channel is widened to (min, min + 1) so scaling maps it to 0.
    """
    return NormalizationParams.fit(series)


def apply_normalization(values: np.ndarray, norm: NormalizationParams) -> np.ndarray:
    """Scale (n_channels, length) values into [0, 1] with clamping.

    Out-of-range values (possible on test data) clamp to the boundary rather
    than extrapolate.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != norm.n_channels:
        raise ValueError(
            f"expected (n_channels={norm.n_channels}, length) values, "
            f"got shape {values.shape}"
        )
    # Halving both sides of the divide keeps every intermediate finite even
    # for channels spanning nearly the whole double range; the quotient is
    # unchanged because scaling by 0.5 is exact.
    half_span = 0.5 * norm.maxs - 0.5 * norm.mins
    scaled = (0.5 * values - 0.5 * norm.mins[:, None]) / half_span[:, None]
    return np.clip(scaled, 0.0, 1.0)


def to_window(values: np.ndarray, window_len: int) -> np.ndarray:
    """Adapt (n_channels, length) values to exactly ``window_len`` steps.

    Longer series are truncated to the first ``window_len`` steps. Shorter
    series are stretched channel-wise by linear interpolation, sampling the
    original at positions j * (L - 1) / (W - 1) for j = 0 .. W - 1, so the
    first and last values are preserved exactly.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("values must be 2-D (channels, time)")
    if window_len < 2:
        raise ValueError("window_len must be >= 2")
    length = values.shape[1]
    if length >= window_len:
        return values[:, :window_len].copy()
    if length == 1:
        return np.repeat(values, window_len, axis=1)
    src = np.arange(length, dtype=np.float64)
    dst = np.arange(window_len, dtype=np.float64) * (length - 1) / (window_len - 1)
    out = np.empty((values.shape[0], window_len))
    for ch in range(values.shape[0]):
        out[ch] = np.interp(dst, src, values[ch])
    # Guard against round-off at the right edge: dst[-1] == length - 1 exactly.
    out[:, 0] = values[:, 0]
    out[:, -1] = values[:, -1]
    return out


def first_difference(values: np.ndarray) -> np.ndarray:
    """Consecutive differences along time; output is one step shorter."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] < 2:
        raise ValueError("values must be 2-D with length >= 2")
    return np.diff(values, axis=1)


def periodogram(values: np.ndarray) -> np.ndarray:
    """Per-channel DFT magnitudes |X_k| for k = 0 .. floor(L / 2) - 1.

    The DC term is kept and no normalization is applied: a pure cosine with an
    integer number of cycles k shows up as |X_k| = L / 2.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] < 2:
        raise ValueError("values must be 2-D with length >= 2")
    half = values.shape[1] // 2
    return np.abs(np.fft.rfft(values, axis=1))[:, :half]
