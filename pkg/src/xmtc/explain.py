"""Partial dependence of class probabilities on per-channel value levels.

The intervention is channel-constant substitution: after windowing and
normalization, every time step of the chosen channel is replaced by a grid
value v in [0, 1] in every evaluation series, and the model's probabilities
are averaged over the set. Channels the model never reads therefore produce
exactly flat curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drcif import DrCifModel

__all__ = ["PdpSurface", "partial_dependence", "pdp_surface"]


@dataclass(frozen=True)
class PdpSurface:
    """Mean class probabilities per (channel, class, grid value) for one window."""

    window_len: int
    grid: np.ndarray
    channel_names: tuple[str, ...]
    classes: tuple[str, ...]
    curves: np.ndarray  # (n_channels, n_classes, grid_size)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        curves = np.asarray(self.curves, dtype=np.float64)
        expected = (len(self.channel_names), len(self.classes), grid.shape[0])
        if curves.shape != expected:
            raise ValueError(f"curves must have shape {expected}, got {curves.shape}")
        grid.setflags(write=False)
        curves.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "curves", curves)


def partial_dependence(
    model: DrCifModel,
    eval_values: list[np.ndarray],
    channel: int,
    grid_size: int = 20,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class mean probability over a value grid for one channel.

    Parameters
    ----------
    model : DrCifModel
    eval_values : list of np.ndarray
        Raw (n_channels, length) series, normally the test split.
    channel : int
    grid_size : int
        Number of evenly spaced grid values spanning [0, 1] inclusive.

    Returns
    -------
    grid : np.ndarray of shape (grid_size,)
    curves : np.ndarray of shape (n_classes, grid_size)
    """
    if not 0 <= channel < len(model.channel_names):
        raise ValueError(f"channel must be in 0..{len(model.channel_names) - 1}")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if not eval_values:
        raise ValueError("evaluation set is empty")
    prepared = [model.prepare(v) for v in eval_values]
    grid = np.linspace(0.0, 1.0, grid_size)
    curves = np.zeros((model.n_classes, grid_size))
    for gi, v in enumerate(grid):
        acc = np.zeros(model.n_classes)
        for p in prepared:
            modified = p.copy()
            modified[channel, :] = v
            acc += model.predict_proba_prepared(modified)
        curves[:, gi] = acc / len(prepared)
    return grid, curves


def pdp_surface(
    model: DrCifModel, eval_values: list[np.ndarray], grid_size: int = 20
) -> PdpSurface:
    """Partial dependence for every channel, assembled into one surface."""
    grid = np.linspace(0.0, 1.0, grid_size)
    curves = np.zeros((len(model.channel_names), model.n_classes, grid_size))
    for ch in range(len(model.channel_names)):
        _, curves[ch] = partial_dependence(model, eval_values, ch, grid_size)
    return PdpSurface(
        window_len=model.window_len,
        grid=grid,
        channel_names=model.channel_names,
        classes=model.classes,
        curves=curves,
    )
