"""On-disk layout for trained sweeps and their derived artifacts.

A sweep directory holds:

* ``sweep.json``: dataset id, classes, channels, forest config, window grid
  and per-series metadata (id, label, group, length, split);
* ``models/w00010.json`` ...: one serialized forest per grid window;
* ``probs.json``: integer test vote counts aligned with the grid (votes,
  not shares, so files are exact and probabilities stay multiples of
  1 / n_trees);
* ``loo.json``: leave-one-group-out accuracies, present once computed;
* ``pdp/w00250_g20.json`` ...: substitution response surfaces, cached on
  demand per (window, grid size).

Accuracy curves and confusion matrices are cheap to derive from
``probs.json`` and are therefore never persisted. All JSON is written with
sorted keys so identical sweeps serialize byte-identically; single files
are written atomically via a temp name and rename.
"""

from __future__ import annotations

import json
import os
import shutil
from pathlib import Path

import numpy as np

from .core import DrCifConfig
from .drcif import model_from_dict, model_to_dict
from .earlyclass import LooFold, LooResult, WindowGrid, WindowSweep
from .explain import PdpSurface

__all__ = [
    "sweep_id",
    "save_sweep",
    "load_sweep",
    "save_loo",
    "load_loo",
    "save_pdp",
    "load_pdp",
    "pdp_path",
]

SWEEP_FORMAT = "xmtc-sweep"
SWEEP_VERSION = 1
SWEEP_NAME = "sweep.json"
PROBS_NAME = "probs.json"
LOO_NAME = "loo.json"
MODELS_DIR = "models"
PDP_DIR = "pdp"


def sweep_id(dataset_id: str, step: int, n_trees: int, seed: int) -> str:
    """Canonical directory name for a sweep of one dataset."""
    return f"{dataset_id}-s{step}-t{n_trees}-r{seed}"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _model_name(window_len: int) -> str:
    return f"w{window_len:05d}.json"


def _config_dict(config: DrCifConfig) -> dict:
    return {
        "n_trees": config.n_trees,
        "n_attributes": config.n_attributes,
        "min_interval_len": config.min_interval_len,
        "max_interval_frac": config.max_interval_frac,
        "seed": config.seed,
    }


def _grid_dict(grid: WindowGrid) -> dict:
    return {"start": grid.start, "step": grid.step, "end": grid.end}


def save_sweep(sweep: WindowSweep, path: str | Path, overwrite: bool = False) -> None:
    """Write a sweep directory; builds a temp sibling and renames into place."""
    path = Path(path)
    if path.exists() and not overwrite:
        raise FileExistsError(f"{path} already exists")
    tmp = path.with_name(path.name + ".tmp")
    if tmp.exists():
        shutil.rmtree(tmp)
    (tmp / MODELS_DIR).mkdir(parents=True)
    meta = {
        "format": SWEEP_FORMAT,
        "version": SWEEP_VERSION,
        "dataset_id": sweep.dataset_id,
        "classes": list(sweep.classes),
        "channels": list(sweep.channel_names),
        "config": _config_dict(sweep.config),
        "grid": _grid_dict(sweep.grid),
        "series": list(sweep.series_meta),
    }
    _write(tmp / SWEEP_NAME, _dumps(meta))
    for window_len, model in sweep.models.items():
        _write(
            tmp / MODELS_DIR / _model_name(window_len),
            _dumps(model_to_dict(model)),
        )
    probs = {
        "windows": list(sweep.grid.windows),
        "n_trees": sweep.config.n_trees,
        "votes": {
            sid: [[int(v) for v in row] for row in arr]
            for sid, arr in sweep.votes.items()
        },
    }
    _write(tmp / PROBS_NAME, _dumps(probs))
    if path.exists():
        shutil.rmtree(path)
    os.replace(tmp, path)


def load_sweep(path: str | Path) -> WindowSweep:
    """Load a sweep directory back into memory, validating format and shape."""
    path = Path(path)
    meta_path = path / SWEEP_NAME
    if not meta_path.is_file():
        raise ValueError(f"{path}: missing {SWEEP_NAME}")
    meta = json.loads(meta_path.read_text())
    if meta.get("format") != SWEEP_FORMAT:
        raise ValueError(f"{meta_path}: not a serialized sweep")
    if meta.get("version") != SWEEP_VERSION:
        raise ValueError(f"{meta_path}: unsupported version {meta.get('version')!r}")
    grid = WindowGrid(**meta["grid"])
    config = DrCifConfig(**meta["config"])
    classes = tuple(meta["classes"])
    models = {}
    for window_len in grid.windows:
        model_path = path / MODELS_DIR / _model_name(window_len)
        if not model_path.is_file():
            raise ValueError(f"{path}: missing model for window {window_len}")
        models[window_len] = model_from_dict(json.loads(model_path.read_text()))
    probs = json.loads((path / PROBS_NAME).read_text())
    if tuple(probs["windows"]) != grid.windows:
        raise ValueError(f"{path}: cached votes do not match the window grid")
    votes = {}
    for sid, rows in probs["votes"].items():
        arr = np.array(rows, dtype=np.int64)
        if arr.shape != (len(grid.windows), len(classes)):
            raise ValueError(f"{path}: vote array for {sid!r} has a wrong shape")
        votes[sid] = arr
    return WindowSweep(
        dataset_id=meta["dataset_id"],
        classes=classes,
        channel_names=tuple(meta["channels"]),
        config=config,
        grid=grid,
        series_meta=tuple(dict(m) for m in meta["series"]),
        models=models,
        votes=votes,
    )


def save_loo(result: LooResult, path: str | Path) -> None:
    """Write loo.json into a sweep (or other) directory."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": "xmtc-loo",
        "version": 1,
        "grid": _grid_dict(result.grid),
        "folds": [
            {
                "group": f.group,
                "train_groups": list(f.train_groups),
                "n_test": f.n_test,
                "accuracies": {str(w): a for w, a in f.accuracies.items()},
            }
            for f in result.folds
        ],
    }
    _write(path / LOO_NAME, _dumps(payload))


def load_loo(path: str | Path) -> LooResult | None:
    """Read loo.json if present, else None."""
    loo_path = Path(path) / LOO_NAME
    if not loo_path.is_file():
        return None
    payload = json.loads(loo_path.read_text())
    if payload.get("format") != "xmtc-loo" or payload.get("version") != 1:
        raise ValueError(f"{loo_path}: not a leave-one-out result")
    folds = tuple(
        LooFold(
            group=f["group"],
            train_groups=tuple(f["train_groups"]),
            n_test=int(f["n_test"]),
            accuracies={int(w): float(a) for w, a in f["accuracies"].items()},
        )
        for f in payload["folds"]
    )
    return LooResult(grid=WindowGrid(**payload["grid"]), folds=folds)


def pdp_path(sweep_dir: str | Path, window_len: int, grid_size: int) -> Path:
    return Path(sweep_dir) / PDP_DIR / f"w{window_len:05d}_g{grid_size}.json"


def save_pdp(surface: PdpSurface, sweep_dir: str | Path, grid_size: int) -> None:
    path = pdp_path(sweep_dir, surface.window_len, grid_size)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": "xmtc-pdp",
        "version": 1,
        "window_len": surface.window_len,
        "grid": [float(v) for v in surface.grid],
        "channels": list(surface.channel_names),
        "classes": list(surface.classes),
        "curves": [
            [[float(v) for v in row] for row in ch] for ch in surface.curves
        ],
    }
    _write(path, _dumps(payload))


def load_pdp(
    sweep_dir: str | Path, window_len: int, grid_size: int
) -> PdpSurface | None:
    path = pdp_path(sweep_dir, window_len, grid_size)
    if not path.is_file():
        return None
    payload = json.loads(path.read_text())
    if payload.get("format") != "xmtc-pdp" or payload.get("version") != 1:
        raise ValueError(f"{path}: not a substitution response surface")
    return PdpSurface(
        window_len=int(payload["window_len"]),
        grid=np.array(payload["grid"], dtype=np.float64),
        channel_names=tuple(payload["channels"]),
        classes=tuple(payload["classes"]),
        curves=np.array(payload["curves"], dtype=np.float64),
    )
