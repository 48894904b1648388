"""HTTP API over a data directory of datasets and sweeps.

The app scans its data directory (two levels deep) for dataset directories
(holding a ``manifest``) and sweep directories (holding ``sweep.json``),
reloading lazily when file mtimes change, so state survives restarts by
construction. Training jobs run on a background thread, one at a time per
dataset, and write finished sweeps under ``<data_dir>/sweeps/<sweep_id>``.

All payload validation is done by hand so malformed request bodies get a
400 with a plain message rather than a framework-shaped 422.
"""

from __future__ import annotations

import os
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles

from . import store
from .core import Dataset, DrCifConfig
from .data_io import MANIFEST_NAME, load_dataset
from .earlyclass import (
    WindowSweep,
    accuracy_curve,
    confusion,
    length_histogram,
    temporal_probabilities,
    train_sweep,
)
from .explain import pdp_surface

__all__ = ["create_app"]

_MAX_TREES = 10000


class _Index:
    """Mtime-keyed cache of the datasets and sweeps under a directory."""

    def __init__(self, root: Path) -> None:
        self.root = root
        self._lock = threading.Lock()
        self._datasets: dict[Path, tuple[tuple, Dataset]] = {}
        self._sweeps: dict[Path, tuple[tuple, WindowSweep]] = {}

    def _candidate_dirs(self) -> list[Path]:
        dirs = [self.root]
        try:
            level1 = sorted(p for p in self.root.iterdir() if p.is_dir())
        except OSError:
            return dirs
        for p in level1:
            dirs.append(p)
            try:
                dirs.extend(sorted(q for q in p.iterdir() if q.is_dir()))
            except OSError:
                continue
        return dirs

    def dataset_dirs(self) -> list[Path]:
        return [p for p in self._candidate_dirs() if (p / MANIFEST_NAME).is_file()]

    def sweep_dirs(self) -> list[Path]:
        return [
            p for p in self._candidate_dirs() if (p / store.SWEEP_NAME).is_file()
        ]

    @staticmethod
    def _stamp(*files: Path) -> tuple:
        return tuple(f.stat().st_mtime_ns for f in files)

    def dataset(self, path: Path) -> Dataset:
        stamp = self._stamp(path / MANIFEST_NAME, path / "series.csv")
        with self._lock:
            hit = self._datasets.get(path)
            if hit and hit[0] == stamp:
                return hit[1]
        loaded = load_dataset(path)
        with self._lock:
            self._datasets[path] = (stamp, loaded)
        return loaded

    def sweep(self, path: Path) -> WindowSweep:
        stamp = self._stamp(path / store.SWEEP_NAME, path / store.PROBS_NAME)
        with self._lock:
            hit = self._sweeps.get(path)
            if hit and hit[0] == stamp:
                return hit[1]
        loaded = store.load_sweep(path)
        with self._lock:
            self._sweeps[path] = (stamp, loaded)
        return loaded

    def find_dataset(self, dataset_id: str) -> tuple[Path, Dataset]:
        for path in self.dataset_dirs():
            ds = self.dataset(path)
            if ds.dataset_id == dataset_id:
                return path, ds
        raise HTTPException(404, f"no dataset with id {dataset_id!r}")

    def find_sweep(self, sweep_id: str) -> tuple[Path, WindowSweep]:
        for path in self.sweep_dirs():
            if path.name == sweep_id:
                return path, self.sweep(path)
        raise HTTPException(404, f"no sweep with id {sweep_id!r}")


class _Jobs:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}

    def create(self, dataset_id: str, sweep_id: str) -> dict:
        with self._lock:
            for job in self._jobs.values():
                if (
                    job["dataset_id"] == dataset_id
                    and job["phase"] in ("queued", "training")
                ):
                    raise HTTPException(
                        409,
                        {
                            "message": f"a sweep is already training for "
                                       f"dataset {dataset_id!r}",
                            "job_id": job["id"],
                        },
                    )
            job = {
                "id": uuid.uuid4().hex[:12],
                "dataset_id": dataset_id,
                "sweep_id": sweep_id,
                "phase": "queued",
                "window": None,
                "progress": 0.0,
                "error": None,
            }
            self._jobs[job["id"]] = job
            return job

    def get(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise HTTPException(404, f"no job with id {job_id!r}")
            return dict(job)

    def update(self, job_id: str, **fields) -> None:
        with self._lock:
            self._jobs[job_id].update(fields)


def _require_int(payload: dict, key: str, default: int, lo: int, hi: int) -> int:
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise HTTPException(400, f"{key} must be an integer")
    if not lo <= value <= hi:
        raise HTTPException(400, f"{key} must be between {lo} and {hi}")
    return value


def _ui_dir() -> Path | None:
    override = os.environ.get("XMTC_UI_DIR")
    if override:
        path = Path(override)
        return path if path.is_dir() else None
    path = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return path if path.is_dir() else None


def create_app(data_dir: str | Path) -> FastAPI:
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise ValueError(f"{data_dir} is not a directory")
    app = FastAPI(title="xmtc", version="1")
    index = _Index(data_dir)
    jobs = _Jobs()

    @app.get("/api/datasets")
    def list_datasets() -> list[dict]:
        out = []
        for path in index.dataset_dirs():
            ds = index.dataset(path)
            out.append(
                {
                    "id": ds.dataset_id,
                    "classes": list(ds.classes),
                    "channels": list(ds.channel_names),
                    "n_series": len(ds.series),
                    "n_test": len(ds.test_series()),
                    "groups": list(ds.group_ids()),
                    "max_length": ds.max_length(),
                }
            )
        return sorted(out, key=lambda d: d["id"])

    @app.get("/api/sweeps")
    def list_sweeps() -> list[dict]:
        out = []
        for path in index.sweep_dirs():
            sweep = index.sweep(path)
            out.append(
                {
                    "id": path.name,
                    "dataset_id": sweep.dataset_id,
                    "classes": list(sweep.classes),
                    "channels": list(sweep.channel_names),
                    "windows": list(sweep.grid.windows),
                    "n_trees": sweep.config.n_trees,
                    "seed": sweep.config.seed,
                    "has_loo": (path / store.LOO_NAME).is_file(),
                }
            )
        return sorted(out, key=lambda d: d["id"])

    def _run_job(job_id: str, dataset_path: Path, out_path: Path) -> None:
        try:
            job = jobs.get(job_id)
            dataset = index.dataset(dataset_path)
            config = DrCifConfig(n_trees=job["n_trees"], seed=job["seed"])

            def on_window(window_len: int, done: int, total: int) -> None:
                jobs.update(
                    job_id, phase="training", window=window_len,
                    progress=done / total,
                )

            jobs.update(job_id, phase="training")
            sweep = train_sweep(
                dataset, config, step=job["step"], on_window=on_window
            )
            store.save_sweep(sweep, out_path)
            jobs.update(job_id, phase="done", progress=1.0)
        except Exception as exc:  # report, don't crash the server thread
            jobs.update(job_id, phase="failed", error=str(exc))

    @app.post("/api/datasets/{dataset_id}/sweeps", status_code=202)
    async def start_sweep(dataset_id: str, request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception:
            raise HTTPException(400, "request body must be a JSON object") from None
        if not isinstance(payload, dict):
            raise HTTPException(400, "request body must be a JSON object")
        unknown = set(payload) - {"step", "n_trees", "seed"}
        if unknown:
            raise HTTPException(400, f"unknown fields: {sorted(unknown)}")
        step = _require_int(payload, "step", 10, 1, 10000)
        n_trees = _require_int(payload, "n_trees", 200, 1, _MAX_TREES)
        seed = _require_int(payload, "seed", 0, 0, 2**63 - 1)
        dataset_path, dataset = index.find_dataset(dataset_id)
        if not dataset.test_series():
            raise HTTPException(400, f"dataset {dataset_id!r} has no test split")
        sid = store.sweep_id(dataset_id, step, n_trees, seed)
        for path in index.sweep_dirs():
            if path.name == sid:
                raise HTTPException(
                    409,
                    {"message": "an identical sweep exists", "sweep_id": sid},
                )
        job = jobs.create(dataset_id, sid)
        jobs.update(job["id"], step=step, n_trees=n_trees, seed=seed)
        out_path = data_dir / "sweeps" / sid
        thread = threading.Thread(
            target=_run_job, args=(job["id"], dataset_path, out_path), daemon=True
        )
        thread.start()
        return {"job_id": job["id"], "sweep_id": sid}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str) -> dict:
        job = jobs.get(job_id)
        return {
            "id": job["id"],
            "dataset_id": job["dataset_id"],
            "sweep_id": job["sweep_id"],
            "phase": job["phase"],
            "window": job["window"],
            "progress": job["progress"],
            "error": job["error"],
        }

    @app.get("/api/sweeps/{sweep_id}/curve")
    def sweep_curve(sweep_id: str) -> dict:
        _, sweep = index.find_sweep(sweep_id)
        points = accuracy_curve(sweep)
        return {
            "dataset_id": sweep.dataset_id,
            "windows": [p.window_len for p in points],
            "accuracy": [p.accuracy for p in points],
            "n_shorter_all": [p.n_shorter_all for p in points],
            "n_shorter_test": [p.n_shorter_test for p in points],
            "hist_all": {str(k): v for k, v in length_histogram(sweep.all_lengths()).items()},
            "hist_test": {str(k): v for k, v in length_histogram(sweep.test_lengths()).items()},
            "n_trees": sweep.config.n_trees,
        }

    @app.get("/api/sweeps/{sweep_id}/confusion/{window_len}")
    def sweep_confusion(sweep_id: str, window_len: int) -> dict:
        _, sweep = index.find_sweep(sweep_id)
        try:
            cm = confusion(sweep, window_len)
        except KeyError as exc:
            raise HTTPException(404, str(exc.args[0])) from None
        return {
            "window": window_len,
            "classes": list(cm.classes),
            "counts": [[int(v) for v in row] for row in cm.counts],
            "accuracy": cm.accuracy,
        }

    @app.get("/api/sweeps/{sweep_id}/series")
    def sweep_series(sweep_id: str) -> list[dict]:
        _, sweep = index.find_sweep(sweep_id)
        return [dict(m) for m in sweep.series_meta]

    @app.get("/api/sweeps/{sweep_id}/series/{series_id}/temporal")
    def sweep_temporal(sweep_id: str, series_id: str) -> dict:
        _, sweep = index.find_sweep(sweep_id)
        try:
            probs = temporal_probabilities(sweep, series_id)
        except KeyError as exc:
            raise HTTPException(404, str(exc.args[0])) from None
        meta = next(m for m in sweep.series_meta if m["id"] == series_id)
        return {
            "series_id": series_id,
            "label": meta["label"],
            "length": meta["length"],
            "windows": list(sweep.grid.windows),
            "classes": list(sweep.classes),
            "probs": [[float(v) for v in row] for row in probs],
        }

    @app.get("/api/sweeps/{sweep_id}/pdp/{window_len}")
    def sweep_pdp(sweep_id: str, window_len: int, grid: int = 20) -> dict:
        if not 2 <= grid <= 201:
            raise HTTPException(400, "grid must be between 2 and 201")
        path, sweep = index.find_sweep(sweep_id)
        if window_len not in sweep.models:
            raise HTTPException(404, f"window {window_len} is not on the sweep grid")
        surface = store.load_pdp(path, window_len, grid)
        if surface is None:
            _, dataset = index.find_dataset(sweep.dataset_id)
            values = []
            for meta in sweep.test_meta:
                try:
                    values.append(dataset.series_by_id(meta["id"]).values)
                except KeyError:
                    raise HTTPException(
                        409,
                        f"dataset {sweep.dataset_id!r} no longer holds test "
                        f"series {meta['id']!r}",
                    ) from None
            surface = pdp_surface(
                sweep.models[window_len], values, grid_size=grid
            )
            store.save_pdp(surface, path, grid)
        return {
            "window": window_len,
            "grid": [float(v) for v in surface.grid],
            "channels": list(surface.channel_names),
            "classes": list(surface.classes),
            "curves": [
                [[float(v) for v in row] for row in ch] for ch in surface.curves
            ],
        }

    @app.get("/api/sweeps/{sweep_id}/loo")
    def sweep_loo(sweep_id: str) -> dict:
        path, _ = index.find_sweep(sweep_id)
        result = store.load_loo(path)
        if result is None:
            raise HTTPException(
                404, f"sweep {sweep_id!r} has no leave-one-out result yet"
            )
        return {
            "windows": list(result.grid.windows),
            "folds": [
                {
                    "group": f.group,
                    "train_groups": list(f.train_groups),
                    "n_test": f.n_test,
                    "accuracies": {str(w): a for w, a in f.accuracies.items()},
                }
                for f in result.folds
            ],
            "summary": {
                str(w): s for w, s in result.summary().items()
            },
        }

    ui_dir = _ui_dir()
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/")
        def root() -> dict:
            return {
                "service": "xmtc",
                "api": "/api/datasets",
                "note": "build the web UI into frontend/dist to serve it here",
            }

    return app
