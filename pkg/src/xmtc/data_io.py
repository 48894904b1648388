"""Dataset directory format and the synthetic benchmark generator.

A dataset directory holds two files:

* ``manifest``: JSON with the dataset id, channel names in order, class
  names, and an optional train/test split map;
* ``series.csv``: header ``series_id,group_id,label,t,ch_0,...,ch_{D-1}``
  with ``t`` a dense 0-based integer per series and rows sorted by
  (series_id, t).

The synthetic generator produces grasp-like recordings: channels come in
triples (x, y, z components per aperture), classes are object x side pairs,
and the two class factors become visible at different times. The side flips
the sign of the z components from step ``t_side`` on; the object scales the
x/y components from step ``t_obj`` on. Before its onset step a factor is
statistically invisible, which is what gives the early-classification curves
their two-stage shape.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ChannelSpec, Dataset, MultivariateSeries
from .rng import substream

__all__ = [
    "SynthConfig",
    "synthesize",
    "aperture_channel_names",
    "save_dataset",
    "load_dataset",
]

MANIFEST_NAME = "manifest"
SERIES_NAME = "series.csv"
DATASET_FORMAT = "xmtc-dataset"
DATASET_VERSION = 1

_APERTURES = ("tia", "tma", "tra", "tla")
_COMPONENTS = ("x", "y", "z")
_OBJECTS = ("bottle", "cup", "knife", "pen")
_SIDES = ("l", "r")


def aperture_channel_names(n_channels: int) -> tuple[str, ...]:
    """Channel names; the 12-channel case uses the aperture convention."""
    if n_channels == 12:
        return tuple(f"{a}{c}" for a in _APERTURES for c in _COMPONENTS)
    return tuple(f"ch{i:02d}" for i in range(n_channels))


@dataclass(frozen=True)
class SynthConfig:
    """Synthetic data parameters; classes = n_objects * 2 sides.

    Lengths are uniform integers in [min_length, max_length]. Groups are
    assigned round-robin over the class-major series order, so choosing
    series_per_class as a multiple of n_groups balances every
    (class, group) pair exactly.
    """

    n_objects: int = 4
    series_per_class: int = 12
    n_channels: int = 12
    min_length: int = 250
    max_length: int = 350
    t_side: int = 10
    t_obj: int = 150
    noise_std: float = 0.05
    n_groups: int = 6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_objects < 1:
            raise ValueError("n_objects must be >= 1")
        if self.series_per_class < 1:
            raise ValueError("series_per_class must be >= 1")
        if self.n_channels < 3 or self.n_channels % 3 != 0:
            raise ValueError("n_channels must be a positive multiple of 3")
        if not 2 <= self.min_length <= self.max_length:
            raise ValueError("need 2 <= min_length <= max_length")
        if not 0 < self.t_side < self.t_obj < self.min_length:
            raise ValueError("need 0 < t_side < t_obj < min_length")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        if self.n_groups < 1:
            raise ValueError("n_groups must be >= 1")

    @property
    def classes(self) -> tuple[str, ...]:
        objects = [
            _OBJECTS[i] if i < len(_OBJECTS) else f"obj{i}"
            for i in range(self.n_objects)
        ]
        return tuple(sorted(f"{s}_{o}" for s in _SIDES for o in objects))


# Harmonic period scale in steps. Intervals of a few dozen steps span whole
# periods, so their statistics read the envelope amplitude instead of the
# phase; periods must stay shorter than typical intervals for the object
# factors below to be learnable.
_WAVE_PERIOD = 50.0


def _object_scale(obj: int, n_objects: int) -> float:
    # Geometric spacing keeps adjacent post-onset amplitude bands
    # scale * [0.8, 1.0] disjoint (ratio 1.5 between objects against a 1.25
    # within-class spread), so the object is readable from late-interval
    # statistics without being visible before t_obj.
    return 0.5 * 1.5**obj


def _synth_series(
    cfg: SynthConfig, index: int, side_sign: float, obj: int
) -> np.ndarray:
    # per-series substream; draw order: length, then per channel two
    # frequencies, two amplitudes, two phases, then the noise matrix
    rng = substream(cfg.seed, index)
    length = int(rng.integers(cfg.min_length, cfg.max_length + 1))
    t = np.arange(length, dtype=np.float64)
    values = np.empty((cfg.n_channels, length))
    for ch in range(cfg.n_channels):
        freqs = rng.uniform(0.5, 2.0, size=2)
        amps = rng.uniform(0.8, 1.0, size=2)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
        waves = [
            np.sin(2.0 * np.pi * freqs[h] * t / _WAVE_PERIOD + phases[h])
            for h in range(2)
        ]
        if ch % 3 == 2:
            # z component: positive baseline so the side flip is sign-readable
            base = 0.7 + 0.15 * waves[0] + 0.10 * waves[1]
            base[cfg.t_side :] *= side_sign
        else:
            base = amps[0] * waves[0] + 0.5 * amps[1] * waves[1]
            base[cfg.t_obj :] *= _object_scale(obj, cfg.n_objects)
        values[ch] = base
    values += rng.normal(0.0, cfg.noise_std, size=values.shape)
    return values


def synthesize(cfg: SynthConfig, dataset_id: str | None = None) -> Dataset:
    """Generate a balanced labelled dataset, deterministic in cfg.seed.

    The returned dataset has every series tagged train; apply
    :func:`xmtc.core.stratified_split` to carve out a test split.
    """
    classes = cfg.classes
    if dataset_id is None:
        dataset_id = f"synth-{len(classes)}c-{cfg.seed}"
    channels = tuple(
        ChannelSpec(index=i, name=n)
        for i, n in enumerate(aperture_channel_names(cfg.n_channels))
    )
    objects = sorted({c.split("_", 1)[1] for c in classes})
    side_obj = []
    for label in classes:
        side, obj_name = label.split("_", 1)
        side_obj.append((1.0 if side == "l" else -1.0, objects.index(obj_name)))
    series = []
    index = 0
    for ci, label in enumerate(classes):
        side_sign, obj = side_obj[ci]
        for _ in range(cfg.series_per_class):
            values = _synth_series(cfg, index, side_sign, obj)
            series.append(
                MultivariateSeries(
                    series_id=f"s{index:04d}",
                    group_id=f"u{index % cfg.n_groups:02d}",
                    label=label,
                    values=values,
                )
            )
            index += 1
    return Dataset(
        dataset_id=dataset_id,
        channels=channels,
        classes=classes,
        series=tuple(series),
    )


# ---------------------------------------------------------------------------
# directory format


def save_dataset(
    dataset: Dataset, path: str | Path, overwrite: bool = False
) -> None:
    """Write manifest + series.csv; rows sorted by (series_id, t)."""
    path = Path(path)
    if not overwrite and (path / MANIFEST_NAME).exists():
        raise FileExistsError(
            f"{path} already holds a dataset; pass overwrite=True to replace it"
        )
    path.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "id": dataset.dataset_id,
        "channels": list(dataset.channel_names),
        "classes": list(dataset.classes),
        "split": {sid: dataset.split[sid] for sid in sorted(dataset.split)},
    }
    (path / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    header = ["series_id", "group_id", "label", "t"] + [
        f"ch_{i}" for i in range(dataset.n_channels)
    ]
    with open(path / SERIES_NAME, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in sorted(dataset.series, key=lambda s: s.series_id):
            for t in range(s.length):
                writer.writerow(
                    [s.series_id, s.group_id, s.label, t]
                    + [repr(float(v)) for v in s.values[:, t]]
                )


def _load_manifest(path: Path) -> dict:
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.is_file():
        raise ValueError(f"{path}: missing {MANIFEST_NAME}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{manifest_path}: not valid JSON: {exc}") from exc
    for key in ("format", "version", "id", "channels", "classes"):
        if key not in manifest:
            raise ValueError(f"{manifest_path}: missing key {key!r}")
    if manifest["format"] != DATASET_FORMAT:
        raise ValueError(
            f"{manifest_path}: format is {manifest['format']!r}, "
            f"expected {DATASET_FORMAT!r}"
        )
    if manifest["version"] != DATASET_VERSION:
        raise ValueError(
            f"{manifest_path}: unsupported version {manifest['version']!r}"
        )
    return manifest


def load_dataset(path: str | Path) -> Dataset:
    """Load and validate a dataset directory.

    Raises ValueError naming the offending series and time index for
    non-finite values, and rejects missing columns, unsorted or non-dense
    time indices, unknown labels and inconsistent channel counts.
    """
    path = Path(path)
    manifest = _load_manifest(path)
    channel_names = list(manifest["channels"])
    classes = tuple(sorted(manifest["classes"]))
    series_path = path / SERIES_NAME
    if not series_path.is_file():
        raise ValueError(f"{path}: missing {SERIES_NAME}")
    expected_header = ["series_id", "group_id", "label", "t"] + [
        f"ch_{i}" for i in range(len(channel_names))
    ]
    order: list[str] = []
    rows: dict[str, dict] = {}
    with open(series_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected_header:
            raise ValueError(
                f"{series_path}: header must be {','.join(expected_header)}"
            )
        prev_key: tuple[str, int] | None = None
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(expected_header):
                raise ValueError(
                    f"{series_path}:{line_no}: expected {len(expected_header)} "
                    f"columns, got {len(row)}"
                )
            sid, gid, label, t_str = row[:4]
            try:
                t = int(t_str)
            except ValueError:
                raise ValueError(
                    f"{series_path}:{line_no}: t must be an integer"
                ) from None
            key = (sid, t)
            if prev_key is not None and key <= prev_key:
                raise ValueError(
                    f"{series_path}:{line_no}: rows must be sorted by "
                    f"(series_id, t) without duplicates"
                )
            prev_key = key
            if sid not in rows:
                order.append(sid)
                rows[sid] = {"group": gid, "label": label, "values": []}
            entry = rows[sid]
            if entry["group"] != gid or entry["label"] != label:
                raise ValueError(
                    f"{series_path}:{line_no}: series {sid!r} changes group or label"
                )
            if t != len(entry["values"]):
                raise ValueError(
                    f"{series_path}:{line_no}: series {sid!r} has non-dense "
                    f"time index {t}, expected {len(entry['values'])}"
                )
            try:
                vals = [float(v) for v in row[4:]]
            except ValueError:
                raise ValueError(
                    f"{series_path}:{line_no}: non-numeric channel value"
                ) from None
            for ch, v in enumerate(vals):
                if not math.isfinite(v):
                    raise ValueError(
                        f"{series_path}: series {sid!r} has a non-finite value "
                        f"at channel {ch}, time index {t}"
                    )
            entry["values"].append(vals)
    if not order:
        raise ValueError(f"{series_path}: no series rows")
    class_set = set(classes)
    series = []
    for sid in order:
        entry = rows[sid]
        if entry["label"] not in class_set:
            raise ValueError(
                f"{series_path}: series {sid!r} has label {entry['label']!r} "
                f"not listed in the manifest classes"
            )
        series.append(
            MultivariateSeries(
                series_id=sid,
                group_id=entry["group"],
                label=entry["label"],
                values=np.array(entry["values"], dtype=np.float64).T,
            )
        )
    split = manifest.get("split") or {}
    if split:
        missing = {s.series_id for s in series} - set(split)
        if missing:
            raise ValueError(
                f"{path}: manifest split does not cover series {sorted(missing)}"
            )
    channels = tuple(
        ChannelSpec(index=i, name=n) for i, n in enumerate(channel_names)
    )
    return Dataset(
        dataset_id=str(manifest["id"]),
        channels=channels,
        classes=classes,
        series=tuple(series),
        split=dict(split),
    )
