"""Command line interface.

Report-style commands write delimited text to stdout and, when asked via
``--figures``, render the matching PNGs alongside. Training progress goes
to stderr so stdout stays machine-readable.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import report, store
from .core import DrCifConfig, stratified_split
from .data_io import SynthConfig, load_dataset, save_dataset, synthesize
from .earlyclass import (
    accuracy_curve,
    confusion,
    leave_one_out,
    length_histogram,
    temporal_probabilities,
    train_sweep,
)
from .explain import pdp_surface


class _Group(click.Group):
    """Surface the library's input errors as clean CLI errors."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (ValueError, FileExistsError) as exc:
            raise click.ClickException(str(exc)) from exc


@click.group(cls=_Group)
def main() -> None:
    """Early time-series classification sweeps: train, evaluate, explain."""


def _forest_options(fn):
    for opt in reversed(
        [
            click.option("--trees", default=200, show_default=True, help="Trees per forest."),
            click.option("--atts", default=10, show_default=True, help="Attributes sampled per tree."),
            click.option("--min-interval", default=3, show_default=True, help="Minimum interval length."),
            click.option("--max-frac", default=0.5, show_default=True, help="Maximum interval length as a fraction of the representation."),
            click.option("--seed", default=0, show_default=True, help="Forest seed."),
            click.option("--step", default=10, show_default=True, help="Window grid step."),
            click.option("--start", default=10, show_default=True, help="First window length."),
            click.option("--jobs", default=1, show_default=True, help="Worker threads per forest."),
        ]
    ):
        fn = opt(fn)
    return fn


def _config(trees, atts, min_interval, max_frac, seed) -> DrCifConfig:
    return DrCifConfig(
        n_trees=trees,
        n_attributes=atts,
        min_interval_len=min_interval,
        max_interval_frac=max_frac,
        seed=seed,
    )


def _progress(label: str):
    def cb(item, done, total):
        click.echo(f"{label} {item}: {done}/{total}", err=True)

    return cb


@main.command()
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.option("--objects", default=4, show_default=True, help="Grasped object count; classes are objects x 2 sides.")
@click.option("--per-class", default=12, show_default=True, help="Series per class.")
@click.option("--channels", default=12, show_default=True, help="Channel count, a multiple of 3.")
@click.option("--min-length", default=250, show_default=True)
@click.option("--max-length", default=350, show_default=True)
@click.option("--t-side", default=10, show_default=True, help="Step from which the side is visible.")
@click.option("--t-obj", default=150, show_default=True, help="Step from which the object is visible.")
@click.option("--noise", default=0.05, show_default=True, help="Gaussian noise std.")
@click.option("--groups", default=6, show_default=True, help="Pseudo-user group count.")
@click.option("--seed", default=0, show_default=True)
@click.option("--test-frac", default=0.2, show_default=True, help="Held-out fraction per class.")
@click.option("--id", "dataset_id", default=None, help="Dataset id; derived from the parameters when omitted.")
@click.option("--overwrite", is_flag=True, help="Replace an existing dataset directory.")
def synth(out_dir, objects, per_class, channels, min_length, max_length,
          t_side, t_obj, noise, groups, seed, test_frac, dataset_id, overwrite):
    """Generate a synthetic dataset directory with a train/test split."""
    cfg = SynthConfig(
        n_objects=objects,
        series_per_class=per_class,
        n_channels=channels,
        min_length=min_length,
        max_length=max_length,
        t_side=t_side,
        t_obj=t_obj,
        noise_std=noise,
        n_groups=groups,
        seed=seed,
    )
    dataset = synthesize(cfg, dataset_id=dataset_id)
    if test_frac > 0:
        dataset = stratified_split(dataset, test_frac, seed=seed)
    save_dataset(dataset, out_dir, overwrite=overwrite)
    click.echo(
        f"wrote {dataset.dataset_id}: {len(dataset.series)} series, "
        f"{len(dataset.classes)} classes, {len(dataset.test_series())} test"
    )


@main.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path), help="Sweep directory to write.")
@click.option("--overwrite", is_flag=True, help="Replace an existing sweep directory.")
@_forest_options
def train(data_dir, out_dir, overwrite, trees, atts, min_interval, max_frac,
          seed, step, start, jobs):
    """Train one forest per window length and persist the sweep."""
    dataset = load_dataset(data_dir)
    config = _config(trees, atts, min_interval, max_frac, seed)
    sweep = train_sweep(
        dataset, config, step=step, start=start, n_jobs=jobs,
        on_window=_progress("window"),
    )
    store.save_sweep(sweep, out_dir, overwrite=overwrite)
    click.echo(f"wrote sweep {out_dir} ({len(sweep.grid.windows)} windows)")


def _echo_curve(sweep) -> None:
    click.echo("# accuracy curve")
    click.echo("window,accuracy,n_shorter_all,n_shorter_test")
    for p in accuracy_curve(sweep):
        click.echo(
            f"{p.window_len},{p.accuracy:.6f},{p.n_shorter_all},{p.n_shorter_test}"
        )


def _echo_confusion(cm) -> None:
    click.echo(f"# confusion window={cm.window_len}")
    click.echo("true\\predicted," + ",".join(cm.classes))
    for i, cls in enumerate(cm.classes):
        click.echo(cls + "," + ",".join(str(int(v)) for v in cm.counts[i]))


@main.command("eval")
@click.argument("sweep_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--window", default=None, type=int, help="Confusion matrix window; defaults to the last grid window.")
@click.option("--figures", type=click.Path(path_type=Path), default=None, help="Directory for rendered PNGs.")
def eval_cmd(sweep_dir, window, figures):
    """Print the accuracy curve and a confusion matrix from a saved sweep."""
    sweep = store.load_sweep(sweep_dir)
    window = sweep.grid.end if window is None else window
    try:
        cm = confusion(sweep, window)
    except KeyError as exc:
        raise click.ClickException(str(exc.args[0])) from None
    _echo_curve(sweep)
    click.echo("")
    _echo_confusion(cm)
    if figures is not None:
        figures.mkdir(parents=True, exist_ok=True)
        curve = accuracy_curve(sweep)
        all_hist = length_histogram(sweep.all_lengths())
        test_hist = length_histogram(sweep.test_lengths())
        p1 = report.render_accuracy_curve(
            curve, all_hist, test_hist, figures / "accuracy_curve.png"
        )
        p2 = report.render_confusion(cm, figures / f"confusion_w{window:05d}.png")
        click.echo(f"figures: {p1} {p2}", err=True)


@main.command()
@click.argument("sweep_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("series_id")
@click.option("--figures", type=click.Path(path_type=Path), default=None, help="Directory for the rendered PNG.")
def temporal(sweep_dir, series_id, figures):
    """Print one test series' class probabilities across the window grid."""
    sweep = store.load_sweep(sweep_dir)
    try:
        probs = temporal_probabilities(sweep, series_id)
    except KeyError:
        test_ids = ", ".join(m["id"] for m in sweep.test_meta)
        raise click.ClickException(
            f"series {series_id!r} has no cached probabilities; "
            f"test series are: {test_ids}"
        ) from None
    windows = sweep.grid.windows
    click.echo(f"# temporal probabilities series={series_id}")
    click.echo("class," + ",".join(f"w{w}" for w in windows))
    for ci, cls in enumerate(sweep.classes):
        click.echo(cls + "," + ",".join(f"{v:.6f}" for v in probs[ci]))
    if figures is not None:
        figures.mkdir(parents=True, exist_ok=True)
        out = report.render_temporal(
            windows,
            sweep.classes,
            probs,
            figures / f"temporal_{series_id}.png",
            title=f"class probability by window: {series_id}",
        )
        click.echo(f"figures: {out}", err=True)


@main.command()
@click.argument("sweep_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path), help="Dataset directory holding the raw series values.")
@click.option("--window", required=True, type=int, help="Grid window whose model is probed.")
@click.option("--grid", "grid_size", default=20, show_default=True, help="Substituted values per channel.")
@click.option("--figures", type=click.Path(path_type=Path), default=None, help="Directory for the rendered PNG.")
def pdp(sweep_dir, data_dir, window, grid_size, figures):
    """Print substitution response curves, computing and caching on demand.

    Each channel is overwritten with a constant across the whole window for
    every test series; the printed value is the mean predicted probability
    per class. Results are cached inside the sweep directory.
    """
    sweep = store.load_sweep(sweep_dir)
    if window not in sweep.models:
        raise click.ClickException(f"window {window} is not on the sweep grid")
    surface = store.load_pdp(sweep_dir, window, grid_size)
    if surface is None:
        dataset = load_dataset(data_dir)
        values = []
        for meta in sweep.test_meta:
            try:
                values.append(dataset.series_by_id(meta["id"]).values)
            except KeyError:
                raise click.ClickException(
                    f"dataset {dataset.dataset_id!r} is missing test series "
                    f"{meta['id']!r} from the sweep"
                ) from None
        surface = pdp_surface(sweep.models[window], values, grid_size=grid_size)
        store.save_pdp(surface, sweep_dir, grid_size)
    click.echo(f"# substitution response window={window} grid={grid_size}")
    click.echo(
        "channel,class," + ",".join(f"{v:.6f}" for v in surface.grid)
    )
    for ch, name in enumerate(surface.channel_names):
        for ci, cls in enumerate(surface.classes):
            click.echo(
                f"{name},{cls},"
                + ",".join(f"{v:.6f}" for v in surface.curves[ch, ci])
            )
    if figures is not None:
        figures.mkdir(parents=True, exist_ok=True)
        out = report.render_pdp(surface, figures / f"pdp_w{window:05d}.png")
        click.echo(f"figures: {out}", err=True)


@main.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--save", "save_dir", type=click.Path(path_type=Path), default=None, help="Sweep directory to store loo.json in.")
@click.option("--figures", type=click.Path(path_type=Path), default=None, help="Directory for the rendered PNG.")
@_forest_options
def loo(data_dir, save_dir, figures, trees, atts, min_interval, max_frac,
        seed, step, start, jobs):
    """Leave-one-group-out accuracy over the window grid."""
    dataset = load_dataset(data_dir)
    config = _config(trees, atts, min_interval, max_frac, seed)
    result = leave_one_out(
        dataset, config, step=step, start=start, n_jobs=jobs,
        on_fold=_progress("fold"),
    )
    click.echo("# leave-one-group-out accuracy")
    click.echo("group,window,accuracy")
    for fold in result.folds:
        for w in result.grid.windows:
            click.echo(f"{fold.group},{w},{fold.accuracies[w]:.6f}")
    click.echo("")
    click.echo("# summary")
    click.echo("window,mean,std,min,q1,median,q3,max")
    for w, s in result.summary().items():
        click.echo(
            f"{w},{s['mean']:.6f},{s['std']:.6f},{s['min']:.6f},"
            f"{s['q1']:.6f},{s['median']:.6f},{s['q3']:.6f},{s['max']:.6f}"
        )
    if save_dir is not None:
        store.save_loo(result, save_dir)
        click.echo(f"wrote {Path(save_dir) / store.LOO_NAME}", err=True)
    if figures is not None:
        figures.mkdir(parents=True, exist_ok=True)
        out = report.render_loo(result, figures / "loo.png")
        click.echo(f"figures: {out}", err=True)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None, help="Directory scanned for datasets and sweeps; defaults to $XMTC_DATA_DIR or the working directory.")
def serve(host, port, data_dir):
    """Serve the HTTP API (and the web UI when built) over a data directory."""
    import os

    import uvicorn

    from .service import create_app

    if data_dir is None:
        data_dir = Path(os.environ.get("XMTC_DATA_DIR", "."))
    app = create_app(data_dir)
    click.echo(f"serving {data_dir.resolve()} on http://{host}:{port}", err=True)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
