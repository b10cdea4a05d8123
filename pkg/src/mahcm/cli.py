"""Command-line surface: synthetic data generation, clustering runs, scoring.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
failure. Every run writes assignment.csv, stats.csv and manifest.json into
the output directory; re-running with ``--manifest`` reproduces the outputs.
"""

import datetime
import sys
import time
from importlib import metadata
from pathlib import Path

import click

from . import evaluate
from .errors import DataError, InvariantError
from .formats import (load_manifest, load_segments, read_assignment,
                      save_segments, write_assignment, write_manifest,
                      write_stats)
from .mahc import IterationStats, MahcConfig, full_ahc, run
from .synth import SyntheticSpec, generate_synthetic, skewed_class_sizes

try:
    _VERSION = metadata.version("mahcm")
except metadata.PackageNotFoundError:
    _VERSION = "unknown"

MODES = ("ahc-baseline", "mahc", "mahc-m")

_CONFIG_KEYS = ("mode", "input", "p0", "beta", "max_iters", "conv_window",
                "seed", "workers", "final_k", "ward_on_squared", "l_refine",
                "dtw_normalize")


@click.group()
@click.version_option(_VERSION, prog_name="mahcm")
def cli():
    """Cluster variable-length feature-vector sequences under a memory cap."""


@cli.command("gen")
@click.option("--classes", type=int, default=20, show_default=True, help="Number of classes.")
@click.option("--total", type=int, default=None,
              help="Total segment count; sizes follow --skew. Overrides --members.")
@click.option("--members", type=int, default=50, show_default=True,
              help="Segments per class when --total is not given.")
@click.option("--skew", type=float, default=1.0, show_default=True,
              help="Largest/smallest class size ratio used with --total.")
@click.option("--dim", type=int, default=3, show_default=True)
@click.option("--min-len", type=int, default=8, show_default=True)
@click.option("--max-len", type=int, default=16, show_default=True)
@click.option("--jitter", type=float, default=0.0, show_default=True)
@click.option("--warp", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_gen(classes, total, members, skew, dim, min_len, max_len, jitter, warp, seed, out):
    """Generate a labeled synthetic dataset (line-delimited JSON)."""
    if total is not None:
        sizes = skewed_class_sizes(classes, total, skew)
    else:
        sizes = members
    spec = SyntheticSpec(n_classes=classes, class_sizes=sizes, dim=dim,
                         min_len=min_len, max_len=max_len, jitter=jitter,
                         warp=warp, seed=seed)
    dataset = generate_synthetic(spec)
    save_segments(dataset, out)
    click.echo(f"wrote {dataset.n} segments ({classes} classes, dim {dim}) to {out}")


@cli.command("run")
@click.option("--mode", type=click.Choice(MODES), default="mahc-m", show_default=True)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Segment file (line-delimited JSON).")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--p0", type=int, default=4, show_default=True, help="Initial subset count.")
@click.option("--beta", type=int, default=None,
              help="Occupancy cap; defaults to ceil(N / p0).")
@click.option("--max-iters", type=int, default=10, show_default=True)
@click.option("--conv-window", type=int, default=2, show_default=True,
              help="Stable-subset-count window that counts as convergence.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--final-k", type=int, default=None,
              help="Override the automatic final cluster count.")
@click.option("--ward-on-squared/--no-ward-on-squared", default=True, show_default=True,
              help="Feed raw distances to the Ward update as squared analogues.")
@click.option("--l-refine/--no-l-refine", default=False, show_default=True,
              help="Iteratively re-run knee detection on the truncated curve.")
@click.option("--dtw-normalize/--no-dtw-normalize", default=False, show_default=True,
              help="Divide alignment costs by the summed sequence lengths.")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Reproduce a previous run from its manifest.")
def cmd_run(mode, input_path, out_dir, p0, beta, max_iters, conv_window, seed,
            workers, final_k, ward_on_squared, l_refine, dtw_normalize,
            manifest_path):
    """Cluster a dataset and write assignment, stats and manifest."""
    if manifest_path is not None:
        previous = load_manifest(manifest_path)
        missing = [k for k in _CONFIG_KEYS if k not in previous]
        if missing:
            raise DataError(f"{manifest_path}: manifest lacks keys {missing}")
        mode = previous["mode"]
        input_path = previous["input"]
        p0 = previous["p0"]
        beta = previous["beta"]
        max_iters = previous["max_iters"]
        conv_window = previous["conv_window"]
        seed = previous["seed"]
        workers = previous["workers"]
        final_k = previous["final_k"]
        ward_on_squared = previous["ward_on_squared"]
        l_refine = previous["l_refine"]
        dtw_normalize = previous["dtw_normalize"]
    if input_path is None:
        raise click.UsageError("--input is required (or supply --manifest)")

    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.perf_counter()
    dataset = load_segments(input_path)
    if beta is None:
        beta = -(-dataset.n // p0)  # ceil(N / p0)
    config = MahcConfig(p0=p0, beta=beta, max_iters=max_iters,
                        conv_window=conv_window, seed=seed, workers=workers,
                        final_k=final_k, manage_size=(mode == "mahc-m"),
                        ward_on_squared=ward_on_squared, l_refine=l_refine,
                        dtw_normalize=dtw_normalize)
    labels = dataset.labels

    if mode == "ahc-baseline":
        config.validate()
        assignment, used_k, _ = full_ahc(dataset, k=final_k, config=config)
        fm = evaluate.score(assignment, labels) if labels is not None else None
        seconds = time.perf_counter() - t0
        stats = [IterationStats(iteration=0, n_subsets=1, max_occupancy=dataset.n,
                                min_occupancy=dataset.n, n_medoids=used_k,
                                k_estimate=used_k, fmeasure=fm, seconds=seconds)]
        final_k_used = used_k
        peak = dataset.n
    else:
        result = run(dataset, config)
        assignment = result.assignment
        stats = result.stats
        fm = stats[-1].fmeasure
        final_k_used = result.final_k
        peak = max(row.max_occupancy for row in stats)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_assignment(out / "assignment.csv", dataset, assignment)
    write_stats(out / "stats.csv", stats)
    finished = datetime.datetime.now(datetime.timezone.utc).isoformat()
    write_manifest(out / "manifest.json", {
        "tool": "mahcm", "version": _VERSION,
        "mode": mode, "input": str(input_path), "out_dir": str(out_dir),
        "p0": p0, "beta": beta, "max_iters": max_iters,
        "conv_window": conv_window, "seed": seed, "workers": workers,
        "final_k": final_k, "ward_on_squared": ward_on_squared,
        "l_refine": l_refine, "dtw_normalize": dtw_normalize,
        "started": started, "finished": finished,
    })

    total = time.perf_counter() - t0
    click.echo(f"mode={mode} N={dataset.n} final_K={final_k_used} "
               f"peak_subset={peak} seconds={total:.2f}"
               + (f" fmeasure={fm:.4f}" if fm is not None else ""))


@cli.command("eval")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Labeled segment file.")
@click.option("--assignment", "assignment_path",
              type=click.Path(exists=True, dir_okay=False), required=True)
def cmd_eval(input_path, assignment_path):
    """Score an assignment CSV against a labeled dataset."""
    dataset = load_segments(input_path)
    labels = dataset.labels
    if labels is None:
        raise DataError(f"{input_path}: dataset carries no labels to score against")
    mapping = read_assignment(assignment_path)
    try:
        cluster_ids = [mapping[seg.id] for seg in dataset.segments]
    except KeyError as exc:
        raise DataError(f"{assignment_path}: no cluster for segment id {exc.args[0]}") from exc
    if len(mapping) != dataset.n:
        raise DataError(
            f"{assignment_path}: {len(mapping)} rows for {dataset.n} segments"
        )
    table = evaluate.contingency(cluster_ids, labels)
    fm = evaluate.dataset_f_measure(table)
    click.echo(f"N={table.total} K={table.k} L={table.l} fmeasure={fm:.6f}")


def main(argv=None):
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(2)
    except InvariantError as exc:
        click.echo(f"internal invariant failure: {exc}", err=True)
        sys.exit(3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
