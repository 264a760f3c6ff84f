"""Command-line interface: the whole pipeline as subcommands.

Every subcommand is deterministic given its flags and seed. Exit codes:
0 success, 1 usage/config error, 2 data error, 3 numeric divergence.
"""
from __future__ import annotations

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import crawler, ingest, metrics, mlp, normalize, report, synth
from .config import RunConfig, load_config, with_seed
from .errors import BotsiftError, ConfigError, EmptyInput, IoFailure, NonFiniteLoss
from .features import extract_all, extract_features

logger = logging.getLogger("botsift")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


def _load_run_config(config_path: str | None, seed: int | None) -> RunConfig:
    config = load_config(config_path) if config_path else RunConfig()
    if seed is not None:
        config = with_seed(config, seed)
    return config


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose: bool):
    """Bot-account classification pipeline for Twitter-shaped data."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command("synth")
@click.option("--n", type=click.IntRange(min=1), required=True,
              help="Number of accounts to generate.")
@click.option("--bot-fraction", type=click.FloatRange(0.0, 1.0), default=0.5,
              show_default=True)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_synth(n: int, bot_fraction: float, seed: int | None, config_path: str | None, out: str):
    """Generate a labeled synthetic account dataset."""
    config = _load_run_config(config_path, seed)
    dataset = synth.generate(n, bot_fraction, profile=config.synth, seed=config.seed)
    ingest.save_dataset(dataset, out)
    click.echo(f"wrote {len(dataset)} accounts to {out} ({dataset.provenance})")


@cli.command("crawl")
@click.option("--fixture", "fixture_dir", type=click.Path(file_okay=False), required=True,
              help="Fixture directory with accounts/ and adjacency.json.")
@click.option("--seeds", default=None,
              help="Comma-separated seed account ids (ignored with --resume).")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--checkpoint", "checkpoint_path", type=click.Path(dir_okay=False))
@click.option("--resume", is_flag=True, help="Continue from the checkpoint file.")
@click.option("--budget-steps", type=click.IntRange(min=0), default=None,
              help="Stop after this many steps.")
@click.option("--max-requests", type=click.IntRange(min=1), default=None,
              help="Requests per window.")
@click.option("--window-seconds", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--checkpoint-every", type=click.IntRange(min=1), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def cmd_crawl(fixture_dir, seeds, out, checkpoint_path, resume, budget_steps,
              max_requests, window_seconds, checkpoint_every, config_path):
    """Breadth-first crawl of a fixture-backed account graph."""
    config = _load_run_config(config_path, None)
    policy = config.rate_limit
    if max_requests is not None:
        policy = replace(policy, max_requests=max_requests)
    if window_seconds is not None:
        policy = replace(policy, window_seconds=window_seconds)
    source = crawler.FixtureSource(fixture_dir)
    state = None
    if resume:
        if not checkpoint_path:
            raise click.UsageError("--resume requires --checkpoint")
        state = crawler.resume(checkpoint_path)
    elif not seeds:
        raise click.UsageError("--seeds is required unless resuming")
    seed_ids = [s.strip() for s in (seeds or "").split(",") if s.strip()]
    final = crawler.run_crawl(
        seed_ids,
        source,
        policy,
        budget_steps=budget_steps,
        state=state,
        checkpoint_path=checkpoint_path,
        checkpoint_every=checkpoint_every or config.checkpoint_every,
        tweet_cap=config.tweet_cap,
        provenance=f"crawl(fixture={fixture_dir}, seeds={','.join(seed_ids)})",
    )
    ingest.save_dataset(final.collected, out)
    click.echo(
        f"collected {len(final.collected)} accounts "
        f"({len(final.frontier)} still queued) -> {out}"
    )


@cli.command("flag")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--threshold", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Follower-friend ratio cutoff (default from config, 20).")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def cmd_flag(dataset_path, threshold, config_path):
    """List accounts with a high follower-friend ratio for manual review."""
    config = _load_run_config(config_path, None)
    dataset = ingest.load_dataset(dataset_path, tweet_cap=config.tweet_cap)
    cutoff = threshold if threshold is not None else config.tff_threshold
    by_id = {r.account_id: r for r in dataset.records}
    for account_id in ingest.flag_by_tff(dataset, cutoff):
        ratio = ingest.tff_ratio(by_id[account_id])
        click.echo(f"{account_id}\t{ratio:g}")


@cli.command("split")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--train-size", type=click.IntRange(min=0), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--train-out", type=click.Path(dir_okay=False), required=True)
@click.option("--test-out", type=click.Path(dir_okay=False), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def cmd_split(dataset_path, train_size, seed, train_out, test_out, config_path):
    """Seeded shuffle-and-cut of a labeled dataset into train and test files."""
    config = _load_run_config(config_path, seed)
    dataset = ingest.load_dataset(dataset_path, tweet_cap=config.tweet_cap)
    train_set, test_set = ingest.split(dataset, train_size, config.seed)
    ingest.save_dataset(train_set, train_out)
    ingest.save_dataset(test_set, test_out)
    click.echo(f"split {len(dataset)} -> {len(train_set)} train / {len(test_set)} test")


@cli.command("build")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--csv-out", type=click.Path(dir_okay=False), required=True)
@click.option("--stats-out", type=click.Path(dir_okay=False), default=None,
              help="Stats sidecar path (default: <csv>.stats.json).")
@click.option("--stats-in", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Apply previously fitted stats instead of fitting.")
@click.option("--normalization", type=click.Choice(normalize.METHODS), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def cmd_build(dataset_path, csv_out, stats_out, stats_in, normalization, config_path):
    """Extract features, normalize, and emit the training CSV + stats sidecar."""
    config = _load_run_config(config_path, None)
    dataset = ingest.load_dataset(dataset_path, tweet_cap=config.tweet_cap)
    rows = extract_all(dataset)
    if not rows:
        raise EmptyInput(f"dataset {dataset_path} holds no records")
    if stats_in:
        stats = normalize.load_stats(stats_in)
    else:
        method = normalization if normalization is not None else config.normalization
        stats = normalize.fit([v for v, _ in rows], method=method)
    clamped = normalize.emit_csv(rows, stats, csv_out, stats_path=stats_out)
    sidecar = stats_out or normalize.stats_sidecar_path(csv_out)
    click.echo(f"wrote {len(rows)} rows to {csv_out} (stats: {sidecar})")
    if clamped:
        click.echo(f"warning: clamped {clamped} below-minimum values", err=True)


def _rows_from_csv(path: str) -> list[tuple[tuple[float, ...], int]]:
    values, labels = normalize.load_csv(path)
    if not values:
        raise EmptyInput(f"CSV {path} holds no data rows")
    return [(v, 1 if lab is ingest.Label.BOT else 0) for v, lab in zip(values, labels)]


def _mlp_config(config: RunConfig, passes, learning_rate, hidden, batch_size) -> mlp.MlpConfig:
    out = config.mlp
    if passes is not None:
        out = replace(out, passes=passes)
    if learning_rate is not None:
        out = replace(out, learning_rate=learning_rate)
    if hidden is not None:
        try:
            layout = tuple(int(w) for w in hidden.split(",") if w.strip())
        except ValueError:
            raise click.UsageError(f"--hidden must be comma-separated integers, got {hidden!r}")
        out = replace(out, hidden_layout=layout)
    if batch_size is not None:
        out = replace(out, batch_size=None if batch_size == 0 else batch_size)
    return out


@cli.command("train")
@click.option("--csv", "csv_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--model-out", type=click.Path(dir_okay=False), required=True)
@click.option("--trace-out", type=click.Path(dir_okay=False), default=None,
              help="Trace TSV path (default: <model>.trace.tsv).")
@click.option("--passes", type=click.IntRange(min=1), default=None)
@click.option("--learning-rate", type=click.FloatRange(min=0, min_open=True),
              default=None)
@click.option("--hidden", default=None, help="Comma-separated hidden widths, e.g. 25 or 10,10.")
@click.option("--batch-size", type=click.IntRange(min=0), default=None,
              help="0 means full batch.")
@click.option("--seed", type=int, default=None)
@click.option("--figure/--no-figure", "want_figure", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def cmd_train(csv_path, model_out, trace_out, passes, learning_rate, hidden,
              batch_size, seed, want_figure, config_path):
    """Train the classifier on a normalized CSV; write model, trace, figure."""
    config = _load_run_config(config_path, seed)
    mlp_config = _mlp_config(config, passes, learning_rate, hidden, batch_size)
    rows = _rows_from_csv(csv_path)
    model, trace = mlp.train(mlp_config, rows)
    mlp.save_model(model, model_out)
    trace_path = Path(trace_out) if trace_out else Path(model_out).with_suffix(".trace.tsv")
    report.write_trace_tsv(trace, trace_path)
    if want_figure:
        report.render_trace_figure(trace, trace_path.with_suffix(".png"))
    click.echo(
        f"trained on {len(rows)} rows for {mlp_config.passes} passes: "
        f"final loss {trace.losses[-1]:.4f}, final accuracy {trace.accuracies[-1]:.4f}"
    )
    click.echo(f"model -> {model_out}; trace -> {trace_path}")


@cli.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--csv", "csv_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--json-out", type=click.Path(dir_okay=False), default=None)
@click.option("--figure/--no-figure", "want_figure", default=False, show_default=True)
def cmd_eval(model_path, csv_path, json_out, want_figure):
    """Evaluate a trained model on a labeled normalized CSV."""
    model = mlp.load_model(model_path)
    rows = _rows_from_csv(csv_path)
    predictions = [mlp.predict(model, x)[0] for x, _ in rows]
    truth = [ingest.Label.BOT if y == 1 else ingest.Label.HUMAN for _, y in rows]
    eval_report = metrics.evaluate(metrics.confusion(predictions, truth))
    click.echo(report.format_eval_table(eval_report))
    payload = json.dumps(metrics.report_to_dict(eval_report), indent=2)
    if json_out:
        Path(json_out).write_text(payload + "\n", encoding="utf-8")
        click.echo(f"json -> {json_out}")
        if want_figure:
            figure_path = Path(json_out).with_suffix(".png")
            report.render_confusion_figure(eval_report, figure_path)
            click.echo(f"figure -> {figure_path}")
    else:
        click.echo(payload)


@cli.command("predict")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--stats", "stats_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Stats sidecar fitted at build time.")
@click.argument("account_json", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
def cmd_predict(model_path, stats_path, account_json):
    """Classify raw account JSON files; one `id TAB label TAB score` line each."""
    model = mlp.load_model(model_path)
    stats = normalize.load_stats(stats_path)
    for path in account_json:
        try:
            document = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot read account file {path}: {exc}") from exc
        record = ingest.parse_account(document)
        x = normalize.transform_row(extract_features(record), stats)
        label, score = mlp.predict(model, x)
        click.echo(f"{record.account_id}\t{label.value}\t{score:.6f}")


@cli.command("sweep")
@click.option("--train-csv", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--eval-csv", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--rates", default="0.005,0.01,0.02,0.05,0.1", show_default=True,
              help="Comma-separated learning rates.")
@click.option("--out", "tsv_out", type=click.Path(dir_okay=False), required=True)
@click.option("--passes", type=click.IntRange(min=1), default=None)
@click.option("--hidden", default=None)
@click.option("--batch-size", type=click.IntRange(min=0), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--figure/--no-figure", "want_figure", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def cmd_sweep(train_csv, eval_csv, rates, tsv_out, passes, hidden, batch_size, seed,
              want_figure, config_path):
    """Train once per learning rate and tabulate eval accuracy."""
    config = _load_run_config(config_path, seed)
    base = _mlp_config(config, passes, None, hidden, batch_size)
    try:
        rate_list = [float(r) for r in rates.split(",") if r.strip()]
    except ValueError:
        raise click.UsageError(f"--rates must be comma-separated numbers, got {rates!r}")
    if not rate_list:
        raise click.UsageError("--rates must name at least one rate")
    train_rows = _rows_from_csv(train_csv)
    eval_rows = _rows_from_csv(eval_csv)
    results = mlp.lr_sweep(base, rate_list, train_rows, eval_rows)
    click.echo(report.format_sweep_table(results))
    report.write_sweep_tsv(results, tsv_out)
    if want_figure:
        report.render_sweep_figure(results, Path(tsv_out).with_suffix(".png"))
    click.echo(f"table -> {tsv_out}")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except NonFiniteLoss as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DIVERGED
    except BotsiftError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATA
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
