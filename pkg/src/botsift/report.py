"""Report rendering: delimited tables plus matplotlib figures on disk.

Every figure lands next to its delimited counterpart so a run directory is
self-describing. Uses the Agg backend; nothing here opens a window.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import IoFailure
from .metrics import EvalReport
from .mlp import SweepResult, TrainingTrace


def write_trace_tsv(trace: TrainingTrace, path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("pass\tloss\taccuracy\n")
            for i, (loss, acc) in enumerate(zip(trace.losses, trace.accuracies), start=1):
                fh.write(f"{i}\t{loss:.6f}\t{acc:.6f}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write trace to {path}: {exc}") from exc


def render_trace_figure(trace: TrainingTrace, path: str | Path) -> None:
    """Loss and training accuracy against pass number."""
    passes = range(1, len(trace) + 1)
    fig, ax_loss = plt.subplots(figsize=(7, 4.5))
    ax_loss.plot(passes, trace.losses, color="tab:red", label="mean loss")
    ax_loss.set_xlabel("pass")
    ax_loss.set_ylabel("mean loss", color="tab:red")
    ax_loss.tick_params(axis="y", labelcolor="tab:red")
    ax_acc = ax_loss.twinx()
    ax_acc.plot(passes, trace.accuracies, color="tab:blue", label="training accuracy")
    ax_acc.set_ylabel("training accuracy", color="tab:blue")
    ax_acc.tick_params(axis="y", labelcolor="tab:blue")
    ax_acc.set_ylim(0.0, 1.05)
    ax_loss.set_title("Training trace")
    fig.tight_layout()
    _save(fig, path)


def write_sweep_tsv(results: list[SweepResult], path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("learning_rate\taccuracy\tdiverged\n")
            for r in results:
                fh.write(f"{r.rate:g}\t{r.accuracy:.6f}\t{int(r.diverged)}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write sweep table to {path}: {exc}") from exc


def format_sweep_table(results: list[SweepResult]) -> str:
    lines = [f"{'learning_rate':>14}  {'accuracy':>8}  flag"]
    for r in results:
        flag = "DIVERGED" if r.diverged else ""
        lines.append(f"{r.rate:>14g}  {r.accuracy:>8.4f}  {flag}")
    return "\n".join(lines)


def render_sweep_figure(results: list[SweepResult], path: str | Path) -> None:
    """Eval accuracy against learning rate (log scale); divergent rates marked."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ok = [r for r in results if not r.diverged]
    bad = [r for r in results if r.diverged]
    if ok:
        ax.plot([r.rate for r in ok], [r.accuracy for r in ok], "o-", color="tab:blue")
    if bad:
        ax.plot(
            [r.rate for r in bad],
            [r.accuracy for r in bad],
            "x",
            color="tab:red",
            markersize=10,
            label="diverged",
        )
        ax.legend()
    ax.set_xscale("log")
    ax.set_xlabel("learning rate")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Learning-rate sweep")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def _fmt(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.4f}"


def format_eval_table(report: EvalReport) -> str:
    cm = report.confusion
    return "\n".join(
        [
            "confusion matrix (bot = positive)",
            f"             pred bot   pred human",
            f"  true bot   {cm.tp:>8d}   {cm.fn:>10d}",
            f"  true human {cm.fp:>8d}   {cm.tn:>10d}",
            "",
            f"accuracy : {_fmt(report.accuracy)}",
            f"precision: {_fmt(report.precision)}",
            f"recall   : {_fmt(report.recall)}",
            f"f1       : {_fmt(report.f1)}",
        ]
    )


def render_confusion_figure(report: EvalReport, path: str | Path) -> None:
    cm = report.confusion
    grid = [[cm.tp, cm.fn], [cm.fp, cm.tn]]
    fig, ax = plt.subplots(figsize=(4.5, 4))
    image = ax.imshow(grid, cmap="Blues")
    for i in range(2):
        for j in range(2):
            ax.text(j, i, str(grid[i][j]), ha="center", va="center")
    ax.set_xticks([0, 1], labels=["pred bot", "pred human"])
    ax.set_yticks([0, 1], labels=["true bot", "true human"])
    ax.set_title(f"accuracy {report.accuracy:.3f}")
    fig.colorbar(image, fraction=0.046)
    fig.tight_layout()
    _save(fig, path)


def _save(fig, path: str | Path) -> None:
    try:
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise IoFailure(f"cannot write figure to {path}: {exc}") from exc
    finally:
        plt.close(fig)
