"""Figure rendering for report outputs. All figures go to files; no GUI."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import Report


def render_bucket_histogram(
    raw: Mapping[tuple[int, int], int],
    balanced: Mapping[tuple[int, int], int],
    path: str | Path,
) -> Path:
    """Grouped bars of pair counts per (rows, cols) target bucket,
    before and after balancing."""
    keys = sorted(set(raw) | set(balanced))
    labels = [f"{m},{n}" for m, n in keys]
    xs = range(len(keys))
    width = 0.42

    fig, ax = plt.subplots(figsize=(max(8, len(keys) * 0.5), 4))
    ax.bar([x - width / 2 for x in xs], [raw.get(k, 0) for k in keys], width, label="raw")
    ax.bar([x + width / 2 for x in xs], [balanced.get(k, 0) for k in keys], width, label="balanced")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=90, fontsize=8)
    ax.set_xlabel("target size (rows, cols)")
    ax.set_ylabel("pairs")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _bucket_bars(ax, data: Mapping[str, dict]) -> None:
    labels = list(data)
    xs = range(len(labels))
    width = 0.42
    ax.bar([x - width / 2 for x in xs], [data[k]["precision"] for k in labels], width, label="precision")
    ax.bar([x + width / 2 for x in xs], [data[k]["recall"] for k in labels], width, label="recall")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)


def render_report_figures(report: Report, out_dir: str | Path, stem: str = "report") -> list[Path]:
    """Write the report's bucketed breakdowns and histograms as PNG files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    fig, axes = plt.subplots(1, 3, figsize=(14, 4))
    for ax, (title, data) in zip(
        axes,
        [
            ("by table size (cells)", report.by_size),
            ("by cond+answer columns", report.by_column_count),
            ("by answer rows", report.by_answer_rows),
        ],
    ):
        _bucket_bars(ax, data)
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    path = out_dir / f"{stem}_buckets.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    keys = sorted(report.iterations_histogram)
    xs = range(len(keys))
    ax.bar(xs, [report.iterations_histogram[k] for k in keys])
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(k) for k in keys])
    ax.set_xlabel("iterations to fixed point")
    ax.set_ylabel("records")
    fig.tight_layout()
    path = out_dir / f"{stem}_iterations.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist([r.reduction_ratio for r in report.results], bins=20, range=(0, 1))
    ax.set_xlabel("subtable cells / source cells")
    ax.set_ylabel("records")
    fig.tight_layout()
    path = out_dir / f"{stem}_reduction.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    return written
