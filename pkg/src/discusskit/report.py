"""Render analytics to files: matplotlib figures alongside delimited output.

`write_discussion_report` produces, for one coded discussion, a
distributions CSV, a strengths/weaknesses CSV, one pie chart per dimension
and the collaboration map; `write_history_report` adds the
cross-discussion comparison chart and its CSV.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import FancyArrowPatch

from .analytics import (
    AssessmentItem,
    CollaborationMap,
    DistributionSummary,
    HistorySeries,
)
from .model import CLASSES_BY_DIMENSION, DIMENSIONS

LABEL_COLORS = {
    "claim": "#4c72b0", "evidence": "#dd8452", "explanation": "#55a868",
    "low": "#c9c9c9", "medium": "#8da0cb", "high": "#2d5986",
    "new": "#999999", "agree": "#55a868", "extension": "#4c72b0",
    "challenge_probe": "#dd8452",
}


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def write_distributions_csv(path: Path, dists: dict[str, DistributionSummary]) -> None:
    rows = []
    for dim in DIMENSIONS:
        if dim not in dists:
            continue
        summary = dists[dim]
        for label in CLASSES_BY_DIMENSION[dim]:
            rows.append([dim, label, summary.counts[label],
                         f"{summary.percentages[label]:.2f}"])
    _write_csv(path, ["dimension", "label", "count", "percentage"], rows)


def write_assessment_csv(path: Path, items: Sequence[AssessmentItem]) -> None:
    rows = [[i.rule.dimension, i.rule.label, f"{i.observed_percentage:.2f}",
             i.rule.weakness_below, i.rule.strength_at_or_above, i.verdict]
            for i in items]
    _write_csv(path, ["dimension", "label", "observed_percentage",
                      "weakness_below", "strength_at_or_above", "verdict"], rows)


def render_distribution_pie(summary: DistributionSummary, path: Path, title: str) -> None:
    labels = [l for l in summary.counts if summary.counts[l] > 0]
    sizes = [summary.counts[l] for l in labels]
    fig, ax = plt.subplots(figsize=(5, 4))
    if sizes:
        ax.pie(sizes, labels=labels, autopct="%1.1f%%",
               colors=[LABEL_COLORS.get(l, "#cccccc") for l in labels],
               startangle=90, counterclock=False)
    legend_lines = [f"{l}: {summary.counts[l]} ({summary.percentages[l]:.1f}%)"
                    for l in summary.counts]
    ax.set_title(title)
    fig.text(0.02, 0.02, "\n".join(legend_lines), fontsize=8, va="bottom")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def render_collaboration_map(cmap: CollaborationMap, path: Path, title: str) -> None:
    """Student turns on a timeline, arcs back to their reference turns."""
    fig, ax = plt.subplots(figsize=(max(6, 0.7 * len(cmap.nodes)), 4))
    xs = {node.turn_index: i for i, node in enumerate(cmap.nodes)}
    for i, node in enumerate(cmap.nodes):
        ax.plot(i, 0, "o", markersize=14, color="#4c72b0", zorder=3)
        ax.annotate(f"{node.turn_index}", (i, 0), ha="center", va="center",
                    color="white", fontsize=7, zorder=4)
        ax.annotate(node.speaker_id, (i, -0.12), ha="center", va="top", fontsize=7)
    for edge in cmap.edges:
        x0, x1 = xs[edge.target_turn_index], xs[edge.reference_turn_index]
        arrow = FancyArrowPatch(
            (x0, 0.03), (x1, 0.03), arrowstyle="-|>", mutation_scale=12,
            connectionstyle=f"arc3,rad={0.25 + 0.02 * abs(x0 - x1)}",
            color=LABEL_COLORS.get(edge.collaboration, "#666666"), lw=1.4, zorder=2)
        ax.add_patch(arrow)
    handles = [plt.Line2D([0], [0], color=LABEL_COLORS[c], lw=2, label=c)
               for c in ("agree", "extension", "challenge_probe")]
    ax.legend(handles=handles, loc="upper left", fontsize=8)
    ax.set_xlim(-0.8, len(cmap.nodes) - 0.2 if cmap.nodes else 1)
    ax.set_ylim(-0.5, 1.0)
    ax.axis("off")
    ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def write_history_csv(path: Path, series: HistorySeries) -> None:
    rows = []
    for entry in series.entries:
        for dim in DIMENSIONS:
            summary = entry.distributions[dim]
            for label in CLASSES_BY_DIMENSION[dim]:
                rows.append([
                    entry.discussion_id,
                    entry.recorded_at.isoformat() if entry.recorded_at else "",
                    dim, label, summary.counts[label],
                    f"{summary.percentages[label]:.2f}",
                ])
    _write_csv(path, ["discussion_id", "recorded_at", "dimension", "label",
                      "count", "percentage"], rows)


def render_history(series: HistorySeries, path: Path) -> None:
    """Grouped bars of label percentages across discussions, one panel per dimension."""
    fig, axes = plt.subplots(len(DIMENSIONS), 1,
                             figsize=(max(6, 1.4 * len(series.entries) + 3), 9))
    names = [e.discussion_id for e in series.entries]
    x = np.arange(len(names))
    for ax, dim in zip(axes, DIMENSIONS):
        classes = CLASSES_BY_DIMENSION[dim]
        width = 0.8 / len(classes)
        for j, label in enumerate(classes):
            values = [e.distributions[dim].percentages[label] for e in series.entries]
            ax.bar(x + j * width, values, width, label=label,
                   color=LABEL_COLORS.get(label, "#cccccc"))
        ax.set_title(dim)
        ax.set_ylabel("% of units")
        ax.set_xticks(x + 0.4 - width / 2)
        ax.set_xticklabels(names, fontsize=8)
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_discussion_report(
    out_dir: Path,
    dists: dict[str, DistributionSummary],
    cmap: CollaborationMap,
    assessment: Sequence[AssessmentItem],
    title: str,
) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    p = out_dir / "distributions.csv"
    write_distributions_csv(p, dists)
    written.append(p)

    p = out_dir / "assessment.csv"
    write_assessment_csv(p, assessment)
    written.append(p)

    for dim in DIMENSIONS:
        p = out_dir / f"overview_{dim}.png"
        render_distribution_pie(dists[dim], p, f"{title}: {dim}")
        written.append(p)

    p = out_dir / "collaboration_map.png"
    render_collaboration_map(cmap, p, f"{title}: collaboration map")
    written.append(p)
    return written


def write_history_report(out_dir: Path, series: HistorySeries) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "history.csv"
    write_history_csv(csv_path, series)
    png_path = out_dir / "history.png"
    render_history(series, png_path)
    return [csv_path, png_path]
