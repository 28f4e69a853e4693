"""Result aggregation: delimited reports and rendered figures.

Solve reports are merged into a CSV with one row per instance; the gap
column is recomputed here from the bound and incumbent columns so the
report stays consistent even when inputs come from different runs.  The
same rows can be rendered to PNG figures (bounds per instance, gap per
instance) for quick visual inspection; a separate helper draws the
per-resource conflict profiles of an instance.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .instance import SchedulingInstance
from .linmodel import format_number
from .windowing import build_feasible_intervals, conflict_profile

__all__ = [
    "ReportRow",
    "report_rows_from_payloads",
    "write_report_csv",
    "render_report_figures",
    "render_conflict_figure",
]

REPORT_COLUMNS = ("instance", "root_bound", "final_bound", "best", "gap", "runtime_s")


@dataclass(frozen=True)
class ReportRow:
    instance: str
    root_bound: float
    final_bound: float
    best: float
    runtime_s: float

    @property
    def gap(self) -> float:
        """Relative optimality gap (final_bound - best) / final_bound."""
        if self.final_bound <= 0.0:
            return 0.0
        return max(0.0, (self.final_bound - self.best) / self.final_bound)


def report_rows_from_payloads(payloads: Sequence[Mapping]) -> list[ReportRow]:
    rows = []
    for payload in payloads:
        rows.append(
            ReportRow(
                instance=str(payload.get("instance", "unnamed")),
                root_bound=float(payload["root_bound"]),
                final_bound=float(payload["upper_bound"]),
                best=float(payload["objective_value"]),
                runtime_s=float(payload["elapsed_s"]),
            )
        )
    return rows


def write_report_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.instance,
                format_number(row.root_bound),
                format_number(row.final_bound),
                format_number(row.best),
                format_number(row.gap),
                format_number(row.runtime_s),
            ]
        )
    return buf.getvalue()


def render_report_figures(
    rows: Sequence[ReportRow], outdir: Path, stem: str = "report"
) -> list[Path]:
    """Render the bounds and gap figures, returning the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = [row.instance for row in rows]
    positions = range(len(rows))

    paths: list[Path] = []
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(rows) + 2.0), 4.0))
    ax.bar(positions, [row.best for row in rows], color="#4878cf", label="best value")
    ax.plot(
        positions,
        [row.final_bound for row in rows],
        "k_",
        markersize=14,
        label="final bound",
    )
    ax.plot(
        positions,
        [row.root_bound for row in rows],
        "r.",
        label="root bound",
    )
    ax.set_xticks(list(positions))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("objective")
    ax.legend()
    ax.set_title("Incumbent against bounds")
    fig.tight_layout()
    bounds_path = outdir / f"{stem}_bounds.png"
    fig.savefig(bounds_path, dpi=120)
    plt.close(fig)
    paths.append(bounds_path)

    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(rows) + 2.0), 3.2))
    ax.bar(positions, [row.gap for row in rows], color="#d65f5f")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("gap")
    ax.set_title("Optimality gap")
    fig.tight_layout()
    gap_path = outdir / f"{stem}_gap.png"
    fig.savefig(gap_path, dpi=120)
    plt.close(fig)
    paths.append(gap_path)
    return paths


def render_conflict_figure(instance: SchedulingInstance, path: Path) -> Path:
    """Step plot of window coverage degree over time, one panel per resource."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    resources = list(instance.resources)
    fig, axes = plt.subplots(
        len(resources), 1, figsize=(9.0, 1.8 * len(resources) + 1.0), sharex=True
    )
    if len(resources) == 1:
        axes = [axes]
    for ax, r in zip(axes, resources):
        for fti in build_feasible_intervals(list(instance.windows_by_resource[r.id])):
            xs: list[float] = []
            ys: list[float] = []
            for seg in conflict_profile(fti):
                xs.extend([seg.begin, seg.end])
                ys.extend([seg.degree, seg.degree])
            ax.fill_between(xs, ys, step="post", alpha=0.5, color="#4878cf")
        ax.set_ylabel(r.id, fontsize=8)
        ax.margins(y=0.2)
    axes[-1].set_xlabel("time (s)")
    fig.suptitle("Window conflict degree")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
