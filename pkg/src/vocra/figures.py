"""Report figures rendered next to the delimited benchmark output.

Boxplot panels in the house style of the benchmark: one panel per metric,
outlier rate on the x axis, one colored box series per solver. Figures are
a reporting convenience; no numeric result depends on them.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .benchmark import BenchRecord

_SOLVER_COLORS = {"vocra": "#1f77b4", "ransac": "#d62728"}

_METRICS = (
    ("rot_err", "rotation_error_deg", "rotation error (deg)", True),
    ("trans_err", "translation_error", "translation error", True),
    ("runtime", "runtime_seconds", "runtime (s)", True),
)


def _box_series(records: list[BenchRecord], attr: str) -> dict[str, dict[float, list[float]]]:
    out: dict[str, dict[float, list[float]]] = {}
    for r in records:
        val = getattr(r, attr)
        if isinstance(val, float) and math.isnan(val):
            continue
        out.setdefault(r.solver, {}).setdefault(r.outlier_rate, []).append(val)
    return out


def render_benchmark_figures(
    records: Iterable[BenchRecord], out_dir: str | Path, stem: str = "bench"
) -> list[Path]:
    """Write one boxplot PNG per metric; returns the created paths."""
    records = list(records)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rates = sorted({r.outlier_rate for r in records})
    paths: list[Path] = []
    for name, attr, label, log_scale in _METRICS:
        series = _box_series(records, attr)
        if not series:
            continue
        fig, ax = plt.subplots(figsize=(7.0, 4.3))
        solvers = sorted(series)
        width = 0.8 / max(len(solvers), 1)
        for si, solver in enumerate(solvers):
            data = [series[solver].get(rate, []) for rate in rates]
            positions = [
                i + (si - (len(solvers) - 1) / 2.0) * width for i in range(len(rates))
            ]
            color = _SOLVER_COLORS.get(solver, f"C{si}")
            bp = ax.boxplot(
                data,
                positions=positions,
                widths=width * 0.85,
                patch_artist=True,
                manage_ticks=False,
                flierprops={"markersize": 3, "alpha": 0.6},
            )
            for box in bp["boxes"]:
                box.set(facecolor=color, alpha=0.45)
            for med in bp["medians"]:
                med.set(color=color, linewidth=1.6)
            ax.plot([], [], color=color, label=solver)
        ax.set_xticks(range(len(rates)))
        ax.set_xticklabels([f"{100 * r:g}%" for r in rates])
        ax.set_xlabel("outlier rate")
        ax.set_ylabel(label)
        if log_scale:
            ax.set_yscale("log")
        ax.grid(True, axis="y", alpha=0.3)
        ax.legend(loc="best", frameon=False)
        fig.tight_layout()
        path = out_dir / f"{stem}_{name}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        paths.append(path)
    return paths


def render_vote_figure(
    votes: Sequence[float],
    ranks_of_inliers: Sequence[int] | None,
    path: str | Path,
) -> Path:
    """Vote totals by rank, with true-inlier ranks highlighted when known."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(votes, reverse=True)
    fig, ax = plt.subplots(figsize=(7.0, 4.3))
    ax.plot(range(1, len(ordered) + 1), ordered, lw=1.0, color="#444444", label="votes")
    if ranks_of_inliers:
        vals = [ordered[r - 1] for r in ranks_of_inliers]
        ax.scatter(
            ranks_of_inliers, vals, s=18, color="#1f77b4", zorder=3, label="true inliers"
        )
    ax.set_xlabel("rank")
    ax.set_ylabel("vote total")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
