"""Figures for study results, written next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# studies without ratio reports get a histogram of one row column
HIST_COLUMNS = {
    "duality": "slack",
    "lemma": "min_eig_rel",
    "atoms": "area_l1",
    "bracket": "upper",
}


def _scatter(ax, rep, label: str):
    idx = rep.used
    x = np.asarray(rep.x, dtype=float)[idx]
    y = np.asarray(rep.y, dtype=float)[idx]
    ax.loglog(x, y, ".", ms=4, alpha=0.7)
    env = rep.envelope()
    if env["min"] is not None and x.size:
        span = np.array([x.min(), x.max()])
        ax.loglog(span, env["min"] * span, "k--", lw=0.8)
        ax.loglog(span, env["max"] * span, "k--", lw=0.8)
        ax.set_title(f"{label}\nratio in [{env['min']:.3g}, {env['max']:.3g}]", fontsize=8)
    else:
        ax.set_title(label, fontsize=8)
    ax.set_xlabel(rep.x_name, fontsize=7)
    ax.set_ylabel(rep.y_name, fontsize=7)
    ax.tick_params(labelsize=6)


def _histogram(ax, rows: list, report: str, column: str):
    vals = np.array([r[column] for r in rows if r.get("report") == report and column in r], dtype=float)
    vals = vals[np.isfinite(vals)]
    ax.hist(vals, bins=min(40, max(5, vals.size // 5)))
    ax.set_title(f"{report}: {column}", fontsize=8)
    ax.tick_params(labelsize=6)


def _panels(result) -> list:
    out = [("scatter", label, rep) for label, rep in result.reports.items()]
    seen = {r.get("report") for r in result.rows}
    for report, column in HIST_COLUMNS.items():
        if report in seen:
            out.append(("hist", report, column))
    return out


def write_figure(result, path) -> Path | None:
    """Render all panels of a study result into one PNG; None if nothing to draw."""
    panels = _panels(result)
    if not panels:
        return None
    cols = min(3, len(panels))
    rows = -(-len(panels) // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 3.4 * rows), squeeze=False)
    for ax, (kind, label, obj) in zip(axes.flat, panels):
        if kind == "scatter":
            _scatter(ax, obj, label)
        else:
            _histogram(ax, result.rows, label, obj)
    for ax in list(axes.flat)[len(panels):]:
        ax.axis("off")
    status = "pass" if result.ok else "FAIL"
    fig.suptitle(f"{result.name} ({status})", fontsize=10)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
