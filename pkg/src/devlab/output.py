"""CSV, JSON and SVG artifacts of an experiment run."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .report import REPORT_COLUMNS

SERIES_COLUMNS = ("trial", "T", "value", "running_max")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def write_report_csv(path, report):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(REPORT_COLUMNS)
        for row in report.rows:
            w.writerow([_cell(v) for v in row.as_tuple()])


def write_series_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(SERIES_COLUMNS)
        for trial, T, value, runmax in sorted(rows, key=lambda r: (r[0], r[1])):
            w.writerow([trial, T, repr(float(value)), repr(float(runmax))])


def write_report_json(path, report):
    doc = {
        "config": report.config,
        "passed": report.passed,
        "rows": [dict(zip(REPORT_COLUMNS, r.as_tuple())) for r in report.rows],
        "trials": report.trials,
        "notes": report.notes,
        "wall_clock_s": round(report.wall_clock, 3),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, default=float)
        fh.write("\n")


def write_plot_svg(path, outcome):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plot = outcome.plot
    with matplotlib.rc_context({"svg.hashsalt": "devlab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        rows = np.array([(t, T, m) for t, T, _, m in outcome.series], dtype=float).reshape(-1, 3)
        if plot.get("kind") == "loglog":
            for s in plot["series"]:
                keep = (s.T > 0) & (s.running_max > 0)
                ax.loglog(s.T[keep], s.running_max[keep], color="0.6", lw=0.7)
            fits = plot["fits"]
            slope = float(np.median([f.slope for f in fits]))
            icpt = float(np.median([f.intercept for f in fits]))
            T = np.array([s.T for s in plot["series"]][0], dtype=float)
            T = T[T > 0]
            ax.loglog(T, np.exp(icpt) * T ** slope, color="C3", lw=1.5,
                      label=f"median fit, slope {slope:.3f}")
            ref = plot.get("reference_slope")
            if ref is not None:
                ax.loglog(T, np.exp(icpt) * T ** ref, "--", color="C0", lw=1.2,
                          label=f"predicted, slope {ref:.3f}")
            ax.set_xlabel("T")
            ax.set_ylabel("running max of deviation")
        else:
            for trial in np.unique(rows[:, 0]):
                sel = rows[:, 0] == trial
                ax.semilogx(rows[sel, 1], rows[sel, 2], color="0.5", lw=0.8)
            ax.set_xlabel("Zorich steps")
            ax.set_ylabel("running estimate")
        if ax.get_legend_handles_labels()[0]:
            ax.legend(frameon=False)
        ax.set_title(outcome.report.config.get("experiment", ""))
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def write_outputs(outcome, output_dir) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_report_csv(out / "report.csv", outcome.report)
    write_series_csv(out / "series.csv", outcome.series)
    write_report_json(out / "report.json", outcome.report)
    write_plot_svg(out / "plot.svg", outcome)
    return out
