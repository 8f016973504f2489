"""Report rendering for sweeps and searches: JSON, CSV, and figures.

A sweep writes three files side by side: the JSON report, a CSV histogram
of longest-reduction lengths, and a bar-chart rendering of that histogram.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .analyzer import PropsReport, SweepReport  # noqa: E402


def eta_histogram_csv(report: SweepReport) -> str:
    rows = ["eta,count"]
    rows += [f"{eta},{count}" for eta, count in sorted(report.eta_histogram.items())]
    return "\n".join(rows) + "\n"


def render_eta_histogram(report: SweepReport, path: Path) -> None:
    etas = sorted(report.eta_histogram)
    counts = [report.eta_histogram[e] for e in etas]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(etas, counts, color="#3b6ea5", edgecolor="black", linewidth=0.4)
    ax.set_xlabel("longest reduction length")
    ax.set_ylabel("terms")
    ax.set_title(f"{report.spec.calculus}, rules {'+'.join(report.rules)}, "
                 f"size <= {report.spec.max_cxty}")
    ax.set_yscale("log" if counts and max(counts) > 50 * max(min(counts), 1)
                  else "linear")
    if etas:
        ax.set_xticks(etas)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_sweep_outputs(report: SweepReport, outdir) -> list[Path]:
    """Write report.json, eta_histogram.csv, and eta_histogram.png."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    json_path = outdir / "report.json"
    json_path.write_text(json.dumps(report.to_json(), indent=2) + "\n",
                         encoding="utf-8")
    paths.append(json_path)
    csv_path = outdir / "eta_histogram.csv"
    csv_path.write_text(eta_histogram_csv(report), encoding="utf-8")
    paths.append(csv_path)
    png_path = outdir / "eta_histogram.png"
    render_eta_histogram(report, png_path)
    paths.append(png_path)
    return paths


def props_suspects_csv(report: PropsReport) -> str:
    out = []
    writer_rows = [["kind", "m", "n", "args", "conclusion"]]
    for kind, items in (("suspect", report.suspects),
                        ("inconclusive", report.inconclusive)):
        for item in items:
            writer_rows.append([kind, item.get("m", ""), item.get("n", ""),
                                " ; ".join(item.get("args", [])),
                                item.get("conclusion", "")])
    import io
    buf = io.StringIO()
    csv.writer(buf).writerows(writer_rows)
    return buf.getvalue()


def write_props_outputs(report: PropsReport, outdir) -> list[Path]:
    """Write report.json and suspects.csv for a counterexample search."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    json_path = outdir / "report.json"
    json_path.write_text(json.dumps(report.to_json(), indent=2) + "\n",
                         encoding="utf-8")
    csv_path = outdir / "suspects.csv"
    csv_path.write_text(props_suspects_csv(report), encoding="utf-8")
    return [json_path, csv_path]
