"""Render a simulator report to a traffic CSV and matplotlib figures."""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

CSV_COLUMNS = ["step", "failed_cluster", "failed_node", "intra_symbols",
               "cross_symbols", "gamma_observed", "gamma_theoretical", "exact"]


def write_traffic_csv(report: dict, path: Path) -> Path:
    """One row per repair event, matching the report's traffic records."""
    gamma_th = report["gamma_theoretical"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for ev in report["repairs"]:
            writer.writerow([
                ev["step"], ev["failed"][0], ev["failed"][1],
                ev["intra_symbols"], ev["cross_symbols"],
                ev["gamma_observed"], gamma_th, ev["exact"],
            ])
    return path


def _title(report: dict) -> str:
    sc = report["scenario"]
    cfg = sc["config"]
    return f"{sc['code']}  [n={cfg['n']}, k={cfg['k']}, L={cfg['L']}]  seed={sc['seed']}"


def render_traffic_figure(report: dict, path: Path) -> Path:
    """Stacked intra/cross bars per repair with the predicted total."""
    events = report["repairs"]
    steps = [ev["step"] for ev in events]
    intra = [ev["intra_symbols"] for ev in events]
    cross = [ev["cross_symbols"] for ev in events]
    fig, ax = plt.subplots(figsize=(7, 4))
    if events:
        ax.bar(steps, intra, label="intra-cluster", color="#4878cf")
        ax.bar(steps, cross, bottom=intra, label="cross-cluster", color="#d65f5f")
        ax.set_xticks(steps)
    else:
        ax.text(0.5, 0.5, "no repair events", ha="center", va="center",
                transform=ax.transAxes)
    gamma_th = float(Fraction(report["gamma_theoretical"]))
    ax.axhline(gamma_th, color="black", linestyle="--", linewidth=1,
               label=f"predicted total = {report['gamma_theoretical']}")
    ax.set_xlabel("repair step")
    ax.set_ylabel("symbols shipped")
    ax.set_title(_title(report))
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_summary_figure(report: dict, path: Path) -> Path:
    """Repair exactness and data-collector subset outcomes side by side."""
    events = report["repairs"]
    dc = report["dc"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.5))
    exact = sum(1 for ev in events if ev["exact"])
    ax1.bar(["exact", "mismatched"], [exact, len(events) - exact],
            color=["#6acc65", "#d65f5f"])
    ax1.set_title("repairs")
    ax1.set_ylabel("events")
    ax2.bar(["tried", "passed"], [dc["tried"], dc["passed"]],
            color=["#4878cf", "#6acc65"])
    ax2.set_title(f"k-subset reads ({dc['mode']})")
    fig.suptitle(_title(report), fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report(report: dict, outdir: Path) -> list[Path]:
    """Write traffic.csv plus PNG figures; returns the created paths."""
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        write_traffic_csv(report, outdir / "traffic.csv"),
        render_traffic_figure(report, outdir / "repair_traffic.png"),
        render_summary_figure(report, outdir / "summary.png"),
    ]
