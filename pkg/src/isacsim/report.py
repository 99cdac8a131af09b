"""Campaign artifacts: delimited sample tables and matplotlib CDF figures.

One CSV and one SVG per (mode, metric), plus a percentile summary table
across all metrics.  Output is byte-deterministic for a given campaign:
samples are sorted, floats use a fixed format, and the SVG writer is
seeded (fixed hash salt, no embedded timestamps).
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .campaign import CdfResult

METRIC_LABELS = {
    "coupling_loss": "Coupling loss [dB]",
    "ds": "Delay spread [s]",
    "asa": "Azimuth spread of arrival [deg]",
    "asd": "Azimuth spread of departure [deg]",
    "zsa": "Zenith spread of arrival [deg]",
    "zsd": "Zenith spread of departure [deg]",
}


def write_cdf_csv(result: CdfResult, path: str) -> None:
    x, f = result.cdf()
    with open(path, "w", newline="") as fh:
        fh.write("rank,value,cdf\n")
        for i, (v, p) in enumerate(zip(x, f), start=1):
            fh.write(f"{i},{v:.17g},{p:.17g}\n")


def write_percentiles_csv(results: list[CdfResult], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("percentile," + ",".join(r.metric for r in results) + "\n")
        tables = [r.percentiles for r in results]
        for i, q in enumerate(range(1, 100)):
            fh.write(f"{q}," + ",".join(f"{t[i]:.17g}" for t in tables) + "\n")


def plot_cdf_svg(result: CdfResult, path: str, title: str = "") -> None:
    x, f = result.cdf()
    with plt.rc_context({"svg.hashsalt": "isacsim"}):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        ax.plot(x, f, drawstyle="steps-post", lw=1.2)
        ax.set_xlabel(METRIC_LABELS.get(result.metric, result.metric))
        ax.set_ylabel("CDF")
        ax.set_ylim(0.0, 1.0)
        ax.grid(True, alpha=0.3)
        if title:
            ax.set_title(title, fontsize=10)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def emit_campaign_artifacts(results: list[CdfResult], out_dir: str, tag: str) -> list[str]:
    """Write CSV + SVG per metric and a percentile summary; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for res in results:
        if len(res.samples) == 0:
            continue
        base = os.path.join(out_dir, f"{tag}_{res.metric}")
        write_cdf_csv(res, base + "_cdf.csv")
        plot_cdf_svg(res, base + "_cdf.svg", title=f"{tag} {res.metric} ({len(res.samples)} samples)")
        written += [base + "_cdf.csv", base + "_cdf.svg"]
    nonempty = [r for r in results if len(r.samples)]
    if nonempty:
        summary = os.path.join(out_dir, f"{tag}_percentiles.csv")
        write_percentiles_csv(nonempty, summary)
        written.append(summary)
    return written
