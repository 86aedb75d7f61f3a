"""Report emission: delimited band-energy / SSIM / benchmark tables with
matplotlib figures rendered next to them."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


CONDITION_ORDER = ("reference", "foveated", "contrast", "enhanced")


def _condition_sort_key(label: str):
    return (CONDITION_ORDER.index(label) if label in CONDITION_ORDER else 99,
            label)


def write_band_reports_csv(path: str | Path, reports: list) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["ring_center_deg", "ring_width_deg", "f_lo_cpd",
                      "f_hi_cpd", "condition", "energy"])
        for rep in reports:
            for label in sorted(rep.energies, key=_condition_sort_key):
                for band, energy in zip(rep.bands, rep.energies[label]):
                    out.writerow([rep.ring.center_deg, rep.ring.width_deg,
                                  f"{band.f_lo_cpd:.6g}", f"{band.f_hi_cpd:.6g}",
                                  label, f"{energy:.10g}"])


def write_band_reports_json(path: str | Path, reports: list) -> None:
    payload = [{
        "ring": {"center_deg": rep.ring.center_deg,
                 "width_deg": rep.ring.width_deg},
        "bands": [{"f_lo_cpd": b.f_lo_cpd, "f_hi_cpd": b.f_hi_cpd}
                  for b in rep.bands],
        "energies": rep.energies,
    } for rep in reports]
    Path(path).write_text(json.dumps(payload, indent=2))


def band_energy_figure(path: str | Path, reports: list) -> None:
    fig, axes = plt.subplots(1, len(reports), figsize=(5 * len(reports), 4),
                             squeeze=False)
    for ax, rep in zip(axes[0], reports):
        centers = [0.5 * (b.f_lo_cpd + b.f_hi_cpd) for b in rep.bands]
        for label in sorted(rep.energies, key=_condition_sort_key):
            ax.plot(centers, rep.energies[label], marker="o", label=label)
        ax.set_yscale("log")
        ax.set_xlabel("spatial frequency (cycles/deg)")
        ax.set_ylabel("band energy")
        ax.set_title(f"ring {rep.ring.center_deg:g}° "
                     f"±{rep.ring.width_deg / 2:g}°")
        ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_ssim_csv(path: str | Path, ssim_by_condition: dict) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["condition", "mean_interframe_ssim"])
        for label in sorted(ssim_by_condition, key=_condition_sort_key):
            out.writerow([label, f"{ssim_by_condition[label]:.8f}"])


def ssim_figure(path: str | Path, ssim_by_condition: dict) -> None:
    labels = sorted(ssim_by_condition, key=_condition_sort_key)
    values = [ssim_by_condition[l] for l in labels]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(labels, values, color="tab:blue")
    ax.set_ylabel("mean inter-frame SSIM")
    lo = min(values)
    ax.set_ylim(max(0.0, lo - 0.05), 1.0)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_bench_csv(path: str | Path, rows: list) -> None:
    """rows: dicts with impulses_per_kernel / estimation_ms / synthesis_ms."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["impulses_per_kernel", "estimation_ms", "synthesis_ms",
                      "total_ms"])
        for row in rows:
            out.writerow([row["impulses_per_kernel"],
                          f"{row['estimation_ms']:.3f}",
                          f"{row['synthesis_ms']:.3f}",
                          f"{row['estimation_ms'] + row['synthesis_ms']:.3f}"])


def bench_figure(path: str | Path, rows: list) -> None:
    ns = [r["impulses_per_kernel"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ns, [r["estimation_ms"] for r in rows], marker="o",
            label="parameter estimation")
    ax.plot(ns, [r["synthesis_ms"] for r in rows], marker="s",
            label="noise synthesis")
    ax.set_xlabel("impulses per kernel")
    ax.set_ylabel("median time (ms)")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
