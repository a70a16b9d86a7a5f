"""Render the evaluation report to a delimited table and figures.

Reads the evaluation JSON written by the pipeline and emits a flat CSV of
every cell plus two PNG figures: precision bars per condition and k, and
the rank-correlation profile across k. Figures are written without
varying metadata so repeated runs stay comparable.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

CONDITION_LABELS = {
    ("all", "without_survey"): "all / simple",
    ("all", "with_survey"): "all / survey",
    ("filtered", "without_survey"): "filtered / simple",
    ("filtered", "with_survey"): "filtered / survey",
}

PNG_METADATA = {"Software": None}


def load_report(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_csv(report: dict, path: str | Path) -> None:
    """Flatten the report grid into one row per cell."""
    rows = []
    for corpus in ("all", "filtered"):
        cell = report["conditions"][corpus]
        for hyp_condition in ("without_survey", "with_survey"):
            block = cell[hyp_condition]
            for k, values in sorted(block["precision"].items(), key=lambda kv: int(kv[0])):
                rows.append(
                    {
                        "corpus": corpus,
                        "hypotheses": hyp_condition,
                        "metric": "precision",
                        "k": k,
                        "p_entail": values["p_entail"],
                        "p_nonneutral": values["p_nonneutral"],
                        "rho": "",
                        "n_pairs": "",
                    }
                )
            spearman = block["spearman"]
            ordered = sorted(
                (k for k in spearman if k != "all"), key=int
            ) + (["all"] if "all" in spearman else [])
            for k in ordered:
                rows.append(
                    {
                        "corpus": corpus,
                        "hypotheses": hyp_condition,
                        "metric": "spearman",
                        "k": k,
                        "p_entail": "",
                        "p_nonneutral": "",
                        "rho": spearman[k]["rho"],
                        "n_pairs": spearman[k]["n_pairs"],
                    }
                )
        baseline = cell["baseline"]
        rows.append(
            {
                "corpus": corpus,
                "hypotheses": "baseline",
                "metric": "precision",
                "k": baseline["n"],
                "p_entail": baseline["p_entail"],
                "p_nonneutral": baseline["p_nonneutral"],
                "rho": "",
                "n_pairs": "",
            }
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=[
                "corpus",
                "hypotheses",
                "metric",
                "k",
                "p_entail",
                "p_nonneutral",
                "rho",
                "n_pairs",
            ],
        )
        writer.writeheader()
        writer.writerows(rows)


def plot_precision(report: dict, path: str | Path) -> None:
    k_values = [str(k) for k in report["k_values"]]
    conditions = list(CONDITION_LABELS)
    width = 0.8 / (len(conditions) + 1)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for ci, key in enumerate(conditions):
        block = report["conditions"][key[0]][key[1]]["precision"]
        entail = [block[k]["p_entail"] for k in k_values]
        nonneutral = [block[k]["p_nonneutral"] for k in k_values]
        positions = [i + ci * width for i in range(len(k_values))]
        ax.bar(positions, nonneutral, width=width, alpha=0.35, color=f"C{ci}")
        ax.bar(positions, entail, width=width, color=f"C{ci}", label=CONDITION_LABELS[key])
    for ci, corpus in enumerate(("all", "filtered")):
        base = report["conditions"][corpus]["baseline"]["p_entail"]
        ax.axhline(base, linestyle="--", linewidth=1, color="C4" if corpus == "all" else "C5")
        ax.text(
            len(k_values) - 0.55,
            base,
            f"baseline ({corpus})",
            fontsize=7,
            va="bottom",
        )
    ax.set_xticks([i + width * (len(conditions) - 1) / 2 for i in range(len(k_values))])
    ax.set_xticklabels([f"top-{k}" for k in k_values])
    ax.set_ylabel("precision")
    ax.set_ylim(0, 1.05)
    ax.set_title("Top-k precision (solid: entailment, pale: non-neutral)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=PNG_METADATA)
    plt.close(fig)


def plot_spearman(report: dict, path: str | Path) -> None:
    k_values = [str(k) for k in report["k_values"]] + ["all"]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for ci, key in enumerate(CONDITION_LABELS):
        block = report["conditions"][key[0]][key[1]]["spearman"]
        values = [block[k]["rho"] for k in k_values]
        ax.plot(range(len(k_values)), values, marker="o", color=f"C{ci}",
                label=CONDITION_LABELS[key])
    ax.axhline(0.0, linewidth=0.8, color="grey")
    ax.set_xticks(range(len(k_values)))
    ax.set_xticklabels([f"top-{k}" if k != "all" else "all" for k in k_values])
    ax.set_ylabel("Spearman's rho")
    ax.set_ylim(-1.05, 1.05)
    ax.set_title("Party-level rank correlation vs. panel scores")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=PNG_METADATA)
    plt.close(fig)


def render(report_path: str | Path, out_dir: str | Path) -> list[Path]:
    """Write report.csv and both figures next to the evaluation report."""
    out = Path(out_dir)
    report = load_report(report_path)
    outputs = [out / "report.csv", out / "fig_precision.png", out / "fig_spearman.png"]
    write_csv(report, outputs[0])
    plot_precision(report, outputs[1])
    plot_spearman(report, outputs[2])
    return outputs
