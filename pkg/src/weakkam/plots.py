"""Render figures from a finished experiment's CSV artifacts.

Reads profiles.csv and convergence.csv (the CSVs stay the data boundary;
figures are derived views) and writes profiles.png and convergence.png
next to them.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(header)}


def render_report_figures(out_dir):
    """Write profiles.png and convergence.png from an output directory."""
    prof = _read_csv(os.path.join(out_dir, "profiles.csv"))
    conv = _read_csv(os.path.join(out_dir, "convergence.csv"))

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    x = prof["x"]
    ax1.plot(x, prof["h_inf_target"], "k-", lw=2, label="predicted limit")
    ax1.plot(x, prof["u_lambda_min_lambda"], "C1--", lw=2,
             label="u_lambda (smallest lambda)")
    ax1.plot(x, prof["v0"], "C2:", label="v0 (subsolution start)")
    ax1.set_ylabel("value")
    ax1.legend(loc="best", fontsize=9)
    ax1.set_title("discounted solution vs predicted vanishing-discount limit")
    ax2.plot(x, prof["U"], "C0-", label="potential U")
    ax2.plot(x, prof["a"], "C3-", label="discount coefficient a")
    ax2.axhline(0.0, color="gray", lw=0.5)
    ax2.set_xlabel("x")
    ax2.set_ylabel("value")
    ax2.legend(loc="best", fontsize=9)
    fig.tight_layout()
    prof_path = os.path.join(out_dir, "profiles.png")
    fig.savefig(prof_path, dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(conv["lambda"], np.maximum(conv["sup_error"], 1e-300), "o-",
              label="sup error vs limit")
    ax.loglog(conv["lambda"], np.maximum(conv["residual"], 1e-300), "s--",
              label="Bellman residual")
    ax.set_xlabel("lambda")
    ax.set_ylabel("sup norm")
    ax.invert_xaxis()
    ax.legend(loc="best", fontsize=9)
    ax.set_title("vanishing-discount sweep")
    fig.tight_layout()
    conv_path = os.path.join(out_dir, "convergence.png")
    fig.savefig(conv_path, dpi=150)
    plt.close(fig)
    return [prof_path, conv_path]
