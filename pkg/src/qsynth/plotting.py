"""Figures for the report commands. Non-interactive backend; byte-stable PNG output."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
WIDTH = 4.8  # inches
STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "svg.hashsalt": "qsynth",
}
MARKERS = {"fused": "o", "naive": "s"}


def _save(fig, path) -> None:
    # drop the Software tag so identical data gives identical bytes
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def scaling_figure(results: dict, path, title: str = "") -> None:
    """Log-log CNOT counts per policy with the fitted power law."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(WIDTH, WIDTH * GOLDEN))
        for policy, res in results.items():
            L = np.asarray(res.sizes, float)
            y = np.asarray(res.cnots, float)
            ax.loglog(L, y, MARKERS.get(policy, "^"), label=f"{policy} (slope {res.exponent:.2f})")
            c = np.exp(np.mean(np.log(y) - res.exponent * np.log(L)))
            grid = np.linspace(L.min(), L.max(), 50)
            ax.loglog(grid, c * grid ** res.exponent, "--", color=ax.lines[-1].get_color(), lw=0.8)
        ax.set_xlabel("lattice extent L")
        ax.set_ylabel("CNOT count per Trotter step")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def counts_figure(reports, labels, path) -> None:
    """Grouped bars of gate counts, one group per report."""
    kinds = ["cnot", "h", "s", "sdg", "rz", "cphase", "swap"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(WIDTH, WIDTH * GOLDEN))
        x = np.arange(len(kinds))
        width = 0.8 / max(len(reports), 1)
        for i, (r, lab) in enumerate(zip(reports, labels)):
            ax.bar(x + i * width, [getattr(r, k) for k in kinds], width, label=lab)
        ax.set_xticks(x + width * (len(reports) - 1) / 2)
        ax.set_xticklabels(kinds)
        ax.set_ylabel("gates")
        if len(reports) > 1:
            ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)
