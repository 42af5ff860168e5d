"""Figures for campaign reports (written to files, never shown)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .mutation import MutationType  # noqa: E402


def plot_discrepancies(reports: dict, path) -> Path:
    """Cumulative distinct discrepancy signatures against executions, one
    line per labelled report."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, rep in sorted(reports.items()):
        xs = [0] + [x for x, _ in rep.series]
        ys = [0] + [y for _, y in rep.series]
        ax.step(xs, ys, where="post", label=label)
    ax.set_xlabel("executions")
    ax.set_ylabel("distinct discrepancies")
    ax.grid(alpha=0.3)
    if len(reports) > 1:
        ax.legend(fontsize=7)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def plot_probabilities(rep, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [i for i, _ in rep.probabilities]
    for k, m in enumerate(MutationType):
        ax.plot(xs, [P[k] for _, P in rep.probabilities], label=m.name)
    ax.set_xlabel("executions")
    ax.set_ylabel("activation probability")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=7, ncol=2)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
