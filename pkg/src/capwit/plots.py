"""Rendering of capacity reports as grouped bar figures.

One panel per flip probability, bars over the correlation strengths:
witnessed joint capacity next to the independent-use limit, with the
ideal-channel prediction drawn as an outline.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_report(rows, path) -> None:
    """Write a grouped bar chart for a sequence of ReportRow objects."""
    groups: dict = {}
    for row in rows:
        groups.setdefault(row.p, []).append(row)
    keys = sorted(groups, reverse=True)

    fig, axes = plt.subplots(
        1, len(keys), figsize=(3.0 * len(keys), 3.2), sharey=True, squeeze=False
    )
    width = 0.38
    for ax, p in zip(axes[0], keys):
        panel = sorted(groups[p], key=lambda r: r.mu)
        xs = range(len(panel))
        q_tot = [r.q_det or 0.0 for r in panel]
        q_lim = [r.q_lim or 0.0 for r in panel]
        errs = [r.sigma_q or 0.0 for r in panel]
        ax.bar(
            [x - width / 2 for x in xs], q_tot, width,
            yerr=errs, color="tab:blue", label="$Q_{tot}$",
        )
        ax.bar(
            [x + width / 2 for x in xs], q_lim, width,
            color="tab:green", label="$Q_{lim}$",
        )
        theory = [r.q_theory for r in panel]
        if all(t is not None for t in theory):
            ax.bar(
                xs, theory, 2 * width,
                fill=False, edgecolor="darkcyan", linewidth=1.4, label="ideal",
            )
        ax.set_xticks(list(xs))
        ax.set_xticklabels([r.mu_label or f"{r.mu:g}" for r in panel])
        label = panel[0].p_label or f"{p:g}"
        ax.set_xlabel(f"correlation $\\mu$  (p = {label})")
    axes[0][0].set_ylabel("capacity bound (qubits/use)")
    axes[0][-1].legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
