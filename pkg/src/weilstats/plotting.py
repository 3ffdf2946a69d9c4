"""Figure rendering for the report-style CLI paths.

Everything draws on the Agg backend and writes straight to a file next
to the delimited output; no interactive windows.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import zeta_bounds as zb  # noqa: E402


def save_bounds_figure(path, q, g_max, methods=("hw", "ihara"), search_budget=200):
    """Curves of each bound method over genus 0..g_max at fixed q."""
    gs = list(range(0, g_max + 1))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = {"hw": "Hasse-Weil-Serre", "ihara": "Ihara", "search": "explicit-formula search"}
    for meth in methods:
        ys = []
        for g in gs:
            rep = zb.bound_report(q, g, methods=(meth,), search_budget=search_budget)
            ys.append(rep.best)
        ax.plot(gs, ys, marker="", lw=1.6, label=labels.get(meth, meth))
    ax.set_xlabel("genus g")
    ax.set_ylabel("upper bound on #C(F_q)")
    ax.set_title(f"point-count bounds over F_{q}")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_table_diff_figure(path, report):
    """Slack of our closed-form bounds against the record table, one
    panel per field size."""
    by_q = {}
    for row in report.rows:
        by_q.setdefault(row.entry.q, []).append(row)
    nq = len(by_q)
    fig, axes = plt.subplots(nq, 1, figsize=(7, 2.2 * nq), sharex=True, squeeze=False)
    for ax, (q, rows) in zip(axes[:, 0], sorted(by_q.items())):
        rows = sorted(rows, key=lambda r: r.entry.g)
        gs = [r.entry.g for r in rows]
        slack = [r.slack for r in rows]
        colors = ["tab:red" if r.violation else "tab:blue" for r in rows]
        ax.bar(gs, slack, color=colors, width=0.8)
        ax.axhline(0, color="k", lw=0.8)
        ax.set_ylabel(f"q={q}")
        ax.grid(alpha=0.3, axis="y")
    axes[-1, 0].set_xlabel("genus g")
    axes[0, 0].set_title("bound slack against record table (red = violation)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
