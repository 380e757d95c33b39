"""Matplotlib figures written next to the CSV/JSON output of an experiment."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (4.8, 3.2),
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def square_figure(rows, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ps = [r["p"] for r in rows]
        x = np.arange(len(rows))
        ax.bar(x - 0.18, [r["value_e1"] for r in rows], 0.36, label="E1 (slanted)")
        ax.bar(x + 0.18, [r["value_e2"] for r in rows], 0.36, label="E2 (horizontal)")
        ax.set_xticks(x, [f"p={p:g}" for p in ps])
        ax.set_ylabel("perimeter")
        ax.legend(frameon=False)
        return _save(fig, path)


def h_by_level_figure(node_rows, keys, path):
    """Trapezoid values per node, grouped by level, on a symlog axis."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        levels = np.array([r["level"] for r in node_rows]) if "level" in node_rows[0] else None
        if levels is None:
            idx = np.array([r["node"] for r in node_rows])
            levels = np.floor(np.log2(idx + 1)).astype(int)
        for key in keys:
            vals = np.array([r[key] for r in node_rows])
            ax.plot(levels + 0.1 * keys.index(key), vals, ".", ms=2, label=key)
        ax.set_yscale("symlog", linthresh=1e-18)
        ax.axhline(0.0, color="k", lw=0.5)
        ax.set_xlabel("level")
        ax.set_ylabel("h")
        ax.legend(frameon=False)
        return _save(fig, path)


def levels_figure(level_rows, keys, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        n = [r["level"] for r in level_rows]
        for key in keys:
            ax.semilogy(n, [r[key] for r in level_rows], "o-", ms=3, label=key)
        ax.set_xlabel("level")
        ax.legend(frameon=False)
        return _save(fig, path)


def g_scan_figure(rows, path):
    with plt.rc_context(STYLE):
        fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(4.8, 4.2))
        alpha = [r["alpha"] for r in rows]
        a1.plot(alpha, [r["g"] for r in rows], "-")
        a1.set_ylabel("g")
        a2.plot(alpha, [r["dg"] for r in rows], "-")
        a2.axhline(0.0, color="k", lw=0.5)
        a2.set_ylabel("g'")
        a2.set_xlabel("child angle")
        return _save(fig, path)
