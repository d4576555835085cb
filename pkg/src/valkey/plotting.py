"""Figures for CLI reports (matplotlib, non-interactive backend).

Exact values are plotted as floats; the JSON report remains the source of
truth.  INF points are drawn at the top edge with an upward marker.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .values import INF  # noqa: E402

STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _size(width: float = 6.0) -> tuple[float, float]:
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    return width, width * golden


def _split(values, ceiling):
    finite = [(i, float(v)) for i, v in enumerate(values) if v is not INF]
    infinite = [i for i, v in enumerate(values) if v is INF]
    return finite, [(i, ceiling) for i in infinite]


def _ceiling(*series) -> float:
    finite = [float(v) for s in series for v in s if v is not INF]
    return (max(finite) if finite else 0.0) + 1.0


def save_ladder(path, gammas, values=None, title: str = "", label: str = "v(f(a_rho))") -> Path:
    """gamma_rho against rho, optionally with v(f(a_rho)) overlaid."""
    path = Path(path)
    series = [gammas] + ([values] if values is not None else [])
    top = _ceiling(*series)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_size())
        fin, inf = _split(gammas, top)
        ax.plot([i for i, _ in fin], [v for _, v in fin], "o-", label="gamma_rho")
        if values is not None:
            fin, inf = _split(values, top)
            ax.plot([i for i, _ in fin], [v for _, v in fin], "s--", label=label)
            if inf:
                ax.plot([i for i, _ in inf], [v for _, v in inf], "^", color="C1", label=f"{label} = inf")
        ax.set_xlabel("rho")
        ax.set_ylabel("value")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def save_levels(path, labels, epsilons, values, title: str = "") -> Path:
    """epsilon(Q) and v(Q) for the members of a complete set, in order."""
    path = Path(path)
    top = _ceiling(epsilons, values)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_size())
        for series, mark, name in ((epsilons, "o-", "epsilon(Q)"), (values, "s--", "v(Q)")):
            fin, inf = _split(series, top)
            line = ax.plot([i for i, _ in fin], [v for _, v in fin], mark, label=name)[0]
            if inf:
                ax.plot([i for i, _ in inf], [v for _, v in inf], "^", color=line.get_color())
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
        ax.set_ylabel("value")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
