"""Matplotlib rendering of persistence diagrams to image files.

Plots are a reporting convenience: points per dimension, the diagonal, and
axis ticks.  Nothing downstream depends on them.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .persistence import Diagram

__all__ = ["plot_diagram", "save_diagram_plot", "save_diagram_sets_plot"]

_DIM_STYLE = {0: ("o", "tab:blue"), 1: ("^", "tab:red")}


def _axis_limits(diagrams: Sequence[Diagram]) -> float:
    top = 0.0
    for d in diagrams:
        for p in d.points:
            top = max(top, float(p.birth), float(p.death))
    return top * 1.08 + 0.1


def plot_diagram(diagram: Diagram, ax=None, label_prefix: str = "", alpha: float = 0.9):
    if ax is None:
        _fig, ax = plt.subplots(figsize=(4.5, 4.5))
    top = _axis_limits([diagram])
    ax.plot([0, top], [0, top], linestyle="--", color="0.6", linewidth=0.8)
    for dim in sorted({p.dim for p in diagram.points}):
        marker, color = _DIM_STYLE.get(dim, ("s", "tab:green"))
        xs = [float(p.birth) for p in diagram.points if p.dim == dim]
        ys = [float(p.death) for p in diagram.points if p.dim == dim]
        ax.scatter(xs, ys, marker=marker, color=color, alpha=alpha, label=f"{label_prefix}dim {dim}")
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top)
    ax.set_aspect("equal", adjustable="box")
    ax.legend(loc="best", fontsize=8)
    return ax


def _save(fig, path) -> None:
    path = Path(path)
    kwargs = {}
    if path.suffix == ".svg":
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, bbox_inches="tight", **kwargs)
    plt.close(fig)


def save_diagram_plot(diagram: Diagram, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    plot_diagram(diagram, ax=ax)
    if title:
        ax.set_title(title)
    _save(fig, path)


def save_diagram_sets_plot(sets: Sequence[tuple[str, Sequence[Diagram]]], path, title: str | None = None) -> None:
    """Overlay several diagram collections (e.g. two sampled transforms)."""
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    all_diagrams = [d for _label, ds in sets for d in ds]
    top = _axis_limits(all_diagrams)
    ax.plot([0, top], [0, top], linestyle="--", color="0.6", linewidth=0.8)
    colors = ["tab:blue", "tab:red", "tab:green", "tab:orange"]
    for k, (label, diagrams) in enumerate(sets):
        color = colors[k % len(colors)]
        xs0, ys0, xs1, ys1 = [], [], [], []
        for d in diagrams:
            for p in d.points:
                if p.dim == 0:
                    xs0.append(float(p.birth))
                    ys0.append(float(p.death))
                else:
                    xs1.append(float(p.birth))
                    ys1.append(float(p.death))
        ax.scatter(xs0, ys0, marker="o", s=14, alpha=0.55, color=color, label=f"{label} dim 0")
        ax.scatter(xs1, ys1, marker="^", s=14, alpha=0.55, color=color, label=f"{label} dim 1")
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top)
    ax.set_aspect("equal", adjustable="box")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)
