"""Figure rendering for the report path.

Kept apart from the sweep/table machinery on purpose: tables stay pure
data, and only the report workflow pulls in matplotlib.  Uses the Agg
backend so rendering works headless.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .model import ThresholdPoint  # noqa: E402
from .sweep import SweepRow  # noqa: E402

__all__ = ["render_sweep_figure"]

_METHOD_STYLE = {
    "exact": dict(color="tab:blue", lw=1.6),
    "mc": dict(color="tab:orange", lw=0.0, marker=".", ms=3.0),
    "agent-mc": dict(color="tab:red", lw=0.0, marker="x", ms=3.0),
    "tree": dict(color="tab:green", lw=1.0),
    "sequence": dict(color="tab:purple", lw=1.2, ls="--"),
}


def render_sweep_figure(
    rows_by_method: dict[str, list[SweepRow]],
    out_path,
    thresholds: list[ThresholdPoint] | None = None,
    drops: list[tuple[float, float]] | None = None,
    title: str | None = None,
    dpi: int = 150,
) -> Path:
    """Plot cascade probability against eps and save a PNG.

    Interval-valued methods (exact, tree) get a shaded band between their
    lower and upper columns; thresholds appear as vertical lines (solid
    for k = 0, dotted otherwise); detected drops are starred.
    """
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(7.0, 4.4))

    for method, rows in rows_by_method.items():
        valued = [r for r in rows if r.value is not None]
        if not valued:
            continue
        xs = [r.eps for r in valued]
        ys = [r.value for r in valued]
        style = dict(_METHOD_STYLE.get(method, {}))
        ax.plot(xs, ys, label=method, **style)
        if all(r.lower is not None and r.upper is not None for r in valued):
            ax.fill_between(
                xs,
                [r.lower for r in valued],
                [r.upper for r in valued],
                color=style.get("color"),
                alpha=0.18,
                lw=0,
            )

    for t in thresholds or []:
        ls = "-" if t.k == 0 else ":"
        ax.axvline(t.eps_value, color="0.55", ls=ls, lw=0.8, zorder=0)

    if drops:
        first = next(iter(rows_by_method.values()))
        valued = [r for r in first if r.value is not None]
        for eps_loc, _size in drops:
            nearest = min(valued, key=lambda r: abs(r.eps - eps_loc), default=None)
            if nearest is not None:
                ax.plot([eps_loc], [nearest.value], marker="*", ms=11.0,
                        color="black", lw=0.0, zorder=5)

    ax.set_xlabel("Y-fake fraction eps")
    ax.set_ylabel("Y-cascade probability")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path
