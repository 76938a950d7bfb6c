"""PNG figures rendered from the CSV tables.

matplotlib is an optional dependency and is imported only here.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .reports import read_csv


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the install
        raise RuntimeError("plotting needs matplotlib (pip install 'artifact[plot]')") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_csv(csv_path, x: str, y: str, group: str | None = None, reduce: str | None = None,
             logx=False, logy=False, kind="line", title=None) -> Path:
    """Render ``y`` against ``x`` from a CSV file into a PNG beside it.

    ``group`` draws one line per distinct value of that column; ``reduce='max'``
    instead collapses groups to the maximum of ``y`` per ``x``.
    """
    plt = _pyplot()
    header, rows = read_csv(csv_path)
    cols = {h: i for i, h in enumerate(header)}
    data = np.array([[float(r[cols[c]]) for c in (x, y) + ((group,) if group else ())]
                     for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    if reduce == "max":
        xs = np.unique(data[:, 0])
        ys = np.array([data[data[:, 0] == v, 1].max() for v in xs])
        ax.plot(xs, ys, marker="o", ms=3)
    elif group:
        for g in np.unique(data[:, 2]):
            sel = data[:, 2] == g
            ax.plot(data[sel, 0], data[sel, 1], lw=0.6, alpha=0.5)
    elif kind == "bar":
        width = np.min(np.diff(np.sort(data[:, 0]))) if len(data) > 1 else 1.0
        ax.bar(data[:, 0], data[:, 1], width=0.9 * width)
    else:
        ax.plot(data[:, 0], data[:, 1], marker="o" if len(data) < 50 else None, ms=3)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    out = Path(csv_path).with_suffix(".png")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
