"""Barcode figures.

Bars are drawn half-open, ``[birth, death + 1)``, so that a bar living at a
single step still has visible length.  Output is byte-stable: no timestamp
in the metadata and a fixed SVG id salt.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .zigzag import Barcode  # noqa: E402


def plot_barcode(bc: Barcode, path: str, title: str | None = None) -> None:
    n_steps = max(bc.n_steps, max((b.death + 1 for b in bc.bars), default=1))
    height = 1.8 + 0.3 * len(bc.bars)
    with plt.rc_context({"svg.hashsalt": "ainfpers", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, height))
        for row, bar in enumerate(bc.bars):
            ax.barh(row, bar.death + 1 - bar.birth, left=bar.birth, height=0.5, color="#3a6ea5")
        ax.set_xlim(0, n_steps)
        ax.set_xticks(range(n_steps + 1))
        ax.set_ylim(-0.75, max(len(bc.bars), 1) - 0.25)
        ax.set_yticks([])
        ax.invert_yaxis()
        ax.set_xlabel("filtration step")
        ax.set_title(title or f"Δ{bc.n} barcode, degree {bc.degree}")
        fig.tight_layout()
        fmt = "png" if path.lower().endswith(".png") else "svg"
        fig.savefig(path, format=fmt, metadata={"Date": None} if fmt == "svg" else {"Software": None})
        plt.close(fig)
