"""Log-log convergence charts written as SVG files."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .analysis import PairResult  # noqa: E402

# blue for the second-order operator, green for the first-order one
OPERATOR_COLORS = {"S": "tab:blue", "G": "tab:green"}

STYLE = {
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
    "svg.fonttype": "none",
    # fixed salt keeps element ids, and so the files, reproducible
    "svg.hashsalt": "chernoff-lab",
}


def plot_condition(condition: str, pairs: Sequence[PairResult], path: Path) -> Path:
    """Draw ln d against ln n for every operator of one initial condition.

    Pairs without a curve are skipped. Fitted lines span the n values that
    entered the fit; excluded points are drawn hollow.
    """
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        for pair in pairs:
            if pair.curve is None:
                continue
            color = OPERATOR_COLORS.get(pair.operator, "tab:gray")
            ns, ds = pair.curve.ns, pair.curve.errors
            positive = ds > 0
            ln_n, ln_d = np.log(ns[positive]), np.log(ds[positive])
            excluded = pair.fit.excluded_n if pair.fit else frozenset()
            used = np.array([n not in excluded for n in ns[positive]], dtype=bool)
            ax.plot(ln_n[used], ln_d[used], "o", color=color, label=f"{pair.operator}: error")
            if (~used).any():
                ax.plot(ln_n[~used], ln_d[~used], "o", mfc="none", color=color)
            if pair.fit is not None and used.any():
                xs = np.array([ln_n[used].min(), ln_n[used].max()])
                ax.plot(
                    xs, pair.fit.predict(xs), "-", color=color, lw=1,
                    label=f"{pair.operator}: ln d = {pair.fit.slope:.4f} ln n {pair.fit.intercept:+.4f}",
                )
        ax.set_xlabel("ln n")
        ax.set_ylabel("ln d")
        ax.set_title(f"u0 = {condition}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
