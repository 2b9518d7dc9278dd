"""Static SVG figures of sweep and optimization results (presentation only)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .keyrate import SweepRow  # noqa: E402

ANALYTIC = ("123", "124", "134", "234", "14", "alpha")
RATE_METHODS = ("exact", "123", "14", "alpha", "asymptotic")


def _save(fig, path: Path) -> Path:
    # fixed salt and no date keep the SVG byte-stable between runs
    with plt.rc_context({"svg.hashsalt": "mdidecoy"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _ax(ylabel: str, log: bool = True):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.set_xlabel("total channel loss (dB)")
    ax.set_ylabel(ylabel)
    if log:
        ax.set_yscale("log")
    ax.grid(alpha=0.3)
    return fig, ax


def _positive(v: np.ndarray) -> np.ndarray:
    return np.where(v > 0, v, np.nan)


def plot_sweep(rows: Sequence[SweepRow], outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    ok = [r for r in rows if r.error is None]
    L = np.array([r.loss_db for r in ok])
    true = np.array([r.s11_true for r in ok])
    paths = []

    fig, ax = _ax("single-photon yield s11")
    for m in ("exact",) + ANALYTIC:
        ax.plot(L, _positive(np.array([r.s11[m] for r in ok])), label=m)
    ax.plot(L, true, "k--", label="true")
    ax.legend(fontsize=8)
    paths.append(_save(fig, outdir / "s11.svg"))

    fig, ax = _ax("s11 bound / true s11", log=False)
    for m in ("exact",) + ANALYTIC:
        ax.plot(L, np.array([r.s11[m] for r in ok]) / true, label=m)
    ax.legend(fontsize=8)
    paths.append(_save(fig, outdir / "s11_relative.svg"))

    fig, ax = _ax("single-photon error rate e11", log=False)
    ax.plot(L, [r.e11_exact for r in ok], label="exact")
    ax.plot(L, [r.e11_simple for r in ok], label="simple (123)")
    ax.plot(L, [r.e11_true for r in ok], "k--", label="true")
    ax.legend(fontsize=8)
    paths.append(_save(fig, outdir / "e11.svg"))

    fig, ax = _ax("key rate R (bits per pulse)")
    for m in RATE_METHODS:
        ax.plot(L, _positive(np.array([r.rates[m] for r in ok])), label=m)
    ax.legend(fontsize=8)
    paths.append(_save(fig, outdir / "rate.svg"))
    return paths


def plot_optimize(results: dict[str, list[tuple[float, float, float]]], outdir: str | Path) -> list[Path]:
    """``results[method]`` is a list of ``(loss_db, mu2_opt, R_opt)``."""
    outdir = Path(outdir)
    fig_r, ax_r = _ax("optimal key rate R")
    fig_m, ax_m = _ax("optimal signal intensity", log=False)
    for m, pts in results.items():
        arr = np.array(pts, dtype=float).reshape(-1, 3)
        ax_r.plot(arr[:, 0], _positive(arr[:, 2]), label=m)
        ax_m.plot(arr[:, 0], arr[:, 1], label=m)
    ax_r.legend(fontsize=8)
    ax_m.legend(fontsize=8)
    return [_save(fig_r, outdir / "rate_opt.svg"), _save(fig_m, outdir / "mu2_opt.svg")]
