"""Figure rendering for sweep outputs.

Every renderer takes the delimited files a sweep produced and writes one PNG
next to them.  Colors stay fixed per initial state across all figures.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .runio import read_rows

__all__ = ["STATE_COLORS", "render_lyapunov", "render_portraits",
           "render_qfi_vs_time", "render_qfi_vs_q", "render_fractional"]

STATE_COLORS = {
    "equatorial": "purple",
    "island": "limegreen",
    "non-equatorial-island": "tab:blue",
    "chaotic-sea": "tab:red",
    "edge": "tab:green",
}

plt.rcParams.update({"figure.dpi": 120, "axes.grid": True, "grid.alpha": 0.3,
                     "legend.fontsize": 8})


def _color(label: str):
    return STATE_COLORS.get(label)


def render_lyapunov(csv_path: str | Path, out_png: str | Path) -> Path:
    """Phase-space averaged Lyapunov exponent against kick strength."""
    kappas, lams = [], []
    with open(csv_path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        ik, il = header.index("kappa"), header.index("lambda_mean")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            kappas.append(float(parts[ik]))
            lams.append(float(parts[il]))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(kappas, lams, "o-", color="tab:blue")
    ax.set_xlabel(r"$\kappa$")
    ax.set_ylabel(r"$\lambda$ (per period)")
    fig.tight_layout()
    fig.savefig(out_png)
    plt.close(fig)
    return Path(out_png)


def render_portraits(csv_paths: list, out_png: str | Path) -> Path:
    """Phase portraits, one panel per kick strength."""
    fig, axes = plt.subplots(1, len(csv_paths), figsize=(5 * len(csv_paths), 4.2),
                             squeeze=False)
    for ax, path in zip(axes[0], csv_paths):
        data = np.genfromtxt(path, delimiter=",", names=True)
        ax.scatter(data["phi"], data["theta"], s=0.1, c="k", alpha=0.4,
                   rasterized=True)
        ax.set_xlabel(r"$\phi$")
        ax.set_ylabel(r"$\theta$")
        ax.set_title(Path(path).stem.replace("portrait_", ""))
        ax.set_xlim(-np.pi, np.pi)
        ax.set_ylim(0, np.pi)
    fig.tight_layout()
    fig.savefig(out_png)
    plt.close(fig)
    return Path(out_png)


def _panel_grid(n_panels: int):
    cols = int(np.ceil(np.sqrt(n_panels)))
    rows = int(np.ceil(n_panels / cols))
    fig, axes = plt.subplots(rows, cols, figsize=(3.4 * cols, 2.8 * rows),
                             squeeze=False)
    flat = axes.ravel()
    for ax in flat[n_panels:]:
        ax.set_visible(False)
    return fig, flat


def render_qfi_vs_time(csv_path: str | Path, out_png: str | Path) -> Path:
    """QFI growth per subsystem size, one panel per Q, colored by state."""
    rows = read_rows(csv_path)
    q_values = sorted({r["Q"] for r in rows})
    fig, axes = _panel_grid(len(q_values))
    for ax, q in zip(axes, q_values):
        for label in sorted({r["label"] for r in rows}):
            pts = sorted((r["t"], r["qfi"]) for r in rows
                         if r["Q"] == q and r["label"] == label and r["t"] > 0
                         and r["qfi"] > 0)
            if pts:
                ax.loglog(*zip(*pts), lw=0.9, label=label, color=_color(label))
        n = rows[0]["N"]
        ax.set_title(f"Q = {q}" + (" (full)" if q == n else ""), fontsize=9)
        ax.set_xlabel("t")
        ax.set_ylabel(r"$I_\alpha$")
    axes[0].legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_png)
    plt.close(fig)
    return Path(out_png)


def render_qfi_vs_q(csv_path: str | Path, out_png: str | Path) -> Path:
    """QFI against subsystem size, one panel per sampled time."""
    rows = read_rows(csv_path)
    times = sorted({r["t"] for r in rows})
    fig, axes = _panel_grid(len(times))
    for ax, t in zip(axes, times):
        for label in sorted({r["label"] for r in rows}):
            pts = sorted((r["Q"], r["qfi"]) for r in rows
                         if r["t"] == t and r["label"] == label and r["qfi"] > 0
                         and r["Q"] < r["N"])
            if pts:
                ax.loglog(*zip(*pts), lw=0.9, label=label, color=_color(label))
        ax.set_title(f"t = {t}", fontsize=9)
        ax.set_xlabel("Q")
        ax.set_ylabel(r"$I_\alpha$")
    axes[0].legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_png)
    plt.close(fig)
    return Path(out_png)


def render_fractional(csv_path: str | Path, out_png: str | Path) -> Path:
    """Fractional QFI against fractional access, panel per (kappa, time)."""
    rows = [r for r in read_rows(csv_path) if r["qfi_fractional"] is not None]
    panels = sorted({(r["kappa"], r["t"]) for r in rows})
    fig, axes = _panel_grid(len(panels))
    for ax, (kappa, t) in zip(axes, panels):
        for label in sorted({r["label"] for r in rows}):
            pts = sorted((r["Q"] / r["N"], r["qfi_fractional"]) for r in rows
                         if r["kappa"] == kappa and r["t"] == t
                         and r["label"] == label and r["qfi_fractional"] > 0)
            if pts:
                ax.loglog(*zip(*pts), lw=0.9, label=label, color=_color(label))
        ax.axvline(0.1, color="gray", lw=0.8, ls="--")
        ax.set_title(rf"$\kappa$ = {kappa:g}, t = {t}", fontsize=9)
        ax.set_xlabel("Q/N")
        ax.set_ylabel(r"$I_{\alpha,Q}/I_{\alpha,N}$")
    axes[0].legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_png)
    plt.close(fig)
    return Path(out_png)
