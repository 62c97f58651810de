"""Optional PNG figures for a design run (capacity curves and array layouts)."""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from losarray.files import atomic_write_bytes  # noqa: E402

LABELS = {"ula": "ULA", "co": "CO", "co_rr": "CO+RR", "es": "ES"}
STYLES = {"ula": "k--", "co": "C0-", "co_rr": "C1-", "es": "C2:"}


def _save(fig, path: Path) -> Path:
    buf = io.BytesIO()
    # no Software/date metadata: identical runs give identical files
    fig.savefig(buf, format="png", dpi=120, metadata={"Software": None})
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())
    return path


def plot_capacity_curves(results, path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.2))
    for method, res in results.items():
        s = res.stats
        label = f"{LABELS.get(method, method)}: $\\mu$={s.mean:.2f}, $\\sigma$={s.std:.2f}, min={s.min:.2f}"
        ax.plot(res.distances, res.capacities, STYLES.get(method, "-"), lw=1.4, label=label)
    ax.set_xlabel("Transmit distance (m)")
    ax.set_ylabel("Capacity (bpcu)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8, loc="lower right")
    fig.tight_layout()
    return _save(fig, Path(path))


def plot_layouts(result, tx_grid, rx_grid, path) -> Path:
    """Candidate grid (crosses) and selected positions (circles), Tx above Rx."""
    fig, axes = plt.subplots(2, 1, figsize=(7, 2.6), sharex=True)
    for ax, grid, layout, name in ((axes[0], tx_grid, result.tx_layout, "Tx"),
                                   (axes[1], rx_grid, result.rx_layout, "Rx")):
        if result.tx_selection is not None:
            ax.plot(grid.points[:, 0], grid.points[:, 1], "kx", ms=5)
        ax.plot(layout.points[:, 0], layout.points[:, 1], "o", mfc="none", mec="C3", ms=9)
        ax.set_ylabel(name)
        ax.set_yticks([])
    axes[1].set_xlabel("x (m)")
    axes[0].set_title(LABELS.get(result.method, result.method), fontsize=10)
    fig.tight_layout()
    return _save(fig, Path(path))
