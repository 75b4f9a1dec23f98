"""Figure rendering for the report paths of the CLI."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_region(rows, path):
    """Heatmap of the profitability region over the (eta, reserve) grid."""
    etas = sorted({row["eta"] for row in rows})
    rs = sorted({row["r"] for row in rows})
    grid = np.full((len(rs), len(etas)), np.nan)
    ei = {e: i for i, e in enumerate(etas)}
    ri = {r: i for i, r in enumerate(rs)}
    for row in rows:
        flag = row["profitable"]
        grid[ri[row["r"]], ei[row["eta"]]] = (
            np.nan if flag is None else (1.0 if flag else 0.0))

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    cmap = matplotlib.colors.ListedColormap(["#c5d8ef", "#e8974f"])
    cmap.set_bad("#bbbbbb")
    ax.pcolormesh(etas, rs, grid, cmap=cmap, vmin=0.0, vmax=1.0, shading="nearest")
    ax.set_xlabel(r"$\eta$ (value CDF $F(v) = v^\eta$)")
    ax.set_ylabel("reserve $r$")
    ax.set_title("First-price speculation: profitable region (orange)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_compare(cutoffs, spa_profits, fpa_profits, path,
                   spa_opt=None, fpa_opt=None):
    """Profit-against-cutoff curves under both auction rules."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(cutoffs, spa_profits, label="second price", color="#2a6fb0")
    ax.plot(cutoffs, fpa_profits, label="first price", color="#d07030")
    ax.axhline(0.0, color="#888888", linewidth=0.8)
    if spa_opt is not None:
        ax.plot([spa_opt[0]], [spa_opt[1]], "o", color="#2a6fb0")
    if fpa_opt is not None:
        ax.plot([fpa_opt[0]], [fpa_opt[1]], "o", color="#d07030")
    ax.set_xlabel("acceptance cutoff $v^*$")
    ax.set_ylabel("speculator expected profit")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
