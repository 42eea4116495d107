"""Report figures rendered next to the CSV/JSON artifacts.

Every CLI subcommand calls one of these after writing its delimited output.
Rendering is non-interactive (Agg) and deterministic for fixed inputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

VARIANT_COLORS = {
    "ncl1_avg": "#1f77b4",
    "ncl2_avg": "#ff7f0e",
    "ncl1_min": "#2ca02c",
    "ncl2_min": "#d62728",
}


def save_sdp_figure(records_by_run: dict[int, list], path) -> None:
    """Series of the first run plus a measured-vs-truth scatter of all runs."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    first = min(records_by_run)
    recs = records_by_run[first]
    frames = [r.frame for r in recs]
    ax1.plot(frames, [r.measured_phi for r in recs], label="measured", color="#1f77b4")
    ax1.plot(frames, [r.ground_truth for r in recs], label="ground truth",
             color="#555555", linestyle="--")
    ax1.set_xlabel("frame")
    ax1.set_ylabel("collectiveness")
    ax1.set_ylim(-0.05, 1.05)
    ax1.set_title(f"run {first}")
    ax1.legend()
    for run in sorted(records_by_run):
        rr = records_by_run[run]
        ax2.scatter([r.ground_truth for r in rr], [r.measured_phi for r in rr],
                    s=8, alpha=0.5)
    ax2.plot([0, 1], [0, 1], color="#999999", linewidth=0.8)
    ax2.set_xlabel("ground truth")
    ax2.set_ylabel("measured")
    ax2.set_title(f"all frames, {len(records_by_run)} run(s)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_sweep_figure(rows: list[dict], axis: str, path) -> None:
    """One panel per metric, one line per variant, against the swept value."""
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    metrics = ("rc", "pca", "sd")
    variants = sorted({r["variant"] for r in rows})
    for ax, met in zip(axes, metrics):
        for var in variants:
            pts = [(r["value"], r[met]) for r in rows if r["variant"] == var and r[met] is not None]
            if pts:
                xs, ys = zip(*sorted(pts))
                ax.plot(xs, ys, marker="o", markersize=3,
                        color=VARIANT_COLORS.get(var), label=var)
        ax.set_xlabel(axis)
        ax.set_ylabel(met)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_graph_figure(phi: np.ndarray, z: np.ndarray, path) -> None:
    """Per-node collectiveness bars next to the coherence heat map."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.bar(np.arange(len(phi)), phi, color="#1f77b4")
    ax1.set_xlabel("node")
    ax1.set_ylabel("collectiveness")
    ax1.set_ylim(0, 1.05)
    im = ax2.imshow(z, vmin=0.0, vmax=1.0, cmap="viridis")
    ax2.set_xlabel("node")
    ax2.set_ylabel("node")
    ax2.set_title("pairwise coherence")
    fig.colorbar(im, ax=ax2, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_clips_figure(items: list[tuple[str, float, str | None]], path) -> None:
    """Clip collectiveness, sorted, colored by category where known."""
    cat_color = {"low": "#d62728", "medium": "#ff7f0e", "high": "#2ca02c", None: "#1f77b4"}
    ordered = sorted(items, key=lambda t: t[1])
    fig, ax = plt.subplots(figsize=(max(6, 0.18 * len(ordered) + 2), 4))
    xs = np.arange(len(ordered))
    ax.bar(xs, [v for _, v, _ in ordered],
           color=[cat_color.get(c, "#1f77b4") for _, _, c in ordered])
    ax.set_xticks(xs)
    ax.set_xticklabels([cid for cid, _, _ in ordered], rotation=90, fontsize=6)
    ax.set_ylabel("clip collectiveness")
    ax.set_ylim(0, 1.05)
    handles = [plt.Rectangle((0, 0), 1, 1, color=cat_color[c]) for c in ("low", "medium", "high")]
    ax.legend(handles, ("low", "medium", "high"), fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
