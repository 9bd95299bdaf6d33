"""Figure rendering for dendrograms and probe summaries.

matplotlib is imported lazily with the Agg backend, so commands that
never touch a figure never pay for the import, and rendering works on
headless machines.
"""

from __future__ import annotations

from typing import Sequence

from .hierarchical import PersistentSet


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_dendrogram(theta: PersistentSet, path: str, *, title: str | None = None) -> None:
    """Draw the merge tree with leaves ordered so every block is contiguous.

    Leaves sit at height 0; each block formed later spans its children with
    a horizontal bar at its merge scale.  Persistent sets that never reach
    one block come out as a forest over the same leaf axis.
    """
    plt = _pyplot()
    starts = (0.0, *theta.breakpoints)
    children: dict[tuple[str, ...], list[tuple[str, ...]]] = {}
    height: dict[tuple[str, ...], float] = {}
    owner: dict[str, tuple[str, ...]] = {}
    for start, partition in zip(starts, theta.partitions):
        for block in partition.blocks:
            if block in height:
                continue
            height[block] = start
            children[block] = sorted({owner[x] for x in block if x in owner})
            for x in block:
                owner[x] = block
    roots = list(theta.partitions[-1].blocks)
    top = max(height.values(), default=0.0)
    headroom = top * 1.05 + 0.5

    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(theta.ground) + 1.5), 4.0))
    positions: dict[str, float] = {}
    next_x = [0.0]

    def place(block: tuple[str, ...]) -> float:
        subs = children[block]
        if not subs:
            xs = []
            for x in block:
                positions[x] = next_x[0]
                xs.append(next_x[0])
                next_x[0] += 1.0
            center = sum(xs) / len(xs)
            if len(block) > 1:  # a block already present at scale zero
                ax.plot([xs[0], xs[-1]], [0.0, 0.0], color="tab:blue", lw=2.0)
            return center
        centers = [place(sub) for sub in subs]
        y = height[block]
        for sub, cx in zip(subs, centers):
            ax.plot([cx, cx], [height[sub], y], color="tab:blue", lw=1.5)
        ax.plot([min(centers), max(centers)], [y, y], color="tab:blue", lw=1.5)
        return sum(centers) / len(centers)

    for root in roots:
        place(root)
    ax.set_xticks([positions[x] for x in positions])
    ax.set_xticklabels(list(positions), rotation=90 if len(positions) > 12 else 0)
    ax.set_ylabel("scale")
    ax.set_ylim(-headroom * 0.04, headroom)
    for spine in ("top", "right"):
        ax.spines[spine].set_visible(False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_probe_summary(reports: Sequence[dict], path: str) -> None:
    """One bar per probe: trials run, colored by whether violations appeared."""
    plt = _pyplot()
    names = [r["probe"] for r in reports]
    trials = [r["trials"] for r in reports]
    bad = [len(r["violations"]) for r in reports]
    colors = ["tab:red" if b else "tab:green" for b in bad]

    fig, ax = plt.subplots(figsize=(max(5.0, 1.1 * len(names)), 3.8))
    bars = ax.bar(range(len(names)), trials, color=colors)
    for i, (bar, b) in enumerate(zip(bars, bad)):
        note = f"{b} violation{'s' if b != 1 else ''}" if b else "clean"
        ax.text(
            bar.get_x() + bar.get_width() / 2,
            bar.get_height(),
            note,
            ha="center",
            va="bottom",
            fontsize=8,
        )
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("trials")
    for spine in ("top", "right"):
        ax.spines[spine].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
