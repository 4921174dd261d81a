"""Summary figures for a batch of certification reports."""
from __future__ import annotations

import os
from collections import Counter
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render(reports: List[dict], outdir: str) -> List[str]:
    """Write PNG figures next to ``reports.jsonl``; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = []

    passed, failed = Counter(), Counter()
    order = []
    for r in reports:
        for c in r["checks"]:
            if c["name"] not in order:
                order.append(c["name"])
            (passed if c["passed"] else failed)[c["name"]] += 1
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ys = range(len(order))
    ax.barh(ys, [passed[n] for n in order], color="#4c8c4a", label="pass")
    ax.barh(ys, [failed[n] for n in order], left=[passed[n] for n in order], color="#c0392b",
            label="fail")
    ax.set_yticks(list(ys))
    ax.set_yticklabels(order, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("instances")
    ax.legend(loc="lower right")
    ax.set_title("checks per instance")
    fig.tight_layout()
    paths.append(_save(fig, outdir, "checks.png"))

    runtimes = [r["runtime"] for r in reports if "runtime" in r]
    if runtimes:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(runtimes, bins=30, color="#34607a")
        ax.set_xlabel("seconds per instance")
        ax.set_ylabel("count")
        ax.set_title("certification runtime")
        fig.tight_layout()
        paths.append(_save(fig, outdir, "runtime.png"))

    pts = Counter()
    for r in reports:
        mu = r.get("stats", {}).get("mu_dims")
        if mu is not None and r.get("k"):
            pts[(r["dims"][r["k"]], mu[r["k"]])] += 1
    if pts:
        fig, ax = plt.subplots(figsize=(5, 5))
        xs, ys2, sizes = zip(*[(x, y, 20 * n) for (x, y), n in sorted(pts.items())])
        ax.scatter(xs, ys2, s=sizes, alpha=0.6, color="#8e44ad")
        ax.set_xlabel("dim M_k")
        ax.set_ylabel("dim mu_k(M)_k")
        ax.set_title("dimension at the mutated vertex")
        fig.tight_layout()
        paths.append(_save(fig, outdir, "dims_at_k.png"))
    return paths


def _save(fig, outdir, name) -> str:
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
