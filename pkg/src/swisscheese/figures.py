"""Matplotlib figures written next to verification reports."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .verify import FAIL, PASS, CertReport  # noqa: E402

_VERDICT_COLORS = {PASS: "#2ca02c", FAIL: "#d62728"}


def _ratio(r: CertReport) -> float | None:
    """log10 of measured/bound in the direction where negative is good; None if undefined."""
    if r.scale != "linear" or not (math.isfinite(r.measured) and math.isfinite(r.bound)):
        return None
    if r.measured <= 0 or r.bound <= 0:
        return None
    x = math.log10(r.measured / r.bound)
    return x if r.sense == "upper" else -x


def margin_figure(reports: Sequence[CertReport], path, title: str = "") -> Path | None:
    """Dot plot of log10(measured / bound) per check; points right of 0 violate the bound.

    Returns None (and writes nothing) when no report has a finite positive ratio.
    """
    rows = defaultdict(list)
    for r in reports:
        x = _ratio(r)
        if x is not None:
            rows[r.check_id].append((x, r.verdict))
    if not rows:
        return None
    labels = list(rows)
    fig, ax = plt.subplots(figsize=(7.0, 0.45 * len(labels) + 1.4))
    for i, lab in enumerate(labels):
        for x, verdict in rows[lab]:
            ax.plot(x, i, "o", ms=4, color=_VERDICT_COLORS.get(verdict, "#7f7f7f"), alpha=0.8)
    ax.axvline(0.0, color="black", lw=0.8)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("log10(measured / bound)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def level_sup_figure(reports: Sequence[CertReport], path) -> Path | None:
    """Measured sup and bound against n for each level-family clause with a numeric bound."""
    series = defaultdict(list)
    for r in reports:
        n = r.params.get("n")
        if n is None or not r.check_id.startswith("level.") or r.scale != "linear":
            continue
        if math.isfinite(r.measured) and math.isfinite(r.bound) and r.measured > 0 and r.bound > 0:
            series[r.check_id].append((n, r.measured, r.bound))
    if not series:
        return None
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for k, (cid, pts) in enumerate(sorted(series.items())):
        pts.sort()
        ns = [p[0] for p in pts]
        color = f"C{k}"
        ax.semilogy(ns, [p[1] for p in pts], "o-", color=color, label=f"{cid} measured")
        ax.semilogy(ns, [p[2] for p in pts], "--", color=color, label=f"{cid} bound")
    ax.set_xlabel("n")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path
