"""SVG rendering of configurations and level families.

Circles are written in plane coordinates (y flipped by the view box) with ``repr``
floats, so identical inputs give identical bytes. Radii span many orders of
magnitude; strokes use ``vector-effect="non-scaling-stroke"`` so zoomed views stay
legible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .construction import CheeseConfig, McKissick, build_level_family
from .geometry import Q, Square

COLORS = {"mckissick": "#1f77b4", "wermer": "#d62728", "plain": "#333333"}
DEFAULT_WINDOW = (-1.05, 1.05, -1.05, 1.05)


@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("empty window")

    def meets(self, c: complex, r: float) -> bool:
        dx = max(self.xmin - c.real, 0.0, c.real - self.xmax)
        dy = max(self.ymin - c.imag, 0.0, c.imag - self.ymax)
        return dx * dx + dy * dy < r * r or (dx == 0.0 and dy == 0.0)

    @classmethod
    def around(cls, c: complex, half: float) -> "Window":
        return cls(c.real - half, c.real + half, c.imag - half, c.imag + half)


def _f(x: float) -> str:
    return repr(float(x))


def _header(win: Window, width: int) -> str:
    w = win.xmax - win.xmin
    h = win.ymax - win.ymin
    height = max(1, round(width * h / w))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_f(win.xmin)} {_f(-win.ymax)} {_f(w)} {_f(h)}">\n'
    )


def _square(sq: Square) -> str:
    h = sq.half_width
    return (
        f'<rect x="{_f(sq.center.real - h)}" y="{_f(-sq.center.imag - h)}" width="{_f(2 * h)}" '
        f'height="{_f(2 * h)}" fill="none" stroke="black" vector-effect="non-scaling-stroke"/>\n'
    )


def _circle(c: complex, r: float, color: str, cls: str) -> str:
    return f'<circle class="{cls}" cx="{_f(c.real)}" cy="{_f(-c.imag)}" r="{_f(r)}" fill="{color}"/>\n'


def _ring_marker(c: complex, r: float) -> str:
    """Dashed outline for a family whose discs are too many to draw."""
    x, y = c.real, -c.imag
    return (
        f'<path class="family" d="M {_f(x + r)} {_f(y)} A {_f(r)} {_f(r)} 0 1 0 {_f(x - r)} {_f(y)} '
        f'A {_f(r)} {_f(r)} 0 1 0 {_f(x + r)} {_f(y)} Z" fill="none" stroke="{COLORS["mckissick"]}" '
        f'stroke-dasharray="4 3" vector-effect="non-scaling-stroke"/>\n'
    )


def render_config(
    cfg: CheeseConfig,
    window: Window | None = None,
    color_by_provenance: bool = True,
    width: int = 800,
) -> str:
    """One ``<rect>`` for Q and one ``<circle>`` per retained materialized deleted disc
    meeting the window; families beyond the materialization cap appear as dashed rings."""
    win = window or Window(*DEFAULT_WINDOW)
    parts = [_header(win, width), _square(cfg.square)]
    for d in cfg.iter_deletions():
        c, r = d.disc.center, d.disc.radius
        if not win.meets(c, r):
            continue
        tag = "mckissick" if isinstance(d.provenance, McKissick) else "wermer"
        parts.append(_circle(c, r, COLORS[tag if color_by_provenance else "plain"], tag))
    for fam in cfg.unresolved_families():
        if win.meets(fam.center, fam.radius):
            parts.append(_ring_marker(fam.center, fam.radius))
    parts.append("</svg>\n")
    return "".join(parts)


def render_level(n: int, window: Window | None = None, width: int = 800) -> str:
    """The family A(n) in unit coordinates with the unit square outline."""
    fam = build_level_family(n)
    win = window or Window(*DEFAULT_WINDOW)
    parts = [_header(win, width), _square(Q)]
    for c in fam.centers:
        c = complex(c)
        if win.meets(c, fam.radius):
            parts.append(_circle(c, fam.radius, COLORS["mckissick"], "mckissick"))
    parts.append("</svg>\n")
    return "".join(parts)


def family_window(cfg: CheeseConfig, l: int, pad: float = 1.1) -> Window:
    for fam in cfg.families:
        if fam.index == l:
            return Window.around(fam.center, pad * fam.radius)
    raise ValueError(f"no family with index {l}")
