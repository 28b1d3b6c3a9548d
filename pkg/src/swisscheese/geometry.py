"""Plane primitives: discs, squares, coordinate crosses and the admissible-disc enumeration.

Everything here is immutable. Scalar helpers take :class:`Disc` values; the
``*_array`` variants work on numpy arrays of centres and radii and are used
for level families with up to a few million discs.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class Disc:
    """An open disc. Closed discs use the same type; callers say which they mean."""

    center: complex
    radius: float

    def __post_init__(self):
        c = complex(self.center)
        r = float(self.radius)
        if not (math.isfinite(c.real) and math.isfinite(c.imag) and math.isfinite(r)):
            raise ValueError(f"non-finite disc {self.center!r}, {self.radius!r}")
        if r <= 0:
            raise ValueError(f"disc radius must be positive, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class Square:
    center: complex = 0j
    half_width: float = 1.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "half_width", float(self.half_width))


Q = Square(0j, 1.0)


@dataclass(frozen=True)
class Cross:
    """The union of the horizontal and vertical lines through ``center``."""

    center: complex = 0j


class DiscClass(enum.Enum):
    INTERIOR = "interior"
    EDGE = "edge"
    CORNER = "corner"


CORNERS: tuple[tuple[Fraction, Fraction], ...] = tuple(
    (Fraction(x), Fraction(y)) for x, y in ((-1, -1), (-1, 1), (1, -1), (1, 1))
)
CORNER_POINTS: tuple[complex, ...] = tuple(complex(x, y) for x, y in CORNERS)


@dataclass(frozen=True, order=True)
class RationalDisc:
    """A closed disc with rational centre ``x + iy`` and rational radius ``r``."""

    x: Fraction
    y: Fraction
    r: Fraction

    def __post_init__(self):
        for name in ("x", "y", "r"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.r <= 0:
            raise ValueError("radius must be positive")

    @property
    def center(self) -> complex:
        return complex(float(self.x), float(self.y))

    @property
    def radius(self) -> float:
        return float(self.r)

    def to_disc(self) -> Disc:
        return Disc(self.center, self.radius)

    def __str__(self):
        return f"D({self.x}{'+' if self.y >= 0 else '-'}{abs(self.y)}i, {self.r})"


# -- distances ---------------------------------------------------------------


def _point_to_square_boundary(z: complex, sq: Square) -> float:
    dx = abs(z.real - sq.center.real)
    dy = abs(z.imag - sq.center.imag)
    h = sq.half_width
    if dx <= h and dy <= h:
        return min(h - dx, h - dy)
    ox = max(dx - h, 0.0)
    oy = max(dy - h, 0.0)
    return math.hypot(ox, oy)


def dist_to_square_boundary(d: Disc, sq: Square = Q) -> float:
    """Distance from the closed disc ``d`` to the boundary of ``sq`` (0 if they meet)."""
    return max(0.0, _point_to_square_boundary(d.center, sq) - d.radius)


def dist_to_cross(d: Disc, a: complex = 0j) -> float:
    """Distance from the closed disc ``d`` to ``a + (R u iR)``."""
    a = complex(a)
    s = min(abs(d.center.real - a.real), abs(d.center.imag - a.imag))
    return max(0.0, s - d.radius)


def square_boundary_distances(centers: np.ndarray, radii, sq: Square = Q) -> np.ndarray:
    """Vectorized :func:`dist_to_square_boundary`."""
    dx = np.abs(centers.real - sq.center.real)
    dy = np.abs(centers.imag - sq.center.imag)
    h = sq.half_width
    inside = (dx <= h) & (dy <= h)
    d_in = np.minimum(h - dx, h - dy)
    d_out = np.hypot(np.maximum(dx - h, 0.0), np.maximum(dy - h, 0.0))
    return np.maximum(np.where(inside, d_in, d_out) - radii, 0.0)


def cross_distances(centers: np.ndarray, radii, a: complex = 0j) -> np.ndarray:
    s = np.minimum(np.abs(centers.real - a.real), np.abs(centers.imag - a.imag))
    return np.maximum(s - radii, 0.0)


def dist_point_to_square(z, sq: Square = Q):
    """Distance from points to the closed square as a region (0 inside). Vectorized."""
    dx = np.abs(np.real(z) - sq.center.real) - sq.half_width
    dy = np.abs(np.imag(z) - sq.center.imag) - sq.half_width
    return np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))


def closure_meets_interior(centers, radii, sq: Square = Q):
    """True where the closed disc meets int(sq); a closed disc meets an open set iff
    the centre is strictly closer than the radius to its closure."""
    return dist_point_to_square(centers, sq) < radii


# -- budgets -----------------------------------------------------------------

Reference = Union[Square, Cross]


def budget_sum(discs: Sequence[Disc], reference: Reference = Q) -> float:
    """Sum of radius / s**2 where s is the distance to ``reference``.

    ``reference`` is either a :class:`Square` (distance to its boundary) or a
    :class:`Cross`. Returns ``inf`` if any disc touches the reference set.
    """
    if not discs:
        return 0.0
    centers = np.array([d.center for d in discs], dtype=complex)
    radii = np.array([d.radius for d in discs])
    return budget_sum_array(centers, radii, reference)


def budget_sum_array(centers: np.ndarray, radii, reference: Reference = Q) -> float:
    radii = np.broadcast_to(np.asarray(radii, dtype=float), centers.shape)
    if centers.size == 0:
        return 0.0
    if isinstance(reference, Cross):
        s = cross_distances(centers, radii, reference.center)
    else:
        s = square_boundary_distances(centers, radii, reference)
    if np.any(s <= 0):
        return math.inf
    return math.fsum((radii / s**2).tolist())


# -- classification and enumeration -----------------------------------------


def _is_corner(x: Fraction, y: Fraction) -> bool:
    return abs(x) == 1 and abs(y) == 1


def classify_disc(x, y, r) -> DiscClass | None:
    """Classify the closed disc with centre ``x+iy`` and radius ``r`` (all rational).

    Returns ``None`` when none of the three admissibility conditions hold.
    All comparisons are exact.
    """
    x, y, r = Fraction(x), Fraction(y), Fraction(r)
    if r <= 0:
        return None
    ax, ay = abs(x), abs(y)
    if ax < 1 and ay < 1:
        return DiscClass.INTERIOR if r < min(1 - ax, 1 - ay) else None
    if ax > 1 or ay > 1:
        return None
    if _is_corner(x, y):
        return DiscClass.CORNER if r < 1 else None
    # on an edge, away from the corners: compare squared distances exactly
    d2 = min((x - kx) ** 2 + (y - ky) ** 2 for kx, ky in CORNERS)
    return DiscClass.EDGE if r * r < d2 else None


def classify(d: RationalDisc) -> DiscClass | None:
    return classify_disc(d.x, d.y, d.r)


def iter_admissible_discs() -> Iterator[tuple[RationalDisc, DiscClass]]:
    """Every admissible rational disc, each exactly once, in a fixed order.

    Stage ``q`` lists the triples ``(px, py, pr) / q`` in lowest common terms with
    ``|px|, |py| <= q`` and ``0 < pr < q``, lexicographically. Every admissible
    disc has radius below 1 and centre in Q, so it appears at the stage of its
    common denominator.
    """
    for q in itertools.count(2):
        for px in range(-q, q + 1):
            for py in range(-q, q + 1):
                g = math.gcd(px, py, q)
                for pr in range(1, q):
                    if math.gcd(g, pr) != 1:
                        continue
                    cls = classify_disc(Fraction(px, q), Fraction(py, q), Fraction(pr, q))
                    if cls is not None:
                        yield RationalDisc(Fraction(px, q), Fraction(py, q), Fraction(pr, q)), cls


def enumerate_admissible_discs(count: int) -> list[tuple[RationalDisc, DiscClass]]:
    if count < 1:
        raise ValueError("count must be >= 1")
    return list(itertools.islice(iter_admissible_discs(), count))


def disc_dist_to_boundary_exact(d: RationalDisc) -> Fraction:
    """dist(D, dQ) for an interior-type closed disc, exactly."""
    return min(1 - abs(d.x), 1 - abs(d.y)) - d.r


def disc_dist_to_corners(d: RationalDisc) -> float:
    """dist(D, K) for the closed disc ``d`` (clamped at 0)."""
    z = d.center
    return max(0.0, min(abs(z - k) for k in CORNER_POINTS) - d.radius)
