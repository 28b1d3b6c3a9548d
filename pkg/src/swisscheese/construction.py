"""McKissick level families, unit cheeses, transplants, the regular cheese X1 and the
assembled set X = X1 n X2.

The start index ``m(eps)`` grows like ``2/eps``, and level ``m`` has ``m 4**m`` discs.
Even the first enumerated target gives ``m >= 33`` at ``C0 = 1``, so the McKissick
layer of a real configuration cannot be listed disc by disc. A configuration stores
each transplanted family as a :class:`TransplantedFamily` record. Levels with at most
``exhaustive_cap`` discs are summed disc by disc; larger levels get a closed-form
upper bound. Levels beyond the truncation are charged by the certified tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Protocol, Sequence, Union

import mpmath
import numpy as np

from .errors import BudgetError, DegenerateError, DomainError, ResourceError
from .geometry import (
    CORNER_POINTS,
    Cross,
    Disc,
    DiscClass,
    Q,
    RationalDisc,
    Square,
    budget_sum_array,
    closure_meets_interior,
    dist_to_square_boundary,
    disc_dist_to_boundary_exact,
    disc_dist_to_corners,
    enumerate_admissible_discs,
    square_boundary_distances,
)
from .ratfunc import LN2, LevelParams, ring_disc_index

EXHAUSTIVE_CAP = 2**22
DEFAULT_DISC_CAP = 2**24
MAX_LEVELS_PER_FAMILY = 4096
SQRT8 = 2.0 * math.sqrt(2.0)


def _exp_up(log_value: float) -> float:
    """exp rounded away from zero; an underflow becomes the smallest subnormal."""
    return math.nextafter(math.exp(log_value), math.inf)


# -- level families -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LevelFamily:
    """The disc ring A(n): N discs of one radius centred at shrink * omega**(r + 1/2)."""

    params: LevelParams
    centers: np.ndarray
    radius: float

    @property
    def N(self) -> int:
        return self.params.N

    def discs(self) -> list[Disc]:
        return [Disc(complex(c), self.radius) for c in self.centers]


def level_centers(p: LevelParams) -> np.ndarray:
    k = np.arange(p.N, dtype=float)
    return p.shrink * np.exp(1j * np.pi * (2.0 * k + 1.0) / p.N)


def _materializable(n: int, cap: int) -> bool:
    return n <= 40 and LevelParams(n).N <= cap


def build_level_family(n: int, cap: int = DEFAULT_DISC_CAP) -> LevelFamily:
    p = LevelParams(n)
    if not _materializable(n, cap):
        raise ResourceError(f"A({n}) has n*4**n discs, above the cap {cap}")
    gap = 2.0 * p.shrink * math.sin(math.pi / p.N)
    if not gap > 2.0 * p.disc_radius:
        raise AssertionError(f"A({n}) discs overlap")
    return LevelFamily(p, level_centers(p), p.disc_radius)


def analytic_level_cross_bound(n: int) -> float:
    """Upper bound on sum r/s0**2 over A(n) without listing the discs.

    By the eightfold symmetry the sum is 8 sum_k rho / (shrink sin t_k - rho)**2,
    with t_k = (2k+1) pi / N <= pi/4. sin t >= (2 sqrt2 / pi) t on [0, pi/4] and
    sum (2k+1)**-2 <= pi**2 / 8 give pi**2 rho N**2 / (2 sqrt2 shrink - rho N)**2,
    and rho N**2 = n**-3.
    """
    p = LevelParams(n)
    rho_N = _exp_up(-4.0 * math.log(n) - 2 * n * LN2)
    value = math.pi**2 * float(n) ** -3 / (SQRT8 * p.shrink - rho_N) ** 2
    return value * (1 + 1e-12)


def exhaustive_level_cross_budget(n: int) -> float:
    fam = build_level_family(n, cap=EXHAUSTIVE_CAP * 4)
    return budget_sum_array(fam.centers, fam.radius, Cross(0j))


@dataclass(frozen=True)
class LevelBudget:
    value: float
    method: str  # "exhaustive" or "bound"


def level_cross_budget(n: int, exhaustive_cap: int = EXHAUSTIVE_CAP) -> LevelBudget:
    if _materializable(n, exhaustive_cap):
        return LevelBudget(exhaustive_level_cross_budget(n), "exhaustive")
    return LevelBudget(analytic_level_cross_bound(n), "bound")


# -- start index and unit cheeses -----------------------------------------------


def factorial_condition(m: int) -> bool:
    """(m+1)!**4 > 2 (m+1)**6 2**(2(m+1)) + 2 (m+1)**2, compared in logs."""
    lhs = 4.0 * math.lgamma(m + 2)
    a = math.log(2.0) + 6.0 * math.log(m + 1) + 2.0 * (m + 1) * LN2
    b = math.log(2.0) + 2.0 * math.log(m + 1)
    return lhs > max(a, b) + math.log1p(math.exp(-abs(a - b)))


def select_start_index(epsilon) -> int:
    """Smallest m with m > 2/epsilon + 1 that also meets :func:`factorial_condition`."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    threshold = 2 / (Fraction(epsilon) if isinstance(epsilon, (int, Fraction)) else epsilon) + 1
    m = max(2, math.floor(threshold) + 1)
    while not factorial_condition(m):
        m += 1
    return m


def truncation_tail(n_max: int) -> float:
    """sum_{r > n_max} r**-2, rounded up."""
    with mpmath.workdps(30):
        v = float(mpmath.zeta(2, n_max + 1))
    return math.nextafter(v, math.inf)


def _log_power_tail(n_max: int) -> float:
    r = n_max + 1
    return -4.0 * math.log(r) - 2 * r * LN2 + math.log(4.0 / 3.0)


def power_tail(n_max: int) -> float:
    """Upper bound on sum_{r > n_max} r**-4 4**-r (the total radius of omitted levels)."""
    return _exp_up(_log_power_tail(n_max))


@dataclass(frozen=True)
class UnitCheese:
    epsilon: float
    m: int
    n_max: int
    level_budgets: tuple[float, ...]
    methods: tuple[str, ...]
    truncation_tail: float

    def __post_init__(self):
        if not self.realized_budget + self.truncation_tail < self.epsilon:
            raise BudgetError(
                f"unit cheese budget {self.realized_budget + self.truncation_tail!r} >= epsilon {self.epsilon!r}"
            )

    @property
    def realized_budget(self) -> float:
        return math.fsum(self.level_budgets)

    @property
    def levels(self) -> range:
        return range(self.m, self.n_max + 1)

    def families(self, cap: int = DEFAULT_DISC_CAP) -> Iterator[LevelFamily]:
        for r in self.levels:
            yield build_level_family(r, cap)

    def disc_count(self) -> int:
        return sum(LevelParams(r).N for r in self.levels)


def build_unit_cheese(epsilon: float, n_max: int, exhaustive_cap: int = EXHAUSTIVE_CAP) -> UnitCheese:
    m = select_start_index(epsilon)
    if n_max < m:
        raise BudgetError(f"n_max={n_max} is below the start index m={m}")
    if n_max - m + 1 > MAX_LEVELS_PER_FAMILY:
        raise ResourceError("too many levels requested")
    budgets = [level_cross_budget(r, exhaustive_cap) for r in range(m, n_max + 1)]
    return UnitCheese(
        float(epsilon),
        m,
        n_max,
        tuple(b.value for b in budgets),
        tuple(b.method for b in budgets),
        truncation_tail(n_max),
    )


@dataclass(frozen=True, eq=False)
class Transplant:
    target: Disc
    centers: np.ndarray
    radii: np.ndarray
    budget: float

    def discs(self) -> list[Disc]:
        return [Disc(complex(c), float(r)) for c, r in zip(self.centers, self.radii)]


def transplant(u: UnitCheese, target: Disc, cap: int = DEFAULT_DISC_CAP) -> Transplant:
    """Map every disc of ``u`` by z -> a + r z; the budget against the cross at ``a`` is
    recomputed disc by disc (it equals the unit budget divided by r)."""
    a, r = target.center, target.radius
    centers, radii = [], []
    for fam in u.families(cap):
        centers.append(a + r * fam.centers)
        radii.append(np.full(fam.N, r * fam.radius))
    c = np.concatenate(centers) if centers else np.array([], dtype=complex)
    rr = np.concatenate(radii) if radii else np.array([])
    return Transplant(target, c, rr, budget_sum_array(c, rr, Cross(a)))


# -- regular cheese layer ---------------------------------------------------------


def _as_rational(d: Union[Disc, RationalDisc]) -> RationalDisc | None:
    return d if isinstance(d, RationalDisc) else None


def epsilon_for_index(l: int, cls: DiscClass, C0: float, D_l: Union[Disc, RationalDisc]) -> float:
    """Half the strict upper bound on eps_l for the l-th enumerated disc."""
    rd = _as_rational(D_l)
    if cls is DiscClass.INTERIOR:
        dist = float(disc_dist_to_boundary_exact(rd)) if rd else dist_to_square_boundary(D_l, Q)
        factor = dist**2
    elif cls is DiscClass.EDGE:
        if rd:
            dist = disc_dist_to_corners(rd)
        else:
            dist = max(0.0, min(abs(D_l.center - k) for k in CORNER_POINTS) - D_l.radius)
        factor = dist**2
    else:
        factor = 1.0
    if factor <= 0:
        raise DegenerateError(f"relevant distance vanishes for {D_l}")
    return 2.0 ** -(l + 2) * C0 * factor


def _other_edges_distance(d: RationalDisc) -> float:
    """Distance from the closed disc to the edges of Q that do not contain its centre."""
    x, y = d.x, d.y
    dists = []
    for fixed, coord, other in ((1, x, y), (-1, x, y), (1, y, x), (-1, y, x)):
        if coord == fixed and abs(other) <= 1:
            continue
        # distance from the centre to the segment {coord = fixed, |other| <= 1}
        dists.append(math.hypot(float(coord - fixed), float(max(abs(other) - 1, 0))))
    return min(dists) - float(d.r)


@dataclass(frozen=True)
class LevelRecord:
    level: int
    cross_budget: float
    boundary_budget: float
    method: str
    retained: int | None = None


@dataclass(frozen=True)
class TransplantedFamily:
    """All discs of the unit cheese for eps_l, moved into D_l by z -> a + R z.

    ``cross_budget`` sums r/s1**2 against the cross at the centre of D_l over every image
    disc. ``boundary_budget`` sums r/dist(., dQ)**2 over the retained image discs (those
    whose closure meets int Q). Both totals include the omitted levels above ``n_max``.
    """

    index: int
    target: RationalDisc
    cls: DiscClass
    epsilon: float
    unit_epsilon: float
    m: int
    n_max: int
    levels: tuple[LevelRecord, ...]
    tail_cross: float
    tail_boundary: float

    @property
    def cross_total(self) -> float:
        return math.fsum([lv.cross_budget for lv in self.levels] + [self.tail_cross])

    @property
    def boundary_total(self) -> float:
        return math.fsum([lv.boundary_budget for lv in self.levels] + [self.tail_boundary])

    @property
    def center(self) -> complex:
        return self.target.center

    @property
    def radius(self) -> float:
        return self.target.radius

    def materialized_levels(self, cap: int = EXHAUSTIVE_CAP) -> list[int]:
        return [lv.level for lv in self.levels if _materializable(lv.level, cap)]

    def level_discs(self, level: int, retained_only: bool = True) -> tuple[np.ndarray, float]:
        """Image centres and common radius of one level; requires a materializable level."""
        fam = build_level_family(level, EXHAUSTIVE_CAP * 4)
        a, R = self.target.center, self.target.radius
        centers = a + R * fam.centers
        radius = R * fam.radius
        if retained_only:
            centers = centers[closure_meets_interior(centers, radius)]
        return centers, radius

    def unit_point(self, z: complex) -> complex:
        return (complex(z) - self.target.center) / self.target.radius

    def contains(self, z: complex) -> bool:
        """Whether z lies in an open disc of any level r >= m of this family."""
        w = self.unit_point(z)
        a = abs(w)
        if a >= 1.0:
            return False
        gap = 1.0 - a
        r_est = int(-math.log(gap) / math.log(4.0)) if gap > 0 else 10**6
        for r in range(max(self.m, r_est - 1), max(self.m, r_est + 2) + 1):
            if ring_disc_index(LevelParams(r), w) is not None:
                return True
        return False


def family_for_index(
    l: int,
    target: RationalDisc,
    cls: DiscClass,
    C0: float,
    n_cap: int | None = None,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
) -> TransplantedFamily:
    """Budget records for the family transplanted into the l-th enumerated disc.

    The transplanted budget is the unit budget divided by the target radius R, so the
    unit cheese is built for ``unit_epsilon = R * eps_l``.
    """
    eps = epsilon_for_index(l, cls, C0, target)
    R = float(target.r)
    unit_eps = eps * R
    m = select_start_index(unit_eps)
    n_max = m if n_cap is None else max(m, n_cap)
    if n_max - m + 1 > MAX_LEVELS_PER_FAMILY:
        raise ResourceError(f"family {l}: {n_max - m + 1} levels requested")
    if cls is DiscClass.INTERIOR:
        g = float(disc_dist_to_boundary_exact(target))
    else:
        g = _other_edges_distance(target)
    if not g > 0:
        raise DegenerateError(f"target {target} touches the far boundary")

    unit_budgets, records = [], []
    for r in range(m, n_max + 1):
        lb = level_cross_budget(r, exhaustive_cap)
        unit_budgets.append(lb.value)
        cross = lb.value / R
        p = LevelParams(r)
        if lb.method == "exhaustive":
            fam = build_level_family(r, EXHAUSTIVE_CAP * 4)
            centers = target.center + R * fam.centers
            radius = R * fam.radius
            keep = closure_meets_interior(centers, radius)
            d = square_boundary_distances(centers[keep], radius)
            if np.any(d <= 0):
                raise BudgetError(f"family {l} level {r}: a retained disc meets dQ")
            boundary = math.fsum((radius / d**2).tolist())
            records.append(LevelRecord(r, cross, boundary, "exhaustive", int(keep.sum())))
        else:
            # total image radius R n**-4 4**-n, over the squared gap, in logs
            boundary = _exp_up(math.log(R) - 4.0 * math.log(r) - 2 * r * LN2 - 2.0 * math.log(g))
            if cls is not DiscClass.INTERIOR:
                boundary += cross
            records.append(LevelRecord(r, cross, boundary, "bound"))

    unit_tail = truncation_tail(n_max)
    if not math.fsum(unit_budgets) + unit_tail < unit_eps:
        raise BudgetError(f"family {l}: unit budget exceeds {unit_eps!r}")
    tail_cross = unit_tail / R
    tail_boundary = _exp_up(math.log(R) + _log_power_tail(n_max) - 2.0 * math.log(g))
    if cls is not DiscClass.INTERIOR:
        tail_boundary += tail_cross
    return TransplantedFamily(l, target, cls, eps, unit_eps, m, n_max, tuple(records), tail_cross, tail_boundary)


# -- the X2 layer ---------------------------------------------------------------


def level_scale(n: int) -> float:
    return n / (n + 1)


def length_budget(n: int, C: float) -> float:
    return 2.0 ** -(n + 1) * C * (1.0 - level_scale(n)) ** 2


@dataclass(frozen=True)
class McKissick:
    l: int
    level: int


@dataclass(frozen=True)
class Wermer:
    n: int
    k: int


Provenance = Union[McKissick, Wermer]


@dataclass(frozen=True)
class Deletion:
    disc: Disc
    provenance: Provenance


class WermerProvider(Protocol):
    def __call__(self, n: int, square: Square, length_budget: float) -> Sequence[Disc]: ...


class EmptyWermerProvider:
    def __call__(self, n, square, length_budget):
        return []


@dataclass(frozen=True)
class StubWermerProvider:
    """Deterministic pseudo-random discs filling ``fill`` of the length budget.

    Stands in for Wermer's construction, which is not reproduced here: the discs carry
    the budget arithmetic only.
    """

    seed: int = 0
    per_level: int = 4
    fill: float = 0.5

    def __call__(self, n: int, square: Square, length_budget: float) -> list[Disc]:
        rho = self.fill * length_budget / (2.0 * math.pi * self.per_level)
        rng = np.random.default_rng([self.seed, n])
        half = square.half_width - 2.0 * rho
        out: list[Disc] = []
        for _ in range(10_000):
            if len(out) == self.per_level:
                break
            x, y = rng.uniform(-half, half, size=2)
            c = square.center + complex(x, y)
            if all(abs(c - d.center) > 2.0 * rho for d in out):
                out.append(Disc(c, rho))
        return out


# -- configurations ---------------------------------------------------------------


@dataclass(frozen=True)
class Ledger:
    mckissick_cross: float
    mckissick_boundary: float
    wermer_lengths: tuple[float, ...]
    wermer_boundary: float
    combined_integral: float
    families: int
    materialized_discs: int
    wermer_discs: int

    @property
    def integral_bound_factor(self) -> float:
        """2 * sum c_n / s_n**2: the coefficient of |f|_X |g|_X in the integral bound."""
        return 2.0 * self.combined_integral


@dataclass(frozen=True)
class CheeseConfig:
    """Q minus the McKissick families and the explicit (Wermer-layer) discs."""

    C: float
    C0: float
    L: int
    n_levels: int
    n_cap: int | None
    seed: int
    families: tuple[TransplantedFamily, ...]
    deletions: tuple[Deletion, ...]
    ledger: Ledger
    square: Square = field(default=Q)

    def __post_init__(self):
        if not self.ledger.mckissick_boundary < self.C0:
            raise BudgetError(f"McKissick budget {self.ledger.mckissick_boundary!r} >= C0 = {self.C0!r}")
        if not self.ledger.combined_integral <= self.C / 2 + 2 * math.pi * self.C0:
            raise BudgetError("combined integral budget exceeds C/2 + 2 pi C0")

    def contains(self, z: complex) -> bool:
        """z in X: z in Q and outside every deleted open disc."""
        z = complex(z)
        if abs(z.real) > 1.0 or abs(z.imag) > 1.0:
            return False
        for d in self.deletions:
            if abs(z - d.disc.center) < d.disc.radius:
                return False
        for fam in self.families:
            if abs(z - fam.center) <= fam.radius and fam.contains(z):
                return False
        return True

    def contains_array(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        ok = (np.abs(zs.real) <= 1.0) & (np.abs(zs.imag) <= 1.0)
        for d in self.deletions:
            ok &= np.abs(zs - d.disc.center) >= d.disc.radius
        for fam in self.families:
            near = ok & (np.abs(zs - fam.center) < fam.radius)
            for i in np.nonzero(near)[0]:
                if fam.contains(zs[i]):
                    ok[i] = False
        return ok

    def iter_deletions(self, cap: int = EXHAUSTIVE_CAP) -> Iterator[Deletion]:
        """Explicit discs, then every retained disc of every materializable family level."""
        yield from self.deletions
        for fam in self.families:
            for r in fam.materialized_levels(cap):
                centers, radius = fam.level_discs(r)
                for c in centers:
                    yield Deletion(Disc(complex(c), radius), McKissick(fam.index, r))

    def unresolved_families(self, cap: int = EXHAUSTIVE_CAP) -> list[TransplantedFamily]:
        return [f for f in self.families if len(f.materialized_levels(cap)) < len(f.levels)]


def _ledger(families, deletions, n_levels, C, exhaustive_cap) -> Ledger:
    mck_cross = math.fsum(f.cross_total for f in families)
    mck_boundary = math.fsum(f.boundary_total for f in families)
    lengths = []
    for n in range(1, n_levels + 1):
        lengths.append(math.fsum(2 * math.pi * d.disc.radius for d in deletions if d.provenance.n == n))
    wermer_boundary = math.fsum(
        2 * math.pi * d.disc.radius / dist_to_square_boundary(d.disc, Q) ** 2 for d in deletions
    )
    materialized = sum(
        lv.retained or 0 for f in families for lv in f.levels if lv.method == "exhaustive"
    )
    return Ledger(
        mck_cross,
        mck_boundary,
        tuple(lengths),
        wermer_boundary,
        2 * math.pi * mck_boundary + wermer_boundary,
        len(families),
        materialized,
        len(deletions),
    )


def build_families(C0: float, L: int, n_cap: int | None = None, exhaustive_cap: int = EXHAUSTIVE_CAP):
    if C0 <= 0:
        raise ValueError("C0 must be positive")
    if L < 0:
        raise ValueError("L must be >= 0")
    targets = enumerate_admissible_discs(L) if L else []
    return tuple(
        family_for_index(l, d, cls, C0, n_cap, exhaustive_cap) for l, (d, cls) in enumerate(targets, start=1)
    )


def build_regular_cheese(
    C0: float, L: int, n_cap: int | None = None, exhaustive_cap: int = EXHAUSTIVE_CAP
) -> CheeseConfig:
    """The X1 layer: L enumerated targets, each carrying its transplanted unit cheese.

    ``n_cap=None`` truncates every family at its own start index m_l.
    """
    families = build_families(C0, L, n_cap, exhaustive_cap)
    ledger = _ledger(families, (), 0, 4 * math.pi * C0, exhaustive_cap)
    return CheeseConfig(4 * math.pi * C0, C0, L, 0, n_cap, 0, families, (), ledger)


def assemble_theorem_one(
    C: float,
    L: int,
    n_levels: int,
    provider: WermerProvider | None = None,
    n_cap: int | None = None,
    seed: int = 0,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
) -> CheeseConfig:
    """X = X1 n X2 with C0 = C/(4 pi) and the Wermer layer drawn from ``provider``."""
    if not C > 0:
        raise ValueError("C must be positive")
    provider = StubWermerProvider(seed) if provider is None else provider
    C0 = C / (4 * math.pi)
    families = build_families(C0, L, n_cap, exhaustive_cap)
    deletions = []
    for n in range(1, n_levels + 1):
        scale = Square(0j, level_scale(n))
        budget = length_budget(n, C)
        discs = list(provider(n, scale, budget))
        for d in discs:
            if dist_to_square_boundary(d, scale) <= 0 or abs(d.center.real) >= scale.half_width or abs(d.center.imag) >= scale.half_width:
                raise BudgetError(f"Wermer disc {d} is not inside L_{n} Q")
        total = math.fsum(2 * math.pi * d.radius for d in discs)
        if not total < budget:
            raise BudgetError(f"level {n}: boundary length {total!r} >= budget {budget!r}")
        deletions.extend(Deletion(d, Wermer(n, k)) for k, d in enumerate(discs))
    deletions = tuple(deletions)
    ledger = _ledger(families, deletions, n_levels, C, exhaustive_cap)
    return CheeseConfig(C, C0, L, n_levels, n_cap, seed, families, deletions, ledger)


def check_in_domain(cfg: CheeseConfig, z: complex):
    if not cfg.contains(z):
        raise DomainError(f"{z!r} is not in X")
