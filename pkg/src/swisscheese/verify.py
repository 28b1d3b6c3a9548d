"""Numerical certification of the construction.

Each check returns :class:`CertReport` values: a measured extremum, the bound it is
compared with, and a margin that is positive when the inequality holds. Sampling
uses unscrambled Halton prefixes, optionally shifted by a seeded random offset, so
every run is reproducible and larger sample counts extend smaller ones.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import mpmath
import numpy as np
from scipy.stats import qmc

from .construction import (
    CheeseConfig,
    analytic_level_cross_bound,
    TransplantedFamily,
    build_level_family,
    family_for_index,
)
from .errors import (
    DomainError,
    PoleInXError,
    PrecisionError,
    ResourceError,
    SearchExhausted,
    ToleranceNotMet,
)
from .geometry import Cross, DiscClass, Q, RationalDisc, Square, budget_sum_array, iter_admissible_discs
from .quadrature import DEFAULT_TOL, QuadratureResult, contour_integral_boundary
from .ratfunc import (
    FLOAT_POWER_LIMIT,
    K_interval,
    LevelParams,
    ProductFunction,
    RationalExpr,
    eval_f_limit,
    eval_product,
    hN_array,
    log_abs_t,
    log_power_array,
    one_minus_gn_array,
    tail_interval,
)

PASS, FAIL, INCONCLUSIVE, INAPPLICABLE = "pass", "fail", "inconclusive", "inapplicable"
DEFAULT_SAMPLES = 4096
LN10 = math.log(10.0)

# -- reports and sampling ---------------------------------------------------------


@dataclass(frozen=True)
class CertReport:
    """One checked inequality.

    ``sense="upper"`` checks measured <= bound and ``sense="lower"`` checks
    measured >= bound; ``margin`` is positive exactly when the check holds strictly.
    Equality counts as a pass. ``status`` overrides the computed verdict with
    ``"inconclusive"`` or ``"inapplicable"``.
    """

    check_id: str
    params: dict
    measured: float
    bound: float
    samples: int = 0
    seed: int | None = None
    sense: str = "upper"
    scale: str = "linear"
    notes: str = ""
    status: str | None = None

    @property
    def margin(self) -> float:
        if self.status == INAPPLICABLE:
            return math.nan
        if self.sense == "upper":
            return self.bound - self.measured
        return self.measured - self.bound

    @property
    def verdict(self) -> str:
        if self.status is not None:
            return self.status
        m = self.margin
        if math.isnan(m):
            return FAIL
        return PASS if m >= 0 else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


@dataclass(frozen=True)
class Circle:
    radius: float
    center: complex = 0j


@dataclass(frozen=True)
class Annulus:
    inner: float
    outer: float
    center: complex = 0j


@dataclass(frozen=True)
class SquareBoundary:
    square: Square = Q


@dataclass(frozen=True)
class SquareArea:
    square: Square = Q


Region = Union[Circle, Annulus, SquareBoundary, SquareArea]


def low_discrepancy(count: int, dim: int, seed: int | None = None) -> np.ndarray:
    """The first ``count`` Halton points in [0,1)**dim, shifted modulo 1 when seeded.

    Prefixes are nested: the first k points do not depend on ``count``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    pts = qmc.Halton(d=dim, scramble=False).random(count)
    if seed is not None:
        pts = np.mod(pts + np.random.default_rng(seed).random(dim), 1.0)
    return pts


def perimeter_points(t: np.ndarray, sq: Square = Q) -> np.ndarray:
    """Map t in [0,1) counterclockwise around the boundary from the bottom-left corner."""
    s = 4.0 * np.asarray(t)
    side = np.minimum(np.floor(s), 3).astype(int)
    u = 2.0 * (s - side) - 1.0
    h = sq.half_width
    x = np.select([side == 0, side == 1, side == 2, side == 3], [u, np.ones_like(u), -u, -np.ones_like(u)])
    y = np.select([side == 0, side == 1, side == 2, side == 3], [-np.ones_like(u), u, np.ones_like(u), -u])
    return sq.center + h * (x + 1j * y)


@dataclass(frozen=True)
class SamplePlan:
    region: Region
    count: int = DEFAULT_SAMPLES
    seed: int | None = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def points(self) -> np.ndarray:
        reg = self.region
        if isinstance(reg, Circle):
            u = low_discrepancy(self.count, 1, self.seed)[:, 0]
            return reg.center + reg.radius * np.exp(2j * np.pi * u)
        if isinstance(reg, Annulus):
            u = low_discrepancy(self.count, 2, self.seed)
            r = np.sqrt(reg.inner**2 + u[:, 0] * (reg.outer**2 - reg.inner**2))
            return reg.center + r * np.exp(2j * np.pi * u[:, 1])
        if isinstance(reg, SquareBoundary):
            return perimeter_points(low_discrepancy(self.count, 1, self.seed)[:, 0], reg.square)
        if isinstance(reg, SquareArea):
            u = low_discrepancy(self.count, 2, self.seed)
            h = reg.square.half_width
            return reg.square.center + h * ((2 * u[:, 0] - 1) + 1j * (2 * u[:, 1] - 1))
        raise TypeError(f"unknown region {reg!r}")


def _ratio_max(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """max lhs/rhs, where 0/0 counts as a tight 1 and x/0 as inf."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 0, np.inf, 1.0))
    return float(np.max(r))


# -- h_N bounds -------------------------------------------------------------------


def check_h_bounds(
    N: int,
    count: int = DEFAULT_SAMPLES,
    seed: int = 0,
    delta: float | None = None,
    extra_small: Sequence[complex] = (),
) -> list[CertReport]:
    """Three reports for h_N(z) = 1/(1 - z**N):

    * ``h.i``: |h_N(z)| <= 2|z|**-N on |z|**N >= 2, measured as max |h_N| |z|**N / 2;
    * ``h.ii``: |1 - h_N(z)| <= 2|z|**N on |z|**N <= 1/2, measured as a ratio the same way;
    * ``h.iv``: |h_N(z)| <= 2/delta wherever |z - w| >= delta/N for all N-th roots w,
      applicable when 0 < delta < (8 log N)**-1. Defaults to half that limit.
    """
    if N > FLOAT_POWER_LIMIT:
        raise ResourceError(f"N={N} above the sampling limit")
    params = {"N": N}
    u = low_discrepancy(count, 2, seed)
    # (i): log|z|**N spread over [log 2, 16 log 2]
    logt = math.log(2.0) * (1.0 + 15.0 * u[:, 0])
    z = np.exp(logt / N + 2j * np.pi * u[:, 1])
    lm, _ = log_power_array(z, N)
    h = hN_array(N, z)
    r_i = CertReport(
        "h.i", params, _ratio_max(np.abs(h), 2.0 * np.exp(-lm)), 1.0, count, seed,
        notes="measured = max |h_N(z)| |z|^N / 2 over 2 <= |z|^N <= 2^16",
    )
    # (ii): |z|**N from 2^-40 to 1/2
    logt = -math.log(2.0) * (1.0 + 39.0 * u[:, 0])
    z = np.exp(logt / N + 2j * np.pi * u[:, 1])
    if len(extra_small):
        z = np.concatenate([z, np.asarray(extra_small, dtype=complex)])
    lm, _ = log_power_array(z, N)
    h = hN_array(N, z)
    s_abs = np.exp(lm)
    # 1 - h = -s h exactly, which avoids cancellation for tiny s
    r_ii = CertReport(
        "h.ii", params, _ratio_max(s_abs * np.abs(h), 2.0 * s_abs), 1.0, len(z), seed,
        notes="measured = max |1 - h_N(z)| / (2 |z|^N) over |z|^N <= 1/2; 0/0 counts as tight",
    )
    return [r_i, r_ii, check_h_separation(N, delta, count, seed)]


def check_h_separation(N: int, delta: float | None = None, count: int = DEFAULT_SAMPLES, seed: int = 0) -> CertReport:
    limit = 1.0 / (8.0 * math.log(N))
    if delta is None:
        delta = 0.5 * limit
    params = {"N": N, "delta": delta}
    if not 0 < delta < limit:
        return CertReport(
            "h.iv", params, math.nan, 2.0 / delta if delta > 0 else math.inf, 0, seed,
            notes=f"precondition 0 < delta < (8 log N)^-1 = {limit!r} fails", status=INAPPLICABLE,
        )
    sep = delta / N
    u = low_discrepancy(count, 3, seed)
    half = count // 2
    # circles of radius delta/N around roots of unity (the extremal case)
    k = np.floor(u[:half, 0] * N)
    roots = np.exp(2j * np.pi * k / N)
    z1 = roots + sep * np.exp(2j * np.pi * u[:half, 1])
    # general points of the annulus 1/2 <= |z| <= 3/2 that satisfy the separation
    r = 0.5 + u[half:, 1]
    z2 = r * np.exp(2j * np.pi * u[half:, 2])
    k2 = np.round(np.angle(z2) * N / (2 * np.pi))
    near = np.min(
        np.abs(z2[:, None] - np.exp(2j * np.pi * (k2[:, None] + np.array([-1.0, 0.0, 1.0])) / N)), axis=1
    )
    z = np.concatenate([z1, z2[near >= sep]])
    measured = float(np.max(np.abs(hN_array(N, z))))
    return CertReport(
        "h.iv", params, measured, 2.0 / delta, len(z), seed,
        notes="measured = max |h_N| at distance >= delta/N from every N-th root of unity",
    )


# -- level families -------------------------------------------------------------


def log_abs_g_array(p: LevelParams, z: np.ndarray) -> np.ndarray:
    """log|g_n(z)| without overflow or underflow."""
    lm, ph = log_power_array(np.asarray(z, dtype=complex), p.N, p.log_shrink)
    small = lm <= 40.0
    t = np.exp(np.minimum(lm, 40.0) + 1j * ph)
    inv = np.exp(-np.maximum(lm, 40.0) - 1j * ph)
    return np.where(small, -np.log(np.abs(1.0 + t)), -lm - np.log(np.abs(1.0 + inv)))


def outside_level_discs(p: LevelParams, z: np.ndarray) -> np.ndarray:
    """True where z is outside every open disc of A(n) (double precision test)."""
    z = np.asarray(z, dtype=complex)
    N = p.N
    k = np.round(np.angle(z) * N / (2 * np.pi) - 0.5)
    d = np.full(z.shape, np.inf)
    for off in (-1.0, 0.0, 1.0):
        c = p.shrink * np.exp(1j * np.pi * (2.0 * (k + off) + 1.0) / N)
        d = np.minimum(d, np.abs(z - c))
    return d >= p.disc_radius


def analytic_sup_outer(n: int) -> float:
    """sup |g_n| on |z| >= 1 - 2**-(2n+1): attained in a pole direction, 1/(|t|-1)."""
    t = math.exp(log_abs_t(LevelParams(n), 1.0 - 2.0 ** -(2 * n + 1)))
    return 1.0 / (t - 1.0)


def analytic_sup_inner(n: int) -> float:
    """sup |1 - g_n| on |z| <= 1 - 2**-(2n-1): attained in a pole direction, |t|/(1-|t|)."""
    t = math.exp(log_abs_t(LevelParams(n), 1.0 - 2.0 ** -(2 * n - 1)))
    return t / (1.0 - t)


def smallest_level(predicate: Callable[[int], bool], start: int = 2, stop: int = 400) -> int | None:
    """Smallest n in [start, stop) from which ``predicate`` holds for every later n in range."""
    first = None
    for n in range(start, stop):
        if predicate(n):
            if first is None:
                first = n
        else:
            first = None
    return first


def _g_near_center(p: LevelParams, angles: np.ndarray) -> np.ndarray:
    """|g_n| on the circle of radius rho around the centre c_0 = shrink exp(i pi/N).

    With z = c_0 (1 + u), (z/shrink)**N = -(1+u)**N, so g = 1/(1 - exp(N log(1+u)));
    evaluated in mpmath so the tiny offset u is not lost to rounding.
    """
    out = np.empty(len(angles))
    with mpmath.workdps(40):
        c0 = p.shrink_exact()
        rho = mpmath.mpf(p.disc_radius_exact().numerator) / p.disc_radius_exact().denominator
        c0 = mpmath.mpf(c0.numerator) / c0.denominator * mpmath.expjpi(mpmath.mpf(1) / p.N)
        for i, a in enumerate(angles):
            u = rho * mpmath.expj(float(a)) / c0
            out[i] = float(1 / abs(1 - mpmath.exp(p.N * mpmath.log1p(u))))
    return out


def check_level_family(n: int, count: int = DEFAULT_SAMPLES, seed: int = 0, cap: int = 2**24) -> list[CertReport]:
    """Reports for clauses (i)-(vii) of the level-n family and its function g_n."""
    p = LevelParams(n)
    fam = build_level_family(n, cap)
    N, rho = p.N, p.disc_radius
    params = {"n": n}
    reports: list[CertReport] = []

    # (i) exhaustive budget against the coordinate cross
    total = budget_sum_array(fam.centers, rho, Cross(0j))
    reports.append(CertReport(
        "level.i", params, total, float(n) ** -2, N, None,
        notes=f"exhaustive over {N} discs; closed-form bound {analytic_level_cross_bound(n)!r}; "
        "the coarse threshold n > 32 sum r^-2 is not used",
    ))

    # (ii) every pole shrink * exp(i pi (2k+1)/N) inside its disc, in extended precision
    k = np.arange(N, dtype=np.longdouble)
    pi_ld = np.longdouble(mpmath.nstr(mpmath.pi, 25))
    shrink_ld = np.longdouble(1) - np.longdouble(0.25) ** n
    ang = pi_ld * (2 * k + 1) / N
    pole_re, pole_im = shrink_ld * np.cos(ang), shrink_ld * np.sin(ang)
    dist = np.hypot(pole_re - fam.centers.real.astype(np.longdouble), pole_im - fam.centers.imag.astype(np.longdouble))
    reports.append(CertReport(
        "level.ii", params, float(np.max(dist)), rho, N, None,
        notes="measured = max distance from a pole of g_n to the centre of its disc",
    ))

    # (iii) sup |g_n| on |z| >= 1 - 2^-(2n+1)
    r0 = p.outer_annulus
    u = low_discrepancy(count, 2, seed)
    z_circle = r0 * np.exp(2j * np.pi * u[:, 0])
    z_out = (r0 + (2.0 - r0) * u[:, 1] ** 2) * np.exp(2j * np.pi * u[:, 0])
    z_worst = np.array([r0 * np.exp(1j * np.pi / N)])
    z3 = np.concatenate([z_circle, z_out, z_worst])
    lg3 = log_abs_g_array(p, z3)
    sup3 = analytic_sup_outer(n)
    n3 = smallest_level(lambda r: analytic_sup_outer(r) <= (r + 1.0) ** -4)
    reports.append(CertReport(
        "level.iii", params, float(np.exp(np.max(lg3))), (n + 1.0) ** -4, len(z3), seed,
        notes=f"includes the pole-direction point; analytic sup 1/(|t|-1) = {sup3!r}; "
        f"holds for every n >= {n3}",
    ))

    # (iv) sup |1 - g_n| on |z| <= 1 - 2^-(2n-1)
    r1 = p.inner_annulus
    z_in = np.concatenate([
        r1 * np.exp(2j * np.pi * u[:, 0]),
        r1 * np.sqrt(u[:, 1]) * np.exp(2j * np.pi * u[:, 0]),
        [r1 * np.exp(1j * np.pi / N)],
    ])
    m4 = float(np.max(np.abs(one_minus_gn_array(p, z_in))))
    literal = float(np.max(np.abs(1.0 - hN_array(N, z_in))))
    n4 = smallest_level(lambda r: analytic_sup_inner(r) <= (r + 1.0) ** -4)
    reports.append(CertReport(
        "level.iv", params, m4, (n + 1.0) ** -4, len(z_in), seed,
        notes=f"measured for g_n; analytic sup |t|/(1-|t|) = {analytic_sup_inner(n)!r} holds for every "
        f"n >= {n4}; read with h_N in place of g_n the sup is {literal!r}",
    ))

    # (v) sup |g_n| off the discs; the extremum sits on the disc boundaries
    angles = 2 * np.pi * low_discrepancy(min(count, 512), 1, seed)[:, 0]
    on_circle = _g_near_center(p, angles)
    annulus = Annulus(max(0.0, p.shrink - 8 * rho - 4.0**-n), min(2.0, p.shrink + 8 * rho + 4.0**-n))
    za = SamplePlan(annulus, count, seed).points()
    za = za[outside_level_discs(p, za)]
    lg5 = log_abs_g_array(p, za)
    sup5 = max(float(np.max(on_circle)), float(np.exp(np.max(lg5))) if len(za) else 0.0)
    primary = n**4 * 2.0 ** (2 * n + 1)
    cand_n3 = n**3 * 2.0 ** (2 * n + 1)
    cand_neg = n**-4.0 * 2.0 ** (2 * n + 1)
    verdicts = {
        "n^4 2^(2n+1)": sup5 <= primary,
        "n^3 2^(2n+1)": sup5 <= cand_n3,
        "n^-4 2^(2n+1)": sup5 <= cand_neg,
    }
    supported = ", ".join(k for k, ok in verdicts.items() if ok) or "none"
    reports.append(CertReport(
        "level.v", params, sup5, primary, len(angles) + len(za), seed,
        notes=f"candidate bounds n^3 2^(2n+1) = {cand_n3!r}, n^-4 2^(2n+1) = {cand_neg!r}; "
        f"measured sup is consistent with: {supported}; ratio to n^4 2^(2n) = {sup5 / (n**4 * 4.0**n)!r}",
    ))

    # (vi) g_n has no zeros: every sampled log|g_n| is finite
    all_lg = np.concatenate([lg3, lg5, np.log(on_circle)])
    finite = bool(np.all(np.isfinite(all_lg)))
    reports.append(CertReport(
        "level.vi", params, float(-np.min(all_lg)) if finite else math.inf, math.inf, len(all_lg), seed,
        notes="measured = max -log|g_n| over every sample above; |g_n| > 0 iff it is finite",
        status=None if finite else FAIL,
    ))

    # (vii) annulus containment, exhaustive
    mod = np.abs(fam.centers)
    slack = np.minimum(mod - rho - r1, r0 - mod - rho)
    exact_slack = min(
        p.shrink_exact() - p.disc_radius_exact() - (1 - Fraction(2, 4**n)),
        (1 - Fraction(1, 2 * 4**n)) - p.shrink_exact() - p.disc_radius_exact(),
    )
    reports.append(CertReport(
        "level.vii", params, float(-np.min(slack)), 0.0, N, None,
        notes=f"measured = -(smallest slack inside the annulus); exact slack {float(exact_slack)!r}",
    ))
    return reports


# -- convergence and non-vanishing -------------------------------------------------


def _inside_any_level(z: np.ndarray, levels: Iterable[int]) -> np.ndarray:
    bad = np.zeros(np.shape(z), dtype=bool)
    for r in levels:
        bad |= ~outside_level_discs(LevelParams(r), z)
    return bad


def convergence_points(m: int, n: int, count: int = 1000, seed: int = 0) -> np.ndarray:
    """Half uniform in Q, half concentrated on the rings of levels m..n+1, off every disc."""
    u = low_discrepancy(2 * count, 3, seed)
    half = count // 2
    z = (2 * u[:half, 0] - 1) + 1j * (2 * u[:half, 1] - 1)
    levels = np.arange(m, n + 2)
    lv = levels[(np.arange(2 * count - half) % len(levels))]
    shrink = 1.0 - 0.25**lv
    rr = shrink + (u[half:, 0] - 0.5) * 4.0 * 0.25**lv
    zr = rr * np.exp(2j * np.pi * u[half:, 1])
    zr = zr[~_inside_any_level(zr, range(m, n + 2))][: count - half]
    z = z[~_inside_any_level(z, range(m, n + 2))]
    return np.concatenate([z, zr])


def _log_abs_fn(m: int, n: int, z: np.ndarray) -> np.ndarray:
    out = np.full(np.shape(z), -4.0 * math.lgamma(m + 1))
    for r in range(m, n + 1):
        out = out + log_abs_g_array(LevelParams(r), z)
    return out


def _disc_boundary_worst(m: int, n: int, samples: int = 256) -> float:
    """max |f_{n+1} - f_n| on the boundary circle of one level-(n+1) disc."""
    p = LevelParams(n + 1)
    angles = 2 * np.pi * np.arange(samples) / samples
    gabs = _g_near_center(p, angles)
    with mpmath.workdps(40):
        c0 = (1 - mpmath.mpf(4) ** (-(n + 1))) * mpmath.expjpi(mpmath.mpf(1) / p.N)
        rho = mpmath.mpf(p.disc_radius_exact().numerator) / p.disc_radius_exact().denominator
        z = np.array([complex(c0 + rho * mpmath.expj(float(a))) for a in angles])
    lf = _log_abs_fn(m, n, z)
    # |1 - g| = |g| |t| and |t| = |1 - 1/g| is within rounding of 1 on this circle
    one_minus = gabs * np.abs(1.0 - 1.0 / gabs)
    return float(np.max(np.exp(lf) * np.maximum(one_minus, gabs - 1.0)))


def factorial_display_threshold(stop: int = 400) -> int | None:
    """Smallest n from which (n+1)!**-4 (1 + (n+1)**4 2**(2n+1)) <= (n+1)**-2."""

    def holds(n):
        lhs = -4 * math.lgamma(n + 2) + math.log1p((n + 1.0) ** 4 * 2.0 ** (2 * n + 1))
        return lhs <= -2 * math.log(n + 1)

    return smallest_level(holds, 1, stop)


def check_convergence(m: int, n: int, count: int = 1000, seed: int = 0, points: np.ndarray | None = None) -> CertReport:
    """max |f_{n+1}(z) - f_n(z)| = |f_n(z)| |1 - g_{n+1}(z)| over admissible samples,
    against K (n+1)**-2 using the lower end of the certified interval for K."""
    if n < m:
        raise ValueError("need n >= m")
    if points is None:
        z = convergence_points(m, n, count, seed)
    else:
        z = np.asarray(points, dtype=complex)
        if np.any(_inside_any_level(z, range(m, n + 2))):
            raise DomainError("a sample lies inside a deleted disc")
    lf = _log_abs_fn(m, n, z)
    one_minus = np.abs(one_minus_gn_array(LevelParams(n + 1), z))
    with np.errstate(divide="ignore"):
        diff = np.exp(lf + np.log(one_minus))
    k_lo, k_hi = K_interval(50)
    bound = k_lo * (n + 1.0) ** -2
    p_in, p_out = LevelParams(n).inner_annulus, LevelParams(n).outer_annulus
    middle = (np.abs(z) > p_in) & (np.abs(z) < p_out)
    mid_max = float(np.max(np.exp(lf[middle]))) if np.any(middle) else math.nan
    worst = _disc_boundary_worst(m, n)
    return CertReport(
        "convergence", {"m": m, "n": n}, float(np.max(diff)), bound, len(z), seed,
        notes=(
            f"K in [{k_lo!r}, {k_hi!r}]; on a level-{n + 1} disc boundary the difference reaches {worst!r} "
            f"({'within' if worst <= bound else 'above'} the bound); max |f_n| in the middle annulus "
            f"{mid_max!r} vs n^-2 = {float(n) ** -2!r} and K; the factorial display holds from n = "
            f"{factorial_display_threshold()}"
        ),
    )


def check_nonvanishing(m: int, n_max: int, z: complex) -> CertReport:
    """Certified lower bound on |f(z)| = |f_{n_max}(z)| * prod_{r > n_max} |g_r(z)|."""
    est = eval_f_limit(ProductFunction(m, n_max), z)
    lo10 = est.log_lower / LN10
    return CertReport(
        "nonvanishing", {"m": m, "n_max": n_max, "z": repr(complex(z))}, lo10, -math.inf, 1, None,
        sense="lower", scale="log10",
        notes=f"log10 |f(z)| in [{lo10!r}, {est.log_upper / LN10!r}]; tail factors in "
        f"[{est.tail_lower!r}, {est.tail_upper!r}]",
        status=None if math.isfinite(lo10) else FAIL,
    )


def nonvanishing_points(m: int, n_max: int, count: int = 100, seed: int = 0) -> np.ndarray:
    """Points of the tail-estimate disc |z| < 1 - 2**-(2 n_max + 1), off all discs."""
    r_max = 1.0 - 2.0 ** -(2 * (n_max + 1) - 1)
    pts = SamplePlan(Annulus(0.0, r_max * (1 - 1e-12)), 4 * count, seed).points()
    pts = pts[~_inside_any_level(pts, range(m, n_max + 1))]
    return pts[:count]


# -- residue oracle -------------------------------------------------------------------


@dataclass(frozen=True)
class PoleForm:
    """constant + linear z + sum residue_j / (z - pole_j)."""

    constant: complex
    poles: tuple[complex, ...]
    residues: tuple[complex, ...]
    linear: complex = 0j

    def to_expr(self) -> RationalExpr:
        e = RationalExpr.from_poles(self.constant, self.poles, self.residues)
        if self.linear:
            e = e + RationalExpr((0j, self.linear))
        return e


def _in_square(p: complex, sq: Square = Q) -> bool:
    return abs(p.real - sq.center.real) < sq.half_width and abs(p.imag - sq.center.imag) < sq.half_width


def residue_oracle(f: PoleForm, g: PoleForm, sq: Square = Q) -> complex:
    """The boundary integral of f'g from residues of the pole forms.

    f' g = (e - sum a_j/(z-p_j)**2)(d + sum b_k/(z-q_k)). Double poles alone integrate
    to 0; 1/(z-q) gives 2 pi i [q inside]; 1/((z-p)**2 (z-q)) has residue 1/(q-p)**2 at q
    and -1/(p-q)**2 at p.
    """
    total = 0j
    for b, q in zip(g.residues, g.poles):
        if _in_square(q, sq):
            total += f.linear * b
    for a, p in zip(f.residues, f.poles):
        for b, q in zip(g.residues, g.poles):
            if p == q:
                continue
            total += a * b * (float(_in_square(p, sq)) - float(_in_square(q, sq))) / (p - q) ** 2
    return 2j * math.pi * total


def random_pole_form(rng: np.random.Generator, max_poles: int = 3, linear: bool = False) -> PoleForm:
    k = int(rng.integers(1, max_poles + 1))
    poles = []
    while len(poles) < k:
        p = complex(*rng.uniform(-1.8, 1.8, size=2))
        edge_gap = min(abs(abs(p.real) - 1.0), abs(abs(p.imag) - 1.0))
        if edge_gap > 0.1 and all(abs(p - o) > 0.1 for o in poles):
            poles.append(p)
    res = tuple(complex(*rng.normal(size=2)) for _ in range(k))
    lin = complex(*rng.normal(size=2)) if linear else 0j
    return PoleForm(complex(*rng.normal(size=2)), tuple(poles), res, lin)


def random_pair(rng: np.random.Generator) -> tuple[PoleForm, PoleForm]:
    f = random_pole_form(rng, linear=bool(rng.integers(0, 2)))
    while True:
        g = random_pole_form(rng)
        if all(abs(p - q) > 0.1 for p in f.poles for q in g.poles):
            return f, g


def check_residue_oracle(count: int = 100, seed: int = 0, tol: float = DEFAULT_TOL) -> CertReport:
    """Quadrature vs residues on random pairs; measured = max deviation / allowance with
    allowance max(1e-9, 1e-6 |value|)."""
    rng = np.random.default_rng(seed)
    worst, worst_abs = 0.0, 0.0
    for _ in range(count):
        f, g = random_pair(rng)
        exact = residue_oracle(f, g)
        q = contour_integral_boundary(f.to_expr(), g.to_expr(), tol)
        dev = abs(q.value - exact)
        worst = max(worst, dev / max(1e-9, 1e-6 * abs(exact)))
        worst_abs = max(worst_abs, dev)
    return CertReport(
        "residue.oracle", {"pairs": count}, worst, 1.0, count, seed,
        notes=f"max absolute deviation {worst_abs!r}",
    )


def check_residue_unit(p: complex = 0.3 + 0.2j) -> CertReport:
    q = contour_integral_boundary(RationalExpr.identity(), RationalExpr.simple_pole(p))
    return CertReport(
        "residue.unit", {"p": repr(complex(p))}, abs(q.value - 2j * math.pi), 1e-10, q.panels, None,
        notes="measured = |integral of dz/(z-p) - 2 pi i|",
    )


# -- sup norms and the derivation bound ----------------------------------------------


@dataclass(frozen=True)
class SupEstimate:
    value: float
    argmax: complex
    samples: int
    density: int
    note: str = "lower estimate: every sample lies in X"


def _pole_in_x(cfg: CheeseConfig, p: complex) -> bool:
    if abs(p.real) > 1.0 or abs(p.imag) > 1.0:
        return False
    try:
        return cfg.contains(p)
    except PrecisionError:
        return False


def _circle_discs(cfg: CheeseConfig, poles: np.ndarray, limit: int = 64) -> list[tuple[complex, float]]:
    """Deleted discs whose boundaries are sampled: those nearest the poles, at most ``limit``."""
    discs = [(d.disc.center, d.disc.radius) for d in cfg.iter_deletions()]
    if not discs:
        return []
    if len(poles):
        key = [min(abs(c - p) for p in poles) - r for c, r in discs]
        order = sorted(range(len(discs)), key=lambda i: (key[i], i))
    else:
        order = list(range(len(discs)))
    return [discs[i] for i in order[:limit]]


def sup_norm_estimate(e: RationalExpr, cfg: CheeseConfig, density: int = 64) -> SupEstimate:
    """Under-estimate of sup |e| over X from boundary and interior samples.

    Samples: 4*density points on the boundary of Q, density**2 points in Q, and
    density points on each of up to 64 deleted-disc boundaries nearest the poles.
    Every sample outside X is dropped, and sample sets for a larger density contain
    those for a smaller one, so the estimate never decreases with density.
    """
    if density < 1:
        raise ValueError("density must be >= 1")
    poles = e.poles()
    for p in poles:
        if _pole_in_x(cfg, complex(p)):
            raise PoleInXError(f"pole {complex(p)!r} lies in X")
    parts = [perimeter_points(low_discrepancy(4 * density, 1)[:, 0])]
    u = low_discrepancy(density * density, 2)
    parts.append((2 * u[:, 0] - 1) + 1j * (2 * u[:, 1] - 1))
    ang = np.exp(2j * np.pi * low_discrepancy(density, 1)[:, 0])
    for c, r in _circle_discs(cfg, poles):
        parts.append(c + r * ang)
    z = np.concatenate(parts)
    z = z[cfg.contains_array(z)]
    vals = np.abs(e.eval(z))
    i = int(np.argmax(vals))
    return SupEstimate(float(vals[i]), complex(z[i]), len(z), density)


def stable_sup(e: RationalExpr, cfg: CheeseConfig, start: int = 16, max_density: int = 256, rtol: float = 1e-3) -> SupEstimate:
    """Double the density until the estimate changes by less than ``rtol`` (relative)."""
    prev = sup_norm_estimate(e, cfg, start)
    d = start
    while d < max_density:
        d *= 2
        cur = sup_norm_estimate(e, cfg, d)
        if cur.value <= prev.value * (1 + rtol):
            return cur
        prev = cur
    return prev


def check_derivation_bound(
    f: RationalExpr, g: RationalExpr, cfg: CheeseConfig, density: int | None = None
) -> tuple[CertReport, CertReport]:
    """|integral f'g| against 2|f||g| sum c_n/s_n**2 and against C|f||g|.

    Sup norms are under-estimates, so a failed comparison is reported as inconclusive.
    """
    if density is None:
        sf, sg = stable_sup(f, cfg), stable_sup(g, cfg)
    else:
        sf, sg = sup_norm_estimate(f, cfg, density), sup_norm_estimate(g, cfg, density)
    try:
        q = contour_integral_boundary(f, g)
    except ToleranceNotMet as exc:
        q = exc.result
    value = abs(q.value)
    product = sf.value * sg.value
    lsum = cfg.ledger.combined_integral
    params = {"C": cfg.C, "density_f": sf.density, "density_g": sg.density}
    common = f"|f|_X >= {sf.value!r}, |g|_X >= {sg.value!r}, quadrature error {q.error!r}"
    b1 = 2.0 * product * lsum
    b2 = cfg.C * product
    r1 = CertReport(
        "derivation.sum", params, value, b1, sf.samples + sg.samples, None,
        notes=f"{common}; sum c_n/s_n^2 = {lsum!r}", status=None if value <= b1 else INCONCLUSIVE,
    )
    r2 = CertReport(
        "derivation.C", params, value, b2, sf.samples + sg.samples, None,
        notes=f"{common}; 2 sum c_n/s_n^2 / C = {2 * lsum / cfg.C!r}", status=None if value <= b2 else INCONCLUSIVE,
    )
    return r1, r2


# -- regularity witnesses ------------------------------------------------------------


@dataclass(frozen=True)
class WitnessRecord:
    z0: complex
    B: tuple[complex, ...]
    index: int
    target: RationalDisc
    cls: DiscClass
    m: int
    n_max: int
    log10_lower_z0: float
    log10_max_B: float
    separation: float

    @property
    def success(self) -> bool:
        return math.isfinite(self.log10_lower_z0) and self.log10_max_B <= self.log10_lower_z0 - self.separation


def _family(cfg: CheeseConfig, l: int, d: RationalDisc, cls: DiscClass) -> TransplantedFamily:
    if l <= len(cfg.families):
        return cfg.families[l - 1]
    return family_for_index(l, d, cls, cfg.C0, cfg.n_cap)


def regularity_witness(
    z0: complex,
    B: Sequence[complex],
    cfg: CheeseConfig,
    l_search_cap: int = 1000,
    separation: float = 6.0,
    max_unit_radius: float = 0.5,
    extra_levels: int = 64,
) -> WitnessRecord:
    """Find D_l containing z0 and missing B, and show f_l(z0) != 0 while f_l is small on B.

    z0 is required to sit within ``max_unit_radius`` of the centre in units of the
    radius, so the tail estimate applies. The truncation is raised until
    ``log10 max_B |f_n| <= log10 |f(z0)| - separation``.
    """
    z0 = complex(z0)
    B = tuple(complex(b) for b in B)
    if not cfg.contains(z0):
        raise DomainError(f"z0={z0!r} is not in X")
    for b in B:
        if b == z0:
            raise DomainError("B contains z0")
        if not cfg.contains(b):
            raise DomainError(f"{b!r} is not in X")
    for l, (d, cls) in enumerate(iter_admissible_discs(), start=1):
        if l > l_search_cap:
            break
        a, R = d.center, d.radius
        if abs(z0 - a) > max_unit_radius * R:
            continue
        if any(abs(b - a) <= R for b in B):
            continue
        fam = _family(cfg, l, d, cls)
        w0 = (z0 - a) / R
        if fam.contains(z0) or any(fam.contains(b) for b in B):
            raise DomainError(f"a point lies in a disc transplanted into D_{l}")
        lower = eval_f_limit(ProductFunction(fam.m, fam.n_max), w0).log_lower / LN10
        n_max = fam.n_max
        while True:
            f = ProductFunction(fam.m, n_max)
            top = max((eval_product(f, (b - a) / R).log_magnitude / LN10 for b in B), default=-math.inf)
            if top <= lower - separation or n_max >= fam.n_max + extra_levels:
                break
            n_max += 1
        return WitnessRecord(z0, B, l, d, cls, fam.m, n_max, lower, top, separation)
    raise SearchExhausted(f"no suitable disc among the first {l_search_cap}")


# -- global budget, recomputed -----------------------------------------------------------


@dataclass(frozen=True)
class BudgetRecomputation:
    total: float
    exhaustive_part: float
    ledger_exhaustive_part: float
    bounded_part: float
    discs: int

    @property
    def exhaustive_rel_diff(self) -> float:
        if self.ledger_exhaustive_part == 0:
            return abs(self.exhaustive_part)
        return abs(self.exhaustive_part - self.ledger_exhaustive_part) / self.ledger_exhaustive_part


def _unit_cross_bound(n: int) -> float:
    """sum over A(n) of r/s0**2 by an integral comparison.

    Per octant, s0 >= shrink sin(t_k) - rho >= a(2k+1) - rho with a = 2 sqrt2 shrink/N,
    and sum_k (a(2k+1) - b)**-2 <= (a-b)**-2 + 1/(2a(a-b)).
    """
    p = LevelParams(n)
    with mpmath.workdps(30):
        N = mpmath.mpf(n) * mpmath.mpf(4) ** n
        rho = mpmath.mpf(1) / (mpmath.mpf(n) ** 5 * mpmath.mpf(16) ** n)
        a = 2 * mpmath.sqrt(2) * (1 - mpmath.mpf(4) ** (-n)) / N
        s = 1 / (a - rho) ** 2 + 1 / (2 * a * (a - rho))
        val = 8 * rho * s
    return math.nextafter(float(val), math.inf)


def recompute_global_budget(cfg: CheeseConfig) -> BudgetRecomputation:
    """sum r/dist(., dQ)**2 over every retained McKissick disc, without reading the ledger
    except for the comparison field.

    Materializable levels are rebuilt disc by disc from their formulas; other levels
    and the omitted tails are bounded by an integral comparison.
    """
    exhaustive, ledger_exh, bounded = [], [], []
    count = 0
    for fam in cfg.families:
        d = fam.target
        a, R = d.center, d.radius
        if fam.cls is DiscClass.INTERIOR:
            g = float(min(1 - abs(d.x), 1 - abs(d.y)) - d.r)
        else:
            g = _far_edges_gap(d)
        for lv in fam.levels:
            r = lv.level
            if lv.method == "exhaustive":
                p = LevelParams(r)
                k = np.arange(p.N, dtype=float)
                c = a + R * (1.0 - 0.25**r) * np.exp(1j * np.pi * (2 * k + 1) / p.N)
                rad = R * float(r) ** -5 * 0.0625**r
                ox = np.maximum(np.abs(c.real) - 1.0, 0.0)
                oy = np.maximum(np.abs(c.imag) - 1.0, 0.0)
                keep = np.hypot(ox, oy) < rad
                cx, cy = c.real[keep], c.imag[keep]
                s = np.minimum(1.0 - np.abs(cx), 1.0 - np.abs(cy)) - rad
                exhaustive.append(math.fsum((rad / s**2).tolist()))
                ledger_exh.append(lv.boundary_budget)
                count += int(keep.sum())
            else:
                total_r = R * float(r) ** -4 * 0.25**r
                val = total_r / g**2
                if fam.cls is not DiscClass.INTERIOR:
                    val += _unit_cross_bound(r) / R
                bounded.append(val)
        # omitted levels: sum r^-2 <= 1/n and sum r^-4 4^-r <= (n+1)^-4 4^-(n+1) 4/3
        n = fam.n_max
        tail = R * (n + 1.0) ** -4 * 0.25 ** (n + 1) * (4.0 / 3.0) / g**2
        if fam.cls is not DiscClass.INTERIOR:
            tail += 1.0 / (n * R)
        bounded.append(tail)
    e = math.fsum(exhaustive)
    b = math.fsum(bounded)
    return BudgetRecomputation(e + b, e, math.fsum(ledger_exh), b, count)


def _far_edges_gap(d: RationalDisc) -> float:
    """Distance from the disc to the edges of Q not containing its centre."""
    x, y, r = float(d.x), float(d.y), float(d.r)
    gaps = []
    for ex, ey, vertical in ((1.0, None, True), (-1.0, None, True), (None, 1.0, False), (None, -1.0, False)):
        if vertical:
            if x == ex:
                continue
            gaps.append(math.hypot(x - ex, max(abs(y) - 1.0, 0.0)))
        else:
            if y == ey:
                continue
            gaps.append(math.hypot(y - ey, max(abs(x) - 1.0, 0.0)))
    return min(gaps) - r


def check_global_budget(cfg: CheeseConfig) -> CertReport:
    rec = recompute_global_budget(cfg)
    return CertReport(
        "budget.global", {"C0": cfg.C0, "L": cfg.L, "n_cap": cfg.n_cap}, rec.total, cfg.C0, rec.discs, None,
        notes=(
            f"exhaustive part {rec.exhaustive_part!r} (ledger {rec.ledger_exhaustive_part!r}, relative "
            f"difference {rec.exhaustive_rel_diff!r}); bounded part {rec.bounded_part!r}; "
            f"ledger total {cfg.ledger.mckissick_boundary!r}"
        ),
    )


# -- suites -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Job:
    name: str
    args: tuple = ()
    kwargs: dict = field(default_factory=dict)


def _run_job(job: Job) -> list[CertReport]:
    fn = JOB_FUNCTIONS[job.name]
    out = fn(*job.args, **job.kwargs)
    if isinstance(out, CertReport):
        return [out]
    return list(out)


def _h_level(n: int, count: int, seed: int) -> list[CertReport]:
    p = LevelParams(n)
    reps = check_h_bounds(p.N, count, seed, delta=p.delta)
    return [CertReport(r.check_id, {**r.params, "n": n}, r.measured, r.bound, r.samples, r.seed,
                       r.sense, r.scale, r.notes, r.status) for r in reps]


def _nonvanishing_batch(m: int, n_max: int, count: int, seed: int) -> list[CertReport]:
    return [check_nonvanishing(m, n_max, complex(z)) for z in nonvanishing_points(m, n_max, count, seed)]


JOB_FUNCTIONS: dict[str, Callable] = {
    "h_level": _h_level,
    "level_family": check_level_family,
    "convergence": check_convergence,
    "nonvanishing": _nonvanishing_batch,
    "residue_oracle": check_residue_oracle,
    "residue_unit": check_residue_unit,
}

SUITE_ALIASES = {"lemma2.2": "h-bounds", "lemma2.4": "level-family"}
SUITES = ("h-bounds", "level-family", "convergence", "nonvanishing", "residue-oracle", "budget", "derivation")
CONFIG_SUITES = frozenset({"budget", "derivation"})


def suite_name(name: str) -> str:
    name = SUITE_ALIASES.get(name, name)
    if name not in SUITES and name != "all":
        raise ValueError(f"unknown suite {name!r}")
    return name


def suite_jobs(suite: str, n_range: Sequence[int], samples: int, seed: int) -> list[Job]:
    suite = suite_name(suite)
    if suite == "h-bounds":
        return [Job("h_level", (n, samples, seed)) for n in n_range]
    if suite == "level-family":
        return [Job("level_family", (n, samples, seed)) for n in n_range]
    if suite == "convergence":
        m = min(n_range)
        return [Job("convergence", (m, n, samples, seed)) for n in n_range]
    if suite == "nonvanishing":
        return [Job("nonvanishing", (min(n_range), max(n_range), samples, seed))]
    if suite == "residue-oracle":
        return [Job("residue_unit"), Job("residue_oracle", (samples, seed))]
    return []


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SWISSCHEESE_WORKERS", "1")))
    except ValueError:
        return 1


def run_jobs(jobs: Sequence[Job], workers: int | None = None) -> list[CertReport]:
    """Run jobs, in parallel when ``workers > 1``; results keep the job order."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        results = [_run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    return [r for batch in results for r in batch]


def derivation_witness_pair(cfg: CheeseConfig) -> tuple[RationalExpr, RationalExpr, complex]:
    """f(z) = z and g(z) = 1/(z-p) with p the centre of the first explicit deleted disc
    (or of the first materialized McKissick disc)."""
    for d in cfg.iter_deletions():
        p = d.disc.center
        return RationalExpr.identity(), RationalExpr.simple_pole(p), p
    raise DomainError("configuration has no materialized deleted disc")


def config_reports(suite: str, cfg: CheeseConfig) -> list[CertReport]:
    suite = suite_name(suite)
    if suite == "budget":
        return [check_global_budget(cfg)]
    if suite == "derivation":
        f, g, _ = derivation_witness_pair(cfg)
        return list(check_derivation_bound(f, g, cfg))
    return []
