"""Rational function systems: h_N, the level functions g_n, their products f_n and the
limit f, plus explicit polynomial-ratio expressions for test functions.

Powers ``z**N`` are never formed directly. With ``N = n 4**n`` already past half a
million at n = 8, they are evaluated as ``N * log(z)`` (log magnitude plus phase
reduced modulo 2*pi). Three regimes:

* ``N <= FLOAT_POWER_LIMIT``: double precision, vectorized;
* ``n <= MP_LEVEL_LIMIT``: scalar mpmath with ``N.bit_length() + 64`` bits, so the
  phase of ``t`` is exact for the given double input;
* beyond that only the magnitude of ``t`` is resolvable, and the phase is reported as NaN.

For level n with ``shrink = 1 - 4**-n`` and ``omega**(-1/2) = exp(-i pi/N)`` the
argument ``w = omega**(-1/2) z / shrink`` satisfies ``w**N = -(z/shrink)**N``, so
``g_n(z) = 1 / (1 + (z/shrink)**N)``. That identity is used throughout; it removes
the rounding of ``omega**(-1/2)`` from every evaluation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, PoleError, PrecisionError, ResourceError

TWO_PI = 2.0 * math.pi
LN2 = math.log(2.0)
POLE_RTOL = 1e-12
FLOAT_POWER_LIMIT = 2**24
MP_LEVEL_LIMIT = 4096
MAX_EXACT_LEVEL = 100_000
# |t| beyond exp(+-LOG_SATURATE) makes 1/(1+t) equal to 1/t or 1 to double precision.
LOG_SATURATE = 745.0
_FLOAT_MAX = 1.7976931348623157e308


def _clamp(x: float) -> float:
    return max(-_FLOAT_MAX, min(_FLOAT_MAX, x))


def _wrap(phase: float) -> float:
    if math.isnan(phase):
        return phase
    p = math.remainder(phase, TWO_PI)
    return math.pi if p == -math.pi else p


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as (natural log of modulus, phase).

    ``log_magnitude == -inf`` encodes zero. A NaN phase means only the modulus is
    known; this happens when the phase of ``z**N`` is below working resolution.
    """

    log_magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phase", _wrap(float(self.phase)))

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), cmath.phase(z))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_magnitude - other.log_magnitude, self.phase - other.phase)

    @property
    def magnitude(self) -> float:
        return math.exp(self.log_magnitude) if self.log_magnitude < 709.7 else math.inf

    @property
    def log10_magnitude(self) -> float:
        return self.log_magnitude / math.log(10.0)

    def to_complex(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0j
        if math.isnan(self.phase):
            raise PrecisionError("phase is not resolvable at this level")
        if not -745.0 < self.log_magnitude < 709.7:
            raise DomainError(f"|value| = exp({self.log_magnitude:.6g}) is outside double range")
        return cmath.rect(math.exp(self.log_magnitude), self.phase)


# -- level parameters ---------------------------------------------------------


@dataclass(frozen=True)
class LevelParams:
    """Parameters of McKissick level ``n``: ``N = n 4**n`` poles on the circle of radius
    ``shrink = 1 - 4**-n``, separated by discs of radius ``n**-5 2**(-4n)``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"level must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @cached_property
    def N(self) -> int:
        if self.n > MAX_EXACT_LEVEL:
            raise ResourceError(f"N = n*4**n has {2 * self.n} bits at n={self.n}; use log_N")
        return self.n << (2 * self.n)

    @property
    def log_N(self) -> float:
        return math.log(self.n) + 2 * self.n * LN2

    @property
    def omega(self) -> complex:
        return cmath.exp(1j * math.pi / math.exp(self.log_N - LN2))

    @property
    def shrink(self) -> float:
        return 1.0 - 0.25**self.n

    @property
    def log_shrink(self) -> float:
        return math.log1p(-(0.25**self.n))

    @property
    def delta(self) -> float:
        return self.n**-3.0 * 0.25**self.n

    @property
    def disc_radius(self) -> float:
        return self.n**-5.0 * 0.0625**self.n

    @property
    def log_disc_radius(self) -> float:
        return -5.0 * math.log(self.n) - 4 * self.n * LN2

    def shrink_exact(self) -> Fraction:
        return 1 - Fraction(1, 4**self.n)

    def disc_radius_exact(self) -> Fraction:
        return Fraction(1, self.n**5 * 16**self.n)

    @property
    def inner_annulus(self) -> float:
        """1 - 2**-(2n-1): inner radius of the annulus holding the discs of A(n)."""
        return 1.0 - 2.0 ** -(2 * self.n - 1)

    @property
    def outer_annulus(self) -> float:
        """1 - 2**-(2n+1)."""
        return 1.0 - 2.0 ** -(2 * self.n + 1)

    def delta_admissible(self) -> bool:
        """Whether delta < (8 log N)**-1, the hypothesis of the h_N separation bound."""
        return self.delta * 8.0 * self.log_N < 1.0


# -- powers -------------------------------------------------------------------


def _mp_power(z: complex, N: int, scale: mpmath.mpf | None) -> tuple[float, float]:
    with mpmath.workprec(N.bit_length() + 80):
        w = mpmath.mpc(z.real, z.imag)
        L = mpmath.log(w)
        if scale is not None:
            L -= mpmath.log(scale)
        L *= N
        log_mag = _clamp(float(L.real)) if abs(L.real) < 1e300 else math.copysign(_FLOAT_MAX, L.real)
        phase = float(mpmath.fmod(L.imag, 2 * mpmath.pi))
    return log_mag, phase


def _log_power(z: complex, N: int | None, log_N: float, level: int | None = None) -> tuple[float, float]:
    """``(log|u**N|, arg u**N)`` for ``u = z`` (``level is None``) or ``u = z/shrink``."""
    if z == 0:
        return -math.inf, 0.0
    small = N is not None and N <= FLOAT_POWER_LIMIT
    if small:
        x = math.log(abs(z))
        if level is not None:
            x -= math.log1p(-(0.25**level))
        return N * x, math.fmod(N * cmath.phase(z), TWO_PI)
    if N is not None and (level is None or level <= MP_LEVEL_LIMIT):
        scale = None
        if level is not None:
            with mpmath.workprec(N.bit_length() + 80):
                scale = 1 - mpmath.mpf(4) ** (-level)
        return _mp_power(z, N, scale)
    # magnitude only
    x = math.log(abs(z))
    if level is not None:
        x -= math.log1p(-(0.25**level))
    if x == 0.0:
        raise PrecisionError("point lies on a pole ring to double precision")
    a = log_N + math.log(abs(x))
    log_mag = math.copysign(math.exp(a) if a < 709.7 else _FLOAT_MAX, x)
    if abs(log_mag) < LOG_SATURATE:
        raise PrecisionError("point is within phase resolution of a pole ring")
    return log_mag, math.nan


def _pole_tol(N_float: float) -> float:
    # double-precision conditioning of u**N grows like N; the mpmath path is exact for
    # its double input, so the N-scaling stops at the float limit
    return POLE_RTOL * min(N_float, float(FLOAT_POWER_LIMIT))


def _reciprocal_one_plus(log_t: float, phase_t: float, N_float: float) -> LogComplex:
    """1/(1+t) for ``t = exp(log_t + i phase_t)``; PoleError when |1+t| is below tolerance."""
    if log_t < -LOG_SATURATE:
        return LogComplex(0.0, 0.0)
    if log_t > LOG_SATURATE:
        return LogComplex(-log_t, -phase_t)
    if math.isnan(phase_t):
        raise PrecisionError("phase needed but not resolvable")
    if log_t > 40.0:
        # 1/(1+t) = (1/t) / (1 + 1/t); exp(log_t) itself may overflow
        u = 1.0 + cmath.rect(math.exp(-log_t), -phase_t)
        return LogComplex(-log_t - math.log(abs(u)), -phase_t - cmath.phase(u))
    t = cmath.rect(math.exp(log_t), phase_t)
    u = 1.0 + t
    if abs(u) < _pole_tol(N_float):
        raise PoleError("argument is an N-th root of unity to working tolerance")
    return LogComplex(-math.log(abs(u)), -cmath.phase(u))


def log_hN(N: int, z: complex) -> LogComplex:
    """h_N(z) = 1/(1 - z**N) in log form."""
    if int(N) != N or N < 2:
        raise ValueError("N must be an integer >= 2")
    N = int(N)
    log_s, phase_s = _log_power(complex(z), N, math.log(N))
    return _reciprocal_one_plus(log_s, phase_s + math.pi, float(N))


def eval_hN(N: int, z: complex) -> complex:
    """h_N(z) = 1/(1 - z**N).

    Raises :class:`PoleError` when ``|z**N - 1| < 1e-12 N`` and :class:`DomainError`
    when the value is not representable as a double (use :func:`log_hN`).
    """
    return log_hN(N, z).to_complex()


def log_gn(p: LevelParams, z: complex) -> LogComplex:
    z = complex(z)
    N = p.N if p.n <= MAX_EXACT_LEVEL else None
    log_t, phase_t = _log_power(z, N, p.log_N, level=p.n)
    return _reciprocal_one_plus(log_t, phase_t, math.exp(min(p.log_N, 700.0)))


def eval_gn(p: LevelParams, z: complex) -> complex:
    """g_n(z) = h_N(omega**(-1/2) z / shrink) with the principal half power exp(-i pi/N)."""
    return log_gn(p, z).to_complex()


def log_abs_t(p: LevelParams, radius: float) -> float:
    """log|z/shrink|**N on the circle |z| = radius (any level, magnitude only)."""
    if radius == 0:
        return -math.inf
    x = math.log(radius) - p.log_shrink
    if x == 0.0:
        return 0.0
    a = p.log_N + math.log(abs(x))
    return math.copysign(math.exp(a) if a < 709.7 else _FLOAT_MAX, x)


# -- vectorized evaluation (double precision) -------------------------------


def _require_float_level(N: int):
    if N > FLOAT_POWER_LIMIT:
        raise ResourceError(f"N={N} exceeds the vectorized limit {FLOAT_POWER_LIMIT}")


def log_power_array(z: np.ndarray, N: int, log_scale: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    _require_float_level(N)
    with np.errstate(divide="ignore"):
        lm = N * (np.log(np.abs(z)) - log_scale)
    return lm, np.fmod(N * np.angle(z), TWO_PI)


def _recip_one_plus_array(log_t: np.ndarray, phase_t: np.ndarray) -> np.ndarray:
    """Complex 1/(1+t), overflow safe."""
    big = log_t > 40.0
    t = np.exp(np.minimum(log_t, 40.0) + 1j * phase_t)
    out = 1.0 / (1.0 + t)
    inv_t = np.exp(-np.maximum(log_t, 40.0) - 1j * phase_t)
    out_big = inv_t / (1.0 + inv_t)
    return np.where(big, out_big, out)


def hN_array(N: int, z: np.ndarray) -> np.ndarray:
    lm, ph = log_power_array(np.asarray(z, dtype=complex), N)
    return _recip_one_plus_array(lm, ph + math.pi)


def gn_array(p: LevelParams, z: np.ndarray) -> np.ndarray:
    lm, ph = log_power_array(np.asarray(z, dtype=complex), p.N, p.log_shrink)
    return _recip_one_plus_array(lm, ph)


def one_minus_gn_array(p: LevelParams, z: np.ndarray) -> np.ndarray:
    """1 - g_n = t/(1+t), evaluated without cancellation for small t."""
    lm, ph = log_power_array(np.asarray(z, dtype=complex), p.N, p.log_shrink)
    t = np.exp(np.minimum(lm, 40.0) + 1j * ph)
    small = t / (1.0 + t)
    inv_t = np.exp(-np.maximum(lm, 40.0) - 1j * ph)
    return np.where(lm > 40.0, 1.0 / (1.0 + inv_t), small)


# -- products -------------------------------------------------------------------


@dataclass(frozen=True)
class ProductFunction:
    """f_n = (m!)**-4 * prod_{r=m}^{n_max} g_r. ``n_max = m - 1`` gives the bare prefactor."""

    m: int
    n_max: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if self.n_max < self.m - 1:
            raise ValueError("n_max must be >= m - 1")

    @property
    def levels(self) -> tuple[LevelParams, ...]:
        return tuple(LevelParams(r) for r in range(self.m, self.n_max + 1))

    @property
    def log_prefactor(self) -> float:
        return -4.0 * math.lgamma(self.m + 1)

    def extended(self, n_max: int) -> "ProductFunction":
        return ProductFunction(self.m, n_max)


def ring_disc_index(p: LevelParams, z: complex) -> int | None:
    """Index k of the disc of A(n) containing ``z`` (open disc), or None.

    The radial test is exact in rational arithmetic; the angular test uses mpmath.
    """
    z = complex(z)
    if not math.isfinite(abs(z)):
        return None
    a = abs(z)
    # cheap rejection far from the ring
    if abs(a - p.shrink) > 1e-9 + 4.0 * p.disc_radius and p.n <= 200:
        return None
    if p.n > 200:
        if abs(a - p.shrink) > 1e-12 + 1e-15:
            return None
        raise PrecisionError(f"cannot resolve membership in level {p.n} discs")
    zr = Fraction(z.real) ** 2 + Fraction(z.imag) ** 2
    lo = p.shrink_exact() - p.disc_radius_exact()
    hi = p.shrink_exact() + p.disc_radius_exact()
    if not (lo * lo < zr < hi * hi):
        return None
    N = p.N
    with mpmath.workprec(N.bit_length() + 120):
        w = mpmath.mpc(z.real, z.imag)
        turns = mpmath.arg(w) / (2 * mpmath.pi) * N - mpmath.mpf(1) / 2
        k0 = int(mpmath.nint(turns)) % N
        rho = mpmath.mpf(p.disc_radius_exact().numerator) / p.disc_radius_exact().denominator
        s = 1 - mpmath.mpf(4) ** (-p.n)
        for k in (k0, (k0 + 1) % N, (k0 - 1) % N):
            c = s * mpmath.expjpi(mpmath.mpf(2 * k + 1) / N)
            if abs(w - c) < rho:
                return k
    return None


def eval_product(f: ProductFunction, z: complex, check_discs: bool = False) -> LogComplex:
    """log-domain f_n(z). With ``check_discs`` raise DomainError inside a deleted disc."""
    out = LogComplex(f.log_prefactor, 0.0)
    for p in f.levels:
        if check_discs and ring_disc_index(p, z) is not None:
            raise DomainError(f"z={z!r} lies in a disc of A({p.n})")
        out = out * log_gn(p, z)
    return out


def tail_log_interval(n_max: int, explicit_terms: int = 4096) -> tuple[float, float]:
    """Certified logs of prod_{r>n_max} (1 -+ (r+1)**-4)."""
    k0 = n_max + 2
    lo_terms, hi_terms = [], []
    if n_max < 10**7:
        ks = np.arange(k0, k0 + explicit_terms, dtype=float)
        x = ks**-4
        lo_terms = np.log1p(-x).tolist()
        hi_terms = np.log1p(x).tolist()
        k0 += explicit_terms
    rem = 1.0 / (3.0 * (k0 - 0.5) ** 3)  # >= sum_{k>=k0} k**-4 by convexity
    lo = math.fsum(lo_terms) - rem / (1.0 - float(k0) ** -4)
    hi = math.fsum(hi_terms) + rem
    return lo, hi


def tail_interval(n_max: int) -> tuple[float, float]:
    lo, hi = tail_log_interval(n_max)
    return math.nextafter(math.exp(lo), 0.0), math.nextafter(math.exp(hi), math.inf)


@dataclass(frozen=True)
class LimitEstimate:
    """The partial product through n_max and the multiplicative tail interval."""

    partial: LogComplex
    tail_lower: float
    tail_upper: float

    @property
    def log_lower(self) -> float:
        return self.partial.log_magnitude + math.log(self.tail_lower)

    @property
    def log_upper(self) -> float:
        return self.partial.log_magnitude + math.log(self.tail_upper)


def certify_tail_factors(z: complex, n_max: int) -> int:
    """Check |1 - g_r(z)| <= (r+1)**-4 for every r > n_max.

    Uses the exact circle bound |1-g_r| <= |t|/(1-|t|) with |t| = (|z|/shrink_r)**N_r.
    Once |t_r| <= (r+1)**-4 / 2 the bound holds for all later r, because
    log|t_{r+1}| <= 4 log|t_r| for |z| < 1. Returns the last level examined.
    """
    a = abs(complex(z))
    r = n_max + 1
    while True:
        lt = log_abs_t(LevelParams(r), a)
        if lt >= 0:
            raise DomainError(f"|z|={a!r} is outside the ring of level {r}")
        t = math.exp(lt)
        bound = (r + 1.0) ** -4
        if t / (1.0 - t) > bound:
            raise DomainError(
                f"|1-g_{r}(z)| may exceed (r+1)^-4 at |z|={a!r}; tail estimate does not apply"
            )
        if t <= 0.5 * bound:
            return r
        r += 1


def eval_f_limit(f: ProductFunction, z: complex, tail_from: int | None = None) -> LimitEstimate:
    """Partial product f_{n_max}(z) and a certified interval for the remaining factors.

    The true |f(z)| lies in ``[|f_{n_max}(z)| * tail_lower, |f_{n_max}(z)| * tail_upper]``.
    """
    z = complex(z)
    tf = f.n_max + 1 if tail_from is None else tail_from
    if tf > f.n_max + 1:
        raise ValueError("tail_from cannot exceed n_max + 1")
    if abs(z) >= 1.0 - 2.0 ** -(2 * tf - 1):
        raise DomainError(f"|z|={abs(z)!r} outside the tail-estimate region for tail_from={tf}")
    partial = eval_product(f, z, check_discs=True)
    certify_tail_factors(z, f.n_max)
    lo, hi = tail_interval(f.n_max)
    return LimitEstimate(partial, lo, hi)


def K_interval(truncate_at: int = 50) -> tuple[float, float]:
    """Enclosure of K = prod_{r>=1} (1 + (r+1)**-4)."""
    head = math.fsum(math.log1p((r + 1.0) ** -4) for r in range(1, truncate_at + 1))
    with mpmath.workdps(30):
        tail = float(mpmath.zeta(4, truncate_at + 2))
    return math.exp(head), math.exp(head + tail) * (1 + 1e-15)


# -- explicit rational expressions ---------------------------------------------


def _trim(c: np.ndarray) -> tuple[complex, ...]:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return (0j,)
    return tuple(complex(v) for v in c[: nz[-1] + 1])


@dataclass(frozen=True)
class RationalExpr:
    """numerator / denominator with complex coefficients in ascending powers of z."""

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...] = (1 + 0j,)

    def __post_init__(self):
        object.__setattr__(self, "numerator", _trim(self.numerator))
        object.__setattr__(self, "denominator", _trim(self.denominator))
        if self.denominator == (0j,):
            raise ValueError("denominator is identically zero")

    @classmethod
    def constant(cls, c: complex) -> "RationalExpr":
        return cls((c,))

    @classmethod
    def identity(cls) -> "RationalExpr":
        return cls((0j, 1 + 0j))

    @classmethod
    def simple_pole(cls, p: complex, residue: complex = 1.0) -> "RationalExpr":
        return cls((residue,), (-complex(p), 1 + 0j))

    @classmethod
    def from_poles(cls, constant: complex, poles: Sequence[complex], residues: Sequence[complex]) -> "RationalExpr":
        """constant + sum residue_j / (z - pole_j)."""
        out = cls.constant(constant)
        for p, a in zip(poles, residues):
            out = out + cls.simple_pole(p, a)
        return out

    def __add__(self, other: "RationalExpr") -> "RationalExpr":
        n = P.polyadd(P.polymul(self.numerator, other.denominator), P.polymul(other.numerator, self.denominator))
        return RationalExpr(n, P.polymul(self.denominator, other.denominator))

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(tuple(-c for c in self.numerator), self.denominator)

    def __sub__(self, other: "RationalExpr") -> "RationalExpr":
        return self + (-other)

    def __mul__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(P.polymul(self.numerator, other.numerator), P.polymul(self.denominator, other.denominator))

    def __truediv__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(P.polymul(self.numerator, other.denominator), P.polymul(self.denominator, other.numerator))

    @property
    def degree(self) -> tuple[int, int]:
        return len(self.numerator) - 1, len(self.denominator) - 1

    def derivative(self) -> "RationalExpr":
        """Quotient rule: (N'D - ND') / D**2."""
        num, den = self.numerator, self.denominator
        dn = P.polyder(num) if len(num) > 1 else np.array([0j])
        dd = P.polyder(den) if len(den) > 1 else np.array([0j])
        out = P.polysub(P.polymul(dn, den), P.polymul(num, dd))
        return RationalExpr(out, P.polymul(den, den))

    def poles(self) -> np.ndarray:
        """Roots of the denominator (no cancellation against the numerator)."""
        if len(self.denominator) == 1:
            return np.array([], dtype=complex)
        return P.polyroots(np.array(self.denominator))

    def eval(self, z):
        den = P.polyval(z, self.denominator)
        if np.any(den == 0):
            raise PoleError(f"denominator vanishes at {z!r}")
        out = P.polyval(z, self.numerator) / den
        if not np.all(np.isfinite(out)):
            raise PoleError(f"non-finite value at {z!r}")
        return out

    __call__ = eval


def ratexpr_eval(e: RationalExpr, z):
    return e.eval(z)


def ratexpr_derivative(e: RationalExpr) -> RationalExpr:
    return e.derivative()
