from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swisscheese.construction import (
    CheeseConfig,
    EmptyWermerProvider,
    Ledger,
    StubWermerProvider,
    UnitCheese,
    analytic_level_cross_bound,
    assemble_theorem_one,
    build_level_family,
    build_regular_cheese,
    build_unit_cheese,
    check_in_domain,
    epsilon_for_index,
    exhaustive_level_cross_budget,
    factorial_condition,
    family_for_index,
    length_budget,
    level_scale,
    power_tail,
    select_start_index,
    transplant,
    truncation_tail,
)
from swisscheese.errors import BudgetError, DomainError, ResourceError
from swisscheese.geometry import Disc, DiscClass, RationalDisc, Square, dist_to_square_boundary

# sum over A(n) of r / dist(D, R u iR)^2, summed disc by disc in 50-digit mpmath
LEVEL_SUM_ORACLE = {3: 0.03797279089933536, 4: 0.01572833959864165}
CORNER = RationalDisc(-1, -1, Fraction(1, 2))


def test_level_family_shape():
    fam = build_level_family(3)
    assert fam.N == 192 and len(fam.centers) == 192
    assert fam.radius == pytest.approx(3**-5 * 2**-12)
    gaps = np.abs(np.diff(np.concatenate([fam.centers, fam.centers[:1]])))
    assert gaps.min() == pytest.approx(0.032212159139645851, rel=1e-12)
    assert gaps.min() > 2 * fam.radius
    with pytest.raises(ResourceError):
        build_level_family(13)


@pytest.mark.parametrize("n", sorted(LEVEL_SUM_ORACLE))
def test_level_budget_matches_oracle(n):
    assert exhaustive_level_cross_budget(n) == pytest.approx(LEVEL_SUM_ORACLE[n], rel=1e-12)


@pytest.mark.parametrize("n", range(3, 9))
def test_analytic_bound_dominates_exhaustive_sum(n):
    exact = exhaustive_level_cross_budget(n)
    assert exact <= analytic_level_cross_bound(n) < n**-2


def test_start_index_examples():
    assert select_start_index(1.0) == 4
    assert select_start_index(Fraction(1, 10)) == 22
    assert not factorial_condition(3) and factorial_condition(4)
    with pytest.raises(ValueError):
        select_start_index(0)


@given(st.floats(1e-6, 10.0))
def test_start_index_is_minimal(eps):
    m = select_start_index(eps)
    assert m > 2 / eps + 1 and factorial_condition(m)
    if m - 1 > 2 / eps + 1:
        assert not factorial_condition(m - 1)


def test_tails():
    with mpmath.workdps(30):
        assert truncation_tail(10) >= float(mpmath.zeta(2, 11))
    assert truncation_tail(10) == pytest.approx(float(mpmath.zeta(2, 11)), rel=1e-15)
    exact = math.fsum(r**-4 * 4.0**-r for r in range(9, 60))
    assert exact <= power_tail(8) <= 2 * exact


def test_unit_cheese_budget():
    u = build_unit_cheese(0.5, 6)
    assert u.m == 6 and list(u.levels) == [6]
    assert u.realized_budget == pytest.approx(exhaustive_level_cross_budget(6))
    assert u.realized_budget + u.truncation_tail < 0.5
    assert u.disc_count() == 6 * 4**6
    with pytest.raises(BudgetError):
        build_unit_cheese(0.5, 5)
    with pytest.raises(BudgetError):
        UnitCheese(0.01, 6, 6, (0.2,), ("exhaustive",), 0.0)


def test_transplant_scales_budget():
    u = build_unit_cheese(0.5, 6)
    moved = transplant(u, Disc(2 + 1j, 0.5))
    assert len(moved.centers) == u.disc_count()
    assert moved.budget == pytest.approx(2 * u.realized_budget, rel=1e-9)
    assert np.all(np.abs(moved.centers - (2 + 1j)) < 0.5)


def test_epsilon_for_index():
    interior = RationalDisc(0, 0, Fraction(1, 2))
    assert epsilon_for_index(3, DiscClass.INTERIOR, 1.0, interior) == pytest.approx(2**-5 * 0.25)
    edge = RationalDisc(1, 0, Fraction(1, 2))
    assert epsilon_for_index(1, DiscClass.EDGE, 2.0, edge) == pytest.approx(2**-3 * 2 * 0.5**2)
    assert epsilon_for_index(2, DiscClass.CORNER, 1.0, CORNER) == 2**-4


def test_family_records():
    fam = family_for_index(1, CORNER, DiscClass.CORNER, 1.0)
    assert fam.unit_epsilon == pytest.approx(fam.epsilon * 0.5)
    assert fam.m == select_start_index(fam.unit_epsilon) == fam.n_max
    assert fam.levels[0].method == "bound"
    assert fam.boundary_total < 0.5
    capped = family_for_index(1, CORNER, DiscClass.CORNER, 1.0, n_cap=fam.m + 3)
    assert capped.n_max == fam.m + 3 and len(capped.levels) == 4
    assert capped.cross_total <= fam.cross_total


def test_materialized_family_membership():
    # a large C0 gives a small start index, so the discs can be listed
    fam = family_for_index(1, CORNER, DiscClass.CORNER, 1000.0)
    assert fam.m == 4 and fam.materialized_levels() == [4]
    centers, radius = fam.level_discs(4)
    everything, _ = fam.level_discs(4, retained_only=False)
    assert 0 < len(centers) < len(everything)
    for c in centers[:20]:
        assert fam.contains(complex(c))
        assert fam.contains(complex(c) + 0.9 * radius)
    midpoint = 0.5 * (everything[0] + everything[1])
    assert not fam.contains(complex(midpoint))


@pytest.mark.parametrize("L", [1, 4, 16])
def test_regular_cheese_budget(L):
    cfg = build_regular_cheese(1.0, L)
    assert len(cfg.families) == L
    assert cfg.ledger.mckissick_boundary < 1.0
    # each family is charged less than 2^-l C0
    for fam in cfg.families:
        assert fam.boundary_total < 2.0 ** -fam.index


def test_regular_cheese_budget_grows_with_L():
    totals = [build_regular_cheese(1.0, L).ledger.mckissick_boundary for L in (1, 2, 4, 8)]
    assert totals == sorted(totals)
    assert build_regular_cheese(1.0, 1).ledger.mckissick_boundary < 0.5


def test_config_rejects_broken_ledger():
    bad = Ledger(0.0, 2.0, (), 0.0, 0.0, 0, 0, 0)
    with pytest.raises(BudgetError):
        CheeseConfig(4 * math.pi, 1.0, 0, 0, None, 0, (), (), bad)


def test_membership(small_cheese):
    assert small_cheese.contains(0.3 + 0.1j)
    assert not small_cheese.contains(1.5)
    check_in_domain(small_cheese, 0j)
    with pytest.raises(DomainError):
        check_in_domain(small_cheese, 2j)
    zs = np.array([0.3 + 0.1j, 1.5, 0j])
    assert small_cheese.contains_array(zs).tolist() == [True, False, True]


def test_scales():
    assert level_scale(1) == 0.5 and level_scale(3) == 0.75
    assert length_budget(1, 4 * math.pi) == pytest.approx(0.25 * 4 * math.pi * 0.25)


def test_stub_provider_is_deterministic_and_inside():
    sq = Square(0j, level_scale(2))
    a = StubWermerProvider(3)(2, sq, 0.01)
    b = StubWermerProvider(3)(2, sq, 0.01)
    assert a == b and len(a) == 4
    assert all(dist_to_square_boundary(d, sq) > 0 for d in a)
    assert math.fsum(2 * math.pi * d.radius for d in a) == pytest.approx(0.005)
    assert StubWermerProvider(4)(2, sq, 0.01) != a


def test_assembled_config(assembled):
    cfg = assembled
    assert cfg.C0 == pytest.approx(1.0)
    assert len(cfg.deletions) == 16
    for n, length in enumerate(cfg.ledger.wermer_lengths, start=1):
        assert length < length_budget(n, cfg.C)
    for d in cfg.deletions:
        assert not cfg.contains(d.disc.center)
    assert cfg.ledger.combined_integral <= cfg.C / 2 + 2 * math.pi * cfg.C0
    empty = assemble_theorem_one(4 * math.pi, 2, 3, EmptyWermerProvider())
    assert empty.deletions == () and empty.ledger.wermer_boundary == 0.0


def test_assembly_rejects_greedy_provider():
    def greedy(n, square, budget):
        return [Disc(0j, budget)]  # boundary length 2 pi budget > budget

    with pytest.raises(BudgetError):
        assemble_theorem_one(4 * math.pi, 1, 1, greedy)
