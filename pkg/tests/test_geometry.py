from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swisscheese.geometry import (
    Cross,
    Disc,
    DiscClass,
    Q,
    RationalDisc,
    Square,
    budget_sum,
    budget_sum_array,
    classify_disc,
    closure_meets_interior,
    dist_to_cross,
    dist_to_square_boundary,
    enumerate_admissible_discs,
)

coord = st.floats(-3, 3, allow_nan=False)
radius = st.floats(1e-6, 2, allow_nan=False)
fractions = st.fractions(min_value=-1, max_value=1, max_denominator=24)


def test_disc_rejects_bad_radius():
    with pytest.raises(ValueError):
        Disc(0j, 0.0)
    with pytest.raises(ValueError):
        Disc(complex(math.nan, 0), 1.0)
    with pytest.raises(ValueError):
        Square(0j, -1.0)


def test_distance_examples():
    assert dist_to_square_boundary(Disc(0j, 0.5)) == 0.5
    assert dist_to_square_boundary(Disc(0.9 + 0j, 0.05)) == pytest.approx(0.05)
    assert dist_to_square_boundary(Disc(0.9 + 0j, 0.2)) == 0.0
    # outside the square, towards a corner
    assert dist_to_square_boundary(Disc(2 + 2j, 0.1)) == pytest.approx(math.sqrt(2) - 0.1)
    assert dist_to_cross(Disc(0.3 + 0.5j, 0.1)) == pytest.approx(0.2)
    assert dist_to_cross(Disc(1.3 + 0.5j, 0.1), a=1 + 0j) == pytest.approx(0.2)


@given(coord, coord, radius)
def test_square_distance_matches_brute_force(x, y, r):
    d = Disc(complex(x, y), r)
    t = np.linspace(-1, 1, 4001)
    boundary = np.concatenate([t - 1j, 1 + 1j * t, t + 1j, -1 + 1j * t])
    brute = max(0.0, float(np.min(np.abs(boundary - d.center))) - r)
    assert dist_to_square_boundary(d) == pytest.approx(brute, abs=1e-3)


@given(coord, coord, radius)
def test_distances_are_non_negative_and_translation_invariant(x, y, r):
    d = Disc(complex(x, y), r)
    assert dist_to_cross(d) >= 0
    shifted = Disc(d.center + (0.5 - 0.25j), r)
    assert dist_to_cross(shifted, 0.5 - 0.25j) == pytest.approx(dist_to_cross(d), abs=1e-12)
    assert dist_to_square_boundary(shifted, Square(0.5 - 0.25j, 1.0)) == pytest.approx(
        dist_to_square_boundary(d), abs=1e-12
    )


def test_budget_sum_examples():
    discs = [Disc(0.5 + 0.5j, 0.1), Disc(-0.5 + 0.2j, 0.05)]
    expected = 0.1 / 0.4**2 + 0.05 / 0.15**2
    assert budget_sum(discs, Cross()) == pytest.approx(expected)
    assert budget_sum([], Q) == 0.0
    assert budget_sum([Disc(0.95 + 0j, 0.1)], Q) == math.inf
    centers = np.array([d.center for d in discs])
    assert budget_sum_array(centers, np.array([0.1, 0.05]), Cross()) == pytest.approx(expected)


@given(st.lists(st.tuples(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8), st.floats(1e-4, 0.1)), max_size=8))
def test_budget_sum_is_additive(items):
    discs = [Disc(complex(x, y), r) for x, y, r in items]
    whole = budget_sum(discs, Q)
    parts = sum(budget_sum([d], Q) for d in discs)
    if math.isfinite(whole):
        assert whole == pytest.approx(parts, rel=1e-12)


def test_closure_meets_interior():
    c = np.array([0j, 1.05 + 0j, 1.2 + 0j, 1.05 + 1.05j])
    assert closure_meets_interior(c, 0.1).tolist() == [True, True, False, True]


def test_classification_examples():
    assert classify_disc(0, 0, Fraction(1, 2)) is DiscClass.INTERIOR
    assert classify_disc(0, 0, 1) is None
    assert classify_disc(Fraction(1, 2), 0, Fraction(1, 2)) is None
    assert classify_disc(1, 0, Fraction(1, 2)) is DiscClass.EDGE
    assert classify_disc(1, 0, 1) is None
    assert classify_disc(1, 1, Fraction(1, 2)) is DiscClass.CORNER
    assert classify_disc(-1, 1, Fraction(99, 100)) is DiscClass.CORNER
    assert classify_disc(2, 0, Fraction(1, 2)) is None


@given(fractions, fractions, st.fractions(min_value=0, max_value=2, max_denominator=24))
def test_classification_is_exact(x, y, r):
    cls = classify_disc(x, y, r)
    if r <= 0:
        assert cls is None
        return
    on_edge = abs(x) == 1 or abs(y) == 1
    corner = abs(x) == 1 and abs(y) == 1
    if cls is DiscClass.INTERIOR:
        assert not on_edge and r < 1 - max(abs(x), abs(y))
    elif cls is DiscClass.EDGE:
        assert on_edge and not corner
        assert all((x - a) ** 2 + (y - b) ** 2 > r * r for a in (-1, 1) for b in (-1, 1))
    elif cls is DiscClass.CORNER:
        assert corner and r < 1


def _brute_stage(q: int) -> list[RationalDisc]:
    """Admissible discs whose coordinates have least common denominator exactly q."""
    out = set()
    for px, py in itertools.product(range(-q, q + 1), repeat=2):
        for pr in range(1, q):
            x, y, r = Fraction(px, q), Fraction(py, q), Fraction(pr, q)
            if math.lcm(x.denominator, y.denominator, r.denominator) != q:
                continue
            if classify_disc(x, y, r) is not None:
                out.add(RationalDisc(x, y, r))
    return sorted(out)


def test_enumeration_matches_brute_force_by_stage():
    listed = [d for d, _ in enumerate_admissible_discs(2000)]
    assert len(set(listed)) == len(listed)
    expected = []
    q = 2
    while len(expected) < 2000:
        expected.extend(_brute_stage(q))
        q += 1
    # stages in increasing q, lexicographic within a stage
    assert listed == expected[:2000]


def test_enumeration_finds_known_discs():
    index = {d: i for i, (d, _) in enumerate(enumerate_admissible_discs(500), start=1)}
    target = RationalDisc(Fraction(1, 2), 0, Fraction(1, 4))
    # independent index: the complete stages 2 and 3, then the position within stage 4
    stage4 = _brute_stage(4)
    expected = len(_brute_stage(2)) + len(_brute_stage(3)) + stage4.index(target) + 1
    assert index[target] == expected
    assert classify_disc(target.x, target.y, target.r) is DiscClass.INTERIOR
    assert RationalDisc(-1, -1, Fraction(1, 2)) in index


def test_enumeration_prefix_is_deterministic():
    assert enumerate_admissible_discs(50) == enumerate_admissible_discs(50)
    first = enumerate_admissible_discs(1)[0]
    assert first == (RationalDisc(-1, -1, Fraction(1, 2)), DiscClass.CORNER)
    with pytest.raises(ValueError):
        enumerate_admissible_discs(0)
