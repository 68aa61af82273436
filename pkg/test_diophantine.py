"""
Tests for approximation by N + N*alpha and segment partitions
"""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.exactnum import ALPHA, KAPPA, ONE, QuadNum, ZERO, q
from core.exceptions import BelowThreshold, NotRepresentable, PreconditionError
from models.diophantine import SegmentKind
from services.diophantine_service import diophantine_service

ONE_, ALPHA_ = SegmentKind.ONE, SegmentKind.ALPHA


# ============================================
# Thresholds
# ============================================

def test_threshold_for_one_half():
    assert diophantine_service.n_of_eps(Fraction(1, 2)) == 1


def test_threshold_for_large_eps():
    assert diophantine_service.n_of_eps(2) == 0


def test_threshold_grows_as_eps_shrinks():
    coarse = diophantine_service.n_of_eps(Fraction(1, 4))
    fine = diophantine_service.n_of_eps(Fraction(1, 20))
    assert 1 <= coarse <= fine


def test_threshold_report_is_cached():
    first = diophantine_service.threshold_report(Fraction(1, 10))
    assert diophantine_service.threshold_report(Fraction(1, 10)) is first
    assert first.resolution == "1/40"


def test_threshold_rejects_non_positive_eps():
    with pytest.raises(PreconditionError):
        diophantine_service.n_of_eps(0)


def test_distance_to_lattice():
    assert diophantine_service.distance_to_lattice(KAPPA * 3) == ZERO
    assert diophantine_service.distance_to_lattice(q(Fraction(1, 2))) == Fraction(1, 2)


# ============================================
# Approximation
# ============================================

def test_exact_values_win():
    assert diophantine_service.approx(10, Fraction(1, 10)).model_dump() == {"m1": 10, "m2": 0, "err": ZERO}
    result = diophantine_service.approx(7, Fraction(1, 10))
    assert (result.m1, result.m2, result.err) == (7, 0, ZERO)
    result = diophantine_service.approx(KAPPA, Fraction(1, 1000))
    assert (result.m1, result.m2) == (1, 1)


def test_minimal_alpha_count_first():
    result = diophantine_service.approx(Fraction(21, 2), Fraction(1, 2))
    assert (result.m1, result.m2) == (9, 1)
    assert result.value + result.err == Fraction(21, 2)


def test_wide_eps_takes_the_smallest_unit_count():
    assert diophantine_service.select_pair(q(Fraction(11, 2)), q(2)) == (4, 0)
    assert diophantine_service.select_pair(q(Fraction(11, 2)), q(2), cap1=3) == (3, 1)


def test_pair_for_one_twentieth():
    assert diophantine_service.select_pair(q(Fraction(1007, 100)), q(Fraction(1, 20))) == (3, 5)


def smallest_pair(x, eps):
    exact = x.integer_components()
    if exact is not None and min(exact) >= 0:
        return exact
    for m2 in range(40):
        for m1 in range(60):
            if abs(x - QuadNum(m1, m2)) < eps:
                return m1, m2
    return None


@settings(max_examples=60)
@given(
    st.fractions(min_value=0, max_value=30, max_denominator=20),
    st.integers(min_value=0, max_value=3),
    st.fractions(min_value=Fraction(1, 100), max_value=3, max_denominator=50),
)
def test_pair_matches_brute_force_scan(rat, irr, eps):
    x = QuadNum(rat, irr)
    assert diophantine_service.select_pair(x, q(eps)) == smallest_pair(x, eps)


def test_below_threshold():
    with pytest.raises(BelowThreshold):
        diophantine_service.approx(Fraction(1, 2), Fraction(1, 2))


@pytest.mark.parametrize("eps", [Fraction(1, 2), Fraction(1, 10), Fraction(1, 20)])
def test_random_values_above_threshold(eps):
    threshold = diophantine_service.n_of_eps(eps)
    rng = np.random.default_rng(7)
    for _ in range(1000):
        x = threshold + Fraction(int(rng.integers(0, 100_000)), 1000) + ALPHA * int(rng.integers(0, 2))
        result = diophantine_service.approx(x, eps)
        assert result.m1 >= 0 and result.m2 >= 0
        assert abs(result.err) < eps
        assert result.value + result.err == x
        # no smaller alpha count is admissible unless the value is exact
        if result.err:
            for m2 in range(result.m2):
                r = x - ALPHA * m2
                assert all(not abs(r - m1) < eps for m1 in range(max(0, int(r.to_float()) - 1), int(r.to_float()) + 2))


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=200), st.integers(min_value=0, max_value=200))
def test_representable_values_are_exact(m1, m2):
    result = diophantine_service.approx(QuadNum(m1, m2), Fraction(1, 20))
    assert (result.m1, result.m2, result.err) == (m1, m2, ZERO)


# ============================================
# Partitions
# ============================================

def test_partition_examples():
    assert diophantine_service.partition_exact(KAPPA).labels == [ONE_, ALPHA_]
    assert diophantine_service.partition_exact(KAPPA * 2).labels == [ONE_, ALPHA_, ONE_, ALPHA_]
    assert diophantine_service.partition_exact(3).labels == [ONE_, ONE_, ONE_]
    assert diophantine_service.partition_exact(QuadNum(1, 3)).labels == [ONE_, ALPHA_, ALPHA_, ALPHA_]


@pytest.mark.parametrize("length", [QuadNum(-1), QuadNum(Fraction(1, 2)), QuadNum(1, -1)])
def test_partition_rejects(length):
    with pytest.raises(NotRepresentable):
        diophantine_service.partition_exact(length)


@given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=60), st.integers(-5, 5))
def test_partition_sums_exactly(m1, m2, start):
    parts = diophantine_service.partition_exact(QuadNum(m1, m2), start)
    assert parts.length() == QuadNum(m1, m2)
    assert parts.counts() == (m1, m2)
    nodes = parts.nodes()
    assert nodes[0] == start and nodes[-1] == start + QuadNum(m1, m2)


# ============================================
# Interval extension
# ============================================

def test_extend_integer_start():
    ext = diophantine_service.extend_interval(5, 1, 10, Fraction(1, 4))
    assert (ext.m1, ext.m2, ext.delta) == (5, 0, ZERO)


def test_extend_shifts_start():
    ext = diophantine_service.extend_interval(Fraction(49, 10), 1, 10, Fraction(1, 4))
    assert (ext.m1, ext.m2) == (5, 0)
    assert ext.delta == Fraction(1, 10)


def test_extension_tiles_the_outer_interval():
    ext = diophantine_service.extend_interval(Fraction(49, 10), 1, 10, Fraction(1, 4))
    segments = ext.segments()
    assert sum((s.length for s in segments), ZERO) == KAPPA * 10
    assert ext.middle.counts() == (1, 1)
    assert ext.middle.start == QuadNum(5)
    assert ext.last.start == QuadNum(5) + KAPPA
    assert ext.first.nodes()[-1] == ext.middle.start


def test_extend_below_threshold():
    with pytest.raises(BelowThreshold):
        diophantine_service.extend_interval(Fraction(3, 2), 1, 10, Fraction(1, 4))


def test_extend_requires_larger_outer():
    with pytest.raises(PreconditionError):
        diophantine_service.extend_interval(5, 3, 3, Fraction(1, 4))
    with pytest.raises(PreconditionError):
        diophantine_service.extend_interval(20, 1, 10, Fraction(1, 4))


@settings(max_examples=60)
@given(st.fractions(min_value=3, max_value=15, max_denominator=16), st.integers(min_value=0, max_value=3))
def test_extensions_are_exact_partitions(a, k_inner):
    k_outer = 12
    ext = diophantine_service.extend_interval(a, k_inner, k_outer, Fraction(1, 4))
    assert abs(ext.delta) < Fraction(1, 4)
    assert ext.m1 <= k_outer - k_inner and ext.m2 <= k_outer - k_inner
    assert sum((s.length for s in ext.segments()), ZERO) == KAPPA * k_outer
    assert ext.middle.counts() == (k_inner, k_inner)
    assert ext.middle.start == q(a) + ext.delta
