"""
Tests for lifting section measures to the window and pulling them back
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import weights
from core.exactnum import ALPHA, ONE, ZERO, q
from core.exceptions import NotLacunary, PreconditionError, UnknownAnchor
from models.diophantine import SegmentKind
from models.geometry import CrossSection, Rect, Window
from models.measures import BoundedTiling, SectionMeasure
from models.tiling import RectTiling, Tile
from services.measures_service import measures_service


def measure_of(section, values):
    return SectionMeasure({c: q(w) for c, w in zip(section.points, values)})


@pytest.fixture
def voronoi_1d(torus_1d):
    return measures_service.voronoi_tiling(torus_1d)


# ============================================
# xi
# ============================================

def test_xi_of_a_quarter(voronoi_1d):
    assert measures_service.xi(Rect.of([0], [Fraction(1, 4)]), (q(0),), voronoi_1d) == Fraction(1, 4)


def test_xi_of_a_disjoint_query(voronoi_1d):
    assert measures_service.xi(Rect.of([Fraction(3, 5)], [Fraction(7, 5)]), (q(0),), voronoi_1d) == ZERO


def test_xi_of_the_whole_window(voronoi_1d):
    assert measures_service.xi(Rect.of([0], [2]), (q(0),), voronoi_1d) == ONE
    assert measures_service.xi(Rect.of([0], [2]), (q(1),), voronoi_1d) == ONE


def test_xi_of_an_unknown_point(voronoi_1d):
    with pytest.raises(UnknownAnchor):
        measures_service.xi(Rect.of([0], [1]), (q(Fraction(1, 2)),), voronoi_1d)


# ============================================
# Lift and pull
# ============================================

def test_lift_example(torus_1d, voronoi_1d):
    mu = measures_service.lift(measure_of(torus_1d, [Fraction(1, 2), Fraction(1, 2)]), voronoi_1d)
    assert measures_service.measure(mu, Rect.of([0], [Fraction(1, 4)])) == Fraction(1, 8)
    assert measures_service.total_mass(mu) == ONE


def test_lift_of_zero(torus_1d, voronoi_1d):
    mu = measures_service.lift(SectionMeasure(), voronoi_1d)
    assert measures_service.total_mass(mu) == ZERO


def test_lift_total_is_weighted_cell_volume(torus_2d):
    tiling = measures_service.voronoi_tiling(torus_2d)
    nu = measure_of(torus_2d, [1, 2, 3, 4])
    assert measures_service.total_mass(measures_service.lift(nu, tiling)) == 10


def test_lift_rejects_foreign_points(voronoi_1d):
    with pytest.raises(PreconditionError):
        measures_service.lift(SectionMeasure({(q(Fraction(1, 2)),): ONE}), voronoi_1d)


def test_pull_of_normalized_lebesgue(torus_1d, unit_body_1d):
    mu = measures_service.lebesgue(torus_1d.window, Fraction(1, 2))
    nu = measures_service.pull(mu, torus_1d, unit_body_1d)
    assert [nu[c] for c in torus_1d.points] == [Fraction(1, 2), Fraction(1, 2)]


def test_pull_of_zero(torus_1d, unit_body_1d):
    nu = measures_service.pull(measures_service.lebesgue(torus_1d.window, 0), torus_1d, unit_body_1d)
    assert nu.total() == ZERO


def test_pull_needs_disjoint_translates(torus_1d):
    with pytest.raises(NotLacunary):
        measures_service.pull(measures_service.lebesgue(torus_1d.window), torus_1d, Rect.symmetric(1, 1))


def test_mass_ratio_of_lebesgue(torus_1d, unit_body_1d):
    mu = measures_service.lebesgue(torus_1d.window)
    assert measures_service.mass_ratio(mu, torus_1d, unit_body_1d) == ONE
    assert measures_service.mass_ratio(measures_service.lebesgue(torus_1d.window, 0), torus_1d, unit_body_1d) is None


def test_negative_weights_are_rejected():
    with pytest.raises(ValueError):
        SectionMeasure({(q(0),): q(-1)})
    with pytest.raises(ValueError):
        SectionMeasure({(q(0),): ALPHA})


# ============================================
# Product identity and round trips
# ============================================

def test_round_trip_example(torus_1d, voronoi_1d, unit_body_1d):
    nu = measure_of(torus_1d, [Fraction(1, 2), Fraction(1, 2)])
    report = measures_service.round_trip(nu, voronoi_1d, unit_body_1d)
    assert report.product_identity and report.round_trip
    assert report.verdict == "PASS"
    assert report.window_mass == ONE and report.section_mass == ONE
    assert report.mass_ratio == ONE


def test_product_identity_with_unequal_weights(torus_1d, voronoi_1d, unit_body_1d):
    nu = measure_of(torus_1d, [Fraction(3, 4), Fraction(1, 4)])
    assert measures_service.product_identity_check(nu, voronoi_1d, unit_body_1d)
    rows = measures_service.product_rows(nu, voronoi_1d, unit_body_1d)
    # U and its two halves for each of the two points
    assert len(rows) == 6


def test_corrupted_tiling_is_rejected(torus_1d, unit_body_1d):
    swapped = BoundedTiling(
        torus_1d,
        {(q(0),): (Rect.of([1], [2]),), (q(1),): (Rect.of([0], [1]),)},
        Rect.symmetric(2, 1),
    )
    nu = measure_of(torus_1d, [Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(PreconditionError):
        measures_service.product_identity_check(nu, swapped, unit_body_1d)


def test_translates_must_partition(torus_1d):
    with pytest.raises(PreconditionError):
        measures_service.translate_tiling_of(torus_1d, Rect.symmetric(Fraction(1, 4), 1))


def test_pull_does_not_depend_on_the_body(torus_1d, voronoi_1d):
    nu = measure_of(torus_1d, [Fraction(2, 3), Fraction(1, 5)])
    mu = measures_service.lift(nu, voronoi_1d)
    wide = measures_service.pull(mu, torus_1d, Rect.symmetric(Fraction(1, 2), 1))
    narrow = measures_service.pull(mu, torus_1d, Rect.symmetric(Fraction(1, 8), 1))
    assert wide == narrow == nu


def test_tiles_as_domains(unit_body_1d):
    window = Window.torus([2])
    section = CrossSection.lexicographic([(Fraction(1, 2),), (Fraction(3, 2),)], window)
    tiling = RectTiling(window, (Tile(Rect.of([0], [1])), Tile(Rect.of([1], [2]))))
    bounded = measures_service.tiling_domains(tiling, section)
    assert bounded.domains[(q(Fraction(1, 2)),)] == (Rect.of([0], [1]),)
    report = measures_service.round_trip(measure_of(section, [Fraction(1, 2), Fraction(1, 2)]), bounded, unit_body_1d)
    assert report.product_identity and report.round_trip
    lonely = CrossSection.lexicographic([(Fraction(1, 2),)], window)
    with pytest.raises(UnknownAnchor):
        measures_service.tiling_domains(tiling, lonely)


@settings(max_examples=40)
@given(st.lists(weights, min_size=2, max_size=2), st.sampled_from(["voronoi", "translates"]))
def test_round_trip_in_one_dimension(values, kind):
    section = CrossSection.lexicographic([(0,), (1,)], Window.torus([2]))
    if kind == "voronoi":
        tiling = measures_service.voronoi_tiling(section)
    else:
        tiling = measures_service.translate_tiling_of(section, Rect.symmetric(Fraction(1, 2), 1))
    report = measures_service.round_trip(measure_of(section, values), tiling, Rect.symmetric(Fraction(1, 4), 1))
    assert report.verdict == "PASS"
    assert report.window_mass == sum(values, Fraction(0))


@settings(max_examples=15)
@given(st.lists(weights, min_size=4, max_size=4), st.sampled_from(["voronoi", "translates"]))
def test_round_trip_in_two_dimensions(values, kind):
    section = CrossSection.lexicographic([(i, j) for i in range(2) for j in range(2)], Window.torus([2, 2]))
    if kind == "voronoi":
        tiling = measures_service.voronoi_tiling(section)
    else:
        tiling = measures_service.translate_tiling_of(section, Rect.symmetric(Fraction(1, 2), 2))
    report = measures_service.round_trip(measure_of(section, values), tiling, Rect.symmetric(Fraction(1, 4), 2))
    assert report.product_identity and report.round_trip


coord = st.fractions(min_value=0, max_value=2, max_denominator=8)
extent = st.fractions(min_value=Fraction(1, 8), max_value=Fraction(3, 2), max_denominator=8)


@settings(max_examples=20)
@given(st.lists(weights, min_size=4, max_size=4), st.lists(st.tuples(coord, coord, extent, extent), min_size=3, max_size=3))
def test_lift_does_not_depend_on_the_tiling(values, boxes):
    section = CrossSection.lexicographic([(i, j) for i in range(2) for j in range(2)], Window.torus([2, 2]))
    nu = measure_of(section, values)
    through_cells = measures_service.lift(nu, measures_service.voronoi_tiling(section))
    through_translates = measures_service.lift(
        nu, measures_service.translate_tiling_of(section, Rect.symmetric(Fraction(1, 2), 2))
    )
    for x, y, w, h in boxes:
        query = Rect.of([x, y], [x + w, y + h])
        assert measures_service.measure(through_cells, query) == measures_service.measure(through_translates, query)


# ============================================
# Translations
# ============================================

@given(st.fractions(min_value=0, max_value=2, max_denominator=12))
def test_xi_is_translation_invariant(shift):
    section = CrossSection.lexicographic([(0,), (Fraction(3, 4),), (Fraction(3, 2),)], Window.torus([3]))
    tiling = measures_service.voronoi_tiling(section)
    t = (q(shift),)
    moved = measures_service.translate_tiling(tiling, t)
    query = Rect.of([Fraction(1, 3)], [Fraction(5, 4)])
    for c in section.points:
        c_moved = section.window.reduce((c[0] + t[0],))
        assert measures_service.xi(query.translate(t), c_moved, moved) == measures_service.xi(query, c, tiling)


def test_translated_measures(torus_1d, voronoi_1d):
    nu = measure_of(torus_1d, [Fraction(3, 4), Fraction(1, 4)])
    moved = measures_service.translate_measure(nu, torus_1d.window, (q(1),))
    assert moved[(q(0),)] == Fraction(1, 4) and moved[(q(1),)] == Fraction(3, 4)
    mu = measures_service.lift(nu, voronoi_1d)
    shifted = measures_service.translate_phase(mu, (q(1),))
    query = Rect.of([0], [Fraction(1, 4)])
    assert measures_service.measure(shifted, query.translate((q(1),))) == measures_service.measure(mu, query)


# ============================================
# Fragment bookkeeping
# ============================================

def test_fragment_label_count():
    r = Rect.cube(0, 1, 1)
    tiles = [Tile(r, "X1"), Tile(r, "X0"), Tile(r, "X1")]
    assert measures_service.fragment_label_count(tiles) == {"X0": 1, "X1": 2}


def test_restrict_then_spread():
    unit = (q(0),)
    other = (q(3),)
    nu = SectionMeasure({unit: q(Fraction(1, 2)), other: q(Fraction(1, 2))})
    restricted = measures_service.restrict_to_unit(nu, [unit], 1)
    assert restricted.weights == {unit: ONE}
    thetas = {(SegmentKind.ONE,): {unit: unit}, (SegmentKind.ALPHA,): {unit: other}}
    spread = measures_service.spread_from_unit(restricted, thetas, 1)
    assert spread == nu


def test_spread_needs_every_theta(half):
    nu = SectionMeasure({(q(0),): half})
    with pytest.raises(PreconditionError):
        measures_service.spread_from_unit(nu, {(SegmentKind.ONE,): {}}, 1)
