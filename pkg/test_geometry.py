"""
Tests for rectangles, windows, lacunarity and Voronoi cells
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core.exactnum import ALPHA, QuadNum, ZERO, q
from core.exceptions import DegenerateShrink, UnsupportedDim
from models.geometry import CrossSection, Rect, Window
from services.geometry_service import clip_to_rect, geometry_service, polygon_area, rect_polygon

small = st.fractions(min_value=0, max_value=3, max_denominator=8)


def circle(points, length=10):
    return CrossSection.lexicographic([(p,) for p in points], Window.torus([length]))


# ============================================
# Rectangles
# ============================================

def test_shrink_square():
    assert geometry_service.shrink(Rect.symmetric(5, 2), 1) == Rect.symmetric(4, 2)


def test_shrink_by_zero_is_identity():
    rect = Rect.of([0, ALPHA], [3, 4])
    assert geometry_service.shrink(rect, 0) == rect


def test_shrink_then_sum_matches_smaller_shrink():
    square = Rect.cube(0, 10, 2)
    summed = geometry_service.minkowski_sum(geometry_service.shrink(square, 3), Rect.symmetric(1, 2))
    assert summed == geometry_service.shrink(square, 2)
    assert summed == Rect.cube(2, 6, 2)


def test_degenerate_shrink():
    with pytest.raises(DegenerateShrink):
        geometry_service.shrink(Rect.cube(0, 2, 1), 1)


@given(small, small)
def test_shrink_composes(a, b):
    rect = Rect.cube(0, 20, 2)
    assert geometry_service.shrink(geometry_service.shrink(rect, a), b) == geometry_service.shrink(rect, a + b)


@given(st.fractions(min_value=0, max_value=2, max_denominator=6), st.fractions(min_value=0, max_value=1, max_denominator=6))
def test_shrunken_sum_stays_inside(spread, margin):
    bound = q(spread)
    b = bound + margin + Fraction(1, 10)
    rect = Rect.of([0, -3], [20, 17])
    inner = geometry_service.shrink(rect, b)
    summed = geometry_service.minkowski_sum(inner, Rect.symmetric(bound + Fraction(1, 100), 2))
    assert geometry_service.shrink(rect, b - bound - Fraction(1, 100)).contains_rect(summed)


# ============================================
# Windows
# ============================================

def test_torus_reduce_and_displacement():
    window = Window.torus([10])
    assert window.reduce((QuadNum(-1),)) == (QuadNum(9),)
    assert window.displacement((QuadNum(0),), (QuadNum(8),)) == (QuadNum(-2),)
    assert window.distance((QuadNum(1),), (QuadNum(9),)) == 2


def test_wrap_rect_splits_across_the_seam():
    window = Window.torus([10, 10])
    pieces = window.wrap_rect(Rect.of([-1, 2], [1, 3]))
    assert sorted(p.lo for p in pieces) == [(q(0), q(2)), (q(9), q(2))]
    assert sum((p.volume() for p in pieces), ZERO) == 2


# ============================================
# Lacunarity and cocompactness
# ============================================

def test_lacunary_examples():
    section = circle([0, Fraction(5, 2), 5])
    assert geometry_service.is_lacunary(section, Rect.symmetric(1, 1))
    assert not geometry_service.is_lacunary(section, Rect.symmetric(2, 1))
    assert geometry_service.is_lacunary(circle([3]), Rect.symmetric(4, 1))


def test_cocompact_examples():
    body = Rect.symmetric(2, 1)
    assert geometry_service.is_cocompact(circle([0, Fraction(5, 2), 5, Fraction(15, 2)]), body)
    assert not geometry_service.is_cocompact(circle([0]), body)
    grid = CrossSection.lexicographic([(i, j) for i in range(4) for j in range(4)], Window.torus([4, 4]))
    assert geometry_service.is_cocompact(grid, Rect.symmetric(1, 2))


def test_box_cocompactness():
    window = Window.box_of(Rect.cube(0, 4, 2))
    section = CrossSection.lexicographic([(1, 1), (3, 1), (1, 3)], window)
    assert not geometry_service.is_cocompact(section, Rect.symmetric(1, 2))
    full = section.with_points(section.points + ((q(3), q(3)),))
    assert geometry_service.is_cocompact(full, Rect.symmetric(1, 2))


# ============================================
# Voronoi
# ============================================

@pytest.fixture
def two_points():
    return CrossSection.lexicographic([(0, 0), (4, 0)], Window.torus([10, 10]))


def test_owner_strictly_closer(two_points):
    assert geometry_service.voronoi_owner(two_points, (q(1), q(1))) == (q(0), q(0))


def test_owner_tie_goes_to_first(two_points):
    assert geometry_service.voronoi_owner(two_points, (q(2), q(0))) == (q(0), q(0))
    reverse = lambda p: (-p[0], -p[1])
    assert geometry_service.voronoi_owner(two_points, (q(2), q(0)), order=reverse) == (q(4), q(0))


def test_owner_wraps_around(two_points):
    assert geometry_service.voronoi_owner(two_points, (q(8), q(0))) == (q(0), q(0))


def test_assign_owners(two_points):
    queries = [(q(1), q(1)), (q(5), q(0)), (q(8), q(0))]
    assignment = geometry_service.assign_owners(two_points, queries)
    assert assignment.owners == {
        (q(1), q(1)): (q(0), q(0)),
        (q(5), q(0)): (q(4), q(0)),
        (q(8), q(0)): (q(0), q(0)),
    }


def test_cell_measures_on_grid():
    section = CrossSection.lexicographic([(0, 0), (2, 0), (0, 2), (2, 2)], Window.torus([4, 4]))
    for c in section.points:
        assert geometry_service.voronoi_cell_measure(section, c).value == 4


def test_singleton_cell_is_the_torus():
    section = CrossSection.lexicographic([(1, 1)], Window.torus([3, 3]))
    assert geometry_service.voronoi_cell_measure(section, (q(1), q(1))).value == 9


def test_sup_metric_ties_have_area():
    section = CrossSection.lexicographic([(0, 0), (4, 0)], Window.torus([8, 8]))
    first = geometry_service.voronoi_cell_measure(section, (q(0), q(0)))
    second = geometry_service.voronoi_cell_measure(section, (q(4), q(0)))
    assert (first.value, second.value) == (40, 24)
    assert first.samples is None
    assert first.model_dump(mode="json")["approximate"] == "40"


def test_montecarlo_estimate_reports_samples():
    section = CrossSection.lexicographic([(0, 0), (4, 0)], Window.torus([8, 8]))
    cell = geometry_service.voronoi_cell_measure(section, (q(0), q(0)), mode="montecarlo", samples=4000, seed=3)
    assert cell.samples == 4000
    assert abs(float(cell.value) - 40) < 2.5
    assert float(cell.approximate) == pytest.approx(float(cell.value), rel=1e-5)


def test_exact_mode_needs_the_plane():
    section = circle([0, 5])
    with pytest.raises(UnsupportedDim):
        geometry_service.voronoi_cell_measure(section, (q(0),))


def test_polygon_helpers():
    square = rect_polygon(Rect.cube(0, 2, 2))
    assert polygon_area(square) == 4
    assert polygon_area(clip_to_rect(square, Rect.cube(1, 3, 2))) == 1
    assert clip_to_rect(square, Rect.cube(5, 1, 2)) == []


coords = st.fractions(min_value=0, max_value=Fraction(39, 10), max_denominator=4)


@settings(max_examples=25)
@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=4, unique=True))
def test_voronoi_cells_partition_the_torus(points):
    section = CrossSection.lexicographic(points, Window.torus([4, 4]))
    cells = geometry_service.voronoi_partition(section)
    total = ZERO
    for c, polys in cells.items():
        for poly in polys:
            total = total + polygon_area(poly)
            centroid = (sum((p[0] for p in poly), ZERO) / len(poly), sum((p[1] for p in poly), ZERO) / len(poly))
            assert geometry_service.voronoi_owner(section, centroid) == c
    assert total == 16


@given(st.lists(st.fractions(min_value=0, max_value=Fraction(99, 10), max_denominator=10), min_size=1, max_size=6, unique=True))
def test_voronoi_intervals_partition_the_circle(points):
    section = circle(points)
    cells = geometry_service.voronoi_partition(section)
    assert sum((r.volume() for rects in cells.values() for r in rects), ZERO) == 10
