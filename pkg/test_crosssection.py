"""
Tests for greedy lacunary cross-sections
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core.exactnum import QuadNum, q
from core.exceptions import NotLacunaryInput
from models.crosssection import LacunaryConfig
from models.geometry import CrossSection, Rect, Window
from services.crosssection_service import crosssection_service
from services.geometry_service import geometry_service


def circle(points, length):
    return CrossSection.lexicographic([(p,) for p in points], Window.torus([length]))


def values(section):
    return [p[0] for p in section.points]


def test_independent_partition_of_a_path():
    section = circle([0, 1, 2, 3], 8)
    partition = crosssection_service.independent_partition(section, Rect.of([Fraction(-3, 2)], [Fraction(3, 2)]))
    assert len(partition) == 2
    assert [[p[0] for p in cls] for cls in partition.classes] == [[0, 2], [1, 3]]


def test_independent_partition_without_edges():
    section = circle([0, 3, 6], 9)
    assert len(crosssection_service.independent_partition(section, Rect.symmetric(1, 1))) == 1


def test_independent_partition_single_edge():
    partition = crosssection_service.independent_partition(circle([0, 1], 10), Rect.symmetric(2, 1))
    assert partition.classes == (((q(0),),), ((q(1),),))


def test_extend_with_explicit_stream():
    cfg = LacunaryConfig(
        body=Rect.symmetric(1, 1),
        candidates=[(q(Fraction(1, 2)),), (q(Fraction(5, 2)),), (q(5),), (q(Fraction(15, 2)),), (q(9),)],
    )
    out = crosssection_service.extend_to_maximal(circle([0], 10), cfg)
    assert values(out) == [0, Fraction(5, 2), 5, Fraction(15, 2)]


def test_maximal_section_is_a_fixed_point():
    section = circle([0, Fraction(5, 2), 5, Fraction(15, 2)], 10)
    cfg = LacunaryConfig(body=Rect.symmetric(1, 1))
    assert crosssection_service.extend_to_maximal(section, cfg, rounds=3) == section


def test_extend_empty_section_on_grid():
    cfg = LacunaryConfig(body=Rect.symmetric(1, 1))
    out = crosssection_service.extend_to_maximal(circle([], 4), cfg)
    assert values(out) == [0, 2]
    certificate = crosssection_service.certificate(out, cfg)
    assert certificate.holds
    assert certificate.radius == 2


def test_certificate_with_enlargement_body():
    cfg = LacunaryConfig(body=Rect.symmetric(1, 1), enlargement=Rect.symmetric(Fraction(1, 2), 1))
    out = crosssection_service.extend_to_maximal(circle([], 4), cfg)
    assert not crosssection_service.certificate(out, cfg).holds


def test_rejects_overlapping_input():
    cfg = LacunaryConfig(body=Rect.symmetric(1, 1))
    with pytest.raises(NotLacunaryInput):
        crosssection_service.extend_to_maximal(circle([0, 1], 10), cfg)


def test_config_requires_symmetric_body():
    with pytest.raises(ValueError):
        LacunaryConfig(body=Rect.of([0], [1]))
    with pytest.raises(ValueError):
        LacunaryConfig(body=Rect.symmetric(1, 1), mesh=0)


def test_seeded_order_is_replayable():
    window = Window.torus([6, 6])
    cfg = LacunaryConfig(body=Rect.symmetric(1, 2), seed=11, mesh=QuadNum(Fraction(1, 2)))
    first = crosssection_service.extend_to_maximal(CrossSection((), window), cfg)
    second = crosssection_service.extend_to_maximal(CrossSection((), window), cfg)
    assert first == second
    assert geometry_service.is_lacunary(first, cfg.body)


def test_more_rounds_never_remove_points():
    window = Window.box_of(Rect.cube(0, 5, 2))
    cfg = LacunaryConfig(body=Rect.symmetric(Fraction(3, 4), 2))
    one = crosssection_service.extend_to_maximal(CrossSection((), window), cfg, rounds=1)
    three = crosssection_service.extend_to_maximal(CrossSection((), window), cfg, rounds=3)
    assert set(one.points) <= set(three.points)


starts = st.lists(st.integers(min_value=0, max_value=19), max_size=4, unique=True)


@settings(max_examples=50)
@given(starts, st.integers(min_value=0, max_value=1000))
def test_extension_keeps_input_and_lacunarity(points, seed):
    body = Rect.symmetric(1, 1)
    section = circle(points, 20)
    if not geometry_service.is_lacunary(section, body):
        with pytest.raises(NotLacunaryInput):
            crosssection_service.extend_to_maximal(section, LacunaryConfig(body=body, seed=seed))
        return
    cfg = LacunaryConfig(body=body, seed=seed, mesh=QuadNum(Fraction(1, 2)))
    out = crosssection_service.extend_to_maximal(section, cfg, rounds=2)
    assert set(section.points) <= set(out.points)
    assert geometry_service.is_lacunary(out, body)
    # mesh below the radius of U: maximal, hence U+U cocompact
    assert crosssection_service.certificate(out, cfg).holds
