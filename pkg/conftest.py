"""
Shared fixtures and hypothesis strategies
"""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings, strategies as st

from core.exactnum import QuadNum
from models.geometry import CrossSection, Rect, Window

hypothesis_settings.register_profile(
    "toolkit", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile("toolkit")

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
quads = st.builds(QuadNum, rationals, rationals)
nonzero_quads = quads.filter(bool)
weights = st.fractions(min_value=0, max_value=5, max_denominator=12)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def half():
    return QuadNum(Fraction(1, 2))


@pytest.fixture
def torus_1d():
    """Circle of length 2 with the section {0, 1}"""
    window = Window.torus([2])
    return CrossSection.lexicographic([(0,), (1,)], window)


@pytest.fixture
def torus_2d():
    """Torus of side 2 with the section {0, 1}^2"""
    window = Window.torus([2, 2])
    return CrossSection.lexicographic([(0, 0), (0, 1), (1, 0), (1, 1)], window)


@pytest.fixture
def unit_body_1d():
    return Rect.of([Fraction(-1, 4)], [Fraction(1, 4)])
