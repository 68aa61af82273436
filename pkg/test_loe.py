"""
Tests for the back-and-forth block maps and regular tiling maps
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core.exactnum import KAPPA, ONE, q
from core.exceptions import (
    InconsistentRatio, LabelMismatch, PreconditionError, ProviderExhausted, TypeMismatch
)
from models.geometry import Rect, Window
from models.loe import BasisRect, MapPiece, NormalizationVerdict, PointMap, Side
from services.loe_service import OrbitFragmentProvider, loe_service
from services.towers_service import towers_service


def fragment(side, zeta, count=1, labels=1, fresh_zeta=None, budget=None):
    return OrbitFragmentProvider.generate(
        side, count, len(zeta), labels=labels, zeta=zeta,
        fresh_zeta=fresh_zeta if fresh_zeta is not None else zeta, budget=budget,
    )


def smallest_count(zeta: Fraction, k: int) -> int:
    n = 0
    while not Fraction(n, 2 ** k) / zeta > 1 - Fraction(1, 2 ** (k + 1)):
        n += 1
    return n


# ============================================
# Block counts
# ============================================

def test_block_count_examples():
    assert loe_service.block_counts(Fraction(9, 2), 0) == 3
    assert loe_service.block_counts(Fraction(9, 2), 1) == 7
    assert loe_service.block_counts(5, 1) == 8
    assert loe_service.block_counts(4, 1) == 7


def test_new_blocks_in_the_plane():
    x = fragment(Side.X, [5, 5])
    y = fragment(Side.Y, [4, 4])
    assert len(loe_service.new_blocks(x.core[0], 1)) == 28
    assert len(loe_service.new_blocks(y.core[0], 1)) == 13
    assert len(loe_service.new_blocks(x.core[0], 0)) == 9


@pytest.mark.parametrize("k", range(7))
def test_block_counts_match_the_scan(k):
    lo, hi = 1 - Fraction(1, 2 ** (k + 1)), 1 - Fraction(1, 2 ** (k + 2))
    for j in range(101):
        zeta = 4 + Fraction(j, 100)
        n = loe_service.block_counts(zeta, k)
        assert n == smallest_count(zeta, k)
        assert lo < Fraction(n, 2 ** k) / zeta <= hi


def test_block_counts_reject_bad_input():
    with pytest.raises(PreconditionError):
        loe_service.block_counts(Fraction(7, 2), 0)
    with pytest.raises(PreconditionError):
        loe_service.block_counts(4, -1)


# ============================================
# Fragment providers
# ============================================

def test_compressibility_maps():
    x = fragment(Side.X, [Fraction(9, 2)], count=2, labels=2)
    first = x.tau(1, 0)
    assert x.tau(1, 0) is first
    assert first.fresh and first.label == "X0" and first.summoned_by == 0
    assert x.tau(2, 0) != first and x.tau(1, 1).label == "X1"
    assert len({t.anchor for t in x.core + x.fresh}) == 5
    with pytest.raises(PreconditionError):
        x.tau(0, 0)


def test_generated_zetas_are_in_range():
    x = OrbitFragmentProvider.generate(Side.X, 20, 3, seed=9)
    for tile in x.core:
        assert all(4 <= z <= 5 for z in tile.zeta)
    with pytest.raises(PreconditionError):
        fragment(Side.X, [6])


# ============================================
# Back and forth
# ============================================

def test_level_zero_is_a_permutation():
    x = fragment(Side.X, [Fraction(9, 2), Fraction(9, 2)])
    y = fragment(Side.Y, [Fraction(9, 2), Fraction(9, 2)])
    state = loe_service.run_back_and_forth(x, y, levels=0)
    assert len(state) == 9
    assert [s.fresh_tiles for s in state.stages] == [0, 0]
    assert loe_service.audit(state, x, y, 0).ok


def test_forth_step_summons_fresh_tiles():
    x = fragment(Side.X, [5, 5])
    y = fragment(Side.Y, [4, 4])
    state = loe_service.run_back_and_forth(x, y, levels=1)
    forth = next(s for s in state.stages if s.stage == "forth-1")
    assert forth.mapped == 28
    assert forth.fresh_tiles >= 1
    assert forth.measure == 7
    on_core = [p for p in state.pairs if p.stage == "forth-1" and p.target.anchor == y.core[0].anchor]
    assert len(on_core) == 13
    assert loe_service.audit(state, x, y, 1).ok


def test_back_step_splits_blocks():
    x = fragment(Side.X, [4, 4])
    y = fragment(Side.Y, [5, 5])
    state = loe_service.run_back_and_forth(x, y, levels=1)
    back = next(s for s in state.stages if s.stage == "back-1")
    assert back.mapped == 15 * 4
    assert back.measure == Fraction(15, 4)
    assert all(p.source.level == 2 for p in state.pairs if p.stage == "back-1")
    audit = loe_service.audit(state, x, y, 1)
    assert audit.ok, audit.violations


def test_two_levels_land_in_the_window():
    x = fragment(Side.X, [5, 5])
    y = fragment(Side.Y, [4, 4])
    state = loe_service.run_back_and_forth(x, y, levels=2)
    audit = loe_service.audit(state, x, y, 2)
    assert audit.ok
    for row in audit.coverage:
        assert all(Fraction(7, 8) < Fraction(f) <= Fraction(15, 16) for f in row.fractions)


def test_equal_fragments_map_identically():
    x = fragment(Side.X, [Fraction(21, 5), Fraction(47, 10)])
    y = fragment(Side.Y, [Fraction(21, 5), Fraction(47, 10)])
    state = loe_service.run_back_and_forth(x, y, levels=3)
    assert all(p.source == p.target and p.part is None for p in state.pairs)
    assert not x.fresh and not y.fresh


def test_empty_fragments():
    x = OrbitFragmentProvider(Side.X, [])
    y = OrbitFragmentProvider(Side.Y, [])
    assert len(loe_service.run_back_and_forth(x, y, levels=2)) == 0


@settings(max_examples=10)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_fragments_give_loe(seed):
    x = OrbitFragmentProvider.generate(Side.X, 5, 2, seed=seed, labels=2)
    y = OrbitFragmentProvider.generate(Side.Y, 5, 2, seed=seed + 1, labels=2)
    state = loe_service.run_back_and_forth(x, y, levels=2)
    assert loe_service.audit(state, x, y, 2).ok
    report = loe_service.verify_normalization(loe_service.point_map_from_blocks(state, x, y))
    assert report.verdict is NormalizationVerdict.LOE
    assert report.label_map == {"X0": "Y0", "X1": "Y1"}


def test_twenty_tiles_three_levels():
    x = OrbitFragmentProvider.generate(Side.X, 20, 2, seed=4)
    y = OrbitFragmentProvider.generate(Side.Y, 20, 2, seed=5)
    state = loe_service.run_back_and_forth(x, y, levels=3)
    audit = loe_service.audit(state, x, y, 3)
    assert audit.injective and audit.measure_preserving and audit.levels_ok and audit.labels_ok
    assert audit.ok


def test_seed_must_keep_labels_apart():
    x = fragment(Side.X, [Fraction(9, 2)], count=2, labels=2)
    y = fragment(Side.Y, [Fraction(9, 2)], count=2, labels=1)
    with pytest.raises(LabelMismatch):
        loe_service.run_back_and_forth(x, y)


def test_seed_must_be_a_bijection():
    x = fragment(Side.X, [Fraction(9, 2)], count=2)
    y = fragment(Side.Y, [Fraction(9, 2)], count=2)
    with pytest.raises(PreconditionError):
        loe_service.run_back_and_forth(x, y, seed={0: 0, 1: 0})
    with pytest.raises(PreconditionError):
        loe_service.run_back_and_forth(x, fragment(Side.Y, [Fraction(9, 2)], count=3))


def test_provider_exhausted():
    x = fragment(Side.X, [5, 5])
    y = fragment(Side.Y, [4, 4], budget=0)
    with pytest.raises(ProviderExhausted):
        loe_service.run_back_and_forth(x, y, levels=1)


# ============================================
# Normalization
# ============================================

def piece(label, source_side, target_side, target_label=None):
    return MapPiece(
        Rect.cube(0, source_side, 1), label, Rect.cube(10, target_side, 1), target_label or label.replace("X", "Y")
    )


def test_identity_has_ratio_one():
    report = loe_service.verify_normalization(PointMap((piece("X0", 1, 1),)))
    assert report.ratios == {"X0": ONE}
    assert report.verdict is NormalizationVerdict.LOE


def test_scaled_label_is_not_hoe():
    report = loe_service.verify_normalization(PointMap((piece("X0", 1, 1), piece("X1", 1, 2))))
    assert report.ratios["X1"] == 2
    assert report.verdict is NormalizationVerdict.WHOE


def test_common_ratio_is_hoe():
    report = loe_service.verify_normalization(PointMap((piece("X0", 1, 2), piece("X1", 2, 4))))
    assert report.verdict is NormalizationVerdict.HOE


def test_inconsistent_ratio():
    with pytest.raises(InconsistentRatio):
        loe_service.verify_normalization(PointMap((piece("X0", 1, 1), piece("X0", 1, 2))))


def test_basis_restricts_the_check():
    point_map = PointMap((piece("X0", 1, 1), piece("X1", 1, 2)))
    report = loe_service.verify_normalization(point_map, [BasisRect(Rect.cube(0, 1, 1), "X0")])
    assert report.ratios == {"X0": ONE}
    assert report.verdict is NormalizationVerdict.LOE


def test_label_merge_is_detected():
    with pytest.raises(LabelMismatch):
        loe_service.induced_label_map(PointMap((piece("X0", 1, 1, "Y0"), piece("X1", 1, 1, "Y0"))))


def test_pieces_map_affinely():
    p = piece("X0", 2, 4)
    assert p.apply((q(1),)) == (q(12),)
    assert p.ratio() == 2


# ============================================
# Regular tiling maps
# ============================================

@pytest.fixture(scope="module", params=[1, 2])
def limits(request):
    spec = towers_service.build_spec(request.param, 1)
    x = towers_service.regular_tiling(spec, seed=0, label_prefix="X").limit
    y = towers_service.regular_tiling(spec, seed=1, label_prefix="Y").limit
    return x, y


def test_regular_tiling_map_commutes(limits):
    x, y = limits
    seed = loe_service.seed_pairing(x, y)
    point_map = loe_service.regular_tiling_loe(x, y, seed)
    assert len(point_map) == len(x.tiles())
    assert loe_service.theta_violations(point_map, x, y) == []
    report = loe_service.verify_normalization(point_map)
    assert report.verdict is NormalizationVerdict.LOE
    assert set(report.label_map) == {t.label for t in x.tiles()}


def test_single_unit_pair_is_a_translation(limits):
    x, y = limits
    cx, cy = next(iter(sorted(loe_service.seed_pairing(x, y).items())))
    point_map = loe_service.regular_tiling_loe(x, y, {cx: cy})
    unit_piece = next(p for p in point_map.pieces if p.source.lo == cx)
    assert unit_piece.apply(cx) == cy
    assert unit_piece.source.sides() == unit_piece.target.sides()


def test_seed_with_wrong_type(limits):
    x, y = limits
    seed = loe_service.seed_pairing(x, y)
    other = next(t.anchor for t in y.tiles() if t.kind != y.theta.unit)
    first = next(iter(seed))
    seed[first] = other
    with pytest.raises(TypeMismatch):
        loe_service.regular_tiling_loe(x, y, seed)


def test_seed_pairing_needs_equal_labels():
    spec = towers_service.build_spec(1, 1)
    x = towers_service.regular_tiling(spec, label_prefix="X").limit
    wide = Window.box_of(Rect.cube(0, KAPPA * 24, 1))
    y = towers_service.regular_tiling(spec, window=wide, label_prefix="Y").limit
    with pytest.raises(LabelMismatch):
        loe_service.seed_pairing(x, y)
