import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdconf.exceptions import DivisibilityError, DomainError
from hdconf.regions import (
    INFINITY, RegionSpec, block_norm_statistic, block_partition, contains, log_volume,
    log_volume_block_lp, log_volume_cube, log_volume_ratio, max_block_norm,
)


def test_block_partition_examples():
    part = block_partition(6, 2)
    assert [b.tolist() for b in part.blocks] == [[0, 1], [2, 3], [4, 5]]
    assert part.n_blocks == 3
    with pytest.raises(DivisibilityError):
        block_partition(5, 2)
    assert [b.tolist() for b in block_partition(4, 4).blocks] == [[0, 1, 2, 3]]


def test_block_partition_with_permutation():
    part = block_partition(4, 2, permutation=[3, 0, 2, 1])
    assert [b.tolist() for b in part.blocks] == [[3, 0], [2, 1]]
    x = np.array([1.0, 0.0, 0.0, 5.0])
    # blocks {3, 0} -> (5, 1); {2, 1} -> (0, 0)
    assert max_block_norm(x, part, 1) == pytest.approx(6.0)
    assert max_block_norm(x, block_partition(4, 2), 1) == pytest.approx(5.0)


def test_blocks_cover_and_are_disjoint():
    perm = np.random.default_rng(0).permutation(24)
    for s in (1, 2, 3, 4, 6, 8, 12, 24):
        for part in (block_partition(24, s), block_partition(24, s, perm)):
            flat = np.concatenate(part.blocks)
            assert sorted(flat.tolist()) == list(range(24))
            assert part.s * part.n_blocks == part.d


@pytest.mark.parametrize("p, expected", [(2, 5.0), (1, 7.0), (INFINITY, 4.0)])
def test_max_block_norm_examples(p, expected):
    assert max_block_norm([3, 4, 0, 0], block_partition(4, 2), p) == pytest.approx(expected)


@pytest.mark.parametrize("s", [1, 2, 4])
def test_sup_norm_ignores_blocking(s):
    assert max_block_norm([3, 4, 0, 0], block_partition(4, s), INFINITY) == 4.0


def test_max_block_norm_dimension_mismatch():
    with pytest.raises(DomainError):
        max_block_norm([1.0, 2.0, 3.0], block_partition(4, 2), 2)


def test_general_p_matches_direct_formula():
    x = np.random.default_rng(2).standard_normal((50, 12))
    for p in (1.5, 3.0, 7.0, 40.0):
        got = block_norm_statistic(x, 3, p)
        blocks = x.reshape(50, 4, 3)
        ref = (np.abs(blocks) ** p).sum(axis=2) ** (1 / p)
        np.testing.assert_allclose(got, ref.max(axis=1), rtol=1e-12)
    big = np.full((1, 4), 1e200)
    assert np.isfinite(block_norm_statistic(big, 2, 3.0)).all()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=6, max_size=6),
       st.sampled_from([1, 2, 3, 6]))
def test_block_norm_nonincreasing_in_p(values, s):
    part = block_partition(6, s)
    norms = [max_block_norm(values, part, p) for p in (1, 1.5, 2, 3, 8, INFINITY)]
    for a, b in zip(norms, norms[1:]):
        assert b <= a * (1 + 1e-12) + 1e-300


def test_contains_examples():
    cube = RegionSpec(block_partition(4, 1), INFINITY, 1.0)
    assert contains(cube, np.ones(4))
    ball = RegionSpec(block_partition(4, 2), 2, 1.0)
    assert not contains(ball, [0.9, 0.9, 0, 0])
    assert contains(ball, np.zeros(4))
    with pytest.raises(DomainError):
        contains(ball, np.zeros(3))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4),
       st.floats(0.01, 10), st.floats(0.01, 10))
def test_contains_monotone_in_radius(x, r1, r2):
    lo, hi = sorted((r1, r2))
    part = block_partition(4, 2)
    if contains(RegionSpec(part, 2, lo), x):
        assert contains(RegionSpec(part, 2, hi), x)


def test_region_spec_rejects_bad_radius():
    with pytest.raises(DomainError):
        RegionSpec(block_partition(2, 1), 2, 0.0)


def test_log_volume_cube_examples():
    assert log_volume_cube(1, 0.5) == 0.0
    assert log_volume_cube(2, 1.0) == pytest.approx(1.3862943611, abs=1e-10)
    assert log_volume_cube(100, 2.0) == pytest.approx(100 * math.log(4), rel=1e-14)
    with pytest.raises(DomainError):
        log_volume_cube(3, 0.0)


def test_log_volume_block_lp_examples():
    assert log_volume_block_lp(2, 2, 2, 1.0) == pytest.approx(1.1447298858, abs=1e-10)
    assert log_volume_block_lp(2, 2, 1, 1.0) == pytest.approx(math.log(2), abs=1e-12)
    with pytest.raises(DivisibilityError):
        log_volume_block_lp(5, 2, 2, 1.0)
    with pytest.raises(DomainError):
        log_volume_block_lp(4, 2, 0.5, 1.0)
    with pytest.raises(DomainError):
        log_volume_block_lp(4, 2, 2, -1.0)


def test_block_lp_with_unit_block_is_the_cube():
    for d, p, r in itertools.product((1, 3, 64), (1, 1.5, 2, 3, 10), (0.1, 1.0, 3.7)):
        assert log_volume_block_lp(d, 1, p, r) == log_volume_cube(d, r)


def test_log_volume_ratio_examples():
    assert log_volume_ratio(10, 1, 2, 1.7, 1.7) == (0.0, 0.0)
    total, per_dim = log_volume_ratio(2, 2, 2, 1.0, 1.0)
    assert total == pytest.approx(math.log(math.pi / 4), abs=1e-10)
    assert per_dim == pytest.approx(total / 2)
    assert log_volume_ratio(8, 4, INFINITY, 2.0, 2.0)[0] == 0.0


def test_log_volume_dispatch():
    assert log_volume(RegionSpec(block_partition(6, 3), INFINITY, 2.0)) == log_volume_cube(6, 2.0)
    assert log_volume(RegionSpec(block_partition(6, 3), 2, 2.0)) == log_volume_block_lp(6, 3, 2, 2.0)


def _grid_ball_volume(s, p, r, m):
    # midpoint rule on an m^s grid over [-r, r]^s
    h = 2 * r / m
    ticks = -r + h * (np.arange(m) + 0.5)
    if s == 1:
        return float(np.count_nonzero(np.abs(ticks) <= r)) * h
    count = 0
    grids = np.meshgrid(*([ticks] * (s - 1)), indexing="ij")
    rest = sum(np.abs(g) ** p for g in grids)
    for t in ticks:
        count += np.count_nonzero(rest + abs(t) ** p <= r**p)
    return count * h**s


@pytest.mark.parametrize("s, m", [(1, 10), (2, 800), (3, 200)])
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_gamma_formula_matches_grid_integration(s, m, p):
    r = 1.3
    closed = math.exp(log_volume_block_lp(s, s, p, r))
    assert closed == pytest.approx(_grid_ball_volume(s, p, r, m), rel=1e-2)


def test_membership_fraction_matches_volume():
    r, n = 1.0, 200_000
    pts = np.random.default_rng(12).uniform(-r, r, size=(n, 2))
    region = RegionSpec(block_partition(2, 2), 2, r)
    inside = np.mean(block_norm_statistic(pts, 2, 2.0) <= region.radius)
    expected = math.exp(log_volume(region)) / (2 * r) ** 2
    sigma = math.sqrt(expected * (1 - expected) / n)
    assert abs(inside - expected) <= 3 * sigma
