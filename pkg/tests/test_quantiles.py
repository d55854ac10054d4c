import math

import numpy as np
import pytest
from scipy.stats import norm
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from hdconf.covariance import toeplitz_model
from hdconf.exceptions import DivisibilityError, DomainError
from hdconf.quantiles import (
    BlockNormRegion, QuantileSpec, StatisticBatch, empirical_quantile,
    estimate_region_radius, fit_regions, quantile_standard_error, quantile_upper_bound,
)
from hdconf.regions import INFINITY, block_partition, log_volume_block_lp, log_volume_cube
from hdconf.sampling import SampleStreamConfig, iter_batches


@pytest.mark.parametrize("values, alpha, expected", [
    (range(1, 101), 0.05, 95),
    ([1, 2, 3], 0.4, 2),
    ([5, 5, 5, 5], 0.05, 5),
    ([5, 5, 5, 5], 0.49, 5),
])
def test_empirical_quantile_examples(values, alpha, expected):
    assert empirical_quantile(StatisticBatch(list(values)), alpha) == expected


def test_empirical_quantile_unsorted_input():
    rng = np.random.default_rng(0)
    values = rng.permutation(np.arange(1, 1001))
    batch = StatisticBatch(values[:500])
    batch.extend(values[500:])
    assert len(batch) == 1000
    assert empirical_quantile(batch, 0.1) == 900
    assert np.all(np.diff(batch.values) >= 0)


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.1, 0.7])
def test_empirical_quantile_alpha_range(alpha):
    with pytest.raises(DomainError):
        empirical_quantile([1.0, 2.0], alpha)


def test_empirical_quantile_empty():
    with pytest.raises(DomainError):
        empirical_quantile(StatisticBatch(), 0.05)


@pytest.mark.parametrize("n", [1, 7, 100, 1001])
@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.2, 0.45])
def test_coverage_by_construction(n, alpha):
    values = np.random.default_rng(n).standard_normal(n)
    q = empirical_quantile(values, alpha)
    assert np.mean(values <= q) >= 1 - alpha


def test_quantile_standard_error_matches_asymptotics():
    values = np.random.default_rng(1).standard_normal(10**5)
    se = quantile_standard_error(values, 0.05)
    q = norm.ppf(0.95)
    asymptotic = math.sqrt(0.05 * 0.95 / 10**5) / norm.pdf(q)
    assert se == pytest.approx(asymptotic, rel=0.2)


def test_radius_d1():
    model = toeplitz_model(1, 0.0)
    radius, batch = estimate_region_radius(model, block_partition(1, 1), INFINITY,
                                           QuantileSpec(0.05, 10**5), seed=42)
    assert len(batch) == 10**5
    assert radius == pytest.approx(1.95996, abs=0.02)


def test_radius_sup_norm_d2():
    model = toeplitz_model(2, 0.0)
    expected = norm.ppf((1 + math.sqrt(0.95)) / 2)
    assert expected == pytest.approx(2.2365, abs=1e-4)
    radius, _ = estimate_region_radius(model, block_partition(2, 1), INFINITY,
                                       QuantileSpec(0.05, 10**5), seed=42)
    assert radius == pytest.approx(expected, abs=0.02)


def test_sup_norm_radius_independent_of_blocking():
    model = toeplitz_model(2, 0.0)
    spec = QuantileSpec(0.05, 10**4)
    r1, _ = estimate_region_radius(model, block_partition(2, 1), INFINITY, spec, seed=3)
    r2, _ = estimate_region_radius(model, block_partition(2, 2), INFINITY, spec, seed=3)
    assert r1 == r2


def test_estimate_region_radius_dimension_check():
    with pytest.raises(DomainError):
        estimate_region_radius(toeplitz_model(4, 0.0), block_partition(6, 2), 2,
                               QuantileSpec(), seed=1)


def test_radius_independent_of_batch_size():
    model = toeplitz_model(16, 0.5)
    spec = QuantileSpec(0.05, 5000)
    part = block_partition(16, 4)
    r1, b1 = estimate_region_radius(model, part, 2, spec, seed=8, batch_size=1)
    r2, b2 = estimate_region_radius(model, part, 2, spec, seed=8, batch_size=5000)
    assert r1 == r2
    np.testing.assert_array_equal(b1.values, b2.values)


def test_quantile_upper_bound_examples():
    alpha = 0.05
    assert quantile_upper_bound(1, 2, 1.0, math.e * alpha, alpha) == pytest.approx(
        math.sqrt(2) + 1, rel=1e-12)
    assert quantile_upper_bound(4, 2, 1.0, 100, 0.05) == pytest.approx(5.52550935282327, rel=1e-12)
    for s, p in ((1, 2), (4, 3), (8, INFINITY)):
        a = quantile_upper_bound(s, p, 1.5, 300, 0.05)
        b = quantile_upper_bound(s, p, 3.0, 300, 0.05)
        assert b == pytest.approx(math.sqrt(2) * a, rel=1e-12)


def test_quantile_upper_bound_domain():
    with pytest.raises(DomainError):
        quantile_upper_bound(4, 1.5, 1.0, 100, 0.05)
    with pytest.raises(DomainError):
        quantile_upper_bound(4, 2, 1.0, 0.1, 0.05)


@pytest.mark.parametrize("c", [0.0, 0.5, 0.9])
@pytest.mark.parametrize("s", [1, 2, 8])
def test_radius_dominated_by_concentration_threshold(c, s):
    d = 64
    radius, batch = estimate_region_radius(toeplitz_model(d, c), block_partition(d, s), 2,
                                           QuantileSpec(0.05, 20_000), seed=17)
    bound = quantile_upper_bound(s, 2, (1 + c) / (1 - c), d, 0.05)
    assert radius <= bound + 3 * quantile_standard_error(batch, 0.05)


def test_doubling_n_consistency():
    model, part = toeplitz_model(32, 0.5), block_partition(32, 4)
    for seed in range(5):
        r1, b1 = estimate_region_radius(model, part, 2, QuantileSpec(0.05, 10_000), seed)
        r2, b2 = estimate_region_radius(model, part, 2, QuantileSpec(0.05, 20_000), seed + 100)
        se = math.hypot(quantile_standard_error(b1, 0.05), quantile_standard_error(b2, 0.05))
        assert abs(r1 - r2) < 3 * se


# --- estimator API ---------------------------------------------------------

@pytest.fixture
def gaussian_rows():
    return np.random.default_rng(0).standard_normal((4000, 8))


def test_estimator_params_roundtrip():
    est = BlockNormRegion(block_size=4, p=2, alpha=0.1)
    assert est.get_params() == {"block_size": 4, "p": 2, "alpha": 0.1, "permutation": None}
    est.set_params(alpha=0.05)
    assert clone(est).get_params()["alpha"] == 0.05


def test_estimator_fit_predict_score(gaussian_rows):
    est = BlockNormRegion(block_size=2, p=2, alpha=0.05).fit(gaussian_rows)
    assert est.n_features_in_ == 8
    assert est.n_samples_seen_ == 4000
    stat = est.score_samples(gaussian_rows)
    assert est.radius_ == empirical_quantile(stat, 0.05)
    assert est.predict(gaussian_rows).dtype == bool
    assert est.score(gaussian_rows) >= 0.95
    assert est.transform(gaussian_rows).shape == (4000, 1)
    assert est.log_volume_ == pytest.approx(log_volume_block_lp(8, 2, 2, est.radius_))
    cube = BlockNormRegion().fit(gaussian_rows)
    assert cube.log_volume_ == pytest.approx(log_volume_cube(8, cube.radius_))
    assert cube.radius_se_ > 0


def test_estimator_partial_fit_equals_fit(gaussian_rows):
    full = BlockNormRegion(block_size=4, p=3).fit(gaussian_rows)
    streamed = BlockNormRegion(block_size=4, p=3)
    for chunk in np.array_split(gaussian_rows, 7):
        streamed.partial_fit(chunk)
    assert streamed.radius_ == full.radius_
    refit = streamed.fit(gaussian_rows[:100])
    assert refit.n_samples_seen_ == 100


def test_estimator_permutation_param(gaussian_rows):
    perm = np.random.default_rng(1).permutation(8)
    est = BlockNormRegion(block_size=2, p=2, permutation=perm).fit(gaussian_rows)
    plain = BlockNormRegion(block_size=2, p=2).fit(gaussian_rows[:, perm])
    assert est.radius_ == plain.radius_


def test_estimator_errors(gaussian_rows):
    with pytest.raises(NotFittedError):
        BlockNormRegion().predict(gaussian_rows)
    with pytest.raises(NotFittedError):
        BlockNormRegion().radius_
    with pytest.raises(DivisibilityError):
        BlockNormRegion(block_size=3).fit(gaussian_rows)
    with pytest.raises(DomainError):
        BlockNormRegion(alpha=0.6).fit(gaussian_rows)
    with pytest.raises(DomainError):
        BlockNormRegion(p=0.5).fit(gaussian_rows)
    est = BlockNormRegion(block_size=2).fit(gaussian_rows)
    with pytest.raises(DomainError):
        est.predict(gaussian_rows[:, :6])
    with pytest.raises(DomainError):
        est.partial_fit(gaussian_rows[:, :6])
    with pytest.raises(ValueError):
        est.fit(np.full((3, 8), np.nan))


def test_estimator_in_pipeline(gaussian_rows):
    pipe = make_pipeline(FunctionTransformer(lambda X: 2 * X),
                         BlockNormRegion(block_size=2, p=2))
    out = pipe.fit_transform(gaussian_rows)
    direct = BlockNormRegion(block_size=2, p=2).fit(2 * gaussian_rows)
    np.testing.assert_allclose(out[:, 0], direct.score_samples(2 * gaussian_rows))


def test_fit_regions_shares_one_stream():
    model = toeplitz_model(8, 0.5)
    a, b = BlockNormRegion(block_size=1, p=INFINITY), BlockNormRegion(block_size=8, p=INFINITY)
    fit_regions(model, [a, b], 3000, seed=5)
    assert a.radius_ == b.radius_
    rows = np.concatenate(list(iter_batches(SampleStreamConfig(model, 3000, 5))))
    assert BlockNormRegion(block_size=1).fit(rows).radius_ == a.radius_
