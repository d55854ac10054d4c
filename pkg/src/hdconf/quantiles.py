"""Empirical quantiles of the max-block-norm statistic.

:class:`BlockNormRegion` is a scikit-learn style estimator: ``fit`` on
Gaussian draws sets the radius to the ``(1 - alpha)`` empirical quantile of
``max_k ||x[J_k]||_p``; ``predict`` tests membership and ``score`` reports
coverage. ``partial_fit`` accepts a stream of batches, which is how
:func:`estimate_region_radius` drives it from the sampler.
"""
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_alpha, check_norm_order, check_positive_int
from .exceptions import DomainError
from .regions import RegionSpec, block_norm_statistic, block_partition, log_volume
from .sampling import SampleStreamConfig, sample_batches


@dataclass(frozen=True)
class QuantileSpec:
    alpha: float = 0.05
    n: int = 100_000

    def __post_init__(self):
        check_alpha(self.alpha)
        check_positive_int(self.n, "n")


class StatisticBatch:
    """Realized statistic values, collected in pieces and sorted once."""

    def __init__(self, values=()):
        self._parts = []
        self._sorted = None
        self.extend(values)

    def extend(self, values):
        values = np.asarray(values, dtype=float).ravel()
        if values.size:
            self._parts.append(values)
            self._sorted = None

    def __len__(self):
        return sum(len(v) for v in self._parts)

    def finalize(self):
        if self._sorted is None:
            merged = np.concatenate(self._parts) if self._parts else np.empty(0)
            self._sorted = np.sort(merged, kind="stable")
            self._parts = [self._sorted]
        return self._sorted

    @property
    def values(self):
        """Sorted values."""
        return self.finalize()


def _as_sorted(batch):
    if isinstance(batch, StatisticBatch):
        return batch.values
    return np.sort(np.asarray(batch, dtype=float).ravel())


def _order_index(n, alpha):
    # 1-based k = ceil((1 - alpha) n); rounding guards 0.95 * 100 -> 95.00000000000001
    return max(1, math.ceil(round((1.0 - alpha) * n, 9)))


def empirical_quantile(batch, alpha):
    """The ``k``-th smallest value with ``k = ceil((1 - alpha) n)``.

    At least a ``1 - alpha`` fraction of the sample is ``<=`` the result.
    """
    alpha = check_alpha(alpha)
    values = _as_sorted(batch)
    if values.size == 0:
        raise DomainError("empirical_quantile of an empty batch")
    return float(values[_order_index(values.size, alpha) - 1])


def quantile_standard_error(batch, alpha):
    """Distribution-free standard error of :func:`empirical_quantile`.

    Half the spread between order statistics one binomial standard
    deviation, ``sqrt(n alpha (1 - alpha))`` ranks, either side of ``k``.
    """
    alpha = check_alpha(alpha)
    values = _as_sorted(batch)
    n = values.size
    if n < 2:
        raise DomainError("standard error needs at least two values")
    k = _order_index(n, alpha)
    m = max(1, math.ceil(math.sqrt(n * alpha * (1.0 - alpha))))
    lo, hi = max(1, k - m), min(n, k + m)
    return float(values[hi - 1] - values[lo - 1]) * m / (hi - lo)


def quantile_upper_bound(s, p, lambda_max, d, alpha):
    """Gaussian-concentration threshold dominating the ``(1 - alpha)`` quantile.

    ``s^(1/p - 1/2) sqrt(2 lambda_max log(d / (alpha s))) + s^(1/p) sqrt(lambda_max)``,
    valid for ``p >= 2``.
    """
    p = check_norm_order(p)
    if p < 2.0:
        raise DomainError(f"bound holds for p >= 2 only, got p={p}")
    if not lambda_max > 0:
        raise DomainError(f"lambda_max must be positive, got {lambda_max!r}")
    log_arg = d / (alpha * s)
    if not log_arg > 1.0:
        raise DomainError(f"d / (alpha s) = {log_arg!r} must exceed 1")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    deviation = s ** (inv_p - 0.5) * math.sqrt(2.0 * lambda_max * math.log(log_arg))
    return deviation + s ** inv_p * math.sqrt(lambda_max)


class BlockNormRegion(TransformerMixin, BaseEstimator):
    """Confidence region ``{x : max_k ||x[J_k]||_p <= radius_}``.

    Parameters
    ----------
    block_size : int
        Coordinates per block ``s``; must divide the number of features.
    p : float
        Norm order, ``>= 1`` or ``np.inf`` (the hypercube).
    alpha : float
        Nominal miscoverage in ``(0, 0.5)``.
    permutation : array-like of int, optional
        0-based reordering applied to each row before contiguous blocking.

    Attributes
    ----------
    statistics_ : StatisticBatch
        Statistic values of every row seen by ``fit``/``partial_fit``.
    n_samples_seen_ : int
    radius_ : float
        ``(1 - alpha)`` empirical quantile of ``statistics_``.
    radius_se_ : float
        Order-statistic standard error of ``radius_``.
    log_volume_ : float
        Log-Lebesgue volume of the fitted region.
    """

    def __init__(self, block_size=1, p=np.inf, alpha=0.05, permutation=None):
        self.block_size = block_size
        self.p = p
        self.alpha = alpha
        self.permutation = permutation

    def _check_params(self, d):
        self._p = check_norm_order(self.p)
        check_alpha(self.alpha)
        part = block_partition(d, self.block_size, self.permutation)
        self._partition = part

    def _statistic(self, X):
        return block_norm_statistic(X, self.block_size, self._p, self._partition.permutation)

    def fit(self, X, y=None):
        for attr in ("statistics_", "n_samples_seen_", "n_features_in_"):
            self.__dict__.pop(attr, None)
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        first = not hasattr(self, "statistics_")
        X = check_array(X, dtype=np.float64)
        if first:
            self._check_params(X.shape[1])
            self.n_features_in_ = X.shape[1]
            self.statistics_ = StatisticBatch()
            self.n_samples_seen_ = 0
        elif X.shape[1] != self.n_features_in_:
            raise DomainError(
                f"X has {X.shape[1]} features, region was fitted with {self.n_features_in_}"
            )
        self.statistics_.extend(self._statistic(X))
        self.n_samples_seen_ += X.shape[0]
        return self

    def _validated(self, X):
        check_is_fitted(self, "statistics_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise DomainError(
                f"X has {X.shape[1]} features, region was fitted with {self.n_features_in_}"
            )
        return X

    @property
    def radius_(self):
        check_is_fitted(self, "statistics_")
        return empirical_quantile(self.statistics_, self.alpha)

    @property
    def radius_se_(self):
        check_is_fitted(self, "statistics_")
        return quantile_standard_error(self.statistics_, self.alpha)

    @property
    def region_(self):
        return RegionSpec(partition=self._partition, p=self._p, radius=self.radius_)

    @property
    def log_volume_(self):
        return log_volume(self.region_)

    def score_samples(self, X):
        """Statistic value of each row."""
        return self._statistic(self._validated(X))

    def transform(self, X):
        return self.score_samples(X)[:, None]

    def predict(self, X):
        """Boolean membership of each row (boundary included)."""
        return self.score_samples(X) <= self.radius_

    def score(self, X, y=None):
        """Fraction of rows inside the region."""
        return float(np.mean(self.predict(X)))


def fit_regions(model, regions, n, seed, batch_size=1024, n_jobs=1):
    """Fit several unfitted regions on one shared sample stream of ``model``."""
    config = SampleStreamConfig(model=model, n=n, seed=seed, batch_size=batch_size)

    def feed(batch):
        for region in regions:
            region.partial_fit(batch)

    sample_batches(config, feed, n_jobs=n_jobs)
    return regions


def estimate_region_radius(model, partition, p, spec, seed, batch_size=1024, n_jobs=1):
    """Monte Carlo radius of the region for ``partition`` and norm order ``p``.

    Each sampled vector is reduced to its statistic as soon as its batch
    arrives, so memory stays ``O(n + d * batch_size)``.
    Returns ``(radius, StatisticBatch)``.
    """
    if partition.d != model.d:
        raise DomainError(f"partition dimension {partition.d} != model dimension {model.d}")
    region = BlockNormRegion(
        block_size=partition.s, p=p, alpha=spec.alpha, permutation=partition.permutation
    )
    fit_regions(model, [region], spec.n, seed, batch_size=batch_size, n_jobs=n_jobs)
    return region.radius_, region.statistics_
