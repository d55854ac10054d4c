"""Block partitions, block-norm statistics, membership and log-volumes.

A region is ``{x : max_k ||x[J_k]||_p <= radius}`` for a partition of the
coordinates into equal blocks ``J_k``. With ``p = inf`` the statistic is
the sup norm whatever the partition, so the hypercube is the same code
path as the block-lp regions.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_norm_order, check_permutation, check_positive_int
from .exceptions import DivisibilityError, DomainError
from .numerics import ln_gamma

INFINITY = math.inf


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """Split of ``range(d)`` into ``d // s`` blocks of ``s`` coordinates.

    Without a permutation the blocks are contiguous. With one, ``x`` is
    reordered as ``x[permutation]`` before contiguous blocking.
    """

    d: int
    s: int
    permutation: np.ndarray = field(default=None, repr=False)

    @property
    def n_blocks(self):
        return self.d // self.s

    @property
    def blocks(self):
        order = np.arange(self.d) if self.permutation is None else self.permutation
        return [order[k * self.s:(k + 1) * self.s] for k in range(self.n_blocks)]


def block_partition(d, s, permutation=None):
    d = check_positive_int(d, "d")
    s = check_positive_int(s, "s")
    if d % s:
        raise DivisibilityError(f"block size s={s} does not divide d={d}")
    if permutation is not None:
        permutation = check_permutation(permutation, d)
        permutation.setflags(write=False)
    return BlockPartition(d=d, s=s, permutation=permutation)


@dataclass(frozen=True)
class RegionSpec:
    partition: BlockPartition
    p: float
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_norm_order(self.p))
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius!r}")


def block_norm_statistic(X, s, p, permutation=None):
    """Row-wise ``max_k ||x[J_k]||_p`` for a 2-D array ``X`` of shape (m, d)."""
    X = np.asarray(X, dtype=float)
    m, d = X.shape
    if permutation is not None:
        X = X[:, permutation]
    if math.isinf(p):
        return np.abs(X).max(axis=1) if d else np.zeros(m)
    blocks = X.reshape(m, d // s, s)
    if p == 2.0:
        norms = np.sqrt(np.einsum("ijk,ijk->ij", blocks, blocks))
    elif p == 1.0:
        norms = np.abs(blocks).sum(axis=2)
    else:
        a = np.abs(blocks)
        top = a.max(axis=2, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        norms = top[..., 0] * ((a / safe) ** p).sum(axis=2) ** (1.0 / p)
    return norms.max(axis=1)


def max_block_norm(x, partition, p):
    x = np.asarray(x, dtype=float)
    if x.shape != (partition.d,):
        raise DomainError(f"expected a vector of length {partition.d}, got shape {x.shape}")
    p = check_norm_order(p)
    return float(block_norm_statistic(x[None, :], partition.s, p, partition.permutation)[0])


def contains(region, x):
    """Closed-set membership: ``max_block_norm(x) <= radius``."""
    return max_block_norm(x, region.partition, region.p) <= region.radius


def _check_radius(radius):
    radius = float(radius)
    if not radius > 0 or math.isinf(radius):
        raise DomainError(f"radius must be positive and finite, got {radius!r}")
    return radius


def log_volume_cube(d, radius):
    """``log((2 r)^d)``."""
    d = check_positive_int(d, "d")
    return d * math.log(2.0 * _check_radius(radius))


def log_volume_block_lp(d, s, p, radius):
    """Log-volume of ``d // s`` stacked ``s``-dimensional lp balls of radius ``r``.

    Per coordinate: ``log 2 + lnG(1/p + 1) + log r - lnG(s/p + 1) / s``.
    """
    d = check_positive_int(d, "d")
    s = check_positive_int(s, "s")
    if d % s:
        raise DivisibilityError(f"block size s={s} does not divide d={d}")
    p = check_norm_order(p)
    if math.isinf(p):
        raise DomainError("log_volume_block_lp needs a finite p; use log_volume_cube")
    radius = _check_radius(radius)
    # gamma terms grouped first so that s == 1 reduces exactly to the cube
    shape_term = ln_gamma(1.0 / p + 1.0) - ln_gamma(s / p + 1.0) / s
    return d * (math.log(2.0 * radius) + shape_term)


def log_volume(region):
    part = region.partition
    if math.isinf(region.p):
        return log_volume_cube(part.d, region.radius)
    return log_volume_block_lp(part.d, part.s, region.p, region.radius)


def log_volume_ratio(d, s, p, radius_p, radius_inf):
    """``log V(A_p) - log V(A_inf)``; returns ``(total, per_dimension)``."""
    if math.isinf(check_norm_order(p)):
        total = log_volume_cube(d, radius_p) - log_volume_cube(d, radius_inf)
    else:
        total = log_volume_block_lp(d, s, p, radius_p) - log_volume_cube(d, radius_inf)
    return total, total / d
