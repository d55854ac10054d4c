"""Seeded, streamed sampling of ``X ~ N(0, Sigma)``.

Random numbers come from numpy's PCG64 bit generator; normal variates use
numpy's ziggurat ``standard_normal``. The stream of ``n`` vectors is cut
into fixed chunks whose row count depends only on ``d``. Chunk ``k`` is
drawn from ``PCG64(mix_seed(seed, k))``, so the delivered sequence is a
function of ``(model, n, seed)`` alone, whatever the batch size or the
number of worker threads.
"""
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ._validation import check_correlation, check_positive_int, check_seed
from .covariance import CovarianceModel
from .exceptions import DomainError
from .numerics import cholesky_lower

_MASK64 = (1 << 64) - 1
_CHUNK_ELEMENTS = 1 << 21
_MAX_CHUNK_ROWS = 4096


def splitmix64(x):
    """One SplitMix64 output for state ``x`` (golden-gamma step plus finalizer)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(seed, index):
    """Derive an independent 64-bit seed for sub-stream ``index``.

    The seed is hashed before the index is folded in; plain ``seed ^ index``
    would make chunk ``k`` of seed ``a`` coincide with chunk ``a ^ b ^ k``
    of seed ``b``.
    """
    return splitmix64(splitmix64(int(seed) & _MASK64) ^ (int(index) & _MASK64))


def _generator(seed):
    return np.random.Generator(np.random.PCG64(seed))


def standard_normal_stream(seed, count):
    """``count`` i.i.d. N(0, 1) draws, reproducible from ``seed``."""
    seed = check_seed(seed)
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    return _generator(splitmix64(seed)).standard_normal(count)


def sample_ar1_vector(c, d, innovations):
    """Map innovations ``Z`` to a vector with covariance ``c**|i-j|``.

    ``X[0] = Z[0]`` and ``X[j] = c X[j-1] + sqrt(1 - c^2) Z[j]``. A 2-D
    ``innovations`` array is treated row-wise.
    """
    c = check_correlation(c)
    z = np.asarray(innovations, dtype=float)
    if z.shape[-1] != d:
        raise DomainError(f"expected {d} innovations per vector, got {z.shape[-1]}")
    x = np.empty_like(z)
    scale = math.sqrt(1.0 - c * c)
    x[..., 0] = z[..., 0]
    for j in range(1, d):
        x[..., j] = c * x[..., j - 1] + scale * z[..., j]
    return x


def ar1_filter(innovations, c):
    """Vectorized equivalent of :func:`sample_ar1_vector` over rows (IIR filter)."""
    z = np.array(innovations, dtype=float)
    if c == 0.0:
        return z
    z[..., 1:] *= math.sqrt(1.0 - c * c)
    return lfilter([1.0], [1.0, -c], z, axis=-1)


@dataclass(frozen=True)
class SampleStreamConfig:
    model: CovarianceModel
    n: int
    seed: int
    batch_size: int = 1024

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.batch_size, "batch_size")
        check_seed(self.seed)


def chunk_rows(d):
    """Rows per generation chunk; a fixed function of the dimension."""
    return max(1, min(_MAX_CHUNK_ROWS, _CHUNK_ELEMENTS // d))


class _ChunkMaker:
    def __init__(self, model, n, seed):
        self.model = model
        self.n = n
        self.seed = seed
        self.rows = chunk_rows(model.d)
        self.count = -(-n // self.rows)
        self.factor = None
        if not model.is_toeplitz:
            self.factor = cholesky_lower(model.matrix)

    def __call__(self, k):
        rows = min(self.rows, self.n - k * self.rows)
        z = _generator(mix_seed(self.seed, k)).standard_normal((rows, self.model.d))
        if self.factor is not None:
            return z @ self.factor.T
        x = ar1_filter(z, self.model.c)
        if self.model.permutation is not None:
            x = x[:, self.model.permutation]
        return x


def _iter_chunks(maker, n_jobs):
    if n_jobs <= 1:
        for k in range(maker.count):
            yield maker(k)
        return
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        window = deque()
        next_k = 0
        while next_k < maker.count or window:
            while next_k < maker.count and len(window) < 2 * n_jobs:
                window.append(pool.submit(maker, next_k))
                next_k += 1
            yield window.popleft().result()


def iter_batches(config, n_jobs=1):
    """Yield ``(m, d)`` arrays covering exactly ``config.n`` vectors in order."""
    maker = _ChunkMaker(config.model, config.n, config.seed)
    size = config.batch_size
    pending = None
    for chunk in _iter_chunks(maker, n_jobs):
        pending = chunk if pending is None else np.concatenate([pending, chunk])
        start = 0
        while len(pending) - start >= size:
            yield pending[start:start + size]
            start += size
        pending = pending[start:] if start < len(pending) else None
    if pending is not None:
        yield pending


def sample_batches(config, consumer, n_jobs=1):
    """Stream samples of ``config`` to ``consumer(batch)``.

    Chunks may be generated on ``n_jobs`` threads; delivery to the consumer
    is serialized and in stream order. Exceptions from the consumer abort
    the stream and propagate.
    """
    for batch in iter_batches(config, n_jobs=n_jobs):
        consumer(batch)
