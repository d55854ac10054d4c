"""Small argument checks used across the package."""
import math
import numbers

import numpy as np

from .exceptions import DomainError

MAX_SEED = 2**64 - 1


def check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    return alpha


def check_correlation(c):
    c = float(c)
    if not 0.0 <= c < 1.0:
        raise DomainError(f"correlation c must lie in [0, 1), got {c!r}")
    return c


def check_norm_order(p):
    """Return ``p`` as a float (``math.inf`` for the sup norm)."""
    if isinstance(p, str):
        p = math.inf if p.strip().lower() in ("inf", "infinity") else float(p)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise DomainError(f"norm order p must be >= 1 or inf, got {p!r}")
    return p


def check_positive_int(value, name):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise DomainError(f"{name} must be >= 1, got {value!r}")
    return int(value)


def check_seed(seed):
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, numbers.Integral):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must fit in 64 unsigned bits, got {seed!r}")
    return int(seed)


def check_permutation(perm, d):
    """Validate a 0-based permutation of ``range(d)``; return it as an int array."""
    arr = np.asarray(perm)
    if arr.shape != (d,) or not np.issubdtype(arr.dtype, np.integer):
        raise DomainError(f"permutation must be {d} integers, got shape {arr.shape}")
    if not np.array_equal(np.sort(arr), np.arange(d)):
        raise DomainError("permutation is not a bijection on range(d)")
    return arr.astype(np.intp)
