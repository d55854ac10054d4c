"""Closed-form quantities behind the exponential volume-decay argument.

``C_over_c`` is the ratio of the unspecified constants in
``c_p <= C s^(1/p - 1/2) sqrt(log d)`` and ``c sqrt(log d) <= c_inf``; it is a
user-supplied diagnostic input, never derived here.
"""
import math
from dataclasses import dataclass

from ._validation import check_norm_order, check_positive_int
from .exceptions import DomainError, NotFoundError
from .numerics import ln_gamma

MAX_SPARSITY_SCAN = 10**6


def _check_p(p):
    p = check_norm_order(p)
    if p < 2.0:
        raise DomainError(f"requires p >= 2, got p={p}")
    return p


@dataclass(frozen=True)
class TheoremRegime:
    p: float
    s: int
    C_over_c: float

    def __post_init__(self):
        _check_p(self.p)
        check_positive_int(self.s, "s")
        if not self.C_over_c > 0:
            raise DomainError(f"C_over_c must be positive, got {self.C_over_c!r}")

    def log_ratio_root_bound(self):
        return log_ratio_root_bound(self.s, self.p, self.C_over_c)


def expectation_upper_bound(s, p, lambda_max):
    """``s^(1/p) sqrt(lambda_max)``, an upper bound on ``E ||X_J||_p`` for ``|J| = s``."""
    p = _check_p(p)
    s = check_positive_int(s, "s")
    if not lambda_max > 0:
        raise DomainError(f"lambda_max must be positive, got {lambda_max!r}")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return s**inv_p * math.sqrt(lambda_max)


def log_ratio_root_bound(s, p, C_over_c):
    p = _check_p(p)
    s = check_positive_int(s, "s")
    if not C_over_c > 0:
        raise DomainError(f"C_over_c must be positive, got {C_over_c!r}")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return (
        ln_gamma(inv_p + 1.0)
        + (inv_p - 0.5) * math.log(s)
        + math.log(C_over_c)
        - ln_gamma(s * inv_p + 1.0) / s
    )


def ratio_root_bound(s, p, C_over_c):
    """Bound on ``(V(A_p) / V(A_inf))^(1/d)``:
    ``G(1/p + 1) s^(1/p - 1/2) C_over_c / G(s/p + 1)^(1/s)``.
    """
    return math.exp(log_ratio_root_bound(s, p, C_over_c))


def minimal_sparsity(p, C_over_c, cap=MAX_SPARSITY_SCAN):
    """Smallest block size ``s`` with ``ratio_root_bound(s, p, C_over_c) < 1``."""
    p = _check_p(p)
    for s in range(1, cap + 1):
        if ratio_root_bound(s, p, C_over_c) < 1.0:
            return s
    raise NotFoundError(f"no s <= {cap} brings the ratio bound below 1 (p={p}, C/c={C_over_c})")
