"""Gaussian covariance models: AR(1) Toeplitz family and explicit SPD matrices."""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_correlation, check_permutation, check_positive_int
from .exceptions import DomainError, SizeError
from .numerics import MAX_DENSE_DIM, cholesky_lower


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Covariance of a centred Gaussian vector in ``d`` dimensions.

    ``kind`` is ``"toeplitz"`` (entries ``c**|i-j|``) or ``"explicit"``
    (a dense SPD ``matrix``). A coordinate ``permutation`` (0-based) may be
    attached to a Toeplitz model; the distribution is then that of
    ``x[permutation]`` with ``x`` drawn from the base model.
    """

    kind: str
    d: int
    c: float = 0.0
    matrix: np.ndarray = field(default=None, repr=False)
    permutation: np.ndarray = field(default=None, repr=False)

    @property
    def is_toeplitz(self):
        return self.kind == "toeplitz"


def toeplitz_model(d, c):
    d = check_positive_int(d, "d")
    c = check_correlation(c)
    return CovarianceModel(kind="toeplitz", d=d, c=c)


def explicit_model(matrix):
    """Wrap a dense SPD matrix; rejects matrices that fail Cholesky."""
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DomainError(f"expected a non-empty square matrix, got shape {m.shape}")
    cholesky_lower(m)
    m.setflags(write=False)
    return CovarianceModel(kind="explicit", d=m.shape[0], matrix=m)


def one_norm_eigen_bound(c):
    """Upper bound ``(1 + c) / (1 - c)`` on the spectrum of ``c**|i-j|`` at any d."""
    c = check_correlation(c)
    return (1.0 + c) / (1.0 - c)


def materialize(model):
    """Dense covariance matrix of ``model`` (permutation applied)."""
    if model.d > MAX_DENSE_DIM:
        raise SizeError(f"dimension {model.d} exceeds dense cap {MAX_DENSE_DIM}")
    if model.is_toeplitz:
        idx = np.arange(model.d)
        lags = np.abs(idx[:, None] - idx[None, :])
        m = np.power(model.c, lags, dtype=float) if model.c > 0 else np.eye(model.d)
    else:
        m = np.array(model.matrix)
    if model.permutation is not None:
        m = m[np.ix_(model.permutation, model.permutation)]
    return m


def permuted(model, perm):
    """Model of ``x[perm]`` where ``x`` follows ``model``.

    Entry ``(i, j)`` of the result is ``Sigma[perm[i], perm[j]]``. Toeplitz
    models keep their structure and record the permutation, which the
    sampler applies to each drawn vector; explicit models are permuted
    in place.
    """
    perm = check_permutation(perm, model.d)
    if model.is_toeplitz:
        if model.permutation is not None:
            perm = model.permutation[perm]
        perm.setflags(write=False)
        return CovarianceModel(kind="toeplitz", d=model.d, c=model.c, permutation=perm)
    m = model.matrix[np.ix_(perm, perm)].copy()
    m.setflags(write=False)
    return CovarianceModel(kind="explicit", d=model.d, matrix=m)
