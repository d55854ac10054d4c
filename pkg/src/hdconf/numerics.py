"""Special functions and small dense linear algebra."""
import math

import numpy as np

from .exceptions import ConvergenceError, DomainError, NotSPDError, SizeError

MAX_DENSE_DIM = 4096

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _ln_gamma_lanczos(x):
    # valid for x >= 0.5
    z = x - 1.0
    series = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        series += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(series)


def ln_gamma(x):
    """Natural log of the gamma function for real ``x > 0``.

    Uses the Lanczos approximation, with the reflection formula below 0.5.
    Absolute error is below 1e-10 on [0.5, 200].
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        # Gamma(x) Gamma(1 - x) = pi / sin(pi x); sin(pi x) > 0 on (0, 0.5)
        return math.log(math.pi / math.sin(math.pi * x)) - _ln_gamma_lanczos(1.0 - x)
    return _ln_gamma_lanczos(x)


def cholesky_lower(m):
    """Lower Cholesky factor ``L`` of a symmetric matrix, ``L @ L.T == m``.

    Unblocked column-by-column (Cholesky-Banachiewicz) elimination. A pivot
    at or below ``1e-12 * max(diag(m))`` raises :class:`NotSPDError`.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    if d > MAX_DENSE_DIM:
        raise SizeError(f"dimension {d} exceeds dense cap {MAX_DENSE_DIM}")
    if d == 0:
        return a
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise DomainError("matrix is not symmetric")

    threshold = 1e-12 * max(float(np.max(np.diag(a))), 0.0)
    L = np.zeros_like(a)
    for j in range(d):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > threshold:
            raise NotSPDError(f"non-positive pivot {pivot:.3e} at index {j}")
        L[j, j] = math.sqrt(pivot)
        if j + 1 < d:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L


def power_iteration_lambda_max(m, tol=1e-9, max_iter=100_000):
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Starts from the normalized all-ones vector and stops once the Rayleigh
    quotient changes by at most ``tol`` relative to its current value.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
    d = a.shape[0]
    x = np.full(d, 1.0 / math.sqrt(d))
    lam = None
    for _ in range(max_iter):
        y = a @ x
        lam_new = float(x @ y) / float(x @ x)
        if lam is not None and abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            # all-ones lies in the null space of a PSD matrix only when a == 0
            return 0.0
        x = y / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations", last_value=lam
    )
