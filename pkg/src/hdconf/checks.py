"""Property suites behind the ``check-bounds`` command."""
import math
from typing import NamedTuple

import numpy as np

from .bounds import minimal_sparsity, ratio_root_bound
from .covariance import materialize, one_norm_eigen_bound, toeplitz_model
from .experiment import GridConfig, linear_fit, run_grid
from .numerics import power_iteration_lambda_max
from .quantiles import BlockNormRegion, fit_regions
from .sampling import mix_seed

GROWTH_D = tuple(2**k for k in range(4, 14))
DOMINATION_D = (16, 32, 64, 128, 256, 512)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def domination_check(n=100_000, seed=42, c_values=(0.0, 0.5, 0.9), s_values=(2, 4, 8),
                     d_values=DOMINATION_D, p=2.0, alpha=0.05, n_jobs=1):
    """Every estimated radius stays below the concentration threshold."""
    config = GridConfig(d_values=d_values, s_values=s_values, p_values=(p,),
                        c_values=c_values, alpha=alpha, n=n, master_seed=seed,
                        coverage_n=0)
    records = run_grid(config, n_jobs=n_jobs)
    bad = [r for r in records if r.xbar_p is None or r.c_p > r.xbar_p]
    detail = f"{len(records) - len(bad)}/{len(records)} cells dominated"
    checked = [r for r in records if r.xbar_p is not None]
    if checked:
        worst = max(checked, key=lambda r: r.c_p / r.xbar_p)
        detail += (f"; max c_p/xbar_p = {worst.c_p / worst.xbar_p:.4f} "
                   f"(d={worst.d}, s={worst.s}, c={worst.c})")
    return CheckResult("domination", not bad, detail), records


def sup_norm_radii(d_values=GROWTH_D, c=0.0, n=100_000, seed=42, alpha=0.05):
    radii = []
    for i, d in enumerate(d_values):
        region = BlockNormRegion(block_size=1, p=math.inf, alpha=alpha)
        fit_regions(toeplitz_model(d, c), [region], n, mix_seed(seed, i))
        radii.append(region.radius_)
    return np.array(radii)


def growth_check(d_values=GROWTH_D, n=100_000, seed=42, alpha=0.05, min_r2=0.98):
    """Sup-norm radius grows linearly in ``sqrt(log d)``."""
    radii = sup_norm_radii(d_values, n=n, seed=seed, alpha=alpha)
    fit = linear_fit(np.sqrt(np.log(np.asarray(d_values, dtype=float))), radii)
    ok = fit.slope > 0 and fit.r_squared >= min_r2
    detail = f"slope {fit.slope:.4f}, R^2 {fit.r_squared:.5f} over d={d_values[0]}..{d_values[-1]}"
    return CheckResult("sup-norm growth", ok, detail), fit


def gamma_ratio_checks():
    results = []
    small, large = ratio_root_bound(4, 2, 1.0), ratio_root_bound(2**20, 2, 1.0)
    results.append(CheckResult(
        "gamma decay", large < 0.01 * small,
        f"bound(s=2^20) = {large:.3e} vs bound(s=4) = {small:.3e}"))

    worst = 0.0
    for s in range(1, 21):
        for p in (2.0, 3.0, 4.0):
            direct = (math.gamma(1 / p + 1) * s ** (1 / p - 0.5)
                      / math.gamma(s / p + 1) ** (1 / s))
            worst = max(worst, abs(ratio_root_bound(s, p, 1.0) / direct - 1))
    results.append(CheckResult("log-space vs direct gamma", worst <= 1e-9,
                               f"max relative deviation {worst:.2e}"))

    failures = []
    for r in (0.5, 1.0, 2.0, 5.0, 10.0):
        s = minimal_sparsity(2.0, r)
        if not ratio_root_bound(s, 2.0, r) < 1.0:
            failures.append(r)
        if s > 1 and not ratio_root_bound(s - 1, 2.0, r) >= 1.0:
            failures.append(r)
    results.append(CheckResult("minimal sparsity consistency", not failures,
                               f"inconsistent at C/c = {failures}" if failures else "ok"))
    return results


def eigen_bound_check(c_values=(0.0, 0.5, 0.9), d_max=256):
    violations = []
    for c in c_values:
        bound = one_norm_eigen_bound(c)
        prev = 0.0
        for d in range(2, d_max + 1):
            lam = power_iteration_lambda_max(materialize(toeplitz_model(d, c)))
            if lam > bound + 1e-9 or lam < prev:
                violations.append((c, d))
            prev = lam
    detail = f"violations at {violations[:5]}" if violations else f"d = 2..{d_max} ok"
    return CheckResult("eigenvalue bound", not violations, detail)


def run_all(n=100_000, seed=42, growth_d=GROWTH_D, n_jobs=1):
    results = [eigen_bound_check()]
    results.extend(gamma_ratio_checks())
    results.append(domination_check(n=n, seed=seed, n_jobs=n_jobs)[0])
    results.append(growth_check(d_values=growth_d, n=n, seed=seed)[0])
    return results


def format_report(results):
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
