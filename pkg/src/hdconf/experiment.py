"""Grid experiments: log-volume ratios of block-lp regions against the cube.

Each cell ``(d, s, p, c)`` samples ``n`` AR(1) Gaussian vectors, fits the
block-lp region and the hypercube on the same draws, and records the log
volume ratio. Cells are seeded from the master seed and the cell's
position in the full ``c x s x p x d`` product, so results do not depend on
execution order or on the number of worker processes.
"""
import csv
import io
import itertools
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ._validation import check_alpha, check_correlation, check_norm_order, check_seed
from .covariance import one_norm_eigen_bound, permuted, toeplitz_model
from .exceptions import ConfigurationError, DomainError
from .quantiles import BlockNormRegion, fit_regions, quantile_upper_bound
from .regions import log_volume_ratio
from .sampling import SampleStreamConfig, iter_batches, mix_seed

logger = logging.getLogger(__name__)

# sub-stream offsets derived from a cell seed
COVERAGE_STREAM = 0xC0FE_0000_0000_0001
PERMUTATION_STREAM = 0x5EED_0000_0000_0002

CSV_COLUMNS = (
    "d", "s", "p", "c", "alpha", "n", "cell_seed", "permuted",
    "c_p", "c_inf", "log_vol_ratio", "log_vol_ratio_per_dim",
    "xbar_p", "lambda_max_bound", "coverage_p", "coverage_inf",
)


@dataclass(frozen=True)
class GridConfig:
    d_values: tuple
    s_values: tuple
    p_values: tuple = (2.0,)
    c_values: tuple = (0.0,)
    alpha: float = 0.05
    n: int = 100_000
    master_seed: int = 42
    permute: bool = False
    coverage_n: int = 100_000

    def __post_init__(self):
        try:
            check_alpha(self.alpha)
            check_seed(self.master_seed)
            for c in self.c_values:
                check_correlation(c)
            for p in self.p_values:
                if math.isinf(check_norm_order(p)):
                    raise DomainError("grid p values must be finite")
        except DomainError as exc:
            raise ConfigurationError(str(exc)) from exc
        if self.n < 2 or self.coverage_n < 0:
            raise ConfigurationError("n must be >= 2 and coverage_n >= 0")
        if any(int(v) < 1 for v in (*self.d_values, *self.s_values)):
            raise ConfigurationError("d and s values must be positive integers")


@dataclass(frozen=True)
class ExperimentRecord:
    d: int
    s: int
    p: float
    c: float
    alpha: float
    n: int
    cell_seed: int
    permuted: bool
    c_p: float
    c_inf: float
    log_vol_ratio: float
    log_vol_ratio_per_dim: float
    xbar_p: Optional[float]
    lambda_max_bound: float
    coverage_p: Optional[float] = None
    coverage_inf: Optional[float] = None
    # diagnostics, not part of the CSV schema
    c_p_se: Optional[float] = field(default=None, compare=False)
    c_inf_se: Optional[float] = field(default=None, compare=False)
    permutation: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def log_vol_ratio_se(self):
        """Monte Carlo standard error of ``log_vol_ratio``.

        Treats the two radius estimates as independent; they share samples and
        are positively correlated, so this overstates the true error.
        """
        if self.c_p_se is None or self.c_inf_se is None:
            return None
        rel = math.hypot(self.c_p_se / self.c_p, self.c_inf_se / self.c_inf)
        return self.d * rel


class Cell(NamedTuple):
    ordinal: int
    d: int
    s: int
    p: float
    c: float


def cell_permutation(cell_seed, d):
    """Fisher-Yates shuffle of ``range(d)`` drawn from the cell's permutation stream."""
    rng = np.random.Generator(np.random.PCG64(mix_seed(cell_seed, PERMUTATION_STREAM)))
    return rng.permutation(d)


def _coverage(model, regions, n, seed, batch_size):
    inside = [0] * len(regions)
    config = SampleStreamConfig(model=model, n=n, seed=seed, batch_size=batch_size)
    for batch in iter_batches(config):
        for i, region in enumerate(regions):
            inside[i] += int(np.count_nonzero(region.predict(batch)))
    return [k / n for k in inside]


def run_cell(d, s, p, c, alpha=0.05, n=100_000, cell_seed=0, permute=False,
             coverage_n=0, batch_size=1024, n_jobs=1):
    """Estimate both radii on one sample stream and record the log-volume ratio."""
    p = check_norm_order(p)
    model = toeplitz_model(d, c)
    perm = None
    if permute:
        perm = cell_permutation(cell_seed, d)
        model = permuted(model, perm)
        logger.debug("cell seed %d permutation %s", cell_seed, perm.tolist())

    region_p = BlockNormRegion(block_size=s, p=p, alpha=alpha)
    region_inf = BlockNormRegion(block_size=1, p=math.inf, alpha=alpha)
    fit_regions(model, [region_p, region_inf], n, cell_seed, batch_size=batch_size, n_jobs=n_jobs)
    c_p, c_inf = region_p.radius_, region_inf.radius_
    total, per_dim = log_volume_ratio(d, s, p, c_p, c_inf)

    lam = one_norm_eigen_bound(c)
    xbar = None
    if p >= 2.0 and d / (alpha * s) > 1.0:
        xbar = quantile_upper_bound(s, p, lam, d, alpha)

    cov_p = cov_inf = None
    if coverage_n:
        cov_p, cov_inf = _coverage(
            model, [region_p, region_inf], coverage_n,
            mix_seed(cell_seed, COVERAGE_STREAM), batch_size,
        )

    return ExperimentRecord(
        d=d, s=s, p=p, c=float(c), alpha=float(alpha), n=n, cell_seed=cell_seed,
        permuted=bool(permute), c_p=c_p, c_inf=c_inf, log_vol_ratio=total,
        log_vol_ratio_per_dim=per_dim, xbar_p=xbar, lambda_max_bound=lam,
        coverage_p=cov_p, coverage_inf=cov_inf,
        c_p_se=region_p.radius_se_, c_inf_se=region_inf.radius_se_,
        permutation=None if perm is None else tuple(int(i) for i in perm),
    )


def grid_cells(config):
    """Return ``(cells, skipped)``; ordinals index the full c x s x p x d product."""
    cells, skipped = [], []
    product = itertools.product(config.c_values, config.s_values, config.p_values, config.d_values)
    for ordinal, (c, s, p, d) in enumerate(product):
        cell = Cell(ordinal, int(d), int(s), float(p), float(c))
        (skipped if cell.d % cell.s else cells).append(cell)
    return cells, skipped


def _run_cell_job(job):
    cell, config = job
    return run_cell(
        cell.d, cell.s, cell.p, cell.c, alpha=config.alpha, n=config.n,
        cell_seed=mix_seed(config.master_seed, cell.ordinal),
        permute=config.permute, coverage_n=config.coverage_n,
    )


def run_grid(config, n_jobs=1):
    """Run every divisible cell of ``config``; records come back in ordinal order."""
    cells, skipped = grid_cells(config)
    for cell in skipped:
        logger.warning("skipping cell d=%d s=%d: s does not divide d", cell.d, cell.s)
    if not cells:
        raise ConfigurationError("no (d, s) pair in the grid satisfies s | d")
    jobs = [(cell, config) for cell in cells]
    if n_jobs <= 1:
        return [_run_cell_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(_run_cell_job, jobs))


class LinearFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    slope_se: float


def linear_fit(x, y):
    """Ordinary least squares of ``y`` on ``x``.

    ``r_squared`` is 0 when ``y`` has zero variance. ``slope_se`` is the usual
    residual-based standard error (0 for an exact fit).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-D arrays of equal length")
    if np.unique(x).size < 3:
        raise DomainError("need at least 3 distinct x values")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    slope = float(xc @ yc) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = yc - slope * xc
    sse = float(resid @ resid)
    r2 = 0.0 if syy == 0.0 else max(0.0, 1.0 - sse / syy)
    slope_se = math.sqrt(sse / (x.size - 2) / sxx)
    return LinearFit(slope, intercept, r2, slope_se)


def fit_slope(records):
    """``(slope, r_squared)`` of ``log_vol_ratio`` against ``d``."""
    fit = linear_fit([r.d for r in records], [r.log_vol_ratio for r in records])
    return fit.slope, fit.r_squared


def group_slopes(records):
    """Linear fits per ``(s, p, c, permuted)`` group, in first-seen order."""
    groups = {}
    for r in records:
        groups.setdefault((r.s, r.p, r.c, r.permuted), []).append(r)
    out = []
    for key, rows in groups.items():
        fit = linear_fit([r.d for r in rows], [r.log_vol_ratio for r in rows])
        out.append((key, len(rows), fit))
    return out


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def format_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(records, destination):
    """Write records as CSV to a path, an open text stream, or ``"-"`` (stdout)."""
    records = list(records)
    if not records:
        raise DomainError("emit_csv needs at least one record")
    text = format_csv(records)
    if destination == "-":
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        try:
            with open(destination, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write CSV to {destination}: {exc}") from exc


_INT_COLUMNS = {"d", "s", "n", "cell_seed"}
_OPTIONAL_COLUMNS = {"xbar_p", "coverage_p", "coverage_inf"}


def _parse_row(row):
    values = {}
    for col in CSV_COLUMNS:
        raw = row[col]
        if col in _INT_COLUMNS:
            values[col] = int(raw)
        elif col == "permuted":
            values[col] = raw == "true"
        elif raw == "" and col in _OPTIONAL_COLUMNS:
            values[col] = None
        else:
            values[col] = float(raw)
    return ExperimentRecord(**values)


def read_csv(source):
    """Parse a CSV produced by :func:`emit_csv` back into records."""
    try:
        if hasattr(source, "read"):
            rows = list(csv.DictReader(source))
        else:
            with open(source, newline="") as fh:
                rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"cannot read CSV {source}: {exc}") from exc
    try:
        return [_parse_row(row) for row in rows]
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"malformed grid CSV {source}: {exc}") from exc


def write_permutations(records, path):
    """One JSON line per permuted cell: seed, dimension and the permutation."""
    with open(path, "w") as fh:
        for r in records:
            if r.permutation is not None:
                fh.write(json.dumps({"cell_seed": r.cell_seed, "d": r.d, "s": r.s,
                                     "p": r.p, "c": r.c,
                                     "permutation": list(r.permutation)}) + "\n")


_PLAIN_S = (1, 2, 4, 8)
_LARGE_S = (8, 16, 32, 64, 128)
_PLAIN_D = (16, 32, 64, 128, 256, 512)
_LARGE_D = (128, 256, 512, 1024)

# Reconstructed scenarios; the d- and s-grids are choices, not published values.
PRESETS = {
    "fig1": dict(c_values=(0.0,), s_values=_PLAIN_S, d_values=_PLAIN_D, permute=False),
    "fig2": dict(c_values=(0.5,), s_values=_PLAIN_S, d_values=_PLAIN_D, permute=False),
    "fig3": dict(c_values=(0.9,), s_values=_PLAIN_S, d_values=_PLAIN_D, permute=False),
    "fig4": dict(c_values=(0.9,), s_values=_LARGE_S, d_values=_LARGE_D, permute=False),
    "fig5": dict(c_values=(0.0,), s_values=_PLAIN_S, d_values=_PLAIN_D, permute=True),
    "fig6": dict(c_values=(0.5,), s_values=_PLAIN_S, d_values=_PLAIN_D, permute=True),
    "fig7": dict(c_values=(0.9,), s_values=_PLAIN_S, d_values=_PLAIN_D, permute=True),
    "fig8": dict(c_values=(0.9,), s_values=_LARGE_S, d_values=_LARGE_D, permute=True),
}


def preset_config(name, **overrides):
    try:
        base = dict(PRESETS[name])
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    base.update({k: v for k, v in overrides.items() if v is not None})
    return GridConfig(**base)

