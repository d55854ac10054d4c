"""Block-lp confidence regions for high-dimensional Gaussian vectors.

Monte Carlo radii, closed-form log-volumes and the grid experiments that
compare block-lp regions with the simultaneous hypercube.
"""
from .bounds import (
    TheoremRegime, expectation_upper_bound, minimal_sparsity, ratio_root_bound,
)
from .covariance import (
    CovarianceModel, explicit_model, materialize, one_norm_eigen_bound, permuted,
    toeplitz_model,
)
from .exceptions import (
    ConfigurationError, ConvergenceError, DivisibilityError, DomainError, HDConfError,
    NotFoundError, NotSPDError, SizeError,
)
from .experiment import (
    ExperimentRecord, GridConfig, emit_csv, fit_slope, linear_fit, read_csv, run_cell,
    run_grid,
)
from .numerics import cholesky_lower, ln_gamma, power_iteration_lambda_max
from .quantiles import (
    BlockNormRegion, QuantileSpec, StatisticBatch, empirical_quantile,
    estimate_region_radius, fit_regions, quantile_standard_error, quantile_upper_bound,
)
from .regions import (
    INFINITY, BlockPartition, RegionSpec, block_partition, contains, log_volume,
    log_volume_block_lp, log_volume_cube, log_volume_ratio, max_block_norm,
)
from .sampling import (
    SampleStreamConfig, iter_batches, mix_seed, sample_ar1_vector, sample_batches,
    standard_normal_stream, splitmix64,
)

__version__ = "0.1.0"
