"""Moment bounds and distributional verification for sums of mixing random fields.

The package computes explicit L^p moment bounds for normalized partial sums of
dependent random fields (strong and superstrong mixing), discretizes the
function-space norms on quadrature grids, simulates the fields with
reproducible seeded streams, samples the Gaussian limit law, and verifies both
the bounds and the central limit behavior statistically.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    KuCheck,
    TailReport,
    UtevConstant,
    VOptimum,
    chebyshev_tail,
    effective_even_order,
    ku_check,
    ku_constant,
    ku_crossover,
    lp_moment_bound,
    nachapetyan_bound,
    nachapetyan_k,
    normed_sum_bound,
    optimize_over_v,
    sum_bound,
    utev_a,
    with_y_value,
    z_value,
)
from .discretize import GridSpace, custom_grid, grid_from_config, lp_norm, lp_norms, uniform_grid
from .fieldgen import (
    Ar1,
    FieldSpec,
    IidNormal,
    IidRademacher,
    MaQ,
    abs_normal_moment,
    ar1_unit_marginal,
    basis_matrix,
    field_from_config,
    long_run_covariance,
    sample_sequence,
    sup_v_norm,
)
from .limitlaw import (
    DegenerateCovarianceError,
    LimitField,
    factorize_covariance,
    limit_covariance,
    sample_limit_norms,
)
from .mixing import (
    ALPHA_CAP,
    Explicit,
    Geometric,
    MDependent,
    MixingProfile,
    Polynomial,
    profile_for_driver,
    profile_from_dict,
    profile_to_dict,
    series_converges,
    series_converges_beta,
    value_at,
)
from .montecarlo import (
    MomentEstimate,
    default_n_schedule,
    empirical_cov,
    estimate_moment,
    replicate_norms,
    simulate_sn,
    summarize_norm_powers,
    write_norms_csv,
)
from .rng import seed_path, stream
from .verify import (
    BoundVerdict,
    CltSummary,
    CltVerdict,
    KsResult,
    ProjectionCheck,
    ks_two_sample,
    projection_variance_check,
    verify_clt,
    verify_moment_bound,
    verify_superstrong,
)

__all__ = [
    "__version__",
    "ALPHA_CAP",
    "Ar1",
    "BoundReport",
    "BoundVerdict",
    "CltSummary",
    "CltVerdict",
    "DegenerateCovarianceError",
    "Explicit",
    "FieldSpec",
    "Geometric",
    "GridSpace",
    "IidNormal",
    "IidRademacher",
    "KsResult",
    "KuCheck",
    "LimitField",
    "MaQ",
    "MDependent",
    "MixingProfile",
    "MomentEstimate",
    "Polynomial",
    "ProjectionCheck",
    "TailReport",
    "UtevConstant",
    "VOptimum",
    "abs_normal_moment",
    "ar1_unit_marginal",
    "basis_matrix",
    "chebyshev_tail",
    "custom_grid",
    "default_n_schedule",
    "effective_even_order",
    "empirical_cov",
    "estimate_moment",
    "factorize_covariance",
    "field_from_config",
    "grid_from_config",
    "ks_two_sample",
    "ku_check",
    "ku_constant",
    "ku_crossover",
    "limit_covariance",
    "long_run_covariance",
    "lp_moment_bound",
    "lp_norm",
    "lp_norms",
    "nachapetyan_bound",
    "nachapetyan_k",
    "normed_sum_bound",
    "optimize_over_v",
    "profile_for_driver",
    "profile_from_dict",
    "profile_to_dict",
    "projection_variance_check",
    "replicate_norms",
    "sample_limit_norms",
    "sample_sequence",
    "seed_path",
    "series_converges",
    "series_converges_beta",
    "simulate_sn",
    "stream",
    "sum_bound",
    "summarize_norm_powers",
    "sup_v_norm",
    "uniform_grid",
    "utev_a",
    "value_at",
    "verify_clt",
    "verify_moment_bound",
    "verify_superstrong",
    "with_y_value",
    "write_norms_csv",
    "z_value",
]
