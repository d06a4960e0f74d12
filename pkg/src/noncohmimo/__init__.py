"""Generalized degrees of freedom and achievable rates of noncoherent
block-fading MIMO channels with asymmetric link-strength exponents."""

__version__ = "0.1.0"

from .channel import (
    ChannelConfig,
    ChannelDraw,
    LinkExponents,
    XiStats,
    link_strengths,
    power_check,
    sample_channel,
    xi_stats,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EstimationError,
    InsufficientSamplesError,
    SingularMatrixError,
)
from .gdof import (
    CornerPolytope,
    GdofSolution,
    MaxAffine,
    f_gamma,
    gdof_2x2_inner,
    gdof_2x2_sym,
    gdof_gaussian_codebook,
    gdof_miso,
    gdof_parallel,
    gdof_simo,
    gdof_siso,
    gdof_training,
    solve_p8_grid,
    solve_p9_corners,
)
from .numerics import (
    LqFactors,
    MonteCarloConfig,
    MonteCarloEstimate,
    digamma,
    elog_one_plus_exponential,
    entropy_1d_spacing,
    exp_e1,
    log_gamma,
    lq_decompose,
    mc_expectation,
    sample_complex_gaussian,
    sample_isotropic_unitary,
    substream,
)
from .rates import (
    RateReport,
    RateScenario,
    compare_rates,
    mi_lower_bound_gaussian,
    rate_noncoherent_t2,
    rate_parallel_training,
    rate_siso_training,
)
from .verify import (
    DEFAULT_GRID,
    BoundCheckResult,
    check_appendix_k_floor,
    check_fact_chi_squared,
    check_fact_jensen_gap,
    check_fact_recip_exponential,
    check_inner_outer_match,
    check_lemma_isotropic_radial,
    check_lq_norm_preservation,
    run_default_suite,
)
