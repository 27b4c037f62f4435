"""Window Monte Carlo conditional expectations and equivariant estimation of
the general half-normal distribution."""

from .condexp import (
    ArraySource,
    BallQuery,
    BivariateNormalSource,
    CondExpEstimate,
    IterableSource,
    TrigSource,
    epsilon_refinement,
    estimate_fixed_k,
    estimate_until_hits,
)
from .distributions import (
    BivariateNormalParams,
    HalfNormalParams,
    RandomStream,
    half_normal_moments,
    half_normal_pdf,
    sample_bivariate_normal,
    sample_half_normal,
    sample_std_normal,
)
from .errors import (
    BesimcError,
    DegenerateCloud,
    DegenerateSample,
    DomainError,
    MembershipViolation,
    NoHits,
    QuadratureError,
    SupportViolation,
    Underfilled,
)
from .estimators import HalfNormalEstimator, WindowConditionalExpectation
from .hn_estimators import (
    CnValue,
    Sample,
    c_n_mc,
    c_n_quadrature,
    mle_location,
    mle_scale,
    mre_scale,
    mre_scale_known_location,
    mre_scale_oracle,
    mvue_scale_known_location,
    pitman_location_known_scale,
    pitman_location_oracle,
    unbiased_location,
    unbiased_scale,
    unbiased_scale_sq,
)
from .mre_location import (
    ConstrainedSample,
    MreLocationConfig,
    UStatistic,
    constrained_sampler,
    mre_location,
    rho_estimate,
    t0_star,
    t1_star,
    u_statistic,
)

__version__ = "0.1.0"
