"""Mean-excess plot diagnostics for extreme value analysis."""

from .converse import (
    AuxiliaryFunction,
    KaramataReport,
    RegimeEstimate,
    auxiliary_from_f,
    classify_regime,
    endpoint_statistic_weibull,
    gamma_from_xi,
    gumbel_statistic,
    h_frechet,
    h_gumbel,
    h_weibull,
    hall_wellner_gap,
    karamata_oracle,
    renyi_expectation,
    slope_statistic_frechet,
    v_statistic_frechet,
    xi_from_gamma,
    z_statistic_weibull,
)
from .distributions import (
    DistributionModel,
    GpdParams,
    ThresholdPolicy,
    auto_k,
    beta_tail_model,
    exponential_model,
    gpd_cdf,
    gpd_model,
    gpd_quantile,
    gpd_tail,
    lognormal_model,
    me_closed_form,
    me_numeric,
    pareto_model,
    parse_model_spec,
    sample,
    uniform_model,
)
from .empirical import (
    MePlotPoints,
    ScaledSet,
    SortedSample,
    empirical_me,
    extract_min_x_concomitant,
    me_plot,
    scaled_set,
)
from .geometry import (
    LimitSet,
    Window,
    hausdorff_points,
    hausdorff_windowed,
    limit_set,
    point_to_limit_distance,
)
from .harness import (
    ConvergenceReport,
    ExperimentSpec,
    exceedance_curve,
    load_experiment_config,
    run_experiment,
)

__version__ = "0.1.0"
