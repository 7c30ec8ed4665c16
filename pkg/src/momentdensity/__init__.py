"""Moment-type density and survival estimation for biased sampling models.

Data ``Y_1..Y_n`` come from the weighted density ``g = w f / W``; the
estimators recover ``f`` (or the survival function ``S`` under the
excess-life model) by averaging gamma delta kernels centred at ``x`` with
smoothing parameter ``alpha``.
"""

from . import baseline, simulation, theory
from .baseline import KernelSpec, bandwidth_rule, jones_density, jones_survival
from .errors import (
    ConfigurationError,
    DegenerateCurvatureError,
    DomainError,
    MomentDensityError,
    NumericError,
    StateError,
)
from .estimators import (
    EstimateCurve,
    ExcessPlugins,
    MomentEstimate,
    default_g0_point,
    direct_density,
    direct_density_derivative,
    empirical_moment,
    estimate_total_weight,
    excess_plugins,
    moment_density_basic,
    moment_density_star,
    survival_estimate,
)
from .models import (
    Sample,
    TruthScenario,
    WeightedModel,
    builtin_scenario,
    custom_model,
    direct_model,
    excess_life_model,
    length_biased_model,
    observed_density,
    scenario_names,
)
from .simulation import McConfig, run_mc, sample_scenario
from .smoothing import (
    MSE_OPTIMAL_DELTA,
    AlphaRule,
    alpha_global,
    alpha_local_density,
    alpha_local_survival,
    parse_alpha_rule,
)
from .special_math import (
    DeltaKernel,
    GammaKernel,
    QuadratureSpec,
    delta_density,
    delta_stats,
    gamma_logpdf,
    gamma_pdf,
    integrate,
    log_gamma,
    stirling_correction,
)
from .theory import (
    AsymptoticReport,
    MseOptimal,
    density_asymptotics,
    density_mse_optimal,
    jones_mse,
    local_mse_discrepancy,
    survival_asymptotics,
    survival_mse_optimal,
)

__version__ = "0.1.0"
