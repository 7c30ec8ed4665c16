"""Scenario samplers, exact-moment oracles and Monte Carlo experiments.

Replicate ``r`` at sample size ``n`` draws from its own generator seeded by
``SeedSequence([root_seed, n, r])``; results land in a pre-indexed array and
are reduced in a fixed order, so a configuration always reproduces the same
numbers bit for bit, serial or threaded.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import theory
from .baseline import bandwidth_rule
from .errors import ConfigurationError, DomainError, NumericError
from .models import EXCESS_LIFE, LENGTH_BIASED, Sample, builtin_scenario
from .registry import evaluate, get_estimator, predicted_mse, resolve_weight, truth
from .smoothing import AlphaRule
from .special_math import DeltaKernel, GammaKernel, integrate

__all__ = [
    "sample_scenario",
    "exact_estimator_moments",
    "exact_mean_variance",
    "McConfig",
    "McCell",
    "McResult",
    "run_mc",
    "RateFit",
    "rate_fit",
    "ks_distance",
    "NormalityResult",
    "standardized_replicates",
    "normality_experiment",
    "CENTERINGS",
    "SCALINGS",
]

CENTERINGS = ("exact-mean", "true-value")
SCALINGS = ("exact-variance", "theory-variance", "rate-only")
MIN_NORMALITY_REPLICATES = 100


def _rng(seed):
    if isinstance(seed, (np.random.SeedSequence, np.random.Generator)):
        return np.random.default_rng(seed)
    if isinstance(seed, (tuple, list)):
        return np.random.default_rng(np.random.SeedSequence([int(s) for s in seed]))
    return np.random.default_rng(seed)


def sample_scenario(name, n, seed):
    """Draw ``n`` observations of a built-in scenario's sampled variable.

    ``lb-exp2`` draws G(2, 1/2); ``excess-gamma22`` draws the fair mixture of
    G(1, 2) and G(2, 2), which has density ``S/4`` for ``F = G(2, 2)``.
    """
    builtin_scenario(name)
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    rng = _rng(seed)
    if name == "lb-exp2":
        values = rng.gamma(2.0, 0.5, size=int(n))
    else:
        shapes = np.where(rng.random(int(n)) < 0.5, 1.0, 2.0)
        values = rng.gamma(shapes, 2.0)
    # gamma variates are positive with probability one; guard the zero underflow
    values = np.maximum(values, np.finfo(float).tiny)
    return Sample(values, provenance=(name, seed))


def _target_of(model):
    if model.kind == LENGTH_BIASED:
        return "density"
    if model.kind == EXCESS_LIFE:
        return "survival"
    raise ConfigurationError(f"no exact-moment oracle for the {model.kind} model")


def exact_estimator_moments(scenario, model, x, alpha, k, spec=None):
    """``E M^k`` (length-biased star summand) or ``E L^k`` (survival summand).

    Computed as a log-gamma prefactor times a quadrature of ``f`` (or ``S``)
    against the matching gamma kernel.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    target = _target_of(model)
    W = model.require_total_weight()
    alpha, x = float(alpha), float(x)
    log_c = theory.log_moment_prefactor(alpha, x, W, k, target)
    if target == "density":
        kernel = DeltaKernel(alpha, x, k)
        fn = scenario.f
    else:
        kernel = GammaKernel(k * (alpha - 1.0) + 1.0, k * alpha / x)
        fn = scenario.sf
    return math.exp(log_c) * integrate(lambda u: fn(u), kernel, spec)


def exact_mean_variance(scenario, model, x, alpha, n, spec=None):
    """Exact mean and variance of the estimator built from ``n`` observations."""
    m1 = exact_estimator_moments(scenario, model, x, alpha, 1, spec)
    m2 = exact_estimator_moments(scenario, model, x, alpha, 2, spec)
    return m1, (m2 - m1 * m1) / n


def _replicate_seed(root_seed, n, r):
    return np.random.SeedSequence([int(root_seed), int(n), int(r)])


@dataclass(frozen=True)
class McConfig:
    scenario: str
    estimator: str
    n_grid: Sequence[int]
    replicates: int
    x_points: Sequence[float]
    alpha_rule: AlphaRule = field(default_factory=AlphaRule.global_rate)
    root_seed: int = 0
    weight: str = "known"
    bandwidth_exp: float = 0.2
    keep_replicates: bool = False
    workers: int = 1

    def __post_init__(self):
        ns = [int(n) for n in self.n_grid]
        if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigurationError("n_grid must be a nonempty ascending list of positive sizes")
        if int(self.replicates) < 2:
            raise ConfigurationError("at least two replicates are required")
        xs = [float(x) for x in self.x_points]
        if not xs or any(not x > 0 for x in xs):
            raise ConfigurationError("x_points must be nonempty and positive")
        if not 0 <= int(self.root_seed) < 2**64:
            raise ConfigurationError("root_seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "n_grid", tuple(ns))
        object.__setattr__(self, "x_points", tuple(xs))
        object.__setattr__(self, "replicates", int(self.replicates))


@dataclass(frozen=True)
class McCell:
    n: int
    x: float
    alpha: float
    truth: float
    mean: float
    bias: float
    variance: float
    mse: float
    bias_se: float
    mse_se: float
    predicted_mse: float


@dataclass
class McResult:
    config: McConfig
    cells: list
    replicate_values: Optional[dict] = None

    def cell(self, n, x):
        for c in self.cells:
            if c.n == n and c.x == x:
                return c
        raise KeyError((n, x))

    def mse_curve(self, x):
        cells = [c for c in self.cells if c.x == x]
        return [c.n for c in cells], [c.mse for c in cells]


def _aggregate(values, truth_value):
    """Fixed-order moments of one column of replicate values."""
    R = values.size
    mean = float(np.mean(values))
    dev = values - mean
    variance = float(np.mean(dev * dev))
    err2 = (values - truth_value) ** 2
    mse = float(np.mean(err2))
    bias_se = math.sqrt(variance / R)
    mse_se = float(np.std(err2)) / math.sqrt(R)
    return mean, float(mean - truth_value), variance, mse, bias_se, mse_se


def run_mc(config):
    """Run the Monte Carlo experiment described by ``config``."""
    scenario, model = builtin_scenario(config.scenario)
    info = get_estimator(config.estimator, model)
    xs = np.asarray(config.x_points)
    truths = truth(info, scenario, model, xs)
    R = config.replicates
    cells = []
    kept = {} if config.keep_replicates else None
    for n in config.n_grid:
        alphas = np.array(
            [config.alpha_rule.resolve(n, x, scenario, scenario.W) for x in xs]
        )
        if info.kernel == "gamma":
            min_alpha = 2.0 if info.name in ("basic", "direct") else 1.0
            if np.any(alphas < min_alpha):
                raise ConfigurationError(f"{info.name} needs alpha >= {min_alpha:g}")
        h = bandwidth_rule(n, config.bandwidth_exp) if info.kernel == "gaussian" else None
        table = np.empty((R, xs.size))

        def one(r, n=n, alphas=alphas, h=h):
            sample = sample_scenario(config.scenario, n, _replicate_seed(config.root_seed, n, r))
            weight = resolve_weight(info, sample, model, config.weight)
            table[r] = evaluate(info, sample, model, weight, alphas, xs, h)

        if config.workers > 1:
            with ThreadPoolExecutor(config.workers) as pool:
                list(pool.map(one, range(R)))
        else:
            for r in range(R):
                one(r)
        if not np.all(np.isfinite(table)):
            raise NumericError("non-finite estimator values in Monte Carlo run", n=n)
        for j, x in enumerate(xs):
            mean, bias, var, mse, bias_se, mse_se = _aggregate(table[:, j], truths[j])
            pred = predicted_mse(info, scenario, scenario.W, x, alphas[j], n, h)
            cells.append(
                McCell(int(n), float(x), float(alphas[j]), float(truths[j]),
                       mean, bias, var, mse, bias_se, mse_se, float(pred))
            )
        if kept is not None:
            kept[int(n)] = table
    return McResult(config, cells, kept)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r2: float


def rate_fit(ns, mses):
    """Least-squares line through ``(log n, log mse)``."""
    ns = np.asarray(ns, dtype=float)
    mses = np.asarray(mses, dtype=float)
    if ns.shape != mses.shape or ns.ndim != 1 or ns.size < 3:
        raise DomainError("rate_fit needs two equal-length sequences of at least 3 values")
    if np.any(~(ns > 0)) or np.any(~(mses > 0)):
        raise DomainError("rate_fit needs strictly positive inputs")
    lx, ly = np.log(ns), np.log(mses)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    if ss_tot == 0.0:
        slope = 0.0
    return RateFit(float(slope), float(intercept), r2)


def ks_distance(values):
    """One-sample Kolmogorov-Smirnov distance to the standard normal cdf."""
    values = np.asarray(values, dtype=float)
    return float(stats.kstest(values, "norm").statistic)


@dataclass(frozen=True)
class NormalityResult:
    ks_distance: float
    replicate_count: int
    mean: float
    std: float


def _single_cell(config):
    if len(config.n_grid) != 1 or len(config.x_points) != 1:
        raise ConfigurationError("normality experiments take exactly one n and one x")
    if config.replicates < MIN_NORMALITY_REPLICATES:
        raise ConfigurationError(
            f"normality experiments need at least {MIN_NORMALITY_REPLICATES} replicates"
        )


def standardized_replicates(config, centering="exact-mean", scaling="exact-variance",
                            subtract_limit_mean=False):
    """Replicate values of a star or survival estimator, centred and scaled.

    ``exact-mean`` centres at the exact estimator mean, ``true-value`` at
    the target. ``exact-variance`` divides by the exact standard deviation;
    ``theory-variance`` multiplies by ``sqrt(n) alpha^(-1/4)`` and divides
    by the limiting standard deviation; ``rate-only`` applies the
    multiplication alone. ``subtract_limit_mean`` removes the predicted
    non-zero limit mean (theory scalings only).
    """
    _single_cell(config)
    if centering not in CENTERINGS:
        raise ConfigurationError(f"centering must be one of {CENTERINGS}")
    if scaling not in SCALINGS:
        raise ConfigurationError(f"scaling must be one of {SCALINGS}")
    if config.estimator not in ("star", "survival"):
        raise ConfigurationError("normality experiments support the star and survival estimators")
    if config.weight != "known":
        raise ConfigurationError("normality experiments use the known total weight")
    if subtract_limit_mean and scaling == "exact-variance":
        raise ConfigurationError("the limit mean is defined on the theory scale only")
    cfg = McConfig(**{**config.__dict__, "keep_replicates": True})
    result = run_mc(cfg)
    cell = result.cells[0]
    n, x, alpha = cell.n, cell.x, cell.alpha
    values = result.replicate_values[n][:, 0]
    scenario, model = builtin_scenario(config.scenario)
    W = scenario.W
    if config.estimator == "star":
        report = theory.density_asymptotics(scenario, W, x, alpha, n)
    else:
        report = theory.survival_asymptotics(scenario, W, x, alpha, n)
    need_exact = centering == "exact-mean" or scaling == "exact-variance"
    if need_exact:
        exact_mean, exact_var = exact_mean_variance(scenario, model, x, alpha, n)
    center = exact_mean if centering == "exact-mean" else cell.truth
    dev = values - center
    if scaling == "exact-variance":
        return dev / math.sqrt(exact_var)
    z = math.sqrt(n) * alpha**-0.25 * dev
    shift = report.normal_mean if subtract_limit_mean else 0.0
    if scaling == "theory-variance":
        return (z - shift) / math.sqrt(report.normal_variance)
    return z - shift


def normality_experiment(config, centering="exact-mean", scaling="exact-variance",
                         subtract_limit_mean=False):
    """KS distance of the standardized replicates from ``Normal(0, 1)``."""
    z = standardized_replicates(config, centering, scaling, subtract_limit_mean)
    return NormalityResult(ks_distance(z), int(z.size), float(np.mean(z)), float(np.std(z)))
