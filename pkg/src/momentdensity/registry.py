"""Named estimators shared by the simulation harness and the command line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import baseline, estimators, theory
from .errors import ConfigurationError
from .models import DIRECT, EXCESS_LIFE, LENGTH_BIASED, observed_density
from .smoothing import alpha_global

__all__ = [
    "EstimatorInfo",
    "ESTIMATORS",
    "get_estimator",
    "resolve_weight",
    "evaluate",
    "truth",
    "predicted_mse",
    "WEIGHT_MODES",
]

WEIGHT_MODES = ("known", "plugin")


@dataclass(frozen=True)
class EstimatorInfo:
    name: str
    target: str  # density | survival | observed
    model_kind: str  # required model kind, or "any"
    kernel: str  # gamma | gaussian
    compute: Callable


def _star(sample, model, weight, alpha, x, h):
    return estimators.moment_density_star(sample, model, weight, alpha, x)


def _basic(sample, model, weight, alpha, x, h):
    return estimators.moment_density_basic(sample, model, weight, alpha, x)


def _survival(sample, model, weight, alpha, x, h):
    return estimators.survival_estimate(sample, model, weight, alpha, x)


def _direct(sample, model, weight, alpha, x, h):
    return estimators.direct_density(sample, alpha, x)


def _jones(sample, model, weight, alpha, x, h):
    return baseline.jones_density(sample, model, weight, baseline.KernelSpec(h), x)


def _jones_survival(sample, model, weight, alpha, x, h):
    return baseline.jones_survival(sample, model, weight, baseline.KernelSpec(h), x)


ESTIMATORS = {
    e.name: e
    for e in (
        EstimatorInfo("star", "density", LENGTH_BIASED, "gamma", _star),
        EstimatorInfo("basic", "density", "any", "gamma", _basic),
        EstimatorInfo("survival", "survival", EXCESS_LIFE, "gamma", _survival),
        EstimatorInfo("direct", "observed", "any", "gamma", _direct),
        EstimatorInfo("jones", "density", LENGTH_BIASED, "gaussian", _jones),
        EstimatorInfo("jones-survival", "survival", EXCESS_LIFE, "gaussian", _jones_survival),
    )
}


def get_estimator(name, model=None):
    try:
        info = ESTIMATORS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown estimator {name!r}; choose from {', '.join(ESTIMATORS)}"
        ) from None
    if model is not None and info.model_kind not in ("any", model.kind):
        raise ConfigurationError(
            f"estimator {name!r} needs a {info.model_kind} model, got {model.kind}"
        )
    return info


def resolve_weight(info, sample, model, mode):
    """Total weight used by an estimator: the model's ``W`` or a plug-in.

    The plug-in is the harmonic estimate for models with a known weight
    function and ``1/g_hat(g0)`` for the excess-life model.
    """
    if info.target == "observed" or model.kind == DIRECT:
        return 1.0
    if mode == "known":
        return model.require_total_weight()
    if mode != "plugin":
        raise ConfigurationError(f"weight mode must be one of {WEIGHT_MODES}, got {mode!r}")
    if model.kind == EXCESS_LIFE:
        alpha = alpha_global(sample.n)
        g0 = estimators.direct_density(sample, alpha, estimators.default_g0_point(sample))
        return 1.0 / g0
    return estimators.estimate_total_weight(sample, model)


def evaluate(info, sample, model, weight, alphas, xs, h=None):
    """Evaluate an estimator at points ``xs`` with per-point ``alphas``."""
    xs = np.asarray(xs, dtype=float)
    alphas = np.broadcast_to(np.asarray(alphas, dtype=float), xs.shape)
    if info.kernel == "gaussian":
        return np.asarray(info.compute(sample, model, weight, None, xs, h), dtype=float)
    out = np.empty(xs.shape)
    for a in np.unique(alphas):
        mask = alphas == a
        out[mask] = info.compute(sample, model, weight, float(a), xs[mask], h)
    return out


def truth(info, scenario, model, xs):
    if info.target == "density":
        return np.asarray(scenario.f(xs), dtype=float)
    if info.target == "survival":
        return np.asarray(scenario.sf(xs), dtype=float)
    return np.asarray(observed_density(scenario, model, xs), dtype=float)


def predicted_mse(info, scenario, W, x, alpha, n, h=None):
    """Leading-order MSE prediction, or NaN where no theory is available."""
    if info.name == "star":
        return theory.density_asymptotics(scenario, W, x, alpha, n).mse
    if info.name == "survival":
        return theory.survival_asymptotics(scenario, W, x, alpha, n).mse
    if info.name == "jones":
        return theory.jones_mse(scenario, W, x, h, n)
    return float("nan")
