"""Moment-type estimators for weighted, length-biased and excess-life data.

Every estimator here is an average over the sample of

    c(Y_i) * h(Y_i),   h(y) = (a/x)^a y^(a-1) exp(-a y / x) / Gamma(a),

the gamma delta kernel with shape ``a`` centred at ``x``, times a
per-observation coefficient:

=================  ==============================
estimator          c(Y)
=================  ==============================
basic density      W (a-1)/a / w(Y)
star density       W / Y   (length-biased only)
survival           W
direct density     (a-1)/a
=================  ==============================

The sum runs over the sample in a fixed order and in fixed-size blocks, so
memory stays at O(grid block * sample block) and a point's value does not
depend on which grid it was evaluated on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .models import DIRECT, EXCESS_LIFE, LENGTH_BIASED, Sample, direct_model
from .special_math import stirling_correction

__all__ = [
    "MomentEstimate",
    "EstimateCurve",
    "ExcessPlugins",
    "estimate_total_weight",
    "empirical_moment",
    "moment_density_basic",
    "moment_density_star",
    "survival_estimate",
    "direct_density",
    "direct_density_derivative",
    "excess_plugins",
    "default_g0_point",
]

_SAMPLE_BLOCK = 4096
_GRID_BLOCK = 128


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    value: float
    weight_used: float


@dataclass(frozen=True)
class EstimateCurve:
    """Pointwise estimates on an increasing grid of positive points."""

    grid: np.ndarray
    values: np.ndarray
    alphas: np.ndarray
    estimator_id: str

    def __post_init__(self):
        grid = np.asarray(self.grid, float)
        values = np.asarray(self.values, float)
        alphas = np.broadcast_to(np.asarray(self.alphas, float), grid.shape).copy()
        if grid.ndim != 1 or values.shape != grid.shape:
            raise DomainError("grid and values must be 1-D of equal length")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing and positive")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "alphas", alphas)


@dataclass(frozen=True)
class ExcessPlugins:
    """Plug-in estimates for the excess-life model at one point.

    ``w_hat`` is ``None`` where the derivative estimate vanishes.
    """

    f_hat: float
    hazard_hat: float
    w_hat: Optional[float]
    W_hat: float


def _as_sample(sample):
    return sample if isinstance(sample, Sample) else Sample(np.asarray(sample, float))


def _points(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} must be finite and > 0")
    return arr


def _check_alpha(alpha, minimum):
    alpha = float(alpha)
    if not alpha >= minimum or not math.isfinite(alpha):
        raise DomainError(f"alpha must be >= {minimum:g}, got {alpha!r}")
    return alpha


def _resolve_weight(model, weight):
    if weight is None:
        return model.require_total_weight()
    weight = float(weight)
    if not weight > 0:
        raise DomainError(f"weight must be positive, got {weight!r}")
    return weight


def _inverse_weights(sample, model):
    w = np.asarray(model.w(sample.values), dtype=float)
    w = np.broadcast_to(w, sample.values.shape)
    if np.any(~(w > 0)):
        raise DomainError("the weight function vanishes at an observation")
    return 1.0 / w


def _kernel_sum(values, coefs, x, alpha):
    """(1/n) sum_i coefs[i] * h_{alpha,x,1}(values[i]) for each x.

    The kernel log-density is the saddle-point form of the gamma density
    with shape ``alpha`` and rate ``alpha/x`` evaluated at ``y``:
    ``ln(a/x) - ln r + a (ln r + 1 - r) - ln sqrt(2 pi a) - d(a)``,
    ``r = y/x``.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    n = values.size
    const = -0.5 * math.log(2.0 * math.pi * alpha) - stirling_correction(alpha)
    out = np.empty(flat.size)
    for g0 in range(0, flat.size, _GRID_BLOCK):
        xb = flat[g0 : g0 + _GRID_BLOCK, None]
        log_rate = np.log(alpha / xb)
        acc = np.zeros(xb.shape[0])
        for s0 in range(0, n, _SAMPLE_BLOCK):
            y = values[None, s0 : s0 + _SAMPLE_BLOCK]
            c = coefs[None, s0 : s0 + _SAMPLE_BLOCK]
            e = (y - xb) / xb
            lr = np.log1p(e)
            logh = log_rate - lr + alpha * (lr - e) + const
            acc += np.sum(c * np.exp(logh), axis=1)
        out[g0 : g0 + xb.shape[0]] = acc / n
    return out.reshape(x.shape) if x.ndim else float(out[0])


def estimate_total_weight(sample, model):
    """Harmonic-type estimate ``W_hat = (mean of 1/w(Y_j))^-1``."""
    sample = _as_sample(sample)
    if model.kind == DIRECT:
        return 1.0
    inv = _inverse_weights(sample, model)
    return 1.0 / float(np.mean(inv))


def empirical_moment(sample, model, k, weight):
    """Unbiased moment estimate ``(W/n) sum Y_i^k / w(Y_i)`` of the target."""
    if int(k) != k or k < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {k!r}")
    sample = _as_sample(sample)
    weight = _resolve_weight(model, weight)
    inv = _inverse_weights(sample, model)
    value = weight * float(np.mean(sample.values ** int(k) * inv))
    return MomentEstimate(int(k), value, weight)


def moment_density_basic(sample, model, weight, alpha, x):
    """Moment-density estimate of ``f`` for a general weighted model.

    ``(W/n) sum (1/w(Y_i)) (a-1)/(x Gamma(a)) (a Y_i/x)^(a-1) exp(-a Y_i/x)``.
    Requires ``alpha >= 2``; ``weight`` is ``W`` or an estimate of it, and
    ``None`` uses the model's known total weight.
    """
    sample = _as_sample(sample)
    alpha = _check_alpha(alpha, 2.0)
    x = _points(x)
    weight = _resolve_weight(model, weight)
    coefs = weight * (alpha - 1.0) / alpha * _inverse_weights(sample, model)
    return _kernel_sum(sample.values, coefs, x, alpha)


def moment_density_star(sample, model, weight, alpha, x):
    """Length-biased moment-density estimate ``(1/n) sum W/Y_i * h(Y_i)``.

    This is the modified estimator with the ``alpha`` factor in place of
    ``alpha - 1``; its summands have mean ``int h f`` exactly.
    """
    if model.kind != LENGTH_BIASED:
        raise ConfigurationError(
            f"the star estimator needs a length-biased model, got {model.kind}"
        )
    sample = _as_sample(sample)
    alpha = _check_alpha(alpha, 1.0)
    x = _points(x)
    weight = _resolve_weight(model, weight)
    coefs = weight / sample.values
    return _kernel_sum(sample.values, coefs, x, alpha)


def survival_estimate(sample, model, weight, alpha, x):
    """Excess-life survival estimate ``(1/n) sum W * h(Y_i)``.

    Written out, each summand is ``(W/Y_i) (a Y_i/x)^a exp(-a Y_i/x) / Gamma(a)``.
    The result is not clamped to ``[0, 1]``.
    """
    if model.kind not in (EXCESS_LIFE,):
        raise ConfigurationError(
            f"the survival estimator needs an excess-life model, got {model.kind}"
        )
    sample = _as_sample(sample)
    alpha = _check_alpha(alpha, 1.0)
    x = _points(x)
    weight = _resolve_weight(model, weight)
    coefs = np.full(sample.n, weight)
    return _kernel_sum(sample.values, coefs, x, alpha)


def direct_density(sample, alpha, y):
    """Moment-density estimate of the sampled density itself (``w = W = 1``)."""
    return moment_density_basic(sample, direct_model(), 1.0, alpha, _points(y, "y"))


def direct_density_derivative(sample, alpha, y):
    """Analytic derivative in ``y`` of :func:`direct_density`.

    Each summand ``T_i(y)`` is proportional to ``y^-a exp(-a Y_i/y)``, so
    ``T_i'(y) = T_i(y) * (a Y_i/y^2 - a/y)``.
    """
    sample = _as_sample(sample)
    alpha = _check_alpha(alpha, 2.0)
    y = _points(y, "y")
    base = (alpha - 1.0) / alpha
    flat = np.atleast_1d(y).ravel()
    out = np.empty(flat.size)
    for j, yj in enumerate(flat):
        coefs = base * alpha * (sample.values - yj) / (yj * yj)
        out[j] = _kernel_sum(sample.values, coefs, yj, alpha)
    return out.reshape(y.shape) if y.ndim else float(out[0])


def default_g0_point(sample):
    """Surrogate for ``0`` in ``W_hat = 1/g_hat(0)``: 5% of the sample median."""
    sample = _as_sample(sample)
    return 0.05 * float(np.median(sample.values))


def excess_plugins(sample, alpha, y, g0_point=None):
    """Excess-life plug-ins built from the direct estimate of ``g``.

    Returns ``W_hat = 1/g_hat(g0)``, ``f_hat = -g_hat'(y) W_hat``,
    ``hazard_hat = -g_hat'(y)/g_hat(y)`` and ``w_hat = 1/hazard_hat``.
    ``g_hat`` is singular at zero, so ``g0_point`` stands in for the origin
    (default :func:`default_g0_point`).
    """
    sample = _as_sample(sample)
    y = float(_points(y, "y"))
    g0_point = default_g0_point(sample) if g0_point is None else float(_points(g0_point, "g0_point"))
    g0 = direct_density(sample, alpha, g0_point)
    gy = direct_density(sample, alpha, y)
    if not g0 > 0:
        raise DomainError(f"g_hat vanishes at the origin surrogate {g0_point}")
    if not gy > 0:
        raise DomainError(f"g_hat vanishes at y = {y}")
    dg = direct_density_derivative(sample, alpha, y)
    W_hat = 1.0 / g0
    hazard = -dg / gy
    w_hat = None if dg == 0 else 1.0 / hazard
    return ExcessPlugins(f_hat=-dg * W_hat, hazard_hat=hazard, w_hat=w_hat, W_hat=W_hat)

