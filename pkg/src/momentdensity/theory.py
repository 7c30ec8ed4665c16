"""Leading-order asymptotics of the star density and survival estimators.

All ``o(.)`` remainders are dropped: reported quantities are the closed-form
leading terms, meant to be compared with exact or simulated values through
ratio tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import DomainError
from .special_math import log_gamma

__all__ = [
    "AsymptoticReport",
    "MseOptimal",
    "density_asymptotics",
    "survival_asymptotics",
    "density_mse_optimal",
    "survival_mse_optimal",
    "local_mse_discrepancy",
    "jones_mse",
    "GAUSSIAN_ROUGHNESS",
    "GAUSSIAN_MU2",
    "RATE_EXPONENT",
    "log_moment_prefactor",
    "stirling_moment_prefactor",
    "density_second_moment_limit",
    "survival_second_moment_limit",
]

SQRT_PI = math.sqrt(math.pi)
RATE_EXPONENT = -0.8
GAUSSIAN_ROUGHNESS = 1.0 / (2.0 * SQRT_PI)
GAUSSIAN_MU2 = 1.0


@dataclass(frozen=True)
class AsymptoticReport:
    """Leading-order moments of an estimator at one point.

    ``normal_mean`` and ``normal_variance`` describe the limit law of
    ``sqrt(n) alpha^(-1/4) (estimate - truth)``; the mean is that scaling
    applied to the leading bias, so it vanishes under undersmoothing and
    equals ``+-sqrt(normal_variance)`` under the local MSE-balancing rule.
    """

    bias: float
    variance: float
    mse: float
    normal_mean: float
    normal_variance: float
    rate_exponent: float = RATE_EXPONENT


class MseOptimal(NamedTuple):
    """MSE predictions at the global ``alpha = n^(2/5)`` and local rules.

    ``local`` is ``None`` when the relevant derivative vanishes at ``x``.
    """

    global_alpha: float
    local: Optional[float]


def _check(x, alpha, n):
    if not x > 0:
        raise DomainError(f"x must be > 0, got {x!r}")
    if not alpha >= 1:
        raise DomainError(f"alpha must be >= 1, got {alpha!r}")
    if not n >= 1:
        raise DomainError(f"n must be >= 1, got {n!r}")


def _report(bias, variance, normal_variance, alpha, n):
    return AsymptoticReport(
        bias=bias,
        variance=variance,
        mse=variance + bias * bias,
        normal_mean=math.sqrt(n) * alpha**-0.25 * bias,
        normal_variance=normal_variance,
    )


def density_asymptotics(scenario, W, x, alpha, n):
    """Bias ``x^2 f''/(2 alpha)`` and variance ``W sqrt(alpha) f/(2 n sqrt(pi) x^2)``."""
    x, alpha = float(x), float(alpha)
    _check(x, alpha, n)
    fx = float(scenario.f(x))
    if not fx > 0:
        raise DomainError(f"f({x}) must be positive")
    d2 = float(scenario.require_d2f()(x))
    normal_variance = W * fx / (2.0 * x * x * SQRT_PI)
    bias = x * x * d2 / (2.0 * alpha)
    variance = math.sqrt(alpha) * normal_variance / n
    return _report(bias, variance, normal_variance, alpha, n)


def survival_asymptotics(scenario, W, x, alpha, n):
    """Bias ``-x^2 f'/(2 alpha)`` and variance ``W sqrt(alpha) S/(2 n sqrt(pi) x)``."""
    x, alpha = float(x), float(alpha)
    _check(x, alpha, n)
    sx = float(scenario.sf(x))
    if not sx > 0:
        raise DomainError(f"S({x}) must be positive")
    d1 = float(scenario.require_df()(x))
    normal_variance = W * sx / (2.0 * x * SQRT_PI)
    bias = -x * x * d1 / (2.0 * alpha)
    variance = math.sqrt(alpha) * normal_variance / n
    return _report(bias, variance, normal_variance, alpha, n)


def density_mse_optimal(scenario, W, x, n):
    """MSE at ``alpha = n^(2/5)`` and under the local rule, both ``O(n^-4/5)``."""
    x = float(x)
    fx = float(scenario.f(x))
    d2 = float(scenario.require_d2f()(x))
    rate = float(n) ** RATE_EXPONENT
    global_value = rate * (W * fx / (2.0 * SQRT_PI * x * x) + x**4 * d2 * d2 / 4.0)
    local = None
    if d2 != 0.0:
        local = rate * (W * W * abs(d2) * fx * fx / (math.pi * x * x * math.sqrt(2.0))) ** 0.4
    return MseOptimal(global_value, local)


def survival_mse_optimal(scenario, W, x, n):
    """Survival analogue of :func:`density_mse_optimal`."""
    x = float(x)
    sx = float(scenario.sf(x))
    d1 = float(scenario.require_df()(x))
    rate = float(n) ** RATE_EXPONENT
    global_value = rate * (W * sx / (2.0 * x * SQRT_PI) + x**4 * d1 * d1 / 4.0)
    local = None
    if d1 != 0.0:
        local = rate * (W * W * abs(d1) * sx * sx / (math.pi * math.sqrt(2.0))) ** 0.4
    return MseOptimal(global_value, local)


def local_mse_discrepancy(scenario, W, x, n, target="density"):
    """Relative gap between the closed-form local-rule MSE and the two-term
    MSE evaluated at the local ``alpha(x)``.

    Returns ``(closed_form, plugged, relative_gap)``; nothing is asserted.
    """
    from .smoothing import alpha_local_density, alpha_local_survival

    if target == "density":
        alpha = alpha_local_density(scenario, W, x, n)
        plugged = density_asymptotics(scenario, W, x, alpha, n).mse
        closed = density_mse_optimal(scenario, W, x, n).local
    elif target == "survival":
        alpha = alpha_local_survival(scenario, W, x, n)
        plugged = survival_asymptotics(scenario, W, x, alpha, n).mse
        closed = survival_mse_optimal(scenario, W, x, n).local
    else:
        raise DomainError(f"target must be 'density' or 'survival', got {target!r}")
    return closed, plugged, abs(closed - plugged) / plugged


def jones_mse(scenario, W, x, h, n, roughness=GAUSSIAN_ROUGHNESS, mu2=GAUSSIAN_MU2):
    """Leading MSE of the length-biased kernel estimator with bandwidth ``h``:
    ``W f R / (n h x) + h^4 f''^2 mu2^2 / 4``.

    ``roughness`` and ``mu2`` are the whole-line constants of the kernel
    (standard normal by default).
    """
    x, h = float(x), float(h)
    if not h > 0:
        raise DomainError(f"bandwidth must be positive, got {h!r}")
    fx = float(scenario.f(x))
    d2 = float(scenario.require_d2f()(x))
    variance = W * fx * roughness / (n * h * x)
    bias2 = 0.25 * h**4 * d2 * d2 * mu2 * mu2
    return variance + bias2


def log_moment_prefactor(alpha, x, W, k, target="density"):
    """Log of the constant ``c`` in ``E M^k = c * int kernel_k f``.

    For the density summand ``M = (W/Y) h_{alpha,x,1}(Y)`` under length
    bias the kernel is ``h_{alpha,x,k}`` (shape ``k(alpha-2)+2``) and

        c = W^(k-1) (alpha/x)^(2(k-1)) Gamma(k(alpha-2)+2) / Gamma(alpha)^k
            / k^(k(alpha-2)+2).

    For the survival summand ``L = W h_{alpha,x,1}(Y)`` under the excess
    model the kernel is gamma with shape ``k(alpha-1)+1`` and rate
    ``k alpha/x``, and

        c = W^(k-1) (alpha/x)^(k-1) Gamma(k(alpha-1)+1) / Gamma(alpha)^k
            / k^(k(alpha-1)+1).
    """
    alpha, x, W = float(alpha), float(x), float(W)
    if target == "density":
        shape = k * (alpha - 2.0) + 2.0
        power = 2.0 * (k - 1)
    elif target == "survival":
        shape = k * (alpha - 1.0) + 1.0
        power = float(k - 1)
    else:
        raise DomainError(f"target must be 'density' or 'survival', got {target!r}")
    if not shape > 0:
        raise DomainError(f"kernel shape {shape} must be positive (alpha={alpha}, k={k})")
    return (
        (k - 1) * math.log(W)
        + power * math.log(alpha / x)
        + log_gamma(shape)
        - k * log_gamma(alpha)
        - shape * math.log(k)
    )


def stirling_moment_prefactor(alpha, x, W, target="density"):
    """Large-``alpha`` limit of the ``k = 2`` prefactor:
    ``W sqrt(alpha)/(2 sqrt(pi) x^2)`` (density) or ``.../x`` (survival)."""
    base = W * math.sqrt(alpha) / (2.0 * SQRT_PI)
    if target == "density":
        return base / (x * x)
    if target == "survival":
        return base / x
    raise DomainError(f"target must be 'density' or 'survival', got {target!r}")


def density_second_moment_limit(scenario, W, x, alpha):
    """Stirling limit of ``E M^2``: ``W sqrt(alpha) f(x)/(2 sqrt(pi) x^2)``."""
    return stirling_moment_prefactor(alpha, x, W, "density") * float(scenario.f(x))


def survival_second_moment_limit(scenario, W, x, alpha):
    """Stirling limit of ``E L^2``: ``W sqrt(alpha) S(x)/(2 sqrt(pi) x)``."""
    return stirling_moment_prefactor(alpha, x, W, "survival") * float(scenario.sf(x))
