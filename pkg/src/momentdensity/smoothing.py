"""Smoothing-parameter rules for the gamma-kernel estimators.

``alpha`` plays the role of an inverse squared bandwidth. The global rule
takes ``alpha = n**delta``; the local rules pick ``alpha(x)`` so that the
leading variance and squared-bias terms of the pointwise MSE are equal,
which needs the true ``f''`` (density) or ``f'`` (survival) at ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ConfigurationError, DegenerateCurvatureError, DomainError

__all__ = [
    "AlphaRule",
    "alpha_global",
    "alpha_local_density",
    "alpha_local_survival",
    "parse_alpha_rule",
    "MSE_OPTIMAL_DELTA",
]

MSE_OPTIMAL_DELTA = 0.4

FIXED = "fixed"
GLOBAL = "global-rate"
LOCAL_DENSITY = "local-density"
LOCAL_SURVIVAL = "local-survival"
_KINDS = (FIXED, GLOBAL, LOCAL_DENSITY, LOCAL_SURVIVAL)

# Tolerance for treating n**delta as an exact integer before rounding up.
_INTEGER_SLACK = 1e-9


def _ceil(value):
    nearest = round(value)
    if abs(value - nearest) <= _INTEGER_SLACK * max(1.0, abs(value)):
        return float(nearest)
    return float(math.ceil(value))


def _check_global_delta(delta):
    if not 0.0 < delta < 2.0:
        raise ConfigurationError(f"delta must lie in (0, 2), got {delta!r}")


def _check_local_delta(delta):
    if not MSE_OPTIMAL_DELTA - 1e-12 <= delta < 2.0:
        raise ConfigurationError(f"local rules need delta in [2/5, 2), got {delta!r}")


def alpha_global(n, delta=MSE_OPTIMAL_DELTA, integerize=True):
    """``alpha = n**delta``, rounded up to an integer when ``integerize``, at least 1.

    >>> alpha_global(300, 0.4)
    10.0
    """
    if not n >= 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    _check_global_delta(delta)
    value = float(n) ** delta
    if integerize:
        value = _ceil(value)
    return max(value, 1.0)


def _local(n, delta, W, scale, integerize):
    _check_local_delta(delta)
    if not n >= 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if not W > 0:
        raise DomainError(f"W must be positive, got {W!r}")
    value = float(n) ** delta * (math.pi / (4.0 * W * W)) ** 0.2 * scale
    if integerize:
        value = _ceil(value)
    return max(value, 1.0)


def alpha_local_density(scenario, W, x, n, delta=MSE_OPTIMAL_DELTA, integerize=False):
    """Pointwise rule ``n^d (pi/(4W^2))^(1/5) |x^3 f''(x)/sqrt f(x)|^(4/5)``.

    The absolute value is taken because only ``f''(x)**2`` enters the MSE.
    Raises :class:`DegenerateCurvatureError` where ``f''(x) = 0``.
    """
    x = float(x)
    if not x > 0:
        raise DomainError("x must be > 0")
    fx = float(scenario.f(x))
    d2 = float(scenario.require_d2f()(x))
    if not fx > 0:
        raise DomainError(f"f({x}) must be positive, got {fx}")
    if d2 == 0.0:
        raise DegenerateCurvatureError(f"f''({x}) = 0; the local density rule is undefined")
    scale = abs(x**3 * d2 / math.sqrt(fx)) ** 0.8
    return _local(n, delta, W, scale, integerize)


def alpha_local_survival(scenario, W, x, n, delta=MSE_OPTIMAL_DELTA, integerize=False):
    """Pointwise rule ``n^d (pi/(4W^2))^(1/5) x^2 |f'(x)/sqrt S(x)|^(4/5)``."""
    x = float(x)
    if not x > 0:
        raise DomainError("x must be > 0")
    sx = float(scenario.sf(x))
    d1 = float(scenario.require_df()(x))
    if not sx > 0:
        raise DomainError(f"S({x}) must be positive, got {sx}")
    if d1 == 0.0:
        raise DegenerateCurvatureError(f"f'({x}) = 0; the local survival rule is undefined")
    scale = x * x * abs(d1 / math.sqrt(sx)) ** 0.8
    return _local(n, delta, W, scale, integerize)


@dataclass(frozen=True)
class AlphaRule:
    """A smoothing-parameter policy resolved per sample size and point."""

    kind: str
    value: Optional[float] = None
    delta: Optional[float] = None
    integerize: Optional[bool] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown alpha rule {self.kind!r}")
        if self.kind == FIXED:
            if self.value is None or not self.value >= 1.0:
                raise ConfigurationError("a fixed alpha must be >= 1")
        elif self.delta is None:
            raise ConfigurationError(f"rule {self.kind} needs a delta exponent")
        elif self.kind == GLOBAL:
            _check_global_delta(self.delta)
        else:
            _check_local_delta(self.delta)
        if self.integerize is None:
            object.__setattr__(self, "integerize", self.kind == GLOBAL)

    @classmethod
    def fixed(cls, value):
        return cls(FIXED, value=float(value))

    @classmethod
    def global_rate(cls, delta=MSE_OPTIMAL_DELTA, integerize=True):
        return cls(GLOBAL, delta=float(delta), integerize=integerize)

    @classmethod
    def local_density(cls, delta=MSE_OPTIMAL_DELTA, integerize=False):
        return cls(LOCAL_DENSITY, delta=float(delta), integerize=integerize)

    @classmethod
    def local_survival(cls, delta=MSE_OPTIMAL_DELTA, integerize=False):
        return cls(LOCAL_SURVIVAL, delta=float(delta), integerize=integerize)

    @property
    def is_local(self):
        return self.kind in (LOCAL_DENSITY, LOCAL_SURVIVAL)

    def resolve(self, n, x=None, scenario=None, W=None):
        if self.kind == FIXED:
            return float(self.value)
        if self.kind == GLOBAL:
            return alpha_global(n, self.delta, self.integerize)
        if scenario is None or x is None:
            raise ConfigurationError(f"rule {self.kind} needs a truth scenario and a point")
        W = scenario.W if W is None else W
        fn = alpha_local_density if self.kind == LOCAL_DENSITY else alpha_local_survival
        return fn(scenario, W, x, n, self.delta, self.integerize)

    def __str__(self):
        if self.kind == FIXED:
            return f"fixed:{self.value:g}"
        short = {GLOBAL: "global"}.get(self.kind, self.kind)
        return f"{short}:{self.delta:g}"


def _parse_number(text):
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"cannot parse {text!r} as a number") from None


def parse_alpha_rule(text):
    """Parse ``fixed:<v>``, ``global:<delta>``, ``local-density:<delta>`` or
    ``local-survival:<delta>``; deltas may be fractions such as ``2/5``.
    An optional ``:int`` / ``:real`` suffix overrides the rounding default.
    """
    parts = text.strip().split(":")
    if len(parts) not in (2, 3):
        raise ConfigurationError(f"malformed alpha rule {text!r}")
    kind, number = parts[0], _parse_number(parts[1])
    integerize = None
    if len(parts) == 3:
        if parts[2] not in ("int", "real"):
            raise ConfigurationError(f"rounding suffix must be int or real, got {parts[2]!r}")
        integerize = parts[2] == "int"
    if kind == "fixed":
        return AlphaRule(FIXED, value=number, integerize=integerize)
    if kind in ("global", GLOBAL):
        return AlphaRule(GLOBAL, delta=number, integerize=integerize)
    if kind in (LOCAL_DENSITY, LOCAL_SURVIVAL):
        return AlphaRule(kind, delta=number, integerize=integerize)
    raise ConfigurationError(f"unknown alpha rule kind {kind!r}")
