"""Weighted sampling models, observed samples and known-truth scenarios.

An observation ``Y`` from a weighted model has density

    g(y) = w(y) f(y) / W,    W = int w(x) f(x) dx,

where ``f`` is the density of interest. Length-biased sampling uses
``w(y) = y``; the excess-life (residual renewal time) model has
``w = (1 - F) / f`` so that ``g = S / W``; the direct problem is ``w = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError, StateError

__all__ = [
    "LENGTH_BIASED",
    "EXCESS_LIFE",
    "DIRECT",
    "CUSTOM",
    "WeightedModel",
    "Sample",
    "TruthScenario",
    "length_biased_model",
    "direct_model",
    "excess_life_model",
    "custom_model",
    "builtin_scenario",
    "scenario_names",
    "observed_density",
]

LENGTH_BIASED = "length-biased"
EXCESS_LIFE = "excess-life"
DIRECT = "direct"
CUSTOM = "custom"
_KINDS = (LENGTH_BIASED, EXCESS_LIFE, DIRECT, CUSTOM)


def _identity(y):
    return np.asarray(y, dtype=float)


def _unit(y):
    return np.ones_like(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class WeightedModel:
    """The biased-sampling model behind an observed sample.

    ``weight`` may be ``None`` for the excess-life kind when no truth is
    attached, since ``w = (1 - F)/f`` is then unknown. ``total_weight`` is
    ``None`` when ``W`` has to be estimated.
    """

    kind: str
    weight: Optional[Callable] = None
    total_weight: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown model kind {self.kind!r}")
        if self.kind == DIRECT and self.total_weight != 1.0:
            raise ConfigurationError("the direct model has W = 1 exactly")
        if self.total_weight is not None and not self.total_weight > 0:
            raise DomainError(f"total weight must be positive, got {self.total_weight!r}")
        if self.weight is None and self.kind != EXCESS_LIFE:
            raise ConfigurationError(f"{self.kind} model requires a weight function")

    def w(self, y):
        """Evaluate the weight function; raises if it is not known."""
        if self.weight is None:
            raise StateError(f"weight function of the {self.kind} model is unknown")
        return self.weight(y)

    def require_total_weight(self):
        if self.total_weight is None:
            raise StateError(
                f"total weight W of the {self.kind} model is unknown; "
                "pass an estimate explicitly"
            )
        return self.total_weight

    def with_total_weight(self, value):
        return WeightedModel(self.kind, self.weight, float(value))


def length_biased_model(total_weight=None):
    return WeightedModel(LENGTH_BIASED, _identity, total_weight)


def direct_model():
    return WeightedModel(DIRECT, _unit, 1.0)


def excess_life_model(total_weight=None, scenario=None):
    """Excess-life model; ``w = S/f`` is attached when a scenario is given."""
    weight = None
    if scenario is not None:
        weight = scenario.inverse_hazard
        if total_weight is None:
            total_weight = scenario.W
    return WeightedModel(EXCESS_LIFE, weight, total_weight)


def custom_model(weight, total_weight=None):
    return WeightedModel(CUSTOM, weight, total_weight)


@dataclass(frozen=True)
class Sample:
    """Strictly positive observations ``Y_1..Y_n`` in sampling order."""

    values: np.ndarray
    provenance: Optional[tuple] = None

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 1:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DomainError("sample values must be finite and strictly positive")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.values.size

    @classmethod
    def from_file(cls, path):
        """Read one observation per line; ``#`` starts a comment."""
        values = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise ConfigurationError(
                        f"{path}:{lineno}: cannot parse {text!r} as a number"
                    ) from None
        return cls(np.asarray(values), provenance=("file", str(path)))


@dataclass(frozen=True)
class TruthScenario:
    """A fully known target distribution used by oracles and simulations.

    ``df`` and ``d2f`` may be ``None`` for custom scenarios; operations that
    need them fail fast.
    """

    name: str
    f: Callable
    cdf: Callable
    sf: Callable
    W: float
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    M: Optional[float] = None
    L: Optional[float] = None
    description: str = field(default="", compare=False)

    def hazard(self, y):
        return self.f(y) / self.sf(y)

    def inverse_hazard(self, y):
        return self.sf(y) / self.f(y)

    def require_df(self):
        if self.df is None:
            raise StateError(f"scenario {self.name!r} has no first derivative of f")
        return self.df

    def require_d2f(self):
        if self.d2f is None:
            raise StateError(f"scenario {self.name!r} has no second derivative of f")
        return self.d2f

    def check(self, grid=None, tol=1e-12):
        """Verify ``S = 1 - F``, ``f >= 0`` and monotone ``F`` on a grid."""
        grid = np.linspace(0.0, 20.0, 401) if grid is None else np.asarray(grid, float)
        F = np.asarray(self.cdf(grid), float)
        S = np.asarray(self.sf(grid), float)
        if np.max(np.abs(S - (1.0 - F))) > tol:
            raise DomainError(f"scenario {self.name!r}: S != 1 - F")
        if np.any(np.asarray(self.f(grid)) < 0):
            raise DomainError(f"scenario {self.name!r}: negative density")
        if np.any(np.diff(F) < -tol) or abs(float(self.cdf(0.0))) > tol:
            raise DomainError(f"scenario {self.name!r}: F must rise from 0")
        return True


# lb-exp2: f is Exp(rate 2); length-biased observations are G(2, scale 1/2).
def _lb_f(x):
    return 2.0 * np.exp(-2.0 * np.asarray(x, float))


def _lb_df(x):
    return -4.0 * np.exp(-2.0 * np.asarray(x, float))


def _lb_d2f(x):
    return 8.0 * np.exp(-2.0 * np.asarray(x, float))


def _lb_cdf(x):
    return -np.expm1(-2.0 * np.asarray(x, float))


def _lb_sf(x):
    return np.exp(-2.0 * np.asarray(x, float))


# excess-gamma22: F is G(2, scale 2), mean W = 4.
def _eg_f(x):
    x = np.asarray(x, float)
    return 0.25 * x * np.exp(-0.5 * x)


def _eg_df(x):
    x = np.asarray(x, float)
    return 0.25 * (1.0 - 0.5 * x) * np.exp(-0.5 * x)


def _eg_d2f(x):
    x = np.asarray(x, float)
    return 0.25 * (0.25 * x - 1.0) * np.exp(-0.5 * x)


def _eg_sf(x):
    x = np.asarray(x, float)
    return (1.0 + 0.5 * x) * np.exp(-0.5 * x)


def _eg_cdf(x):
    x = np.asarray(x, float)
    # 1 - (1 + x/2) e^{-x/2}, arranged to avoid cancellation at small x
    return -np.expm1(-0.5 * x) - 0.5 * x * np.exp(-0.5 * x)


_SCENARIOS = {
    "lb-exp2": lambda: (
        TruthScenario(
            name="lb-exp2",
            f=_lb_f,
            df=_lb_df,
            d2f=_lb_d2f,
            cdf=_lb_cdf,
            sf=_lb_sf,
            W=0.5,
            M=8.0,
            L=4.0,
            description="length-biased sampling, f = Exp(2), g = G(2, 1/2)",
        ),
        length_biased_model(0.5),
    ),
    "excess-gamma22": lambda: _excess_pair(
        TruthScenario(
            name="excess-gamma22",
            f=_eg_f,
            df=_eg_df,
            d2f=_eg_d2f,
            cdf=_eg_cdf,
            sf=_eg_sf,
            W=4.0,
            M=0.25,
            L=0.25,
            description="excess life of a G(2, 2) renewal process, W = 4",
        )
    ),
}


def _excess_pair(scenario):
    return scenario, excess_life_model(scenario.W, scenario)


def scenario_names():
    return tuple(_SCENARIOS)


def builtin_scenario(name):
    """Return ``(TruthScenario, WeightedModel)`` for a built-in scenario name."""
    try:
        factory = _SCENARIOS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario {name!r}; choose from {', '.join(_SCENARIOS)}"
        ) from None
    return factory()


def observed_density(scenario, model, y):
    """Density ``g`` of the sampled variable at ``y >= 0``."""
    W = model.require_total_weight()
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0):
        raise DomainError("observed density is defined for y >= 0")
    if model.kind == EXCESS_LIFE:
        out = scenario.sf(y_arr) / W
    else:
        out = model.w(y_arr) * scenario.f(y_arr) / W
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)
