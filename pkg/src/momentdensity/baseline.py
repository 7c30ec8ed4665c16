"""Gaussian-kernel baselines for length-biased and excess-life data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .models import EXCESS_LIFE, LENGTH_BIASED, Sample

__all__ = ["KernelSpec", "bandwidth_rule", "jones_density", "jones_survival"]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SAMPLE_BLOCK = 4096
_GRID_BLOCK = 128


@dataclass(frozen=True)
class KernelSpec:
    bandwidth: float
    kernel: str = "gaussian"

    def __post_init__(self):
        if not self.bandwidth > 0 or not math.isfinite(self.bandwidth):
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth!r}")
        if self.kernel != "gaussian":
            raise ConfigurationError(f"unsupported kernel {self.kernel!r}")


def bandwidth_rule(n, beta=0.2):
    """``h = n**-beta`` with ``0 < beta < 1/4``."""
    if not 0.0 < beta < 0.25:
        raise ConfigurationError(f"bandwidth exponent must lie in (0, 1/4), got {beta!r}")
    if not n >= 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    return float(n) ** -beta


def _smooth(values, coefs, x, h):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("x must be > 0")
    flat = np.atleast_1d(x).ravel()
    out = np.empty(flat.size)
    n = values.size
    for g0 in range(0, flat.size, _GRID_BLOCK):
        xb = flat[g0 : g0 + _GRID_BLOCK, None]
        acc = np.zeros(xb.shape[0])
        for s0 in range(0, n, _SAMPLE_BLOCK):
            z = (xb - values[None, s0 : s0 + _SAMPLE_BLOCK]) / h
            acc += np.sum(coefs[None, s0 : s0 + _SAMPLE_BLOCK] * np.exp(-0.5 * z * z), axis=1)
        out[g0 : g0 + xb.shape[0]] = acc * _INV_SQRT_2PI / (n * h)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def _sample(sample):
    return sample if isinstance(sample, Sample) else Sample(np.asarray(sample, float))


def jones_density(sample, model, weight, spec, x):
    """Kernel estimate ``(W/(n h)) sum K((x - Y_i)/h) / Y_i`` of ``f``."""
    if model.kind != LENGTH_BIASED:
        raise ConfigurationError(f"jones_density needs a length-biased model, got {model.kind}")
    sample = _sample(sample)
    weight = model.require_total_weight() if weight is None else float(weight)
    return _smooth(sample.values, weight / sample.values, x, spec.bandwidth)


def jones_survival(sample, model, weight, spec, x):
    """Kernel estimate of ``S`` for excess-life data, ``W * g_h(x)``.

    ``g_h`` is the ordinary kernel density of the observed sample, which
    estimates ``g = S/W``.
    """
    if model.kind != EXCESS_LIFE:
        raise ConfigurationError(f"jones_survival needs an excess-life model, got {model.kind}")
    sample = _sample(sample)
    weight = model.require_total_weight() if weight is None else float(weight)
    return _smooth(sample.values, np.full(sample.n, weight), x, spec.bandwidth)
