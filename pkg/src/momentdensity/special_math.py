"""Log-gamma, gamma delta-sequence kernels and kernel-weighted quadrature.

Every kernel is evaluated in log space and exponentiated last, so the
smoothing parameter can run to ``1e6`` without overflow in ``(a*y/x)**a``
or ``Gamma(a)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special
from scipy import stats as _stats

from .errors import DomainError, NumericError

__all__ = [
    "log_gamma",
    "stirling_correction",
    "gamma_logpdf",
    "gamma_pdf",
    "GammaKernel",
    "DeltaKernel",
    "delta_density",
    "delta_stats",
    "QuadratureSpec",
    "integrate",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_EULER_GAMMA = 0.57721566490153286061

# (-1)**k zeta(k) / k for the Taylor series of lgamma(1 + e) around e = 0.
_LGAMMA1P_COEFFS = tuple(
    (-1.0) ** k * float(_special.zeta(k, 1)) / k for k in range(2, 40)
)
_ROOT_WINDOW = 0.25

# Bernoulli-number coefficients of the asymptotic Stirling series.
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_STIRLING_SERIES_MIN = 10.0


def _lgamma1p(e):
    """ln Gamma(1 + e) for |e| <= 0.25, relative accuracy near e = 0."""
    total = 0.0
    power = e
    for c in _LGAMMA1P_COEFFS:
        power *= e
        term = c * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return -_EULER_GAMMA * e + total


def log_gamma(z):
    """Natural logarithm of the gamma function for real ``z > 0``.

    ``math.lgamma`` loses relative accuracy close to its roots at 1 and 2;
    there the Taylor series of ``ln Gamma(1 + e)`` is summed instead.

    Raises
    ------
    DomainError
        If ``z <= 0`` or ``z`` is not finite.
    """
    z = float(z)
    if not z > 0.0 or math.isinf(z):
        raise DomainError(f"log_gamma requires a finite z > 0, got {z!r}")
    e1 = z - 1.0
    if abs(e1) <= _ROOT_WINDOW:
        return _lgamma1p(e1)
    e2 = z - 2.0
    if abs(e2) <= _ROOT_WINDOW:
        return math.log1p(e2) + _lgamma1p(e2)
    return math.lgamma(z)


def stirling_correction(s):
    """Remainder ``ln Gamma(s) - [(s - 1/2) ln s - s + ln sqrt(2 pi)]``.

    Computed from the asymptotic series for large ``s`` so that it keeps
    full relative precision where the bracketed term is huge.
    """
    s = float(s)
    if s >= _STIRLING_SERIES_MIN:
        inv = 1.0 / s
        inv2 = inv * inv
        acc = 0.0
        for c in reversed(_STIRLING_COEFFS):
            acc = acc * inv2 + c
        return acc * inv
    return log_gamma(s) - ((s - 0.5) * math.log(s) - s + _LOG_SQRT_2PI)


def gamma_logpdf(u, shape, rate):
    """Log density of the gamma law with the given shape and rate.

    Uses the saddle-point arrangement

        ln f = ln(rate) - ln r + s * (ln r + 1 - r) - ln sqrt(2 pi s) - d(s)

    with ``r = rate*u/s`` and ``d`` the Stirling remainder, which avoids
    the cancellation between ``s ln(rate u)`` and ``ln Gamma(s)``.
    """
    s = float(shape)
    rate = float(rate)
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape)
    pos = u > 0
    if np.any(pos):
        ratio = rate * u[pos] / s
        e = (rate * u[pos] - s) / s
        near = np.abs(e) < 0.5
        base = math.log(rate) - 0.5 * math.log(2.0 * math.pi * s) - stirling_correction(s)
        with np.errstate(divide="ignore"):
            lr = np.where(near, np.log1p(np.where(near, e, 0.0)), np.log(ratio))
        # near the saddle s*(lr - e) is small and computed without cancellation;
        # away from it the direct form stays finite when ratio underflows
        far = lr * (s - 1.0) if s != 1.0 else np.zeros_like(lr)
        out[pos] = base + np.where(near, s * (lr - e) - lr, far - s * e)
    zero = u == 0
    if np.any(zero):
        if s > 1.0:
            out[zero] = -np.inf
        elif s == 1.0:
            out[zero] = math.log(rate)
        else:
            out[zero] = np.inf
    out[u < 0] = -np.inf
    return out if out.ndim else float(out)


def gamma_pdf(u, shape, rate):
    """Gamma density, ``exp(gamma_logpdf(...))``."""
    return np.exp(gamma_logpdf(u, shape, rate))


@dataclass(frozen=True)
class GammaKernel:
    """Gamma law parametrised by shape and rate, used as an integration weight."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise DomainError(f"gamma shape must be positive, got {self.shape!r}")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise DomainError(f"gamma rate must be positive, got {self.rate!r}")

    @property
    def mean(self):
        return self.shape / self.rate

    @property
    def variance(self):
        return self.shape / self.rate**2

    def logpdf(self, u):
        return gamma_logpdf(u, self.shape, self.rate)

    def pdf(self, u):
        return gamma_pdf(u, self.shape, self.rate)

    def quantile_hull(self, mass):
        """Interval ``[q_lo, q_hi]`` leaving ``mass`` in each tail."""
        dist = _stats.gamma(self.shape, scale=1.0 / self.rate)
        return float(dist.ppf(mass)), float(dist.isf(mass))


@dataclass(frozen=True)
class DeltaKernel:
    """Gamma density with shape ``k(alpha-2)+2`` and scale ``x/(k alpha)``.

    For fixed ``k`` these densities concentrate at ``x`` as ``alpha`` grows.
    ``k = 1`` is the kernel of the moment-density estimators and ``k = 2``
    appears in their second moment. ``alpha`` is real; factorials in the
    classical integer form are read as ``Gamma(. + 1)``.
    """

    alpha: float
    x: float
    k: int = 1

    def __post_init__(self):
        if not self.alpha >= 1.0 or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be >= 1, got {self.alpha!r}")
        if not self.x > 0.0 or not math.isfinite(self.x):
            raise DomainError(f"x must be > 0, got {self.x!r}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")
        if self.shape <= 0.0:
            raise DomainError(
                f"shape k(alpha-2)+2 = {self.shape} must be positive "
                f"(alpha={self.alpha}, k={self.k})"
            )

    @property
    def shape(self):
        return self.k * (self.alpha - 2.0) + 2.0

    @property
    def rate(self):
        return self.k * self.alpha / self.x

    @property
    def gamma(self):
        return GammaKernel(self.shape, self.rate)

    def pdf(self, u):
        return self.gamma.pdf(u)


def delta_density(kernel, u):
    """Evaluate the delta-sequence density ``h_{alpha,x,k}`` at ``u >= 0``.

    At ``u = 0`` the value is the continuous limit: 0 for shape above one,
    the rate for shape exactly one.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0) or np.any(np.isnan(u_arr)):
        raise DomainError("delta_density is defined for u >= 0 only")
    return kernel.pdf(u)


def delta_stats(kernel):
    """Closed-form ``(mean, variance)`` of a delta-sequence kernel."""
    return kernel.shape / kernel.rate, kernel.shape / kernel.rate**2


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate`.

    ``truncation_mass`` is the upper-tail probability of the weight kernel
    beyond which the integrand is dropped.
    """

    rtol: float = 1e-10
    truncation_mass: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not 0.0 < self.rtol <= 1e-4:
            raise DomainError(f"rtol must lie in (0, 1e-4], got {self.rtol!r}")
        if not 0.0 < self.truncation_mass <= 1e-6:
            raise DomainError(
                f"truncation_mass must lie in (0, 1e-6], got {self.truncation_mass!r}"
            )
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be positive")


def _breakpoints(kernel, spec):
    lo, hi = kernel.quantile_hull(spec.truncation_mass)
    m = kernel.mean
    sd = math.sqrt(kernel.variance)
    pts = {0.0, lo, hi}
    for c in (-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0):
        pts.add(m + c * sd)
    if kernel.shape > 1.0:
        pts.add((kernel.shape - 1.0) / kernel.rate)
    return sorted(p for p in pts if 0.0 <= p <= hi)


def integrate(f, weight_kernel=None, spec=None):
    """Integrate ``f`` over ``[0, inf)``, optionally against a gamma kernel.

    With ``weight_kernel`` (a :class:`DeltaKernel` or :class:`GammaKernel`)
    this returns ``int_0^inf kernel(u) f(u) du`` over ``[0, q_hi]`` where
    ``q_hi`` leaves ``spec.truncation_mass`` in the upper tail. The range is
    split at the kernel's mode and at multiples of its standard deviation so
    that very concentrated kernels are resolved.

    Raises
    ------
    NumericError
        When any piece fails to converge or the summed error estimate
        exceeds the relative tolerance.
    """
    spec = spec or QuadratureSpec()
    if weight_kernel is None:
        pieces = [(0.0, math.inf)]

        def integrand(u):
            return float(f(u))

    else:
        kernel = weight_kernel.gamma if isinstance(weight_kernel, DeltaKernel) else weight_kernel
        pts = _breakpoints(kernel, spec)
        pieces = list(zip(pts[:-1], pts[1:]))
        shape, rate = kernel.shape, kernel.rate

        def integrand(u):
            if u <= 0.0:
                return 0.0 if shape > 1.0 else float(f(u)) * float(gamma_pdf(u, shape, rate))
            return float(gamma_pdf(u, shape, rate)) * float(f(u))

    total = 0.0
    err = 0.0
    scale = 0.0
    for a, b in pieces:
        if b <= a:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _integrate.IntegrationWarning)
            val, e, info, *rest = _integrate.quad(
                integrand,
                a,
                b,
                epsabs=0.0,
                epsrel=spec.rtol * 0.1,
                limit=spec.max_subdivisions,
                full_output=1,
            )
        if not math.isfinite(val):
            raise NumericError(
                "non-finite integrand value", interval=(a, b), value=val
            )
        total += val
        err += e
        scale += abs(val)
    if err > spec.rtol * max(abs(total), scale * 1e-3, 1e-300):
        raise NumericError(
            "quadrature did not reach the requested tolerance",
            value=total,
            error_estimate=err,
            rtol=spec.rtol,
            subdivisions=spec.max_subdivisions,
        )
    return total
