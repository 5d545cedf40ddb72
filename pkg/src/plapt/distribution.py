"""The alpha-power transformed Pseudo-Lindley (PL-APT) distribution family.

Three parameters: a power-transform shape ``alpha > 0``, a Pseudo-Lindley
shape ``beta > 1`` and a rate ``theta > 0``.  ``alpha == 1`` recovers the
plain Pseudo-Lindley distribution and, with ``beta == 1 + theta``, the
Lindley distribution.  The quantile function is exact through the W_{-1}
branch of the Lambert W function, which makes inverse-transform sampling
and tail analysis cheap.

All evaluation functions accept scalars or arrays and preserve the input
kind (scalar in, float out).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .exceptions import DomainError, NumericalError
from .special_functions import BRANCH_POINT, LambertBranch, lambert_w

__all__ = [
    "ALPHA_ONE_TOL",
    "PlAptParams",
    "OrderStatSpec",
    "Sample",
    "cdf",
    "pdf",
    "reliability",
    "hazard",
    "quantile",
    "tail_quantile",
    "sample",
    "order_stat_pdf",
    "median_order_stat_pdf",
]

# |alpha - 1| below this switches to the limiting alpha=1 formulas; nearer
# than that the generic branch loses all precision to cancellation in
# (1 - alpha**F) / (1 - alpha).
ALPHA_ONE_TOL = 1e-8
# Rounding slack tolerated past -1/e before a Lambert argument is treated
# as corrupted rather than clamped to the branch point.
_BRANCH_SLACK = 1e-14


@dataclass(frozen=True)
class PlAptParams:
    """Validated parameter triple (alpha, beta, theta).

    theta is a rate (units 1/x): quantiles scale exactly as 1/theta because
    theta never enters the Lambert argument.
    """

    alpha: float
    beta: float
    theta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "theta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError(f"alpha must be a positive real, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta > 1.0):
            raise DomainError(f"beta must exceed 1, got {self.beta}")
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise DomainError(f"theta must be a positive real, got {self.theta}")

    @property
    def is_alpha_one(self) -> bool:
        """True when the alpha=1 (Pseudo-Lindley) branch applies."""
        return abs(self.alpha - 1.0) < ALPHA_ONE_TOL


@dataclass(frozen=True)
class OrderStatSpec:
    """Rank k within a sample of size n, 1 <= k <= n."""

    n: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        if self.n < 1:
            raise DomainError(f"sample size must be >= 1, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise DomainError(f"rank must lie in [1, {self.n}], got {self.k}")


@dataclass(frozen=True, eq=False)
class Sample:
    """Nonnegative observations, stored sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0:
            raise DomainError("sample must contain at least one observation")
        if not np.all(np.isfinite(v)):
            raise DomainError("sample values must be finite")
        if v[0] < 0.0:
            raise DomainError("sample values must be nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)


def _survival_log(beta: float, t):
    # log of the Pseudo-Lindley survival (1 + t/beta) * exp(-t) at t = theta*x >= 0
    return np.log1p(t / beta) - t


def _pl_sf(beta: float, t):
    return np.exp(_survival_log(beta, t))


def _pl_cdf(beta: float, t):
    # 1 - survival, computed with full relative accuracy near t = 0
    return -np.expm1(_survival_log(beta, t))


def _wrap(x, out):
    return float(out[()]) if np.ndim(x) == 0 else out


def _reliability_arr(p: PlAptParams, xa):
    t = p.theta * np.maximum(xa, 0.0)
    s = _pl_sf(p.beta, t)
    if p.is_alpha_one:
        out = s
    else:
        log_a = math.log(p.alpha)
        out = (p.alpha / (p.alpha - 1.0)) * (-np.expm1(-log_a * s))
    return np.where(xa <= 0.0, 1.0, out)


def reliability(p: PlAptParams, x):
    """Survival probability 1 - cdf; exactly complementary to :func:`cdf`."""
    xa = np.asarray(x, dtype=float)
    return _wrap(x, _reliability_arr(p, xa))


def cdf(p: PlAptParams, x):
    """Distribution function; 0 for x <= 0, increasing to 1."""
    xa = np.asarray(x, dtype=float)
    out = np.where(xa <= 0.0, 0.0, 1.0 - _reliability_arr(p, xa))
    return _wrap(x, out)


def _pdf_arr(p: PlAptParams, xa):
    t = p.theta * np.maximum(xa, 0.0)
    base = p.theta * (p.beta - 1.0 + t) * np.exp(-t) / p.beta
    if not p.is_alpha_one:
        log_a = math.log(p.alpha)
        # log(a)/(a-1) > 0 on both sides of a = 1; alpha**(1-S) = exp(log(a)*(1-S))
        base = base * (log_a / (p.alpha - 1.0)) * np.exp(log_a * _pl_cdf(p.beta, t))
    return np.where(xa < 0.0, 0.0, base)


def pdf(p: PlAptParams, x):
    """Density; 0 for x < 0 and positive on the support [0, inf)."""
    xa = np.asarray(x, dtype=float)
    return _wrap(x, _pdf_arr(p, xa))


def hazard(p: PlAptParams, x):
    """Failure rate pdf / reliability.

    For alpha=1 the ratio collapses to theta*(beta-1+theta*x)/(beta+theta*x),
    which stays finite arbitrarily far into the tail.  Otherwise the ratio
    is formed directly and a NumericalError signals survival underflow.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise DomainError("hazard is defined on x >= 0")
    if p.is_alpha_one:
        t = p.theta * xa
        out = p.theta * (p.beta - 1.0 + t) / (p.beta + t)
    else:
        r = _reliability_arr(p, xa)
        if np.any(r == 0.0):
            raise NumericalError("survival underflowed to zero in the far tail")
        out = _pdf_arr(p, xa) / r
    return _wrap(x, out)


def _w_argument(p: PlAptParams, u):
    # Argument handed to W_{-1}; free of theta, so quantiles scale exactly
    # as 1/theta.  The fused log1p form is exact at u=0 and keeps full
    # precision as u -> 1 where the plain difference of logs cancels.
    b_exp = p.beta * math.exp(-p.beta)
    if p.is_alpha_one:
        return b_exp * (u - 1.0)
    log_a = math.log(p.alpha)
    return (b_exp / log_a) * np.log1p((p.alpha - 1.0) * (u - 1.0) / p.alpha)


def _quantile_from_arg(p: PlAptParams, arg):
    arg = np.asarray(arg, dtype=float)
    below = arg < BRANCH_POINT
    if below.any():
        if np.any(arg < BRANCH_POINT - _BRANCH_SLACK):
            raise NumericalError(
                "Lambert argument left (-1/e, 0) by more than rounding slack; "
                "parameters are inconsistent"
            )
        arg = np.where(below, BRANCH_POINT, arg)
    if np.any(arg >= 0.0):
        raise NumericalError("Lambert argument left (-1/e, 0); parameters are inconsistent")
    w = lambert_w(LambertBranch.NEGATIVE_ONE, arg)
    return np.maximum((-p.beta - w) / p.theta, 0.0)


def quantile(p: PlAptParams, u):
    """Exact quantile function on 0 <= u < 1 via the W_{-1} Lambert branch.

    Satisfies ``cdf(p, quantile(p, u)) == u`` to roundoff and
    ``quantile(p, 0) == 0`` exactly.
    """
    ua = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(ua)) or np.any(ua < 0.0) or np.any(ua >= 1.0):
        raise DomainError("quantile requires 0 <= u < 1")
    x = _quantile_from_arg(p, _w_argument(p, ua))
    out = np.where(ua == 0.0, 0.0, x)
    return _wrap(u, out)


def tail_quantile(p: PlAptParams, v):
    """Upper-tail quantile Q(1 - v) for tail mass 0 < v <= 1.

    Evaluates the Lambert argument directly in the tail variable, so tiny
    tail masses (v down to the underflow threshold) lose no precision to
    forming 1 - v.
    """
    va = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(va)) or np.any(va <= 0.0) or np.any(va > 1.0):
        raise DomainError("tail_quantile requires 0 < v <= 1")
    b_exp = p.beta * math.exp(-p.beta)
    if p.is_alpha_one:
        arg = -b_exp * va
    else:
        log_a = math.log(p.alpha)
        arg = (b_exp / log_a) * np.log1p(va * (1.0 - p.alpha) / p.alpha)
    out = _quantile_from_arg(p, arg)
    return _wrap(v, out)


def sample(p: PlAptParams, n: int, seed) -> Sample:
    """Draw n observations by inverse transform, deterministic per seed.

    The uniform stream comes from numpy's PCG64 generator (stable,
    documented algorithm), so a given seed reproduces the same sample
    across runs and platforms.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return Sample(quantile(p, rng.random(n)))


def order_stat_pdf(p: PlAptParams, spec: OrderStatSpec, x):
    """Density of the k-th order statistic of an i.i.d. sample of size n."""
    xa = np.asarray(x, dtype=float)
    r = _reliability_arr(p, xa)
    g = _pdf_arr(p, xa)
    cdf_val = 1.0 - r
    log_coef = (
        math.lgamma(spec.n + 1.0)
        - math.lgamma(spec.n - spec.k + 1.0)
        - math.lgamma(spec.k)
    )
    with np.errstate(divide="ignore"):
        out = np.exp(log_coef + xlogy(spec.k - 1, cdf_val) + xlogy(spec.n - spec.k, r)) * g
    return _wrap(x, out)


def median_order_stat_pdf(p: PlAptParams, m: int, x):
    """Density of the sample median of an odd sample of size n = 2m + 1."""
    m = int(m)
    if m < 1:
        raise DomainError(f"median order statistic requires m >= 1, got {m}")
    return order_stat_pdf(p, OrderStatSpec(n=2 * m + 1, k=m + 1), x)
