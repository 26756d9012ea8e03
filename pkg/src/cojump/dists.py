"""Self-contained chi-squared and normal distribution functions.

The test procedures need chi2 and standard-normal CDFs and quantiles only.
The chi2 CDF is the regularized lower incomplete gamma function P(dof/2, x/2),
evaluated by the classic series / continued-fraction split; quantiles are
obtained by bracketed bisection to absolute tolerance 1e-10.
"""

from __future__ import annotations

import math

_MAX_ITER = 500
_EPS = 1e-15
_QUANTILE_TOL = 1e-10


def _gamma_p_series(a: float, x: float) -> float:
    """P(a, x) by the power series, reliable for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_cont_fraction(a: float, x: float) -> float:
    """Q(a, x) = 1 - P(a, x) by Lentz's continued fraction, for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    frac = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        frac *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return frac * math.exp(-x + a * math.log(x) - math.lgamma(a))


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    if a <= 0:
        raise ValueError("shape a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_cont_fraction(a, x)


def chi2_cdf(x: float, dof: int) -> float:
    """CDF of the chi-squared distribution with dof degrees of freedom."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if x <= 0:
        return 0.0
    return min(1.0, reg_lower_gamma(dof / 2.0, x / 2.0))


def chi2_upper_quantile(p: float, dof: int) -> float:
    """x such that 1 - chi2_cdf(x, dof) = p, by bracketed bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if dof < 1:
        raise ValueError("dof must be >= 1")
    lo, hi = 0.0, max(4.0 * dof, 8.0)
    while chi2_cdf(hi, dof) < 1.0 - p:
        hi *= 2.0
        if hi > 1e12:  # pragma: no cover - unreachable for sane p
            raise ValueError("quantile bracket failed")
    while hi - lo > _QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if chi2_cdf(mid, dof) < 1.0 - p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the error function."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def normal_quantile(p: float) -> float:
    """Standard normal quantile by bracketed bisection on normal_cdf."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    lo, hi = -40.0, 40.0
    while hi - lo > _QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
