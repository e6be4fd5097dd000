"""Scalar special functions: the Macdonald function and the sinc kernel.

The Macdonald function is evaluated straight from its integral
representation

    K_a(u) = int_0^inf exp(-u cosh t) cosh(a t) dt,   u > 0,

in a log-scaled form so that neither tiny arguments with large orders nor
huge arguments leave the double range.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError

# exp(-745) is below the smallest subnormal double
UNDERFLOW_EXPONENT = 745.0

_GAUSS_ORDER = 10
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
_MIN_LEVEL = 2
_MAX_LEVEL = 13
_RTOL = 1e-12
_ACCEPT_RTOL = 1e-8
# below this u the peak of the integrand lies beyond the range of cosh
_TINY_ARGUMENT = 1e-280


def _exponent(t, u, order):
    # log of exp(-u (cosh t - 1) + |a| t); the exp(-u) factor is kept outside.
    # For tiny u the peak passes t = 710 and u cosh t is formed in log space
    with np.errstate(over="ignore", invalid="ignore"):
        direct = -u * (np.cosh(t) - 1.0) + order * t
        logu = np.log(u)
        tiny = -0.5 * (np.exp(t + logu) + np.exp(logu - t)) + u + order * t
    return np.where(u < _TINY_ARGUMENT, tiny, direct)


def _truncation_point(u, order, peak, shift):
    """Right-hand point T where the scaled integrand drops below exp(-745)."""
    def h(t):
        return _exponent(t, u, order) - shift + UNDERFLOW_EXPONENT

    t = peak + 1.0
    for _ in range(2000):
        above = h(t) > 0.0
        if not above.any():
            break
        t = np.where(above, t + 1.0, t)
    # h is concave and decreasing right of the peak, so Newton from the
    # right converges monotonically to the root
    for _ in range(60):
        with np.errstate(over="ignore", invalid="ignore"):
            slope = np.where(u < _TINY_ARGUMENT,
                             -0.5 * (np.exp(t + np.log(u)) - np.exp(np.log(u) - t)),
                             -u * np.sinh(t)) + order
        step = h(t) / slope
        t = t - step
        if np.all(np.abs(step) <= 1e-13 * np.maximum(t, 1.0)):
            break
    return t


def log_macdonald_k(a, u):
    """Natural log of K_a(u), vectorized over ``u``.

    Parameters
    ----------
    a : float
        Order. Only ``|a|`` matters.
    u : float or array_like
        Argument, strictly positive.

    Returns
    -------
    float or ndarray
        ``log K_a(u)`` with relative accuracy of about 1e-12 in ``K``.

    Raises
    ------
    DomainError
        If any ``u <= 0``.
    AccuracyError
        If panel bisection stalls above a 1e-8 relative change.
    """
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(~(u > 0.0)) or not np.all(np.isfinite(u)):
        raise DomainError("Macdonald function needs a finite argument u > 0")
    order = abs(float(a))

    # integrand peak: sinh t* = |a| / u
    with np.errstate(over="ignore"):
        ratio = order / u
    # arcsinh z = log 2z + O(z^-2) avoids the overflow of order / u
    big = ratio > 1e8
    peak = np.arcsinh(np.where(big, 0.0, ratio))
    if order > 0.0:
        peak = np.where(big, math.log(2.0 * order) - np.log(u), peak)
    shift = _exponent(peak, u, order)
    upper = _truncation_point(u, order, peak, shift)

    integral = np.empty_like(u)
    active = np.arange(u.size)
    previous = None
    level = _MIN_LEVEL
    while True:
        panels = 2 ** level
        uu, T, sh = u[active, None], upper[active, None], shift[active, None]
        offsets = (np.arange(panels)[:, None] + 0.5 * (_GL_NODES[None, :] + 1.0)).ravel()
        t = T * offsets[None, :] / panels
        g = np.exp(_exponent(t, uu, order) - sh) * 0.5 * (1.0 + np.exp(-2.0 * order * t))
        w = np.tile(_GL_WEIGHTS, panels)
        current = 0.5 * T[:, 0] / panels * (g @ w)
        if previous is not None:
            change = np.abs(current - previous)
            done = change <= _RTOL * np.abs(current)
            integral[active[done]] = current[done]
            if level >= _MAX_LEVEL:
                if np.any(change[~done] > _ACCEPT_RTOL * np.abs(current[~done])):
                    raise AccuracyError("Macdonald quadrature did not converge")
                integral[active[~done]] = current[~done]
                break
            active = active[~done]
            current = current[~done]
            if active.size == 0:
                break
        previous = current
        level += 1

    out = -u + shift + np.log(integral)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=65536)
def _macdonald_scalar(order: float, u: float) -> float:
    return math.exp(log_macdonald_k(order, u))


def macdonald_k(a: float, u: float) -> float:
    """K_a(u) for scalar arguments, computed from the integral definition.

    >>> round(macdonald_k(0.5, 1.0), 12)
    0.461068504448
    """
    if not u > 0.0:
        raise DomainError(f"Macdonald function needs u > 0, got {u!r}")
    return _macdonald_scalar(abs(float(a)), float(u))


def log_macdonald_bounds(a: float, u):
    """Logs of the two-sided bound on K_a(u) valid for ``|a| >= 1/2``.

    ``sqrt(pi / 2) u^-1/2 e^-u <= K_a(u) <= sqrt(2 pi) u^-1/2 e^-u e^(a^2 / 2u)``;
    the lower bound is attained at ``|a| = 1/2``.

    Returns
    -------
    tuple
        ``(log_lower, log_upper)``, vectorized over ``u``.
    """
    if not abs(a) >= 0.5:
        raise DomainError(f"the bound needs |a| >= 1/2, got {a!r}")
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0.0)):
        raise DomainError("the bound needs u > 0")
    base = -0.5 * np.log(u) - u
    lower = 0.5 * math.log(math.pi / 2.0) + base
    upper = 0.5 * math.log(2.0 * math.pi) + base + a * a / (2.0 * u)
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def sinc(x):
    """Normalized sinc, sin(pi x) / (pi x), with sinc(0) = 1."""
    x = np.asarray(x, dtype=float)
    px = np.pi * x
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, px)
    px2 = px * px
    out = np.where(small, 1.0 - px2 / 6.0 + px2 * px2 / 120.0, sin_pi(x) / safe)
    return float(out) if out.ndim == 0 else out


def sin_pi(x):
    """sin(pi x) with exact zeros at the integers."""
    x = np.asarray(x, dtype=float)
    n = np.round(x)
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    return sign * np.sin(np.pi * (x - n))
