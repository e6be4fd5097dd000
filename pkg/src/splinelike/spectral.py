"""Fourier transforms of the interpolator families, in log-space.

Every family here has an even transform that decreases in ``|xi|``. The
multiplicative constants of the transforms are dropped; they cancel in the
fundamental function. All magnitudes are carried as natural logarithms so
that, for instance, ``exp(-64 xi**2)`` at ``xi = 9 pi`` never underflows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.special import zeta as hurwitz_zeta

from .errors import DomainError, SingularityError, ToleranceError
from .specfun import log_macdonald_k

TWO_PI = 2.0 * math.pi
MAX_PERIODIZATION_TERMS = 10**6
# explicit terms kept in the spline periodization before the closed-form remainder
SPLINE_EXPLICIT_TERMS = 8


class Kind(str, enum.Enum):
    SPLINE_ODD = "spline"
    GAUSSIAN = "gaussian"
    POISSON = "poisson"
    MULTIQUADRIC_I = "mq1"
    MULTIQUADRIC_II = "mq2"


class Ratio(str, enum.Enum):
    """Which quotient an auxiliary ratio is built from.

    ``PHI`` and ``PHI_DERIV`` are f(u + 2 pi j) / f(u) for f = phi_hat and
    f = |phi_hat'|. ``DERIV_OVER_PHI`` is |phi_hat'(u + 2 pi j)| / phi_hat(u),
    the mixed quotient that appears in the derivative bound of the
    fundamental function's transform.
    """

    PHI = "phi"
    PHI_DERIV = "phi_deriv"
    DERIV_OVER_PHI = "deriv_over_phi"


def _is_excluded_mq2_exponent(a: float) -> bool:
    # N u {0} u {-k - 1/2 : k in N}
    if a >= 0 and float(a).is_integer():
        return True
    b = -a - 0.5
    return b >= 1 and float(b).is_integer()


@dataclass(frozen=True)
class FamilySpec:
    """One member of an interpolator family.

    Use the named constructors; they enforce the admissible parameter ranges.
    ``k`` is the spline/multiquadric integer, ``alpha`` the Gaussian or
    Poisson scale, ``c`` the multiquadric shape and ``a`` the fixed
    exponent of the second multiquadric family.
    """

    kind: Kind
    k: int | None = None
    alpha: float | None = None
    c: float | None = None
    a: float | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (Kind.SPLINE_ODD, Kind.MULTIQUADRIC_I):
            if self.k is None or int(self.k) != self.k or self.k < 1:
                raise DomainError(f"{kind.value}: k must be a positive integer, got {self.k!r}")
            object.__setattr__(self, "k", int(self.k))
        if kind in (Kind.GAUSSIAN, Kind.POISSON):
            if self.alpha is None or not self.alpha >= 1.0 or not math.isfinite(self.alpha):
                raise DomainError(f"{kind.value}: alpha must be >= 1, got {self.alpha!r}")
        if kind is Kind.MULTIQUADRIC_I:
            if self.c is None or not self.c > 0.0 or not math.isfinite(self.c):
                raise DomainError(f"mq1: shape c must be > 0, got {self.c!r}")
        if kind is Kind.MULTIQUADRIC_II:
            if self.c is None or not self.c >= 1.0 or not math.isfinite(self.c):
                raise DomainError(f"mq2: c must be >= 1, got {self.c!r}")
            if self.a is None or not math.isfinite(self.a):
                raise DomainError("mq2: exponent a is required")
            if _is_excluded_mq2_exponent(self.a):
                raise DomainError(f"mq2: exponent a={self.a} lies in the excluded set")
            if abs(self.a + 0.5) < 0.5:
                raise DomainError(f"mq2: need |a + 1/2| >= 1/2, got a={self.a}")

    @classmethod
    def spline(cls, k: int) -> "FamilySpec":
        return cls(Kind.SPLINE_ODD, k=k)

    @classmethod
    def gaussian(cls, alpha: float) -> "FamilySpec":
        return cls(Kind.GAUSSIAN, alpha=float(alpha))

    @classmethod
    def poisson(cls, alpha: float) -> "FamilySpec":
        return cls(Kind.POISSON, alpha=float(alpha))

    @classmethod
    def multiquadric_i(cls, k: int, c: float = 1.0) -> "FamilySpec":
        return cls(Kind.MULTIQUADRIC_I, k=k, c=float(c))

    @classmethod
    def multiquadric_ii(cls, c: float, a: float = 0.5) -> "FamilySpec":
        return cls(Kind.MULTIQUADRIC_II, c=float(c), a=float(a))

    @property
    def escalation_name(self) -> str:
        return {
            Kind.SPLINE_ODD: "k",
            Kind.MULTIQUADRIC_I: "k",
            Kind.GAUSSIAN: "alpha",
            Kind.POISSON: "alpha",
            Kind.MULTIQUADRIC_II: "c",
        }[self.kind]

    @property
    def escalation_value(self) -> float:
        return getattr(self, self.escalation_name)

    def with_escalation(self, value: float) -> "FamilySpec":
        """Same family with the escalation parameter replaced."""
        fields = dict(kind=self.kind, k=self.k, alpha=self.alpha, c=self.c, a=self.a)
        fields[self.escalation_name] = value
        return FamilySpec(**fields)

    @property
    def bessel_order(self) -> float | None:
        if self.kind is Kind.MULTIQUADRIC_I:
            return float(self.k)
        if self.kind is Kind.MULTIQUADRIC_II:
            return self.a + 0.5
        return None

    @property
    def singular(self) -> bool:
        """True when phi_hat has a pole at the origin."""
        if self.kind in (Kind.SPLINE_ODD, Kind.MULTIQUADRIC_I):
            return True
        if self.kind is Kind.MULTIQUADRIC_II:
            return self.bessel_order > 0
        return False

    @property
    def decay_exponent(self) -> float:
        """The A4 exponent: phi_hat = O(|xi|^-(1+eps)); inf for exponential decay."""
        if self.kind is Kind.SPLINE_ODD:
            return 2.0 * self.k - 1.0
        return math.inf

    @property
    def label(self) -> str:
        if self.kind is Kind.MULTIQUADRIC_I:
            return f"mq1(c={self.c:g})"
        if self.kind is Kind.MULTIQUADRIC_II:
            return f"mq2(a={self.a:g})"
        return self.kind.value


@dataclass(frozen=True)
class SpectralValue:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if (self.sign == 0) != (self.log_magnitude == -math.inf):
            raise ValueError("sign is 0 exactly when log_magnitude is -inf")

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    @classmethod
    def from_float(cls, x: float) -> "SpectralValue":
        if x == 0.0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)


def _mq_log_limit_at_zero(spec: FamilySpec) -> float:
    # |xi|^{|nu|} K_{|nu|}(c|xi|) -> Gamma(|nu|) 2^{|nu|-1} c^{-|nu|}
    mu = abs(spec.bessel_order)
    return gammaln(mu) + (mu - 1.0) * math.log(2.0) - mu * math.log(spec.c)


def log_phi_hat(spec: FamilySpec, xi):
    """log phi_hat(xi), vectorized; +inf at a pole."""
    xi = np.abs(np.asarray(xi, dtype=float))
    kind = spec.kind
    with np.errstate(divide="ignore"):
        if kind is Kind.SPLINE_ODD:
            return -2.0 * spec.k * np.log(xi)
        if kind is Kind.GAUSSIAN:
            return -spec.alpha * xi * xi
        if kind is Kind.POISSON:
            return -spec.alpha * xi
        nu = spec.bessel_order
        out = np.empty(xi.shape)
        zero = xi == 0.0
        pos = ~zero
        if np.any(pos):
            out[pos] = -nu * np.log(xi[pos]) + log_macdonald_k(nu, spec.c * xi[pos])
        if np.any(zero):
            out[zero] = math.inf if spec.singular else _mq_log_limit_at_zero(spec)
        return out


def log_abs_phi_hat_deriv(spec: FamilySpec, xi):
    """log |phi_hat'(xi)|, vectorized. The sign is -sgn(xi) for every family.

    At ``xi = 0`` the one-sided limit of the magnitude is returned (+inf for
    poles, -inf where the derivative vanishes).
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    kind = spec.kind
    with np.errstate(divide="ignore"):
        if kind is Kind.SPLINE_ODD:
            k = spec.k
            return math.log(2.0 * k) - (2.0 * k + 1.0) * np.log(xi)
        if kind is Kind.GAUSSIAN:
            return np.log(2.0 * spec.alpha * xi) - spec.alpha * xi * xi
        if kind is Kind.POISSON:
            return math.log(spec.alpha) - spec.alpha * xi
        # d/dxi [|xi|^-nu K_nu(c|xi|)] = -sgn(xi) c |xi|^-nu K_{nu+1}(c|xi|)
        nu = spec.bessel_order
        out = np.empty(xi.shape)
        zero = xi == 0.0
        pos = ~zero
        if np.any(pos):
            out[pos] = (math.log(spec.c) - nu * np.log(xi[pos])
                        + log_macdonald_k(nu + 1.0, spec.c * xi[pos]))
        if np.any(zero):
            mu = abs(nu + 1.0)
            power = -nu - mu
            if power < 0:
                out[zero] = math.inf
            elif power > 0:
                out[zero] = -math.inf
            else:
                out[zero] = (math.log(spec.c) + gammaln(mu) + (mu - 1.0) * math.log(2.0)
                             - mu * math.log(spec.c))
        return out


def _check_finite(xi: float) -> float:
    xi = float(xi)
    if not math.isfinite(xi):
        raise DomainError("frequency must be finite")
    return xi


def phi_hat(spec: FamilySpec, xi: float) -> SpectralValue:
    """phi_hat(xi) as a :class:`SpectralValue` (always positive)."""
    xi = _check_finite(xi)
    if xi == 0.0 and spec.singular:
        raise SingularityError(f"{spec.label} transform has a pole at 0")
    return SpectralValue(float(log_phi_hat(spec, xi)), 1)


def phi_hat_deriv(spec: FamilySpec, xi: float) -> SpectralValue:
    """phi_hat'(xi) as a :class:`SpectralValue`; negative for xi > 0."""
    xi = _check_finite(xi)
    if xi == 0.0:
        raise SingularityError("phi_hat' is singular or discontinuous at 0")
    return SpectralValue(float(log_abs_phi_hat_deriv(spec, xi)), -1 if xi > 0 else 1)


def log_m_ratio(spec: FamilySpec, which: Ratio, j: int, u):
    """log of the auxiliary ratio, vectorized over ``u``.

    At ``u = 0`` the pole of a singular transform dominates, so the ratio is
    defined by its limit 0 (log -inf) for ``j != 0``. ``j = 0`` gives exactly
    0 for the two same-function ratios.
    """
    which = Ratio(which)
    u = np.asarray(u, dtype=float)
    j = int(j)
    if j == 0 and which is not Ratio.DERIV_OVER_PHI:
        return np.zeros(u.shape)
    shifted = u + TWO_PI * j
    if which is Ratio.PHI:
        num, den = log_phi_hat(spec, shifted), log_phi_hat(spec, u)
    elif which is Ratio.PHI_DERIV:
        num, den = log_abs_phi_hat_deriv(spec, shifted), log_abs_phi_hat_deriv(spec, u)
    else:
        num, den = log_abs_phi_hat_deriv(spec, shifted), log_phi_hat(spec, u)
    with np.errstate(invalid="ignore"):
        out = num - den
    # inf - inf only arises for j = 0 in DERIV_OVER_PHI at a pole; both
    # numerator and denominator blow up like |u|^-(2k+1) vs |u|^-2k
    out = np.where(np.isnan(out), math.inf, out)
    out = np.where(np.isposinf(den) & np.isfinite(num), -math.inf, out)
    return out


def m_ratio(spec: FamilySpec, which: Ratio, j: int, u: float) -> float:
    """Auxiliary ratio f(u + 2 pi j) / f(u) for ``|u| <= pi``."""
    u = float(u)
    if not abs(u) <= math.pi:
        raise DomainError(f"auxiliary ratio needs |u| <= pi, got {u}")
    return float(np.exp(log_m_ratio(spec, which, j, u)))


def log_sup_ratio_bound(spec: FamilySpec, j):
    """log of sup_{|u|<=pi} M[phi_hat]_j(u) <= phi_hat((2|j|-1) pi) / phi_hat(pi).

    Valid for every family since phi_hat is even and decreasing in |xi|.
    """
    j = np.abs(np.asarray(j, dtype=float))
    return log_phi_hat(spec, (2.0 * j - 1.0) * math.pi) - float(log_phi_hat(spec, math.pi))


def truncation_index(spec: FamilySpec, tol: float, cap: int = MAX_PERIODIZATION_TERMS) -> int:
    """Smallest J with 2 * sum_{j>J} sup M_j below ``tol``.

    Raises
    ------
    ToleranceError
        If more than ``cap`` terms would be needed.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    chunk = 64
    start = 1
    logs = []
    while True:
        block = log_sup_ratio_bound(spec, np.arange(start, start + chunk))
        logs.append(block)
        start += chunk
        # once terms are far below tol and shrinking geometrically, stop
        if block[-1] < math.log(tol) - 60.0 or block[-1] == -math.inf:
            break
        if start > cap:
            raise ToleranceError(
                f"{spec.label}: periodization needs more than {cap} terms for tol={tol:g}")
        chunk *= 2
    terms = np.exp(np.concatenate(logs))
    tails = 2.0 * np.cumsum(terms[::-1])[::-1]  # tails[i] = 2 sum_{j >= i+1}
    below = np.nonzero(tails <= tol)[0]
    return int(below[0]) if below.size else len(terms)


def _spline_remainder(spec: FamilySpec, u, J: int):
    # sum_{|j|>J} (|u| / |u + 2 pi j|)^{2k} = |v|^{2k} [zeta(2k, J+1+v) + zeta(2k, J+1-v)]
    s = 2.0 * spec.k
    v = np.asarray(u, dtype=float) / TWO_PI
    return np.abs(v) ** s * (hurwitz_zeta(s, J + 1.0 + v) + hurwitz_zeta(s, J + 1.0 - v))


def periodization_parts(spec: FamilySpec, u, tail_tol: float):
    """Pieces of the normalized periodization P(u) / phi_hat(u).

    Returns ``(J, ratios, remainder)`` where ``ratios[j + J]`` holds
    M[phi_hat]_j(u) for ``|j| <= J`` (the j = 0 row is 1) and ``remainder``
    accounts for ``|j| > J``: the exact Hurwitz-zeta value for splines, zero
    for the exponentially decaying families (whose neglected tail is below
    ``tail_tol``).
    """
    u = np.asarray(u, dtype=float)
    if spec.kind is Kind.SPLINE_ODD:
        J = SPLINE_EXPLICIT_TERMS
    else:
        J = max(truncation_index(spec, tail_tol), 1)
    ratios = np.exp(np.stack([log_m_ratio(spec, Ratio.PHI, j, u) for j in range(-J, J + 1)]))
    if spec.kind is Kind.SPLINE_ODD:
        remainder = _spline_remainder(spec, u, J)
    else:
        remainder = np.zeros(u.shape)
    return J, ratios, remainder


def periodization(spec: FamilySpec, u: float, tail_tol: float = 1e-14) -> float:
    """Normalized periodization 1 + sum_{j != 0} M[phi_hat]_j(u), always >= 1."""
    u = float(u)
    if not abs(u) <= math.pi:
        raise DomainError(f"periodization needs |u| <= pi, got {u}")
    if not tail_tol > 0:
        raise DomainError("tail_tol must be positive")
    _, ratios, remainder = periodization_parts(spec, u, tail_tol)
    return float(_sum_periodization(ratios, remainder))


def _sum_periodization(ratios, remainder):
    # add smallest terms first; j = 0 (the 1) sits in the middle row
    J = (ratios.shape[0] - 1) // 2
    total = np.array(remainder, dtype=float)
    for j in range(J, 0, -1):
        total = total + ratios[J + j] + ratios[J - j]
    return total + ratios[J]
