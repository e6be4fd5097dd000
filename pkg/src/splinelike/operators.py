"""Operators on finitely supported sample sequences.

* :func:`interpolate` -- the cardinal interpolant sum_j f(j) L(x - j)
* :func:`whittaker` -- the sinc series sum_k c_k sinc(x - k)
* :func:`mixed_hilbert` -- sum_{k != m_x} f(k) / (x - k)

plus a trapezoid L^p distance used as a finite-window stand-in for norms
over the whole line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridMismatchError
from .fundamental import FundamentalTable, QuadratureConfig, _kernel
from .spectral import FamilySpec
from .specfun import sinc


@dataclass(frozen=True)
class SampleSequence:
    """Values f(offset + i) = coefficients[i]; zero elsewhere."""

    offset: int
    coefficients: tuple

    def __init__(self, offset: int, coefficients):
        object.__setattr__(self, "offset", int(offset))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in coefficients))

    @classmethod
    def delta(cls, j0: int = 0) -> "SampleSequence":
        return cls(j0, [1.0])

    @classmethod
    def zeros(cls) -> "SampleSequence":
        return cls(0, [])

    @classmethod
    def from_function(cls, f, kmin: int, kmax: int) -> "SampleSequence":
        """Samples f(k) for kmin <= k <= kmax."""
        ks = np.arange(kmin, kmax + 1)
        return cls(kmin, [f(k) for k in ks])

    @property
    def indices(self) -> np.ndarray:
        return self.offset + np.arange(len(self.coefficients))

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)

    def __getitem__(self, k: int) -> float:
        i = int(k) - self.offset
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return 0.0

    def __len__(self) -> int:
        return len(self.coefficients)

    def shifted(self, s: int) -> "SampleSequence":
        """The sequence g(k) = f(k - s)."""
        return SampleSequence(self.offset + int(s), self.coefficients)

    def scaled(self, a: float) -> "SampleSequence":
        return SampleSequence(self.offset, [a * c for c in self.coefficients])

    def __add__(self, other: "SampleSequence") -> "SampleSequence":
        if not len(self):
            return other
        if not len(other):
            return self
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self), other.offset + len(other))
        return SampleSequence(lo, [self[k] + other[k] for k in range(lo, hi)])

    def norm(self, p: float = 2.0) -> float:
        """l^p norm; ``p = inf`` gives the sup norm."""
        if not p >= 1:
            raise DomainError("l^p norm needs p >= 1")
        v = np.abs(self.values)
        if v.size == 0:
            return 0.0
        if math.isinf(p):
            return float(v.max())
        return float(np.sum(v ** p) ** (1.0 / p))


class Interpolant:
    """Evaluates the cardinal interpolant with a memo of L values.

    Points ``x - j`` repeat heavily when ``x`` runs over a grid whose step
    divides 1, so each distinct shift is computed once.
    """

    def __init__(self, samples: SampleSequence, spec: FamilySpec,
                 q: QuadratureConfig | None = None):
        self.samples = samples
        self.spec = spec
        self.q = q or QuadratureConfig()
        self._kern = _kernel(spec, self.q)
        self._memo: dict[float, float] = {}

    def fundamental(self, t: float) -> float:
        t = abs(float(t))
        val = self._memo.get(t)
        if val is None:
            val = self._kern.evaluate(t)[0]
            self._memo[t] = val
        return val

    def __call__(self, x: float) -> float:
        x = float(x)
        total = 0.0
        for j, fj in zip(self.samples.indices, self.samples.coefficients):
            if fj != 0.0:
                total += fj * self.fundamental(x - j)
        return total

    def error_bound(self) -> float:
        """Quadrature contribution: ||f||_1 * target."""
        return self.samples.norm(1.0) * self.q.target


def interpolate(samples: SampleSequence, spec, x: float,
                q: QuadratureConfig | None = None) -> float:
    """Cardinal interpolant sum_j f(j) L(x - j).

    ``spec`` is a :class:`FamilySpec` (L computed on demand with ``q``) or a
    :class:`FundamentalTable` whose grid contains every ``x - j``.
    """
    if isinstance(spec, FundamentalTable):
        return _interpolate_from_table(samples, spec, float(x))
    return Interpolant(samples, spec, q)(x)


def _interpolate_from_table(samples, table: FundamentalTable, x: float) -> float:
    total = 0.0
    for j, fj in zip(samples.indices, samples.coefficients):
        pos = (x - j - table.x0) / table.step
        i = int(round(pos))
        if abs(pos - i) > 1e-9 or not 0 <= i < table.count:
            raise DomainError(f"x - j = {x - j} is not on the table grid")
        total += fj * table.values[i]
    return total


def whittaker(samples: SampleSequence, x):
    """Sinc series sum_k c_k sinc(x - k); vectorized over ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    for k, ck in zip(samples.indices, samples.coefficients):
        out = out + ck * sinc(x - k)
    return float(out) if out.ndim == 0 else out


def nearest_index(x: float) -> int:
    """m_x with m_x - 1/2 <= x < m_x + 1/2."""
    return math.floor(x + 0.5)


def mixed_hilbert(samples: SampleSequence, x: float) -> float:
    """sum_{k != m_x} f(k) / (x - k)."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    mx = nearest_index(x)
    total = 0.0
    for k, fk in zip(samples.indices, samples.coefficients):
        if k != mx:
            total += fk / (x - k)
    return total


def grid(window: float, step: float) -> np.ndarray:
    """Uniform grid on [-window, window] with the given step."""
    n = int(round(2.0 * window / step))
    if not math.isclose(n * step, 2.0 * window, rel_tol=1e-12):
        raise GridMismatchError("step must divide the window length")
    return -window + step * np.arange(n + 1)


def lp_distance(g1, g2, p: float, window: float, step: float) -> float:
    """Trapezoid approximation of ||g1 - g2||_{L^p[-T, T]}.

    ``g1`` and ``g2`` are samples on ``grid(window, step)``; ``p = inf``
    gives the sup over the grid.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    n = int(round(2.0 * window / step)) + 1
    if g1.shape != (n,) or g2.shape != (n,):
        raise GridMismatchError(
            f"expected {n} samples on [-{window}, {window}] step {step}, "
            f"got {g1.shape} and {g2.shape}")
    if not p >= 1:
        raise DomainError("p must be >= 1")
    d = np.abs(g1 - g2)
    if math.isinf(p):
        return float(d.max())
    f = d ** p
    integral = step * (np.sum(f) - 0.5 * (f[0] + f[-1]))
    return float(integral ** (1.0 / p))


def lp_tail_bound(constant: float, p: float, window: float) -> float:
    """L^p norm over |x| > T of a function bounded by C (1 + |x|)^-1."""
    if math.isinf(p):
        return constant / (1.0 + window)
    if p <= 1:
        return math.inf
    return (2.0 * constant ** p * (1.0 + window) ** (1.0 - p) / (p - 1.0)) ** (1.0 / p)
