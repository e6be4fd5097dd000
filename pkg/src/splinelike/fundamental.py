"""The fundamental function L(x) by numerical Fourier inversion.

The transform of L is the bare ratio phi_hat(xi) / P(xi), P the
2 pi-periodization of phi_hat. Writing xi = u + 2 pi m with |u| <= pi, the
ratio on panel m equals M[phi_hat]_m(u) / (1 + sum_{j != 0} M[phi_hat]_j(u)),
which never forms the 0 * inf products of a pole at the origin. Inversion
then reads

    L(x) = (2 pi)^-1 sum_m int_{-pi}^{pi} r_m(u) cos(x (u + 2 pi m)) du,

and since the panel sum is even in u only [0, pi] is integrated.

For odd splines the sum over all panels is done in closed form: with
v = u / 2 pi the panel sum is Re[G(x; v)] / Z(v), where
G(x; v) = sum_m exp(2 pi i x (m + v)) (m + v)^-2k is a polynomial in
x - floor(x) whose coefficients are Hurwitz zeta values.
"""

from __future__ import annotations

import csv
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .errors import DomainError, ToleranceError
from .spectral import (
    TWO_PI,
    FamilySpec,
    Kind,
    Ratio,
    _sum_periodization,
    log_m_ratio,
    log_sup_ratio_bound,
    periodization_parts,
    truncation_index,
)

_BASE_NODES = 16
_MAX_EXTRA_LEVELS = 4
# limits on the adaptive partition of [0, pi]
_MIN_PIECE = math.pi * 2.0 ** -24
_MAX_PIECES = 4096
# absolute targets below this sit under the rounding of the quadrature sums
_MIN_TARGET = 1e-13
_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(n: int):
    rule = _GL_CACHE.get(n)
    if rule is None:
        rule = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = rule
    return rule


def _nodes(a: float, b: float, n: int):
    x, w = _gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureConfig:
    """Budget for one Fourier inversion.

    Parameters
    ----------
    target : float
        Absolute error allowed in L(x).
    panels : int, optional
        Number M of spectral panels on each side; the frequency support is
        truncated to ``|xi| <= (2M + 1) pi``. ``None`` picks the smallest M
        whose tail bound fits in a quarter of ``target``; for odd splines
        ``None`` means all panels, summed in closed form.
    points_per_panel : int, optional
        Lower bound on Gauss nodes per sub-interval of a panel. By default
        the count grows with ``|x|`` so the phase ``cos(x xi)`` is resolved.
    tail_tol : float
        Truncation tolerance of the periodization sum.
    """

    target: float = 1e-6
    panels: int | None = None
    points_per_panel: int | None = None
    tail_tol: float = 1e-14

    def __post_init__(self):
        if not self.target > 0:
            raise DomainError("quadrature target must be positive")
        if self.panels is not None and self.panels < 1:
            raise DomainError("panels must be >= 1")
        if self.points_per_panel is not None and self.points_per_panel < 1:
            raise DomainError("points_per_panel must be >= 1")
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")


def truncation_bound(spec: FamilySpec, panels: int) -> float:
    """Bound on |L(x) - L_M(x)| from dropping the panels with |m| > M.

    Uses (2 pi)^-1 int_{-pi}^{pi} r_m <= sup M[phi_hat]_m
    <= phi_hat((2|m|-1) pi) / phi_hat(pi).
    """
    if spec.kind is Kind.SPLINE_ODD:
        s = 2.0 * spec.k
        # sum_{m>M} (2m-1)^-s = 2^-s zeta(s, M + 1/2)
        return float(2.0 * 2.0 ** -s * hurwitz_zeta(s, panels + 0.5))
    total, start, chunk = 0.0, panels + 1, 32
    while True:
        terms = np.exp(log_sup_ratio_bound(spec, np.arange(start, start + chunk)))
        total += float(np.sum(terms))
        # the remaining families decay at least geometrically
        if terms[-1] <= 1e-20 * total or terms[-1] == 0.0:
            return 2.0 * total
        start += chunk
        chunk *= 2
        if start > 10**6:
            raise ToleranceError(f"{spec.label}: panel tail bound does not settle")


def _l_hat_rows(spec: FamilySpec, u, M: int, tail_tol: float):
    """r_m(u) for m = -M..M as rows of a (2M+1, len(u)) array."""
    J, ratios, remainder = periodization_parts(spec, u, tail_tol)
    total = _sum_periodization(ratios, remainder)
    rows = []
    for m in range(-M, M + 1):
        if abs(m) <= J:
            rows.append(ratios[J + m])
        else:
            rows.append(np.exp(log_m_ratio(spec, Ratio.PHI, m, u)))
    return np.stack(rows) / total


def l_hat_ratio(spec: FamilySpec, m: int, u: float, tail_tol: float = 1e-14) -> float:
    """Bare transform ratio phi_hat(xi) / P(xi) at xi = u + 2 pi m, in [0, 1]."""
    u = float(u)
    if not abs(u) <= math.pi:
        raise DomainError(f"need |u| <= pi, got {u}")
    J, ratios, remainder = periodization_parts(spec, u, tail_tol)
    total = _sum_periodization(ratios, remainder)
    if abs(m) <= J:
        num = ratios[J + m]
    else:
        num = np.exp(log_m_ratio(spec, Ratio.PHI, m, u))
    return float(num / total)


def l_hat_partition(spec: FamilySpec, u, tail_tol: float = 1e-14):
    """sum_m r_m(u) using the periodization's own truncation; equals 1.

    The explicit rows |m| <= J are added to the remainder term (closed form
    for splines, below ``tail_tol`` otherwise) divided by P.
    """
    u = np.asarray(u, dtype=float)
    J, ratios, remainder = periodization_parts(spec, u, tail_tol)
    total = _sum_periodization(ratios, remainder)
    return _sum_periodization(ratios / total, remainder / total)


class _Kernel:
    """Quadrature data for one (spec, config), built lazily and memoized.

    Node sets are keyed by a per-piece refinement profile. Publication into
    the dict happens under a lock once fully built, so concurrent readers
    never see partial arrays.
    """

    def __init__(self, spec: FamilySpec, q: QuadratureConfig):
        self.spec = spec
        self.q = q
        self.lattice = spec.kind is Kind.SPLINE_ODD and q.panels is None
        if q.target < _MIN_TARGET:
            raise ToleranceError(
                f"{spec.label}: target {q.target:g} is below the rounding floor "
                f"{_MIN_TARGET:g} of the quadrature")
        if self.lattice:
            self.panels = None
            self.truncation = 0.0
        else:
            self.panels = q.panels if q.panels is not None else max(
                truncation_index(spec, q.target / 4.0), 1)
            self.truncation = truncation_bound(spec, self.panels)
            if self.truncation > q.target / 2.0:
                raise ToleranceError(
                    f"{spec.label}: {self.panels} panels leave a truncation error "
                    f"{self.truncation:.3g} above half the target {q.target:g}")
        self.pieces = self._partition()
        self._lock = threading.Lock()
        self._flat: dict[tuple, tuple] = {}

    def _partition(self):
        if self.lattice:
            return np.linspace(0.0, math.pi, 5)
        tol = 0.05 * self.q.target
        done = []
        stack = [(math.pi / 2, math.pi), (0.0, math.pi / 2)]
        while stack:
            a, b = stack.pop()
            mid = 0.5 * (a + b)
            ua, wa = _nodes(a, b, _BASE_NODES)
            ul, wl = _nodes(a, mid, _BASE_NODES)
            ur, wr = _nodes(mid, b, _BASE_NODES)
            rows = _l_hat_rows(self.spec, np.concatenate([ua, ul, ur]), self.panels,
                               self.q.tail_tol)
            n = _BASE_NODES
            whole = rows[:, :n] @ wa
            halves = rows[:, n:2 * n] @ wl + rows[:, 2 * n:] @ wr
            err = np.max(np.abs(whole - halves))
            if err <= tol * (b - a) / math.pi:
                done.append((a, b))
            elif b - a < _MIN_PIECE or len(done) + len(stack) > _MAX_PIECES:
                raise ToleranceError(
                    f"{self.spec.label}: transform cannot be resolved to target "
                    f"{self.q.target:g} near u={a:.6g}")
            else:
                stack.append((mid, b))
                stack.append((a, mid))
        done.sort()
        return np.array([p[0] for p in done] + [done[-1][1]])

    def profile(self, x: float):
        lengths = np.diff(self.pieces)
        need = _BASE_NODES + np.ceil(abs(x) * lengths)
        if self.q.points_per_panel is not None:
            need = np.maximum(need, self.q.points_per_panel)
        return tuple(int(v) for v in np.maximum(np.ceil(np.log2(need / _BASE_NODES)), 0))

    def flat(self, profile: tuple):
        data = self._flat.get(profile)
        if data is not None:
            return data
        us, ws = [], []
        for (a, b), lev in zip(zip(self.pieces[:-1], self.pieces[1:]), profile):
            u, w = _nodes(a, b, _BASE_NODES * 2 ** lev)
            us.append(u)
            ws.append(w)
        u = np.concatenate(us)
        w = np.concatenate(ws)
        if self.lattice:
            data = _lattice_data(self.spec.k, u, w)
        else:
            rows = _l_hat_rows(self.spec, u, self.panels, self.q.tail_tol)
            m = np.arange(-self.panels, self.panels + 1)[:, None]
            xi = (u[None, :] + TWO_PI * m).ravel()
            weights = (rows * w[None, :]).ravel()
            keep = weights > 0.0
            data = (xi[keep], weights[keep])
        with self._lock:
            self._flat.setdefault(profile, data)
            return self._flat[profile]

    def integrate(self, x: float, profile: tuple) -> float:
        x = abs(x)
        data = self.flat(profile)
        if self.lattice:
            return _lattice_integral(self.spec.k, x, data)
        xi, weights = data
        return float(np.sum(weights * np.cos(x * xi)) / math.pi)

    def evaluate(self, x: float) -> tuple[float, float]:
        """Return ``(L(x), error estimate)``."""
        base = self.profile(x)
        budget = self.q.target - self.truncation
        for extra in range(_MAX_EXTRA_LEVELS):
            coarse = tuple(v + extra for v in base)
            fine = tuple(v + 1 for v in coarse)
            lo = self.integrate(x, coarse)
            hi = self.integrate(x, fine)
            est = abs(hi - lo)
            if est <= 0.5 * budget:
                return hi, est + self.truncation
        raise ToleranceError(
            f"{self.spec.label}: quadrature at x={x} stalls at error {est:.3g} "
            f"(target {self.q.target:g}); enlarge the budget")


def _lattice_data(k: int, u, w):
    s = 2 * k
    v = u / TWO_PI
    zt = {q: 1.0 + v ** q * (hurwitz_zeta(q, 1.0 + v) + (-1) ** q * hurwitz_zeta(q, 1.0 - v))
          for q in range(2, s + 1)}
    last = v * math.pi * np.exp(1j * math.pi * v) / np.sin(math.pi * v) / math.factorial(s - 1)
    coeffs = [zt[s - r] / math.factorial(r) for r in range(s - 1)] + [last]
    # 2 int_0^{1/2} dv = pi^-1 int_0^pi du
    return v, 2.0 * w / TWO_PI, coeffs, zt[s]


def _lattice_integral(k: int, x: float, data) -> float:
    v, w, coeffs, denom = data
    n = math.floor(x)
    z = 2j * math.pi * (x - n) * v
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * z + c
    h = np.real(np.exp(2j * math.pi * n * v) * acc) / denom
    return float(np.sum(w * h))


_KERNELS: dict[tuple, _Kernel] = {}
_KERNELS_LOCK = threading.Lock()


def _kernel(spec: FamilySpec, q: QuadratureConfig) -> _Kernel:
    key = (spec, q)
    kern = _KERNELS.get(key)
    if kern is None:
        built = _Kernel(spec, q)
        with _KERNELS_LOCK:
            kern = _KERNELS.setdefault(key, built)
    return kern


def fundamental_value(spec: FamilySpec, x: float, q: QuadratureConfig | None = None) -> float:
    """L(x) for the interpolator ``spec`` with absolute error at most ``q.target``.

    Raises
    ------
    ToleranceError
        If the panel or node budget cannot meet the target.
    """
    q = q or QuadratureConfig()
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    value, _ = _kernel(spec, q).evaluate(x)
    return value


def fundamental_with_error(spec: FamilySpec, x: float, q: QuadratureConfig | None = None):
    """Like :func:`fundamental_value` but also returns the error estimate."""
    q = q or QuadratureConfig()
    return _kernel(spec, q).evaluate(float(x))


def fundamental_values(spec: FamilySpec, xs, q: QuadratureConfig | None = None, jobs: int = 1):
    """L at many points; each point is computed independently of the others."""
    q = q or QuadratureConfig()
    kern = _kernel(spec, q)
    xs = [float(x) for x in np.asarray(xs, dtype=float).ravel()]
    if jobs > 1 and len(xs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(lambda t: kern.evaluate(t)[0], xs))
    else:
        out = [kern.evaluate(x)[0] for x in xs]
    return np.array(out)


@dataclass
class FundamentalTable:
    """Samples of L on the uniform grid x0 + i h, i = 0..count-1."""

    spec: FamilySpec
    x0: float
    step: float
    count: int
    values: np.ndarray
    error_bound: float
    decay_constant: float = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.count,):
            raise ValueError("values length does not match grid count")
        # empirical C in |L(x)| <= C (1 + |x|)^-1
        self.decay_constant = float(np.max(np.abs(self.values) * (1.0 + np.abs(self.x))))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.step * np.arange(self.count)

    def integer_errors(self) -> dict[int, float]:
        """|L(j) - delta_{0j}| at grid points that are integers."""
        out = {}
        for xv, val in zip(self.x, self.values):
            if float(xv).is_integer():
                out[int(xv)] = abs(val - (1.0 if xv == 0 else 0.0))
        return out

    def to_csv(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "value"])
            for xv, val in zip(self.x, self.values):
                writer.writerow([f"{xv:.17g}", f"{val:.17g}"])
        tmp.replace(path)

    @staticmethod
    def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return data[:, 0], data[:, 1]


def build_table(spec: FamilySpec, grid: tuple[float, float, int],
                q: QuadratureConfig | None = None, jobs: int = 1) -> FundamentalTable:
    """Tabulate L on ``grid = (x0, h, N)``."""
    q = q or QuadratureConfig()
    x0, h, n = grid
    if n < 1 or not h > 0:
        raise DomainError("grid needs N >= 1 and h > 0")
    xs = float(x0) + float(h) * np.arange(int(n))
    values = fundamental_values(spec, xs, q, jobs=jobs)
    return FundamentalTable(spec, float(x0), float(h), int(n), values, q.target)
