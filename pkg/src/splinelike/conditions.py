"""Numerical audits of the structural conditions on an interpolator family.

A2  positivity of phi_hat on [-pi, pi]
B2  boundedness of sum_m sum_{n != m} int |M[phi_hat]_m M'[phi_hat]_n|
    uniformly along the escalation grid
B3  M[phi_hat]_j(xi) -> 0 as the escalation parameter grows, |xi| < pi
B4  M[phi_hat]_j(xi) <= M_j for a summable sequence M_j

Each audit returns an :class:`AuditReport` with one row per family member.
All comparisons of ratios are made on logarithms so that nothing underflows.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError
from .spectral import (
    TWO_PI,
    FamilySpec,
    Kind,
    Ratio,
    log_abs_phi_hat_deriv,
    log_m_ratio,
    log_phi_hat,
)

B2_FACTOR = 1.5
B3_FINAL_BOUND = 1e-6
B2_EXCLUSION = 1e-8
# relative slack on logs when a ratio meets its majorant with equality
_LOG_SLACK = 1e-12


def _log_le(lhs, rhs) -> bool:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    finite = np.isfinite(lhs) & np.isfinite(rhs)
    slack = np.where(finite, _LOG_SLACK * (1.0 + np.abs(rhs)), 0.0)
    with np.errstate(invalid="ignore"):
        return bool(np.all((lhs <= rhs + slack) | np.isneginf(lhs)))


# the pairs (m, n) of the B2 double sum, grouped by sign pattern
LAMBDA_SETS = ("L0", "L1", "L2", "L3", "L4", "axis")


def lambda_set(m: int, n: int) -> str | None:
    """Name of the index set holding (m, n), or None for the diagonal n == m.

    ``L0`` to ``L4`` are the quadrant-like sets used in the hand estimates;
    ``axis`` holds the pairs (m, 0) with m != 0, which those sets leave out.
    """
    if n == m:
        return None
    if m == 0:
        return "L0"
    if n == 0:
        return "axis"
    if m > 0:
        return "L1" if n > 0 else "L4"
    return "L2" if n > 0 else "L3"


@dataclass(frozen=True)
class AuditRow:
    param: float
    estimate: float
    bound: float
    passed: bool


@dataclass
class AuditReport:
    """Outcome of one condition audit over one family's parameter grid."""

    condition: str
    family: str
    bound_description: str
    rows: list[AuditRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def estimates(self) -> np.ndarray:
        return np.array([r.estimate for r in self.rows])

    def csv_rows(self) -> list[list[str]]:
        return [[self.condition, self.family, repr(float(r.param)), repr(float(r.estimate)),
                 repr(float(r.bound)), "pass" if r.passed else "fail"] for r in self.rows]

    def to_csv(self) -> str:
        return reports_to_csv([self])


CSV_HEADER = ["condition", "family", "param", "estimate", "bound", "verdict"]


def reports_to_csv(reports: Sequence[AuditReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep in reports:
        writer.writerows(rep.csv_rows())
    return buf.getvalue()


def write_reports(reports: Sequence[AuditReport], path) -> None:
    """Write the reports to ``path`` atomically."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(reports_to_csv(reports))
    tmp.replace(path)


def _family_name(grid: Sequence[FamilySpec]) -> str:
    labels = {s.label for s in grid}
    if len(labels) != 1:
        raise DomainError(f"parameter grid mixes families: {sorted(labels)}")
    return labels.pop()


def _check_grid(grid: Sequence[FamilySpec]) -> str:
    name = _family_name(grid)
    values = [s.escalation_value for s in grid]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError("escalation grid must be strictly increasing")
    return name


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


# ---------------------------------------------------------------- A2

def audit_a2(spec: FamilySpec, grid_size: int = 4096) -> AuditReport:
    """Minimum of phi_hat over a uniform grid of [-pi, pi]; pass iff positive.

    phi_hat is even and decreasing in |xi|, so the minimum sits at the
    endpoints. Singular kinds are +inf at the origin, which only helps.
    """
    if grid_size < 2:
        raise DomainError("grid_size must be >= 2")
    xi = np.linspace(-math.pi, math.pi, grid_size)
    log_min = float(np.min(log_phi_hat(spec, xi)))
    rep = AuditReport("A2", spec.label, "min phi_hat on [-pi, pi] > 0")
    rep.rows.append(AuditRow(spec.escalation_value, math.exp(log_min), 0.0,
                             log_min > -math.inf))
    rep.details["log_min"] = log_min
    if spec.singular:
        rep.notes.append("phi_hat has a pole at 0; the minimum is attained at |xi| = pi")
    return rep


def audit_a2_grid(spec_grid: Sequence[FamilySpec], grid_size: int = 4096) -> AuditReport:
    """:func:`audit_a2` for each member of a parameter grid, in one report."""
    name = _family_name(spec_grid)
    rep = AuditReport("A2", name, "min phi_hat on [-pi, pi] > 0")
    for spec in spec_grid:
        single = audit_a2(spec, grid_size)
        rep.rows.extend(single.rows)
        for note in single.notes:
            if note not in rep.notes:
                rep.notes.append(note)
    return rep


# ---------------------------------------------------------------- B2

def _graded_nodes(points: int, exclusion: float = B2_EXCLUSION):
    """Composite Gauss-Legendre nodes on [-pi, pi] minus (-exclusion, exclusion).

    Pieces shrink geometrically toward 0 and toward +-pi, where the
    integrands have boundary layers of width ~1/alpha.
    """
    half = math.pi / 2.0
    inner = [half * 2.0 ** -i for i in range(1, 64) if half * 2.0 ** -i > exclusion]
    outer = [math.pi - half * 2.0 ** -i for i in range(1, 21)]
    breaks = np.array(sorted({exclusion, half, math.pi, *inner, *outer}))
    g, w = np.polynomial.legendre.leggauss(points)
    a, b = breaks[:-1, None], breaks[1:, None]
    u = (a + 0.5 * (b - a) * (g + 1.0)).ravel()
    wu = (0.5 * (b - a) * w).ravel()
    return np.concatenate([-u[::-1], u]), np.concatenate([wu[::-1], wu])


def b2_matrix(spec: FamilySpec, m_max: int, n_max: int, quad_points: int = 8):
    """Integrals I[m, n] = int M[phi_hat]_m(xi) |phi_hat'(xi + 2 pi n)| / phi_hat(xi).

    Returns ``(I, ms, ns)`` with ``I`` of shape (2 m_max + 1, 2 n_max + 1).
    The derivative factor is the mixed quotient |phi_hat'| / phi_hat, the
    one produced by differentiating phi_hat / P.
    """
    xi, w = _graded_nodes(quad_points)
    log_den = log_phi_hat(spec, xi)
    ms = np.arange(-m_max, m_max + 1)
    ns = np.arange(-n_max, n_max + 1)
    a = np.exp(np.stack([log_phi_hat(spec, xi + TWO_PI * m) for m in ms]) - log_den)
    b = np.exp(np.stack([log_abs_phi_hat_deriv(spec, xi + TWO_PI * n) for n in ns]) - log_den)
    return (a * w) @ b.T, ms, ns


def _b2_sums(matrix, ms, ns, m_max, n_max):
    sums = dict.fromkeys(LAMBDA_SETS, 0.0)
    for i, m in enumerate(ms):
        if abs(m) > m_max:
            continue
        for j, n in enumerate(ns):
            name = lambda_set(int(m), int(n))
            if name is not None and abs(n) <= n_max:
                sums[name] += float(matrix[i, j])
    return sums


def b2_estimate(spec: FamilySpec, m_max: int = 8, n_max: int = 8, quad_points: int = 8):
    """B2 double sum over the box |m| <= m_max, |n| <= n_max.

    Returns ``(sums, tail)``: per-set partial sums and the extra mass found
    by doubling the box, used as the truncation estimate.
    """
    if m_max < 4 or n_max < 4:
        raise DomainError("B2 truncation limits must be >= 4")
    matrix, ms, ns = b2_matrix(spec, 2 * m_max, 2 * n_max, quad_points)
    sums = _b2_sums(matrix, ms, ns, m_max, n_max)
    big = _b2_sums(matrix, ms, ns, 2 * m_max, 2 * n_max)
    tail = max(sum(big.values()) - sum(sums.values()), 0.0)
    return sums, tail


def audit_b2(spec_grid: Sequence[FamilySpec], m_max: int = 8, n_max: int = 8,
             quad_points: int = 8, factor: float = B2_FACTOR, jobs: int = 1) -> AuditReport:
    """Uniform boundedness of the B2 double sum along an escalation grid.

    Pass iff every estimate is at most ``factor * min + tail``, the tail
    being the largest box-doubling increment seen on the grid.
    """
    name = _check_grid(spec_grid)
    results = _map(lambda s: b2_estimate(s, m_max, n_max, quad_points), list(spec_grid), jobs)
    totals = [sum(sums.values()) for sums, _ in results]
    tail = max(t for _, t in results)
    threshold = factor * min(totals) + tail
    rep = AuditReport("B2", name, f"max <= {factor:g} * min + tail")
    for spec, total in zip(spec_grid, totals):
        rep.rows.append(AuditRow(spec.escalation_value, total, threshold, total <= threshold))
    rep.details["sets"] = [sums for sums, _ in results]
    rep.details["tails"] = [t for _, t in results]
    rep.details["tail"] = tail
    rep.notes.append(
        f"box |m| <= {m_max}, |n| <= {n_max}; tail allowance {tail:.3g} from doubling the box")
    return rep


# ---------------------------------------------------------------- B3

DEFAULT_B3_XI = (-math.pi, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, math.pi)
DEFAULT_B3_J = (-3, -2, -1, 1, 2, 3)


def audit_b3(spec_grid: Sequence[FamilySpec], j_set: Sequence[int] = DEFAULT_B3_J,
             xi_grid: Sequence[float] = DEFAULT_B3_XI,
             final_bound: float = B3_FINAL_BOUND) -> AuditReport:
    """Decay of M[phi_hat]_j(xi) along the escalation grid.

    For every (j, xi) with |xi| < pi the ratio must decrease strictly from
    one parameter to the next and end at or below ``final_bound``. Ratios
    that are identically 0 (the pole limit at xi = 0) satisfy both.
    The endpoints |xi| = pi are reported in the notes, not judged: there
    M_{-sign(xi)} = 1 for every family member.
    """
    name = _check_grid(spec_grid)
    if any(j == 0 for j in j_set):
        raise DomainError("B3 needs j != 0")
    xi = np.asarray(xi_grid, dtype=float)
    if np.any(np.abs(xi) > math.pi):
        raise DomainError("B3 grid must lie in [-pi, pi]")
    interior = np.abs(xi) < math.pi
    logs = np.array([[log_m_ratio(s, Ratio.PHI, j, xi) for j in j_set] for s in spec_grid])
    inner = logs[:, :, interior]

    rep = AuditReport("B3", name, f"strict decrease, final <= {final_bound:g}")
    log_final = math.log(final_bound)
    prev = None
    for idx, spec in enumerate(spec_grid):
        cur = inner[idx]
        est = float(np.exp(cur.max())) if cur.size else 0.0
        if prev is None:
            ok, bound = True, math.inf
        else:
            zero = np.isneginf(cur) & np.isneginf(prev)
            ok = bool(np.all(zero | (cur < prev)))
            bound = float(np.exp(prev.max()))
        if idx == len(spec_grid) - 1:
            ok = ok and bool(np.all(cur <= log_final))
            bound = min(bound, final_bound)
        rep.rows.append(AuditRow(spec.escalation_value, est, bound, ok))
        prev = cur

    for k in np.nonzero(~interior)[0]:
        vals = np.exp(logs[:, :, k])
        for jj, j in enumerate(j_set):
            if np.allclose(vals[:, jj], vals[0, jj], rtol=1e-12, atol=0.0):
                rep.notes.append(f"xi={xi[k]:.6g}, j={j}: constant {vals[0, jj]:.6g} "
                                 f"(endpoint excluded)")
    rep.details["log_ratios"] = logs
    return rep


# ---------------------------------------------------------------- B4

def log_dominating_bound(spec: FamilySpec, j):
    """log of the per-family summable majorant M_j, j != 0.

    Gaussian uses exp(-4 pi (j^2 - |j|)); the sharper exp(-4 pi^2 alpha
    (j^2 - |j|)) is available from :func:`log_sharp_gaussian_bound`.
    """
    j = np.abs(np.asarray(j, dtype=float))
    if spec.kind is Kind.SPLINE_ODD:
        return -2.0 * np.log(2.0 * j - 1.0)
    if spec.kind is Kind.GAUSSIAN:
        return -4.0 * math.pi * (j * j - j)
    if spec.kind is Kind.POISSON:
        return -TWO_PI * (j - 1.0)
    if spec.kind is Kind.MULTIQUADRIC_I:
        return math.log(3.0) - 1.5 * np.log(2.0 * j - 1.0)
    return (math.log(3.0) + (abs(spec.a) + 0.5) * np.log(2.0 * j + 1.0)
            - TWO_PI * (j - 1.0))


def log_sharp_gaussian_bound(spec: FamilySpec, j):
    j = np.abs(np.asarray(j, dtype=float))
    return -4.0 * math.pi ** 2 * spec.alpha * (j * j - j)


def dominating_bound(spec: FamilySpec, j: int) -> float:
    if j == 0:
        raise DomainError("the dominating sequence is indexed by j != 0")
    return float(np.exp(log_dominating_bound(spec, j)))


def _partial_sums_settle(spec: FamilySpec, j_max: int) -> bool:
    # Cauchy witness: successive dyadic blocks of the majorant shrink
    sums = []
    for top in (j_max, 2 * j_max, 4 * j_max, 8 * j_max):
        js = np.arange(1, top + 1)
        sums.append(2.0 * float(np.sum(np.exp(log_dominating_bound(spec, js)))))
    gaps = np.diff(sums)
    return bool(np.all(gaps[1:] <= gaps[:-1]) and np.all(np.isfinite(sums)))


def audit_b4(spec_grid: Sequence[FamilySpec], j_max: int = 8, xi_points: int = 512,
             jobs: int = 1) -> AuditReport:
    """M[phi_hat]_j(xi) against the family majorant, 1 <= |j| <= j_max.

    The row estimate is the largest ratio M_j(xi) / M_j over the grid, so
    a row passes iff it is at most 1 (up to rounding at equality).
    """
    name = _family_name(spec_grid)
    xi = np.linspace(-math.pi, math.pi, xi_points)
    js = [j for j in range(-j_max, j_max + 1) if j != 0]

    def worst(spec):
        best, ok = -math.inf, True
        for j in js:
            logs = log_m_ratio(spec, Ratio.PHI, j, xi)
            bound = float(log_dominating_bound(spec, j))
            ok = ok and _log_le(logs, bound)
            best = max(best, float(np.max(logs)) - bound)
        return best, ok

    results = _map(worst, list(spec_grid), jobs)
    rep = AuditReport("B4", name, "max_j,xi M_j(xi) / majorant_j <= 1")
    summable = all(_partial_sums_settle(s, j_max) for s in spec_grid)
    for spec, (e, ok) in zip(spec_grid, results):
        rep.rows.append(AuditRow(spec.escalation_value, math.exp(e), 1.0, ok and summable))
    majorant = [dominating_bound(spec_grid[0], j) for j in range(1, j_max + 1)]
    rep.details["majorant"] = majorant
    rep.details["summable"] = summable
    if spec_grid and spec_grid[0].kind is Kind.GAUSSIAN:
        sharp = []
        for spec in spec_grid:
            sharp.append(all(_log_le(log_m_ratio(spec, Ratio.PHI, j, xi),
                                      float(log_sharp_gaussian_bound(spec, j))) for j in js))
        rep.details["sharp_gaussian_holds"] = sharp
        rep.notes.append("sharper exp(-4 pi^2 alpha (j^2 - |j|)) observed: "
                         + ("holds" if all(sharp) else "violated"))
    return rep
