"""Experiment drivers behind the ``interp`` command.

Each driver takes an :class:`ExperimentConfig` and returns plain rows; the
CLI layer handles files and exit codes. Every number is computed
independently of thread scheduling, so reruns give identical output.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import conditions
from .errors import ConfigError, DomainError
from .fundamental import QuadratureConfig, fundamental_values
from .operators import grid as make_grid, lp_distance, lp_tail_bound
from .spectral import FamilySpec
from .specfun import sinc

COMMANDS = ("convergence", "recovery", "audit")
FAMILIES = ("spline", "gaussian", "poisson", "mq1", "mq2")
FUNCTIONS = ("sinc_shift", "cosine", "finite_combination", "zero")

DEFAULT_GRIDS: dict[str, tuple[float, ...]] = {
    "spline": (1, 2, 3, 4, 5, 6),
    "gaussian": (1, 2, 4, 8, 16, 32, 64),
    "poisson": (1, 2, 4, 8, 16, 32),
    "mq1": (1, 2, 3, 4, 5, 6),
    "mq2": (1, 2, 4, 8, 16),
}

def make_spec(family: str, value: float, c: float = 1.0, a: float = 0.5) -> FamilySpec:
    """Family member with escalation parameter ``value``.

    ``c`` is the fixed shape of ``mq1`` and ``a`` the fixed exponent of
    ``mq2``; both are ignored by the other families.
    """
    if family == "spline":
        if float(value) != int(value):
            raise DomainError(f"spline degree parameter must be an integer, got {value}")
        return FamilySpec.spline(int(value))
    if family == "gaussian":
        return FamilySpec.gaussian(float(value))
    if family == "poisson":
        return FamilySpec.poisson(float(value))
    if family == "mq1":
        if float(value) != int(value):
            raise DomainError(f"mq1 order must be an integer, got {value}")
        return FamilySpec.multiquadric_i(int(value), c)
    if family == "mq2":
        return FamilySpec.multiquadric_ii(float(value), a)
    raise ConfigError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run depends on.

    ``families`` is only read by the audit command; the other commands use
    ``family`` and ``param_grid``. An empty ``param_grid`` means the
    family's default escalation grid.
    """

    command: str
    family: str = "gaussian"
    families: tuple[str, ...] = FAMILIES
    param_grid: tuple[float, ...] = ()
    c: float = 1.0
    a: float = 0.5
    p: float = 2.0
    window: float = 10.0
    step: float = 1.0 / 16.0
    target: float = 1e-6
    function: str = "sinc_shift"
    omega: float = 2.0
    shift: float = 0.25
    support: int = 200
    jobs: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        bad = [f for f in self.families if f not in FAMILIES]
        if bad:
            raise ConfigError(f"unknown families {bad}")
        grid = tuple(float(v) for v in self.param_grid)
        object.__setattr__(self, "param_grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("param_grid must be strictly increasing")
        if not (self.p >= 1.0):
            raise ConfigError("p must lie in [1, inf]")
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ConfigError("step must be positive")
        if not (self.window >= 1.0 and math.isfinite(self.window)):
            raise ConfigError("window must be >= 1")
        n = round(2.0 * self.window / self.step)
        if not math.isclose(n * self.step, 2.0 * self.window, rel_tol=1e-12):
            raise ConfigError("step must divide the window length 2T")
        if not self.target > 0.0:
            raise ConfigError("target must be positive")
        if self.function not in FUNCTIONS:
            raise ConfigError(f"unknown function {self.function!r}")
        if self.function == "cosine" and not abs(self.omega) < math.pi:
            raise ConfigError("cosine frequency must satisfy |omega| < pi")
        if self.support < 1:
            raise ConfigError("support must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def grid_values(self) -> tuple[float, ...]:
        return self.param_grid or DEFAULT_GRIDS[self.family]

    def specs(self, family: str | None = None, grid: Sequence[float] | None = None):
        family = family or self.family
        if grid is None:
            grid = self.param_grid or DEFAULT_GRIDS[family]
        try:
            return [make_spec(family, v, self.c, self.a) for v in grid]
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(target=self.target)


# ---------------------------------------------------------------- config files

def _parse_number(text: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _parse_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


_CONVERTERS: dict[str, Callable[[str], object]] = {
    "command": str.strip,
    "family": str.strip,
    "families": lambda s: tuple(_parse_list(s)),
    "param_grid": lambda s: tuple(_parse_number(t) for t in _parse_list(s)),
    "c": _parse_number,
    "a": _parse_number,
    "p": _parse_number,
    "window": _parse_number,
    "step": _parse_number,
    "target": _parse_number,
    "function": str.strip,
    "omega": _parse_number,
    "shift": _parse_number,
    "support": lambda s: int(_parse_number(s)),
    "jobs": lambda s: int(_parse_number(s)),
    "out": str.strip,
}


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, blank lines skipped."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        entries[key] = value
    return entries


def build_config(file_entries: dict[str, str] | None = None, **overrides) -> ExperimentConfig:
    """Merge file entries (strings) with typed overrides; overrides win.

    ``None`` overrides are ignored so that unset CLI flags fall through.
    """
    values: dict[str, object] = {}
    for key, text in (file_entries or {}).items():
        try:
            values[key] = _CONVERTERS[key](text)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {text!r}") from exc
    known = {f.name for f in fields(ExperimentConfig)}
    for key, val in overrides.items():
        if key not in known:
            raise ConfigError(f"unknown setting {key!r}")
        if val is not None:
            values[key] = val
    if "command" not in values:
        raise ConfigError("no command given")
    if "family" in values and "families" not in values:
        values["families"] = (values["family"],)
    return ExperimentConfig(**values)


# ---------------------------------------------------------------- helpers

def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def fundamental_on_grid(spec: FamilySpec, window: float, step: float,
                        q: QuadratureConfig, jobs: int = 1) -> np.ndarray:
    """L on ``grid(window, step)``; each |x| is evaluated once since L is even."""
    xs = make_grid(window, step)
    uniq, inverse = np.unique(np.abs(xs), return_inverse=True)
    return fundamental_values(spec, uniq, q, jobs=jobs)[inverse]


def format_number(x: float) -> str:
    """Shortest round-trip decimal form."""
    return repr(float(x))


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


# ---------------------------------------------------------------- convergence

CONVERGENCE_HEADER = ("param", "distance", "tail_bound")


@dataclass(frozen=True)
class ConvergenceRow:
    param: float
    distance: float
    tail_bound: float


def convergence_row(spec: FamilySpec, cfg: ExperimentConfig) -> ConvergenceRow:
    """||L - sinc|| on [-T, T] plus a bound for |x| > T.

    The tail uses the empirical C of |L - sinc| (1 + |x|) on the grid.
    """
    xs = make_grid(cfg.window, cfg.step)
    lv = fundamental_on_grid(spec, cfg.window, cfg.step, cfg.quadrature)
    diff = lv - sinc(xs)
    dist = lp_distance(lv, sinc(xs), cfg.p, cfg.window, cfg.step)
    const = float(np.max(np.abs(diff) * (1.0 + np.abs(xs))))
    return ConvergenceRow(spec.escalation_value, dist, lp_tail_bound(const, cfg.p, cfg.window))


def run_convergence(cfg: ExperimentConfig) -> list[ConvergenceRow]:
    return _map(lambda s: convergence_row(s, cfg), cfg.specs(), cfg.jobs)


# ---------------------------------------------------------------- recovery

RECOVERY_HEADER = ("param", "sup_error", "truncation")


def target_function(cfg: ExperimentConfig) -> Callable:
    """The band-limited target f selected by ``cfg.function``."""
    if cfg.function == "sinc_shift":
        s = cfg.shift
        return lambda x: sinc(np.asarray(x, dtype=float) - s)
    if cfg.function == "cosine":
        w = cfg.omega
        return lambda x: np.cos(w * np.asarray(x, dtype=float))
    if cfg.function == "finite_combination":
        def combo(x):
            x = np.asarray(x, dtype=float)
            return 0.5 * sinc(x + 1.5) - 0.25 * sinc(x - 0.25) + 0.3 * np.cos(1.5 * x)
        return combo
    return lambda x: np.zeros(np.shape(x))


@dataclass(frozen=True)
class RecoveryRow:
    param: float
    sup_error: float
    truncation: float


def _interpolant_on_grid(coeffs: np.ndarray, ks: np.ndarray, xs: np.ndarray,
                         ltab: np.ndarray, per_unit: int) -> np.ndarray:
    # x_i - k lies on the table lattice because step divides 1
    out = np.zeros(len(xs))
    xi = np.rint(xs * per_unit).astype(np.int64)
    for k, fk in zip(ks, coeffs):
        if fk != 0.0:
            out += fk * ltab[np.abs(xi - k * per_unit)]
    return out


def recovery_row(spec: FamilySpec, cfg: ExperimentConfig) -> RecoveryRow:
    """sup |f - I[f]| over the grid, samples |k| <= K.

    The truncation column is sup |I_K - I_2K|, the change from doubling
    the sample support.
    """
    per_unit = round(1.0 / cfg.step)
    if not math.isclose(per_unit * cfg.step, 1.0, rel_tol=1e-12):
        raise ConfigError("recovery needs a step of the form 1/n")
    f = target_function(cfg)
    xs = make_grid(cfg.window, cfg.step)
    K = cfg.support
    reach = int(math.ceil(cfg.window)) + 2 * K
    ts = np.arange(reach * per_unit + 1) / per_unit
    ltab = fundamental_values(spec, ts, cfg.quadrature)
    ks = np.arange(-K, K + 1)
    ks2 = np.arange(-2 * K, 2 * K + 1)
    approx = _interpolant_on_grid(f(ks), ks, xs, ltab, per_unit)
    wider = _interpolant_on_grid(f(ks2), ks2, xs, ltab, per_unit)
    err = float(np.max(np.abs(f(xs) - approx)))
    return RecoveryRow(spec.escalation_value, err, float(np.max(np.abs(wider - approx))))


def run_recovery(cfg: ExperimentConfig) -> list[RecoveryRow]:
    return _map(lambda s: recovery_row(s, cfg), cfg.specs(), cfg.jobs)


# ---------------------------------------------------------------- audit

def run_audit(cfg: ExperimentConfig) -> list[conditions.AuditReport]:
    """A2, B2, B3 and B4 for every family in ``cfg.families``, in that order."""
    reports = []
    for fam in cfg.families:
        specs = cfg.specs(fam)
        reports.append(conditions.audit_a2_grid(specs))
        reports.append(conditions.audit_b2(specs, jobs=cfg.jobs))
        reports.append(conditions.audit_b3(specs))
        reports.append(conditions.audit_b4(specs, jobs=cfg.jobs))
    return reports
