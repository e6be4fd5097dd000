"""Cardinal interpolation with spline-like families of interpolators.

The fundamental function of each family is obtained by numerical Fourier
inversion of phi_hat / P, where P is the 2 pi-periodization of phi_hat,
and tends to sinc as the family parameter grows.
"""

from .conditions import (
    AuditReport,
    audit_a2,
    audit_a2_grid,
    audit_b2,
    audit_b3,
    audit_b4,
    dominating_bound,
)
from .errors import (
    AccuracyError,
    ConfigError,
    DomainError,
    GridMismatchError,
    SingularityError,
    ToleranceError,
)
from .fundamental import (
    FundamentalTable,
    QuadratureConfig,
    build_table,
    fundamental_value,
    fundamental_values,
    l_hat_partition,
    l_hat_ratio,
)
from .operators import (
    Interpolant,
    SampleSequence,
    interpolate,
    lp_distance,
    lp_tail_bound,
    mixed_hilbert,
    whittaker,
)
from .spectral import (
    FamilySpec,
    Kind,
    Ratio,
    SpectralValue,
    m_ratio,
    periodization,
    phi_hat,
    phi_hat_deriv,
)
from .specfun import log_macdonald_bounds, log_macdonald_k, macdonald_k, sinc

__all__ = [
    "AccuracyError", "AuditReport", "ConfigError", "DomainError", "FamilySpec",
    "FundamentalTable", "GridMismatchError", "Interpolant", "Kind", "QuadratureConfig",
    "Ratio", "SampleSequence", "SingularityError", "SpectralValue", "ToleranceError",
    "audit_a2", "audit_a2_grid", "audit_b2", "audit_b3", "audit_b4", "build_table",
    "dominating_bound", "fundamental_value", "fundamental_values", "interpolate",
    "l_hat_partition", "l_hat_ratio", "log_macdonald_bounds", "log_macdonald_k", "lp_distance", "lp_tail_bound",
    "m_ratio", "macdonald_k", "mixed_hilbert", "periodization", "phi_hat", "phi_hat_deriv",
    "sinc", "whittaker",
]
