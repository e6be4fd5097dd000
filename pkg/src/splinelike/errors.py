"""Exception hierarchy shared by the numerical modules."""


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


class SingularityError(DomainError):
    """Evaluation requested at a pole or sign discontinuity."""


class AccuracyError(ArithmeticError):
    """Adaptive refinement could not reach the requested accuracy."""


class ToleranceError(AccuracyError):
    """A truncation or quadrature budget cannot meet its error target."""


class GridMismatchError(ValueError):
    """Two tabulated functions do not share the same grid."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
