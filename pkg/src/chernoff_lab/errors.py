"""Exception hierarchy shared by all modules."""


class ChernoffLabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ChernoffLabError, ValueError):
    """An argument lies outside the mathematical domain (e.g. t <= 0)."""


class QuadratureError(ChernoffLabError):
    """Adaptive quadrature exhausted its subdivision budget."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (estimated residual {residual:.3e})")
        self.residual = residual


class CompositionExplosionError(ChernoffLabError):
    """A composed point-mass state grew past the configured size cap."""


class BudgetError(ChernoffLabError, ValueError):
    """The naive evaluator was asked for more work than it allows."""


class ShapeError(ChernoffLabError, ValueError):
    """Arrays that must be aligned have different lengths."""


class LogDomainError(ChernoffLabError, ValueError):
    """A non-positive value reached a logarithm."""


class InsufficientDataError(ChernoffLabError, ValueError):
    """Too few points remain for a regression."""


class ConfigError(ChernoffLabError, ValueError):
    """Invalid experiment configuration or unreadable config file."""


class FormatError(ChernoffLabError, ValueError):
    """An input file does not follow the expected schema."""


class CurveError(ChernoffLabError):
    """A numerical failure while building one error curve, tagged with its pair and n."""

    def __init__(self, cause, condition, operator, n=None):
        where = f"{condition}/{operator}" + (f" n={n}" if n is not None else " reference")
        super().__init__(f"{where}: {cause}")
        self.cause = cause
        self.condition = condition
        self.operator = operator
        self.n = n
