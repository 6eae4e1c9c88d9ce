"""Initial conditions and reference solutions of the heat Cauchy problem.

Reference solutions solve ``u_t = u_xx`` on the real line, ``u(0, .) = u0``,
via the Gaussian convolution ``u(t, x) = int Phi(x - y, t) u0(y) dy``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np
from scipy.special import erfc, erfcx

from .errors import DomainError
from .quadrature import integrate_family

__all__ = [
    "ScalarFunction",
    "ReferenceSolution",
    "catalog",
    "get_condition",
    "heat_kernel",
    "exact_solution",
    "closed_form_exp_abs",
    "QUADRATURE_TOL",
    "TRUNCATION_WIDTH",
]

QUADRATURE_TOL = 1e-10
# kernel tail beyond 16 sqrt(t) is below 1e-27
TRUNCATION_WIDTH = 16.0
QUADRATURE_DEGREE = 20


def _check_time(t: float) -> None:
    if not t > 0:
        raise DomainError(f"evolution time must be positive, got t={t!r}")


@dataclass(frozen=True)
class ScalarFunction:
    """A bounded real function of one real variable plus its metadata.

    ``evaluator`` must accept numpy arrays. ``closed_form``, when set, maps
    ``(t, xs)`` to the exact heat-semigroup image ``u(t, xs)`` and is used
    in place of quadrature by :func:`exact_solution`.
    """

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    comparison_interval: tuple[float, float]
    periodic: bool = False
    period: Optional[float] = None
    smoothness_label: str = ""
    bound: float = 1.0
    # the power alpha for the |sin x|^alpha family, None otherwise
    power: Optional[float] = None
    closed_form: Optional[Callable[[float, np.ndarray], np.ndarray]] = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        if self.periodic != (self.period is not None):
            raise ValueError("period must be given exactly when periodic=True")

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    @property
    def slug(self) -> str:
        """File-name safe version of ``name``."""
        return self.name.replace("/", "_")


@dataclass(frozen=True)
class ReferenceSolution:
    source: Literal["closed_form", "quadrature"]
    values: np.ndarray
    t: float


def heat_kernel(x, t: float):
    """Heat kernel ``(2 sqrt(pi t))^-1 exp(-x^2 / 4t)``; ``x`` may be an array."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * x / (4.0 * t)) / (2.0 * math.sqrt(math.pi * t))
    return out if out.ndim else float(out)


def closed_form_exp_abs(t: float, x):
    """Heat-semigroup image of ``exp(-|x|)``.

    Equals ``(e^t/2) [e^-x erfc((2t-x)/(2 sqrt t)) + e^x erfc((2t+x)/(2 sqrt t))]``.
    Each term is evaluated through ``erfcx`` where its argument is
    non-negative so that no intermediate overflows for large ``|x|``.
    """
    _check_time(t)
    x = np.asarray(x, dtype=float)
    out = 0.5 * (_exp_erfc_term(t, -x) + _exp_erfc_term(t, x))
    return out if out.ndim else float(out)


def _exp_erfc_term(t, x):
    # e^{t+x} erfc(z), z = (2t+x)/(2 sqrt t); note t + x - z^2 = -x^2/(4t)
    z = (2.0 * t + x) / (2.0 * math.sqrt(t))
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = np.exp(-x * x / (4.0 * t)) * erfcx(np.maximum(z, 0.0))
        direct = np.exp(t + x) * erfc(z)
    return np.where(z >= 0.0, scaled, direct)


def _sin_closed_form(t, xs):
    return math.exp(-t) * np.sin(xs)


def _abs_sin_power(alpha):
    def evaluate(x):
        return np.abs(np.sin(x)) ** alpha

    return evaluate


_TRIG_INTERVAL = (-math.pi, math.pi)

_POWERS = (
    ("1/4", 0.25, "Holder-1/4"),
    ("1/2", 0.5, "Holder-1/2"),
    ("3/4", 0.75, "Holder-3/4"),
    ("1", 1.0, "Lipschitz"),
    ("3/2", 1.5, "C1, derivative Holder-1/2"),
    ("5/2", 2.5, "C2, second derivative Holder-1/2"),
    ("7/2", 3.5, "C3, third derivative Holder-1/2"),
    ("9/2", 4.5, "C4, fourth derivative Holder-1/2"),
)


def _build_catalog() -> tuple[ScalarFunction, ...]:
    entries = [
        ScalarFunction(
            name="sin",
            evaluator=np.sin,
            comparison_interval=_TRIG_INTERVAL,
            periodic=True,
            period=2 * math.pi,
            smoothness_label="C-infinity",
            closed_form=_sin_closed_form,
        )
    ]
    for label, alpha, smoothness in _POWERS:
        entries.append(
            ScalarFunction(
                name=f"abs-sin-{label}",
                evaluator=_abs_sin_power(alpha),
                comparison_interval=_TRIG_INTERVAL,
                periodic=True,
                period=math.pi,
                smoothness_label=smoothness,
                power=alpha,
            )
        )
    entries.append(
        ScalarFunction(
            name="exp-abs",
            evaluator=lambda x: np.exp(-np.abs(x)),
            comparison_interval=(-10.0, 10.0),
            smoothness_label="Lipschitz",
            closed_form=closed_form_exp_abs,
        )
    )
    return tuple(entries)


_CATALOG = _build_catalog()


def catalog() -> list[ScalarFunction]:
    """The ten initial conditions of the experimental program, in catalog order."""
    return list(_CATALOG)


def get_condition(name: str) -> ScalarFunction:
    for entry in _CATALOG:
        if entry.name == name:
            return entry
    known = ", ".join(e.name for e in _CATALOG)
    raise KeyError(f"unknown initial condition {name!r}; known: {known}")


def exact_solution(
    u0: ScalarFunction,
    t: float,
    grid,
    *,
    method: Literal["auto", "closed_form", "quadrature"] = "auto",
    tol: float = QUADRATURE_TOL,
) -> ReferenceSolution:
    """Solve the heat Cauchy problem at time ``t`` on the abscissae of ``grid``.

    ``grid`` is either a :class:`~chernoff_lab.analysis.Grid` or an array of
    abscissae. With ``method="auto"`` a registered closed form is preferred.
    The quadrature path integrates ``Phi(x - y, t) u0(y)`` over
    ``[min x - W sqrt t, max x + W sqrt t]`` with one shared adaptive
    partition for all abscissae, so kinks of ``u0`` (which sit at fixed
    ``y``) are resolved once.

    Raises:
        DomainError: ``t <= 0``.
        QuadratureError: the adaptive scheme did not reach ``tol``.
    """
    _check_time(t)
    xs = np.asarray(getattr(grid, "abscissae", grid), dtype=float).ravel()
    if xs.size == 0:
        raise ValueError("grid is empty")

    if method == "closed_form" or (method == "auto" and u0.closed_form is not None):
        if u0.closed_form is None:
            raise ValueError(f"{u0.name!r} has no registered closed form")
        return ReferenceSolution("closed_form", np.asarray(u0.closed_form(t, xs), float), t)

    reach = TRUNCATION_WIDTH * math.sqrt(t)
    lo, hi = xs.min() - reach, xs.max() + reach

    def integrand(y):
        return heat_kernel(xs[:, None] - y[None, :], t) * u0(y)[None, :]

    initial = max(8, int(math.ceil((hi - lo) / math.sqrt(t))))
    result = integrate_family(
        integrand, lo, hi, tol=tol, degree=QUADRATURE_DEGREE, initial_panels=initial
    )
    return ReferenceSolution("quadrature", result.values, t)
