"""Error measurement, log-log regression and the experiment runner."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .chernoff import ShiftChernoffOperator, evaluate_approximation, get_operator
from .config import ExperimentConfig
from .errors import ChernoffLabError, CurveError, InsufficientDataError, LogDomainError, ShapeError
from .functions import ScalarFunction, exact_solution, get_condition

__all__ = [
    "Grid",
    "ErrorCurve",
    "RegressionFit",
    "PairResult",
    "sup_error",
    "error_curve",
    "ols_fit",
    "run_experiment",
    "holder_meta_regression",
    "meta_points",
    "META_ALPHAS",
    "META_EXCLUDED",
]

log = logging.getLogger(__name__)

META_ALPHAS = (0.25, 0.5, 0.75, 1.0, 1.5, 2.5)
META_EXCLUDED = frozenset({2.5})


@dataclass(frozen=True)
class Grid:
    """``count`` abscissae ``a + (k / count)(b - a)``, ``k = 1..count``.

    The left end point is excluded and the right one included.
    """

    a: float
    b: float
    count: int = 1000

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"grid count must be positive, got {self.count}")
        if not self.b > self.a:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def abscissae(self) -> np.ndarray:
        k = np.arange(1, self.count + 1)
        return self.a + (k / self.count) * (self.b - self.a)

    @classmethod
    def for_function(cls, u0: ScalarFunction, count: int = 1000) -> "Grid":
        a, b = u0.comparison_interval
        return cls(a, b, count)


@dataclass(frozen=True)
class ErrorCurve:
    condition: str
    operator: str
    t: float
    points: tuple[tuple[int, float], ...]

    def __post_init__(self):
        ns = [n for n, _ in self.points]
        if len(set(ns)) != len(ns) or any(n < 1 for n in ns):
            raise ValueError("n values must be distinct and >= 1")
        if any(not d >= 0 for _, d in self.points):
            raise ValueError("errors must be non-negative")

    @property
    def ns(self) -> np.ndarray:
        return np.array([n for n, _ in self.points])

    @property
    def errors(self) -> np.ndarray:
        return np.array([d for _, d in self.points])


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares line ``y = slope * x + intercept``.

    For log-log fits ``x = ln n`` and ``excluded_n`` lists the left-out n;
    for the meta-regression it lists the left-out exponents.
    """

    slope: float
    intercept: float
    r2: float
    excluded_n: frozenset = field(default_factory=frozenset)

    def predict(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept


@dataclass
class PairResult:
    condition: str
    operator: str
    curve: Optional[ErrorCurve] = None
    fit: Optional[RegressionFit] = None
    error: Optional[str] = None
    error_type: Optional[str] = None
    failed_n: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def sup_error(approx: Sequence[float], reference: Sequence[float]) -> float:
    """``max_k |approx[k] - reference[k]|``."""
    approx = np.asarray(approx, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if approx.shape != reference.shape:
        raise ShapeError(f"shape mismatch: {approx.shape} vs {reference.shape}")
    if approx.size == 0:
        raise ShapeError("empty arrays")
    return float(np.max(np.abs(approx - reference)))


def error_curve(
    op: ShiftChernoffOperator,
    u0: ScalarFunction,
    t: float,
    n_range: Iterable[int],
    *,
    grid_count: int = 1000,
    reference: Optional[np.ndarray] = None,
) -> ErrorCurve:
    """Sup-norm distance between ``C(t/n)^n u0`` and the exact solution, per n.

    ``reference`` may carry precomputed exact values on the grid, so that a
    condition shared by several operators is only integrated once.

    Raises:
        CurveError: wraps any quadrature or composition failure.
    """
    n_range = list(n_range)
    if not n_range:
        raise ValueError("n_range is empty")
    xs = Grid.for_function(u0, grid_count).abscissae
    if reference is None:
        try:
            reference = exact_solution(u0, t, xs).values
        except ChernoffLabError as exc:
            raise CurveError(exc, u0.name, op.name) from exc
    points = []
    for n in n_range:
        try:
            approx = evaluate_approximation(op, t, n, u0, xs)
        except ChernoffLabError as exc:
            raise CurveError(exc, u0.name, op.name, n) from exc
        points.append((int(n), sup_error(approx, reference)))
    return ErrorCurve(u0.name, op.name, float(t), tuple(points))


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("all abscissae coincide; slope undefined")
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    residuals = y - (slope * x + intercept)
    ss_res = float(residuals @ residuals)
    ss_tot = float(dy @ dy)
    if ss_res == 0.0:
        r2 = 1.0
    elif ss_tot == 0.0:
        r2 = 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, float(intercept), r2


def ols_fit(points: Iterable[tuple[int, float]], excluded_n: Iterable[int] = ()) -> RegressionFit:
    """Fit ``ln d = slope * ln n + intercept`` over the points not in ``excluded_n``.

    Raises:
        LogDomainError: an included ``d`` (or ``n``) is not positive.
        InsufficientDataError: fewer than three points remain.
    """
    excluded = frozenset(int(n) for n in excluded_n)
    kept = sorted((int(n), float(d)) for n, d in points if int(n) not in excluded)
    if len(kept) < 3:
        raise InsufficientDataError(f"need at least 3 points for a fit, have {len(kept)}")
    ns = np.array([n for n, _ in kept], dtype=float)
    ds = np.array([d for _, d in kept])
    if np.any(ds <= 0) or np.any(ns <= 0):
        raise LogDomainError("log-log fit needs positive n and d")
    slope, intercept, r2 = _least_squares(np.log(ns), np.log(ds))
    return RegressionFit(slope, intercept, r2, excluded)


def run_experiment(config: ExperimentConfig) -> list[PairResult]:
    """Error curves and fits for every (condition, operator) pair of ``config``.

    Failures are recorded on the affected :class:`PairResult` and do not stop
    the remaining pairs.
    """
    results = []
    for cond_name in config.conditions:
        u0 = get_condition(cond_name)
        xs = Grid.for_function(u0, config.grid_count).abscissae
        try:
            reference = exact_solution(u0, config.t, xs).values
            ref_error = None
        except ChernoffLabError as exc:
            reference, ref_error = None, exc
        for op_name in config.operators:
            pair = PairResult(cond_name, op_name)
            results.append(pair)
            if ref_error is not None:
                pair.error, pair.error_type = str(ref_error), type(ref_error).__name__
                continue
            op = get_operator(op_name)
            try:
                pair.curve = error_curve(
                    op, u0, config.t, config.n_range,
                    grid_count=config.grid_count, reference=reference,
                )
                pair.fit = ols_fit(pair.curve.points, config.excluded(cond_name, op_name))
            except CurveError as exc:
                pair.error, pair.error_type, pair.failed_n = str(exc), type(exc.cause).__name__, exc.n
            except ChernoffLabError as exc:
                pair.error, pair.error_type = str(exc), type(exc).__name__
            if pair.ok:
                log.info("%s/%s slope %.4f r2 %.4f", cond_name, op_name, pair.fit.slope, pair.fit.r2)
            else:
                log.warning("%s/%s failed: %s", cond_name, op_name, pair.error)
    return results


def holder_meta_regression(
    fits: Iterable[tuple[float, float]],
    excluded: Iterable[float] = META_EXCLUDED,
) -> RegressionFit:
    """Linear fit of convergence slope against the smoothness exponent alpha.

    Raises:
        InsufficientDataError: fewer than three points survive ``excluded``.
    """
    excluded = frozenset(float(a) for a in excluded)
    kept = sorted((float(a), float(s)) for a, s in fits if not _is_excluded(float(a), excluded))
    if len(kept) < 3:
        raise InsufficientDataError(f"need at least 3 points for the meta-regression, have {len(kept)}")
    x = np.array([a for a, _ in kept])
    y = np.array([s for _, s in kept])
    slope, intercept, r2 = _least_squares(x, y)
    return RegressionFit(slope, intercept, r2, excluded)


def _is_excluded(alpha, excluded):
    return any(math.isclose(alpha, e, abs_tol=1e-12) for e in excluded)


def meta_points(rows: Iterable[tuple[str, str, float]], operator: str = "S") -> list[tuple[float, float]]:
    """Pick ``(alpha, slope)`` pairs for the ``|sin x|^alpha`` family from ``(condition, operator, slope)`` rows."""
    points = []
    for cond, op, slope in rows:
        if op != operator or slope is None or not math.isfinite(slope):
            continue
        try:
            alpha = get_condition(cond).power
        except KeyError:
            continue
        if alpha is not None and any(math.isclose(alpha, a) for a in META_ALPHAS):
            points.append((alpha, slope))
    return points
