"""Translation-type Chernoff functions for d^2/dx^2 and their n-fold powers.

An operator here is a finite convex combination of shifts,
``(C(t) f)(x) = sum_i w_i f(x + c_i sqrt(t))``. Composing ``m`` copies of
``C(tau)`` gives again a finite point-mass measure, which is what
:class:`PointMassState` stores. For symmetric three-shift operators the
offsets live on a lattice, so the measure has ``2m + 1`` atoms instead of
``3^m`` shift sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetError, CompositionExplosionError, DomainError

__all__ = [
    "ShiftChernoffOperator",
    "PointMassState",
    "TangencyReport",
    "builtin_operators",
    "get_operator",
    "apply_once",
    "compose",
    "evaluate_approximation",
    "evaluate_naive",
    "tangency_residual",
    "check_tangency",
    "MERGE_TOL",
    "MAX_STATE_SIZE",
    "NAIVE_MAX_N",
    "DEFAULT_TANGENCY_TIMES",
]

MERGE_TOL = 1e-12
MAX_STATE_SIZE = 10**6
NAIVE_MAX_N = 12
DEFAULT_TANGENCY_TIMES = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class ShiftChernoffOperator:
    """``C(t) f (x) = sum_i w_i f(x + c_i sqrt t)`` with ``terms = ((w_i, c_i), ...)``."""

    name: str
    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(w), float(c)) for w, c in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("operator needs at least one term")
        weights = [w for w, _ in terms]
        shifts = [c for _, c in terms]
        if abs(math.fsum(weights) - 1.0) > 1e-15:
            raise ValueError(f"weights of {self.name} sum to {math.fsum(weights)!r}, not 1")
        if min(weights) < 0:
            raise ValueError(f"{self.name} has a negative weight; it would not be a contraction")
        if len(set(shifts)) != len(shifts):
            raise ValueError(f"{self.name} has repeated shift coefficients")

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.terms])

    @property
    def shifts(self) -> np.ndarray:
        return np.array([c for _, c in self.terms])

    def symbol(self, tau: float, frequency: float = 1.0) -> complex:
        """Fourier multiplier: ``C(tau) e^{i k x} = symbol(tau, k) e^{i k x}``."""
        s = math.sqrt(tau)
        return complex(np.sum(self.weights * np.exp(1j * frequency * self.shifts * s)))

    def sin_factor(self, tau: float) -> float:
        """Eigenvalue on ``sin`` for shift-symmetric operators (real part of the symbol)."""
        return self.symbol(tau).real


_G = ShiftChernoffOperator("G", ((0.5, 0.0), (0.25, 2.0), (0.25, -2.0)))
_S = ShiftChernoffOperator(
    "S", ((2.0 / 3.0, 0.0), (1.0 / 6.0, math.sqrt(6.0)), (1.0 / 6.0, -math.sqrt(6.0)))
)


def builtin_operators() -> tuple[ShiftChernoffOperator, ShiftChernoffOperator]:
    """The first-order operator ``G`` and the second-order operator ``S``."""
    return _G, _S


def get_operator(name: str) -> ShiftChernoffOperator:
    for op in builtin_operators():
        if op.name == name:
            return op
    raise KeyError(f"unknown operator {name!r}; known: G, S")


def apply_once(op: ShiftChernoffOperator, t: float, f, x):
    """``(C(t) f)(x)`` by the direct weighted sum; ``C(0)`` is the identity exactly."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t!r}")
    x = np.asarray(x, dtype=float)
    if t == 0:
        out = f(x)
    else:
        s = math.sqrt(t)
        out = sum(w * f(x + c * s) for w, c in op.terms)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class PointMassState:
    """Atoms ``(offset, weight)`` with ``(C(tau)^m f)(x) = sum weight * f(x + offset)``.

    ``offsets`` is sorted ascending.
    """

    offsets: np.ndarray
    weights: np.ndarray
    steps: int

    def __len__(self):
        return self.offsets.size

    @property
    def total_weight(self) -> float:
        return math.fsum(self.weights)

    def as_dict(self) -> dict[float, float]:
        return dict(zip(self.offsets.tolist(), self.weights.tolist()))

    def apply(self, f, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return f(xs[..., None] + self.offsets) @ self.weights


def _merge(offsets, weights, tol):
    order = np.argsort(offsets, kind="stable")
    offsets, weights = offsets[order], weights[order]
    starts = np.concatenate(([True], np.diff(offsets) > tol))
    idx = np.flatnonzero(starts)
    return offsets[idx], np.add.reduceat(weights, idx)


def compose(
    op: ShiftChernoffOperator,
    tau: float,
    m: int,
    *,
    merge_tol: float = MERGE_TOL,
    max_size: int = MAX_STATE_SIZE,
) -> PointMassState:
    """Fold ``C(tau)`` ``m`` times starting from the identity state ``{0: 1}``.

    Offsets closer than ``merge_tol`` are merged by adding their weights.

    Raises:
        CompositionExplosionError: the state grows past ``max_size`` atoms.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if tau < 0:
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    steps = op.shifts * math.sqrt(tau)
    w = op.weights
    offsets = np.zeros(1)
    weights = np.ones(1)
    for _ in range(m):
        offsets = (offsets[:, None] + steps[None, :]).ravel()
        weights = (weights[:, None] * w[None, :]).ravel()
        offsets, weights = _merge(offsets, weights, merge_tol)
        if offsets.size > max_size:
            raise CompositionExplosionError(
                f"composition of {op.name} reached {offsets.size} atoms (cap {max_size})"
            )
    return PointMassState(offsets, weights, m)


def evaluate_approximation(op: ShiftChernoffOperator, t: float, n: int, u0, xs) -> np.ndarray:
    """Chernoff approximation ``(C(t/n)^n u0)(x)`` at every ``x`` in ``xs``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    return compose(op, t / n, n).apply(u0, xs)


def evaluate_naive(op: ShiftChernoffOperator, t: float, n: int, u0, x):
    """Same quantity as :func:`evaluate_approximation`, by brute-force recursion.

    Every one of the ``len(terms)^n`` shift sequences is visited; nothing is
    merged. Meant as an independent check, hence the hard cap on ``n``.
    """
    if n > NAIVE_MAX_N:
        raise BudgetError(f"naive evaluation is limited to n <= {NAIVE_MAX_N}, got {n}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    s = math.sqrt(t / n)

    def level(depth, points):
        if depth == 0:
            return u0(points)
        return sum(w * level(depth - 1, points + c * s) for w, c in op.terms)

    out = level(n, np.asarray(x, dtype=float))
    return out if np.ndim(out) else float(out)


def _cos_tail(z: np.ndarray, k: int) -> np.ndarray:
    """``cos z - sum_{m<=k} (-1)^m z^{2m} / (2m)!`` without cancellation for small z."""
    z = np.asarray(z, dtype=float)
    direct = np.cos(z) - sum((-1) ** m * z ** (2 * m) / math.factorial(2 * m) for m in range(k + 1))
    series = np.zeros_like(z)
    for m in range(k + 1, k + 40):
        series += (-1) ** m * z ** (2 * m) / math.factorial(2 * m)
    return np.where(np.abs(z) < 1.0, series, direct)


def tangency_residual(op: ShiftChernoffOperator, k: int, t: float, grid_count: int = 1000) -> float:
    """Scaled order-``k`` Taylor mismatch of ``C(t)`` on the test function ``sin``.

    Returns ``max_x |(C(t) sin)(x) - sum_{j<=k} t^j/j! (L^j sin)(x)| / t^k``
    over ``grid_count`` points of ``(-pi, pi]``, with ``L = d^2/dx^2``.
    Since ``C(t) sin = A sin + B cos`` with ``A = sum w cos(c sqrt t)`` and
    ``B = sum w sin(c sqrt t)``, the mismatch is ``(A - sum (-t)^j/j!) sin + B cos``.
    ``A`` minus its Taylor polynomial is split into cosine tails plus an exact
    moment polynomial, so the result stays accurate down to ``t ~ 1e-6``.
    """
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    w, c = op.weights, op.shifts
    z = c * math.sqrt(t)
    tails = math.fsum(w * _cos_tail(z, k))
    moments = math.fsum(
        (-t) ** m * (math.fsum(w * c ** (2 * m)) / math.factorial(2 * m) - 1.0 / math.factorial(m))
        for m in range(k + 1)
    )
    a = tails + moments
    b = math.fsum(w * np.sin(z))
    xs = -math.pi + np.arange(1, grid_count + 1) / grid_count * (2 * math.pi)
    return float(np.max(np.abs(a * np.sin(xs) + b * np.cos(xs)))) / t**k


@dataclass(frozen=True)
class TangencyReport:
    operator: str
    k: int
    times: tuple[float, ...]
    residuals: tuple[float, ...]
    passed: bool

    @property
    def limit(self) -> float:
        """Residual at the smallest ``t`` probed."""
        return self.residuals[-1]


def check_tangency(
    op: ShiftChernoffOperator,
    k: int,
    times: Sequence[float] = DEFAULT_TANGENCY_TIMES,
) -> TangencyReport:
    """PASS iff residuals shrink by at least a factor 2 per decade of ``t``."""
    times = tuple(sorted((float(t) for t in times), reverse=True))
    if len(times) < 2:
        raise ValueError("need at least two times")
    residuals = tuple(tangency_residual(op, k, t) for t in times)
    passed = True
    for (t0, r0), (t1, r1) in zip(zip(times, residuals), zip(times[1:], residuals[1:])):
        decades = math.log10(t0 / t1)
        if not r1 <= r0 / 2.0**decades:
            passed = False
    return TangencyReport(op.name, k, times, residuals, passed)
