"""Globally adaptive composite Gauss-Legendre quadrature for integral families.

The integrand is evaluated for a whole family of integrals at once (one row
per member, e.g. one row per grid abscissa of a convolution), and a single
panel partition is refined until the summed sup-norm error estimate drops
below the requested absolute tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureError

__all__ = ["QuadratureResult", "integrate_family"]


@dataclass(frozen=True)
class QuadratureResult:
    values: np.ndarray
    error_estimate: float
    panels: int


@lru_cache(maxsize=8)
def _rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(degree)


def _panel_estimates(integrand, lo, hi, degree):
    nodes, weights = _rule(degree)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    y = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    vals = np.asarray(integrand(y), dtype=float)
    vals = vals.reshape(vals.shape[0], lo.size, degree) if vals.ndim == 2 \
        else vals.reshape(1, lo.size, degree)
    return (vals @ weights) * half[None, :]


def _refine(integrand, lo, hi, degree):
    """Return (fine estimate, error estimate) for each panel [lo_i, hi_i]."""
    mid = 0.5 * (lo + hi)
    coarse = _panel_estimates(integrand, lo, hi, degree)
    left = _panel_estimates(integrand, lo, mid, degree)
    right = _panel_estimates(integrand, mid, hi, degree)
    fine = left + right
    err = np.max(np.abs(fine - coarse), axis=0)
    return fine, err


def integrate_family(
    integrand: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    tol: float = 1e-10,
    degree: int = 20,
    initial_panels: int = 16,
    max_panels: int = 100_000,
) -> QuadratureResult:
    """Integrate ``integrand`` over ``[a, b]`` for a family of integrands.

    Args:
        integrand: maps a 1-D array of abscissae ``y`` to an array of shape
            ``(members, y.size)`` (or ``(y.size,)`` for a single integral).
        a, b: integration limits, ``a < b``.
        tol: absolute tolerance on the summed per-panel error estimate,
            measured in the sup norm over family members.
        degree: Gauss-Legendre points per panel.
        initial_panels: number of equal panels to start from.
        max_panels: subdivision budget.

    Returns:
        QuadratureResult with one value per family member.

    Raises:
        QuadratureError: if the budget is exhausted before reaching ``tol``.
    """
    if not b > a:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    values, err = _refine(integrand, lo, hi, degree)

    while err.sum() > tol:
        if lo.size >= max_panels:
            raise QuadratureError(
                f"subdivision budget of {max_panels} panels exhausted", float(err.sum())
            )
        # pigeonhole: some panel exceeds tol / count whenever the sum exceeds tol
        split = err > tol / lo.size
        keep = ~split
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_values, new_err = _refine(integrand, new_lo, new_hi, degree)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        values = np.concatenate([values[:, keep], new_values], axis=1)
        err = np.concatenate([err[keep], new_err])

    return QuadratureResult(values.sum(axis=1), float(err.sum()), int(lo.size))
