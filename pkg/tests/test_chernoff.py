import itertools
import math
from collections import defaultdict
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernoff_lab.chernoff import (
    ShiftChernoffOperator,
    apply_once,
    builtin_operators,
    check_tangency,
    compose,
    evaluate_approximation,
    evaluate_naive,
    get_operator,
    tangency_residual,
)
from chernoff_lab.errors import BudgetError, CompositionExplosionError
from chernoff_lab.functions import ScalarFunction, catalog, get_condition

G, S = builtin_operators()
SIN = get_condition("sin")
ONE = ScalarFunction("one", lambda x: np.ones_like(x), (-1.0, 1.0))


def lattice_measure(weights, steps, m):
    """Exact m-fold convolution of a measure on integer steps, by enumeration."""
    out = defaultdict(Fraction)
    for seq in itertools.product(range(len(weights)), repeat=m):
        out[sum(steps[i] for i in seq)] += math.prod((weights[i] for i in seq), start=Fraction(1))
    return dict(out)


def series_residual(a0, c_squared, k, t, dps=60):
    """|a0 + (1-a0) cos(c sqrt t) - sum_{j<=k} (-t)^j/j!| / t^k in high precision."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        a0 = mpmath.mpf(a0)
        factor = a0 + (1 - a0) * mpmath.cos(mpmath.sqrt(c_squared * t))
        taylor = sum((-t) ** j / mpmath.factorial(j) for j in range(k + 1))
        return float(abs(factor - taylor) / t**k)


class TestOperators:
    def test_builtin_terms(self):
        assert G.terms == ((0.5, 0.0), (0.25, 2.0), (0.25, -2.0))
        assert sum(G.weights) == 1.0
        assert sorted(S.shifts) == pytest.approx([-math.sqrt(6), 0.0, math.sqrt(6)])
        assert S.weights == pytest.approx([2 / 3, 1 / 6, 1 / 6])
        assert get_operator("S") is S
        with pytest.raises(KeyError):
            get_operator("H")

    def test_g_displacement_at_quarter(self):
        assert max(G.shifts) * math.sqrt(0.25) == 1.0

    @pytest.mark.parametrize(
        "terms",
        [((0.5, 0.0), (0.4, 1.0)), ((1.2, 0.0), (-0.2, 1.0)), ((0.5, 1.0), (0.5, 1.0)), ()],
    )
    def test_invalid_operators(self, terms):
        with pytest.raises(ValueError):
            ShiftChernoffOperator("bad", terms)


class TestApplyOnce:
    def test_odd_symmetry(self):
        assert apply_once(G, 0.25, SIN, 0.0) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_g_on_sin_eigen_factor(self, seed):
        t, x = np.random.default_rng(seed).uniform([0, -5], [3, 5])
        direct = 0.5 * math.sin(x) + 0.25 * math.sin(x + 2 * math.sqrt(t)) + 0.25 * math.sin(x - 2 * math.sqrt(t))
        assert apply_once(G, t, SIN, x) == pytest.approx(direct, abs=1e-15)
        assert apply_once(G, t, SIN, x) == pytest.approx((0.5 + 0.5 * math.cos(2 * math.sqrt(t))) * math.sin(x), abs=1e-14)

    @pytest.mark.parametrize("u0", catalog(), ids=lambda c: c.name)
    @pytest.mark.parametrize("op", [G, S], ids=["G", "S"])
    def test_identity_at_zero(self, op, u0):
        xs = np.linspace(-4, 4, 33)
        np.testing.assert_array_equal(apply_once(op, 0.0, u0, xs), u0(xs))


class TestCompose:
    def test_single_step(self):
        tau = 0.3
        state = compose(G, tau, 1)
        s = math.sqrt(tau)
        assert state.as_dict() == {-2 * s: 0.25, 0.0: 0.5, 2 * s: 0.25}

    @pytest.mark.parametrize("m", [2, 3, 5, 7])
    def test_g_matches_enumerated_measure(self, m):
        tau = 0.2
        exact = lattice_measure([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)], [0, 1, -1], m)
        state = compose(G, tau, m)
        assert len(state) == 2 * m + 1 == len(exact)
        step = 2 * math.sqrt(tau)
        for (j, w), (off, weight) in zip(sorted(exact.items()), zip(state.offsets, state.weights)):
            assert off == pytest.approx(j * step, abs=1e-12)
            assert weight == pytest.approx(float(w), abs=1e-15)

    def test_two_steps_explicit(self):
        state = compose(G, 0.25, 2)
        np.testing.assert_allclose(state.offsets, [-2, -1, 0, 1, 2])
        np.testing.assert_allclose(state.weights, [1 / 16, 1 / 4, 3 / 8, 1 / 4, 1 / 16])

    @pytest.mark.parametrize("op", [G, S], ids=["G", "S"])
    @pytest.mark.parametrize("m", range(1, 12))
    def test_weight_conservation_and_lattice_size(self, op, m):
        state = compose(op, 0.05, m)
        assert len(state) == 2 * m + 1
        assert state.total_weight == pytest.approx(1.0, abs=1e-13)
        assert np.all(state.weights >= 0)

    def test_zero_time_collapses(self):
        state = compose(S, 0.0, 4)
        assert state.as_dict() == {0.0: pytest.approx(1.0)}

    def test_explosion_cap(self):
        op = ShiftChernoffOperator("irr", ((0.5, 1.0), (0.5, math.sqrt(2))))
        assert len(compose(op, 1.0, 6)) == 7
        weird = ShiftChernoffOperator("w", ((0.25, 0.0), (0.25, 1.0), (0.25, math.sqrt(2)), (0.25, math.pi)))
        with pytest.raises(CompositionExplosionError):
            compose(weird, 1.0, 8, max_size=100)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            compose(G, 0.1, 0)
        with pytest.raises(ValueError):
            compose(G, -0.1, 1)


class TestEvaluation:
    def test_g_single_step_on_sin(self):
        value = evaluate_approximation(G, 0.5, 1, SIN, [math.pi / 2])[0]
        assert value == pytest.approx(0.5 + 0.5 * math.cos(math.sqrt(2)), abs=1e-15)
        assert value == pytest.approx(evaluate_naive(G, 0.5, 1, SIN, math.pi / 2), abs=1e-15)
        assert value == pytest.approx(0.578, abs=5e-4)

    @pytest.mark.parametrize("n", range(1, 12))
    def test_s_eigenfunction_closed_form(self, n):
        xs = np.linspace(-math.pi, math.pi, 101)
        factor = (2 / 3 + math.cos(math.sqrt(6 * 0.5 / n)) / 3) ** n
        np.testing.assert_allclose(evaluate_approximation(S, 0.5, n, SIN, xs), factor * np.sin(xs), atol=1e-12)

    @pytest.mark.parametrize("op", [G, S], ids=["G", "S"])
    @pytest.mark.parametrize("n", [1, 4, 11])
    def test_eigenfunction_collapse_via_symbol(self, op, n):
        xs = np.linspace(-3, 3, 13)
        lam = op.sin_factor(0.5 / n)
        np.testing.assert_allclose(evaluate_approximation(op, 0.5, n, SIN, xs), lam**n * np.sin(xs), atol=1e-12)

    def test_constants_are_fixed(self):
        np.testing.assert_allclose(evaluate_approximation(G, 0.5, 5, ONE, [0, 1, 2]), [1, 1, 1], atol=1e-15)

    def test_naive_examples(self):
        u = get_condition("abs-sin-1")
        assert evaluate_naive(G, 0.5, 6, u, 0.3) == pytest.approx(
            evaluate_approximation(G, 0.5, 6, u, [0.3])[0], abs=1e-12
        )
        e = get_condition("exp-abs")
        assert evaluate_naive(S, 0.5, 3, e, 0.0) == pytest.approx(
            evaluate_approximation(S, 0.5, 3, e, [0.0])[0], abs=1e-12
        )
        assert evaluate_naive(S, 0.7, 1, e, 0.4) == apply_once(S, 0.7, e, 0.4)

    def test_naive_budget(self):
        with pytest.raises(BudgetError):
            evaluate_naive(G, 0.5, 13, SIN, 0.0)

    @pytest.mark.parametrize("u0", catalog(), ids=lambda c: c.name)
    @pytest.mark.parametrize("op", [G, S], ids=["G", "S"])
    def test_contraction(self, op, u0):
        xs = np.linspace(-12, 12, 801)
        bound = np.max(np.abs(u0(np.linspace(-40, 40, 20001))))
        for n in range(1, 12):
            assert np.max(np.abs(evaluate_approximation(op, 0.5, n, u0, xs))) <= bound + 1e-15

    @pytest.mark.parametrize("u0", [c for c in catalog() if c.periodic], ids=lambda c: c.name)
    def test_periodicity(self, u0):
        xs = np.random.default_rng(3).uniform(-3, 3, 20)
        for n in (1, 5, 11):
            a = evaluate_approximation(S, 0.5, n, u0, xs)
            b = evaluate_approximation(S, 0.5, n, u0, xs + u0.period)
            np.testing.assert_allclose(a, b, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(
        a=st.floats(-3, 3), b=st.floats(-3, 3),
        n=st.integers(1, 11), x=st.floats(-5, 5),
    )
    def test_linearity(self, a, b, n, x):
        f, g = get_condition("abs-sin-1/2"), get_condition("exp-abs")
        combo = ScalarFunction("combo", lambda y: a * f(y) + b * g(y), (-1.0, 1.0))
        lhs = evaluate_approximation(G, 0.5, n, combo, [x])[0]
        rhs = a * evaluate_approximation(G, 0.5, n, f, [x])[0] + b * evaluate_approximation(G, 0.5, n, g, [x])[0]
        assert lhs == pytest.approx(rhs, abs=1e-12)


class TestTangency:
    @pytest.mark.parametrize(
        "op, a0, c_squared, k",
        [(G, Fraction(1, 2), 4, 1), (G, Fraction(1, 2), 4, 2), (S, Fraction(2, 3), 6, 1), (S, Fraction(2, 3), 6, 2)],
        ids=["G1", "G2", "S1", "S2"],
    )
    @pytest.mark.parametrize("t", [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    def test_matches_series_oracle(self, op, a0, c_squared, k, t):
        oracle = series_residual(mpmath.mpf(a0.numerator) / a0.denominator, c_squared, k, t)
        # sup over the grid of |sin x| is 1 to within 5e-6
        assert tangency_residual(op, k, t) == pytest.approx(oracle, rel=5e-3)

    def test_g_first_order_decays_linearly(self):
        r = [tangency_residual(G, 1, t) for t in (1e-2, 1e-3, 1e-4)]
        assert r[0] / r[1] == pytest.approx(10, rel=0.02)
        assert r[1] / r[2] == pytest.approx(10, rel=0.02)
        # factor = 1 - t + t^2/3 - ..., so the scaled mismatch is about t/3
        assert r[2] == pytest.approx(1e-4 / 3, rel=1e-3)

    def test_s_second_order_decays_like_t_over_10(self):
        r = [tangency_residual(S, 2, t) for t in (1e-2, 1e-3, 1e-4)]
        assert r[2] == pytest.approx(1e-4 / 10, rel=1e-3)
        assert r[0] > r[1] > r[2]

    def test_g_second_order_plateau(self):
        assert tangency_residual(G, 2, 1e-6) == pytest.approx(1 / 6, abs=1e-4)

    def test_verdicts(self):
        assert check_tangency(G, 1).passed
        assert check_tangency(S, 2).passed
        g2 = check_tangency(G, 2)
        assert not g2.passed
        assert g2.limit == pytest.approx(1 / 6, abs=0.01)

    def test_monotone_over_decades(self):
        for op, k in [(G, 1), (S, 2)]:
            r = [tangency_residual(op, k, 10.0**-e) for e in range(2, 7)]
            assert all(a > b for a, b in zip(r, r[1:]))

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            tangency_residual(G, 0, 0.1)
