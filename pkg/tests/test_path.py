"""Trajectory-level rate functional and the Euler-Lagrange boundary solver."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeldp import (
    PathFunction,
    PressureEval,
    euler_solve,
    local_cost,
    path_rate,
    rate,
)


# ------------------------------------------------------------- PathFunction


def test_path_function_validation():
    with pytest.raises(ValueError):
        PathFunction([0.0, 0.5], [0.0, 0.25])  # last knot must be 1
    with pytest.raises(ValueError):
        PathFunction([0.1, 1.0], [0.0, 0.5])  # first knot must be 0
    with pytest.raises(ValueError):
        PathFunction([0.0, 0.5, 0.5, 1.0], [0.0, 0.2, 0.2, 0.5])  # repeated knot
    with pytest.raises(ValueError):
        PathFunction([0.0, 1.0], [0.1, 0.5])  # phi(0) != 0
    with pytest.raises(ValueError):
        PathFunction([0.0, 0.5, 1.0], [0.0, 0.4, 0.2])  # negative slope
    with pytest.raises(ValueError):
        PathFunction([0.0, 0.5, 1.0], [0.0, 0.7, 0.8])  # slope 1.4 > 1
    with pytest.raises(ValueError):
        PathFunction([0.0, 1.0], [0.0, 1.1])  # phi > t


def test_path_function_line_and_refine():
    phi = PathFunction.line(0.6)
    assert phi(0.5) == pytest.approx(0.3)
    assert list(phi.slopes()) == [pytest.approx(0.6)]
    fine = phi.refine()
    assert len(fine.knots) == 3
    tt = np.linspace(0.0, 1.0, 17)
    np.testing.assert_allclose(fine(tt), phi(tt), atol=1e-15)


# --------------------------------------------------------------- local cost


def test_local_cost_values():
    # on the mean line the integrand vanishes
    assert local_cost(1.0, 1.0, 0.5, 2.0) == 0.0
    # generic interior point, alpha = 1
    expect = 0.5 * math.log(2.0 / 3.0) + 0.5 * math.log(2.0)
    assert local_cost(1.0, 0.25, 0.5, 1.0) == pytest.approx(expect, abs=1e-15)
    assert expect == pytest.approx(0.14384, abs=5e-6)
    # moving off x = 0 with slope < 1 is infinitely expensive
    assert local_cost(0.5, 0.0, 0.3, 2.0) == math.inf
    assert local_cost(0.5, 0.0, 1.0, 2.0) == 0.0
    # riding the upper edge with positive slope likewise
    assert local_cost(0.5, 1.0, 0.2, 2.0) == math.inf
    assert local_cost(0.5, 1.0, 0.0, 2.0) == pytest.approx(math.log(1.0), abs=1e-12)


def test_local_cost_domain():
    with pytest.raises(ValueError):
        local_cost(0.0, 0.1, 0.5, 2.0)
    with pytest.raises(ValueError):
        local_cost(1.0, 0.5, 1.2, 2.0)
    with pytest.raises(ValueError):
        local_cost(1.0, 2.5, 0.5, 2.0)  # x beyond alpha t


@settings(max_examples=40, deadline=None)
@given(
    t=st.floats(min_value=0.05, max_value=1.0),
    xf=st.floats(min_value=0.05, max_value=0.95),
    y=st.floats(min_value=0.0, max_value=1.0),
    alpha=st.sampled_from([0.5, 1.0, 2.0, 3.0]),
)
def test_local_cost_nonnegative_zero_on_mean(t, xf, y, alpha):
    x = xf * alpha * t
    val = local_cost(t, x, y, alpha)
    assert val >= -1e-13
    # the minimising slope turns the integrand off
    y_star = 1.0 - x / (alpha * t)
    assert local_cost(t, x, y_star, alpha) <= 1e-13


# ---------------------------------------------------------------- path rate


def test_path_rate_lln_line_is_free():
    for alpha in (2.0, 1.0, 0.5, 3.0):
        lln = alpha / (alpha + 1.0)
        assert path_rate(PathFunction.line(lln), alpha) == pytest.approx(0.0, abs=1e-12)


def test_path_rate_extreme_lines():
    # phi = t forces an up-move every step
    assert path_rate(PathFunction.line(1.0), 2.0) == pytest.approx(math.log(2.0), abs=1e-10)
    # phi = t/2 at alpha = 2: constant integrand
    assert path_rate(PathFunction.line(0.5), 2.0) == pytest.approx(
        0.5 * math.log(4.0 / 3.0), abs=1e-10
    )


def test_path_rate_infinite_cases():
    # leaving the admissible cone phi <= alpha t
    assert path_rate(PathFunction.line(1.0), 0.5) == math.inf
    # riding the upper boundary phi = alpha t with positive slope
    assert path_rate(PathFunction([0.0, 1.0], [0.0, 0.5]), 0.5) == math.inf
    # a flat start never leaves zero: slope 0 at x = 0 diverges
    assert path_rate(PathFunction([0.0, 0.5, 1.0], [0.0, 0.0, 0.5]), 2.0) == math.inf


def test_path_rate_refine_invariance():
    phi = PathFunction([0.0, 0.3, 0.7, 1.0], [0.0, 0.25, 0.5, 0.6])
    base = path_rate(phi, 2.0)
    assert math.isfinite(base)
    assert path_rate(phi.refine(), 2.0) == pytest.approx(base, abs=1e-10)
    assert path_rate(phi.refine().refine(), 2.0) == pytest.approx(base, abs=1e-10)


def test_path_rate_rejects_bad_alpha():
    with pytest.raises(ValueError):
        path_rate(PathFunction.line(0.5), 0.0)


@settings(max_examples=20, deadline=None)
@given(
    s1=st.floats(min_value=0.05, max_value=1.0),
    s2=st.floats(min_value=0.0, max_value=1.0),
    s3=st.floats(min_value=0.0, max_value=1.0),
)
def test_path_rate_nonnegative(s1, s2, s3):
    vals = np.concatenate([[0.0], np.cumsum([s1, s2, s3]) / 3.0])
    phi = PathFunction([0.0, 1 / 3, 2 / 3, 1.0], vals)
    assert path_rate(phi, 2.0) >= 0.0


# --------------------------------------------------------------- euler solve


def test_euler_mean_target_is_free():
    sol = euler_solve(2.0, 2.0 / 3.0)
    assert sol.cost == pytest.approx(0.0, abs=1e-9)
    assert sol.cost >= 0.0
    tt = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(sol.path(tt), 2.0 / 3.0 * tt, atol=1e-6)


@pytest.mark.parametrize("x", [0.13, 0.85])
def test_euler_matches_legendre_rate(x):
    sol = euler_solve(2.0, x)
    pt = rate(PressureEval(2.0), x)
    assert sol.cost == pytest.approx(pt.rate, abs=1e-8)
    assert sol.terminal_gap <= 1e-9
    # the minimiser is genuinely curved, not the chord to (1, x)
    tt = np.linspace(0.0, 1.0, 101)
    assert np.max(np.abs(sol.path(tt) - x * tt)) > 1e-3
    # and it leaves the origin along the mean slope
    assert sol.shoot_param == pytest.approx(2.0 / 3.0, abs=0.01)


def test_euler_continuity_toward_one():
    sol = euler_solve(2.0, 0.97)
    pt = rate(PressureEval(2.0), 0.97)
    assert sol.cost == pytest.approx(pt.rate, abs=1e-7)
    assert sol.cost < math.log(2.0)
    assert rate(PressureEval(2.0), 1.0).rate == pytest.approx(math.log(2.0), abs=1e-12)


def test_euler_solution_invariants():
    sol = euler_solve(2.0, 0.4)
    assert sol.alpha == 2.0 and sol.x_target == 0.4
    assert sol.shoot_param in sol.bisection_roots
    assert math.isfinite(sol.cost) and sol.cost > 0.0
    slopes = sol.path.slopes()
    assert np.all(slopes >= -1e-12) and np.all(slopes <= 1.0 + 1e-12)


def test_euler_domain():
    with pytest.raises(ValueError):
        euler_solve(1.0, 0.5)  # needs alpha > 1
    with pytest.raises(ValueError):
        euler_solve(2.0, 0.0)
    with pytest.raises(ValueError):
        euler_solve(2.0, 1.0)
