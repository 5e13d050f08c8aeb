import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from actionlab.convex import (Indicator, LogSumExp, MaxLinear, Quadratic,
                              SquaredDistance, evaluate, min_norm_subgradient,
                              moreau_gradient, prox, resolvent_slope,
                              sampled_slope_lower_bound, slope)
from actionlab.errors import (DimensionMismatchError, InadmissibleTauError,
                              OutsideDomainError)
from actionlab.sets import Ball, Box, Halfspace


def bisect_prox_1d(f, tau, x, lo=-50.0, hi=50.0, iters=200):
    """Scalar oracle: solve d/dy [f(y) + (y-x)^2/(2 tau)] = 0 by bisection.

    Uses centered finite differences of f only, no package derivatives.
    """
    h = 1e-7

    def dphi(y):
        df = (f(y + h) - f(y - h)) / (2.0 * h)
        return df + (y - x) / tau

    a, b = lo, hi
    assert dphi(a) < 0 < dphi(b)
    for _ in range(iters):
        m = 0.5 * (a + b)
        if dphi(m) < 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def test_quadratic_prox_example():
    f = Quadratic(np.array([[1.0]]), np.zeros(1), 0.0)
    r = prox(f, 1.0, [2.0])
    assert r.resolvent_point[0] == pytest.approx(1.0, abs=1e-12)
    assert r.envelope_value == pytest.approx(1.0, abs=1e-12)


def test_maxlinear_soft_threshold():
    f = MaxLinear(np.array([[1.0], [-1.0]]))  # |x|
    r = prox(f, 0.5, [2.0])
    assert r.resolvent_point[0] == pytest.approx(1.5, abs=1e-9)


def test_maxlinear_dead_zone_gradient():
    f = MaxLinear(np.array([[1.0], [-1.0]]))
    g = moreau_gradient(f, 0.5, [0.2])
    assert g[0] == pytest.approx(0.4, abs=1e-9)


def test_maxlinear_value_example():
    f = MaxLinear(np.array([[1.0], [-1.0]]))
    assert evaluate(f, [-3.0]) == pytest.approx(3.0)


def test_slope_two_active_pieces():
    f = MaxLinear(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert slope(f, [1.0, 1.0]) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-9)


def test_slope_kink_of_abs():
    f = MaxLinear(np.array([[1.0], [-1.0]]))
    assert slope(f, [0.0]) == pytest.approx(0.0, abs=1e-12)


def test_quadratic_norm_slope():
    f = Quadratic(np.eye(2), np.zeros(2), 0.0)
    assert slope(f, [3.0, 4.0]) == pytest.approx(5.0, abs=1e-12)


def test_indicator_ball_prox_and_gradient():
    f = Indicator(Ball(np.zeros(2), 1.0))
    r = prox(f, 0.25, [2.0, 0.0])
    np.testing.assert_allclose(r.resolvent_point, [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(r.moreau_gradient, [4.0, 0.0], atol=1e-11)
    assert evaluate(f, [2.0, 0.0]) == np.inf
    assert evaluate(f, [0.5, 0.0]) == 0.0


def test_indicator_slope_values():
    f = Indicator(Box(np.array([-1.0]), np.array([1.0])))
    assert slope(f, [0.3]) == 0.0
    assert slope(f, [1.5]) == np.inf


def test_indicator_subgradient_outside_raises():
    f = Indicator(Ball(np.zeros(2), 1.0))
    with pytest.raises(OutsideDomainError):
        min_norm_subgradient(f, [3.0, 0.0])


def test_halfspace_projection_is_member():
    hs = Halfspace(np.array([-0.595, -0.161]), -0.578)
    rng = np.random.default_rng(5)
    X = rng.normal(size=(500, 2)) * 2.0
    Y = hs.project_many(X)
    assert hs.contains_many(Y).all()
    # and single-row evaluation agrees despite a different dot kernel
    for row in Y[:50]:
        assert hs.contains_many(row[None, :])[0]


def test_logsumexp_prox_against_bisection():
    vec = np.array([[1.0], [-1.0]])
    eps = 0.1
    f = LogSumExp(vec, eps)

    def scalar_f(y):
        return eps * np.logaddexp(y / eps, -y / eps) - eps * math.log(2.0)

    for tau, x in [(0.5, 2.0), (0.2, -1.3), (1.0, 0.4)]:
        r = prox(f, tau, [x])
        ref = bisect_prox_1d(scalar_f, tau, x)
        assert r.resolvent_point[0] == pytest.approx(ref, abs=1e-6)
        assert r.solver_residual <= 1e-10


def test_logsumexp_matches_max_at_small_epsilon():
    vec = np.array([[1.0, 0.0], [0.0, 1.0]])
    f = LogSumExp(vec, 1e-4)
    g = MaxLinear(vec)
    x = [0.7, -0.2]
    assert evaluate(f, x) == pytest.approx(evaluate(g, x), abs=1e-3)


def test_squared_distance_prox_slides():
    w = 1.5
    f = SquaredDistance(Ball(np.zeros(1), 1.0), w)
    tau = 0.4
    x = 3.0
    s = 2.0 * w * tau / (1.0 + 2.0 * w * tau)
    r = prox(f, tau, [x])
    assert r.resolvent_point[0] == pytest.approx(x + s * (1.0 - x), abs=1e-12)


def test_inadmissible_tau():
    f = Quadratic(np.array([[-0.5]]), np.zeros(1), 0.0)
    assert f.lam == pytest.approx(-0.5)
    with pytest.raises(InadmissibleTauError):
        prox(f, 2.5, [1.0])
    with pytest.raises(InadmissibleTauError):
        prox(f, -0.1, [1.0])


def test_dimension_mismatch():
    f = Quadratic(np.eye(2), np.zeros(2), 0.0)
    with pytest.raises(DimensionMismatchError):
        prox(f, 0.5, [1.0, 2.0, 3.0])


def test_sampled_lower_bound_hits_quadratic_slope():
    f = Quadratic(np.eye(1), np.zeros(1), 0.0)
    x = np.array([2.0])
    samples = [x - t for t in np.linspace(1e-4, 1.0, 50)[:, None]]
    bound = sampled_slope_lower_bound(f, x, samples)
    assert bound <= slope(f, x) + 1e-9
    assert bound >= slope(f, x) - 1e-3


def test_resolvent_slope_fallback_agrees():
    f = LogSumExp(np.array([[1.0, 0.3], [-0.5, 1.0], [0.2, -0.8]]), 0.25)
    x = [0.4, -0.7]
    est = resolvent_slope(f, x)
    assert est.monotone
    assert not est.diverged
    assert est.value == pytest.approx(slope(f, x), rel=1e-4)


def test_resolvent_slope_diverges_outside_domain():
    f = Indicator(Ball(np.zeros(1), 1.0))
    est = resolvent_slope(f, [2.0])
    assert est.diverged
    assert est.value == np.inf


@given(st.integers(0, 2_000))
def test_envelope_below_value_and_prox_improves(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    B = rng.normal(size=(d, d))
    f = Quadratic(B @ B.T / d, rng.normal(size=d), float(rng.normal()))
    tau = float(np.exp(rng.uniform(np.log(0.05), np.log(1.5))))
    x = rng.normal(size=d) * 2.0
    r = prox(f, tau, x)
    fx = evaluate(f, x)
    assert r.envelope_value <= fx + 1e-9 * (1.0 + abs(fx))
    fy = evaluate(f, r.resolvent_point)
    assert fy <= fx + 1e-9 * (1.0 + abs(fx))


@given(st.integers(0, 2_000))
def test_lambda_convexity_along_segments(seed):
    """f((1-t)x + ty) <= (1-t)f(x) + tf(y) - (lam/2)t(1-t)|x-y|^2."""
    rng = np.random.default_rng(seed)
    kind = seed % 3
    if kind == 0:
        B = rng.normal(size=(2, 2))
        f = Quadratic(B @ B.T / 2 - 0.4 * np.eye(2), rng.normal(size=2), 0.0)
    elif kind == 1:
        f = MaxLinear(rng.normal(size=(4, 2)))
    else:
        f = LogSumExp(rng.normal(size=(3, 2)), 0.3)
    x = rng.normal(size=2) * 1.5
    y = rng.normal(size=2) * 1.5
    t = float(rng.uniform(0.0, 1.0))
    z = (1.0 - t) * x + t * y
    lhs = evaluate(f, z)
    rhs = ((1.0 - t) * evaluate(f, x) + t * evaluate(f, y)
           - 0.5 * f.lam * t * (1.0 - t) * float(np.sum((x - y) ** 2)))
    assert lhs <= rhs + 1e-8 * (1.0 + abs(rhs))
