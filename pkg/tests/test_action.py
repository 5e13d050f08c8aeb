import math

import numpy as np
import pytest

from actionlab.action import (Path, alt_action, coarsened_interpolation_bound,
                              discrete_action, dubois_reymond_residual,
                              interpolation_bound, interpolation_path,
                              recovery_action_bound, recovery_path,
                              recovery_tolerance, upper_gradient_quadrature_bound,
                              upper_gradient_residual)
from actionlab.convex import Indicator, MaxLinear, Quadratic, slope
from actionlab.errors import ConfigError, OutsideDomainError
from actionlab.sets import Ball

HALF_SQ = Quadratic(np.array([[1.0]]), np.zeros(1), 0.0)
ABS = MaxLinear(np.array([[1.0], [-1.0]]))


def test_path_validation():
    with pytest.raises(ConfigError):
        Path([0.0, 0.0, 1.0], [[0.0], [0.5], [1.0]])
    with pytest.raises(ConfigError):
        Path([0.0], [[0.0]])
    with pytest.raises(ConfigError):
        Path([0.0, 1.0], [[0.0], [np.inf]])


def test_path_refined_same_curve():
    p = Path([0.0, 0.4, 1.0], [[0.0], [2.0], [1.0]])
    q = p.refined()
    assert q.intervals == 2 * p.intervals
    a = discrete_action(HALF_SQ, p).kinetic
    b = discrete_action(HALF_SQ, q).kinetic
    assert b == pytest.approx(a, rel=1e-12)


def test_straight_path_action_free():
    zero = Quadratic(np.zeros((1, 1)), np.zeros(1), 0.0)
    p = Path.straight([0.0], [1.0], intervals=8)
    b = discrete_action(zero, p)
    assert b.kinetic == pytest.approx(1.0, abs=1e-12)
    assert b.slope_term == pytest.approx(0.0, abs=1e-15)


def test_gradient_flow_action_value():
    """gamma(t) = e^t on [0, 1] under x^2/2: action = e^2 - 1, alt ~ 0."""
    n = 512
    t = np.linspace(0.0, 1.0, n + 1)
    p = Path(t, np.exp(t)[:, None])
    total = discrete_action(HALF_SQ, p, rule="node-trapezoid").total
    assert total == pytest.approx(math.exp(2.0) - 1.0, abs=1e-3)
    assert abs(alt_action(HALF_SQ, p)) <= 1e-5


def test_alt_action_constant_path_counts_gradient():
    t = np.linspace(0.0, 1.0, 33)
    p = Path(t, np.ones((33, 1)))
    # stationary path at x=1: integrand |0 - grad f|^2 = 1
    assert alt_action(HALF_SQ, p) == pytest.approx(1.0, abs=1e-12)


def test_null_lagrangian_identity_exact_for_quadratic():
    rng = np.random.default_rng(3)
    t = np.sort(rng.uniform(size=9))
    t = np.concatenate([[0.0], t, [1.0]])
    nodes = rng.normal(size=(t.size, 1))
    p = Path(t, nodes)
    total = discrete_action(HALF_SQ, p).total
    alt = alt_action(HALF_SQ, p)
    boundary = 2.0 * (0.5 * nodes[-1, 0] ** 2) - 2.0 * (0.5 * nodes[0, 0] ** 2)
    # exact for quadratics under the midpoint rule: slope^2 = |grad|^2 at midpoints
    assert alt == pytest.approx(total - boundary, rel=1e-10, abs=1e-10)


def test_null_lagrangian_quadrature_order():
    """Identity error decays like 1/N^2 for a smooth non-quadratic function."""
    from actionlab.convex import LogSumExp
    f = LogSumExp(np.array([[1.0], [-0.7]]), 0.4)
    errs = []
    for n in (16, 32, 64, 128):
        t = np.linspace(0.0, 1.0, n + 1)
        nodes = np.sin(1.7 * t)[:, None]
        p = Path(t, nodes)
        total = discrete_action(f, p).total
        alt = alt_action(f, p)
        boundary = 2.0 * f.value(nodes[-1]) - 2.0 * f.value(nodes[0])
        errs.append(abs(alt - (total - boundary)))
    order = np.polyfit(np.log([16, 32, 64, 128]), np.log(errs), 1)[0]
    assert -order >= 1.8


def test_upper_gradient_residual_nonnegative_modulo_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(20):
        t = np.linspace(0.0, 1.0, 49)
        nodes = np.cumsum(rng.normal(size=(49, 1)) * 0.1, axis=0)
        p = Path(t, nodes)
        res = upper_gradient_residual(HALF_SQ, p)
        assert res >= -upper_gradient_quadrature_bound(HALF_SQ, p)


def test_upper_gradient_requires_finite_endpoints():
    f = Indicator(Ball(np.zeros(1), 1.0))
    p = Path([0.0, 1.0], [[0.0], [2.0]])
    with pytest.raises(OutsideDomainError):
        upper_gradient_residual(f, p)


def test_dubois_reymond_small_for_conserved_path():
    # gamma(t) = e^t: |gamma'|^2 - |grad f|^2 = 0 pointwise for x^2/2,
    # so only the O(dt^2) discretization survives and halving dt quarters it
    residuals = []
    for n in (128, 256, 512):
        t = np.linspace(0.0, 1.0, n + 1)
        p = Path(t, np.exp(t)[:, None])
        residuals.append(dubois_reymond_residual(HALF_SQ, p))
    assert residuals[-1] <= 1e-4
    assert residuals[2] < residuals[1] < residuals[0]
    assert residuals[0] / residuals[2] > 8.0


def test_dubois_reymond_positive_for_crooked_path():
    t = np.linspace(0.0, 1.0, 9)
    nodes = np.array([0.0, 0.5, 0.2, 0.9, 0.4, 1.1, 0.6, 1.3, 1.0])[:, None]
    p = Path(t, nodes)
    assert dubois_reymond_residual(HALF_SQ, p) > 0.1


def test_interpolation_path_closed_form():
    """For x^2/2, tau=delta=0.5: gamma(t) = l(t)/(1+tau), endpoints 0 and 1."""
    tau = 0.5
    p = interpolation_path(HALF_SQ, tau, tau, [0.0], [1.0], 16)
    # tilted line runs from 0 to xd + tau*grad = 1.5; resolvent divides by 1.5
    s = np.linspace(0.0, 1.0, 17)
    np.testing.assert_allclose(p.nodes[:, 0], s * 1.5 / 1.5, atol=1e-12)
    assert p.times[-1] == pytest.approx(0.5)


def test_interpolation_bound_worked_value():
    b = interpolation_bound(HALF_SQ, 0.5, 0.5, [0.0], [1.0])
    assert b == pytest.approx(130.0, abs=1e-9)


def test_coarsened_bound_worked_value():
    b = coarsened_interpolation_bound(HALF_SQ, 0.5, [0.0], [1.0])
    assert b == pytest.approx(209.0, abs=1e-9)


def test_coarsened_dominates_sharp_at_matched_horizon():
    rng = np.random.default_rng(2)
    for _ in range(30):
        tau = float(np.exp(rng.uniform(np.log(0.1), np.log(1.0))))
        x0 = rng.normal(size=1)
        xd = rng.normal(size=1)
        sharp = interpolation_bound(ABS, tau, tau, x0, xd)
        coarse = coarsened_interpolation_bound(ABS, tau, x0, xd)
        assert coarse >= sharp - 1e-9 * (1.0 + abs(sharp))


def test_interpolation_action_below_bound():
    for tau, delta in [(0.5, 0.5), (0.3, 0.8), (0.7, 0.2)]:
        p = interpolation_path(HALF_SQ, tau, delta, [0.0], [1.0], 256)
        total = discrete_action(HALF_SQ, p).total
        assert total <= interpolation_bound(HALF_SQ, tau, delta, [0.0], [1.0])


def test_interpolation_bound_requires_envelope_lipschitz():
    f = Quadratic(np.array([[-0.8]]), np.zeros(1), 0.0)
    # 1 + tau*lam < 1/2 violates the envelope-Lipschitz precondition
    with pytest.raises(Exception):
        interpolation_bound(f, 1.0, 1.0, [0.0], [1.0])


def test_recovery_path_quadratic():
    tau = 0.2
    t = np.linspace(0.0, 1.0, 65)
    gamma = Path(t, (1.0 + t)[:, None])
    rec = recovery_path(HALF_SQ, tau, gamma, [1.05], [2.1])
    assert rec.times[0] == pytest.approx(0.0)
    assert rec.times[-1] == pytest.approx(1.0)
    np.testing.assert_array_equal(rec.nodes[0], [1.05])
    np.testing.assert_array_equal(rec.nodes[-1], [2.1])
    limit_action = discrete_action(HALF_SQ, gamma).total
    S = max(slope(HALF_SQ, [1.05]), slope(HALF_SQ, [2.1]))
    bound = recovery_action_bound(limit_action, tau, HALF_SQ.lam, S)
    tol = recovery_tolerance(limit_action, tau, HALF_SQ.lam, S)
    assert discrete_action(HALF_SQ, rec).total <= bound + tol


def test_recovery_path_zero_function_is_near_gamma():
    zero = Quadratic(np.zeros((1, 1)), np.zeros(1), 0.0)
    t = np.linspace(0.0, 1.0, 33)
    gamma = Path(t, t[:, None])
    rec = recovery_path(zero, 0.25, gamma, [0.0], [1.0])
    # J_tau is the identity, so the core is gamma itself
    a = discrete_action(zero, rec).total
    limit = discrete_action(zero, gamma).total
    assert a <= (1.0 + 2.0 * 0.25) * limit + 1e-9


class _DriftingProx(Quadratic):
    """Quadratic whose prox output is shifted off the true resolvent."""

    def prox_many(self, tau, X):
        Y, res = super().prox_many(tau, X)
        return Y + 1e-4, res


def test_recovery_junction_audit_fires():
    bad = _DriftingProx(np.array([[1.0]]), np.zeros(1), 0.0)
    t = np.linspace(0.0, 1.0, 17)
    gamma = Path(t, t[:, None])
    with pytest.raises(ConfigError, match="junction"):
        recovery_path(bad, 0.2, gamma, [0.0], [1.0], M=4)


def test_recovery_rejects_zero_patch_density():
    t = np.linspace(0.0, 1.0, 9)
    gamma = Path(t, t[:, None])
    with pytest.raises(ConfigError):
        recovery_path(HALF_SQ, 0.2, gamma, [0.0], [1.0], M=0)


def test_recovery_requires_unit_interval():
    gamma = Path([0.0, 2.0], [[0.0], [1.0]])
    with pytest.raises(ConfigError):
        recovery_path(HALF_SQ, 0.2, gamma, [0.0], [1.0])
