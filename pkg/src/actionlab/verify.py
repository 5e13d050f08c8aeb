"""Seeded invariant sweeps with serialized counterexamples.

verify_suite(...) runs every registered check in the requested scopes with a
deterministic per-check generator. A check samples functions, taus, points,
or paths, tests one documented inequality or identity, and records each
violation together with the offending inputs (function descriptor included)
so it can be replayed. The suite never raises on a failed inequality; it
reports.

The per-function helpers (``*_failures``) are public on purpose: the
acceptance tests re-run them at larger sample counts, and a deliberately
corrupted function can be handed straight to one of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from .action import (Path, alt_action, coarsened_interpolation_bound,
                     discrete_action, interpolation_bound, interpolation_path,
                     recovery_action_bound, recovery_path, recovery_tolerance,
                     upper_gradient_quadrature_bound, upper_gradient_residual)
from .convex import (ConvexFunction, Indicator, LogSumExp, MaxLinear,
                     Quadratic, SquaredDistance, min_norm_subgradient, prox,
                     sampled_slope_lower_bound, slope)
from .errors import ConfigError
from .experiments import (gamma_limsup_experiment, gamma_value_experiment,
                          resolvent_convergence_table,
                          slope_semicontinuity_table)
from .families import (constant_family, family_logsumexp_to_max,
                       family_penalty_to_indicator)
from .minimize import MinimizeConfig, _Objective, minimize_action
from .minnorm import hull_projection
from .oracle import GridSpec, grid_oracle, speed_quantization_bias
from .sets import Ball, Box, Halfspace, project

SCOPES = ("convex", "action", "minimize", "gamma")


@dataclass(frozen=True)
class CheckResult:
    name: str
    scope: str
    samples: int
    failure_count: int
    failures: tuple[dict, ...]  # capped at 5 serialized examples

    @property
    def passed(self) -> bool:
        return self.failure_count == 0


@dataclass(frozen=True)
class VerifyReport:
    seed: int
    scopes: tuple[str, ...]
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failure_count(self) -> int:
        return sum(c.failure_count for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "scopes": list(self.scopes),
            "ok": self.ok,
            "failure_count": self.failure_count,
            "checks": [{
                "name": c.name,
                "scope": c.scope,
                "samples": c.samples,
                "failure_count": c.failure_count,
                "failures": [dict(f) for f in c.failures],
            } for c in self.checks],
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            word = "PASS" if c.passed else "FAIL"
            extra = "" if c.passed else f", {c.failure_count} failures"
            lines.append(f"{word}  {c.name} [{c.scope}] ({c.samples} samples{extra})")
        lines.append(f"{'OK' if self.ok else 'FAILED'}: "
                     f"{self.failure_count} failures across {len(self.checks)} checks")
        return lines


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fail(f: ConvexFunction, **data) -> dict:
    doc = {"function": serialize.function_to_dict(f)}
    doc.update(data)
    return _plain(doc)


# ---------------------------------------------------------------------------
# samplers

def _function_pool(rng, extra=()) -> list[ConvexFunction]:
    fns: list[ConvexFunction] = []
    for d in (1, 2, 3):
        B = rng.normal(size=(d, d))
        fns.append(Quadratic(B @ B.T / d, rng.normal(size=d), float(rng.normal())))
    B = rng.normal(size=(2, 2))
    fns.append(Quadratic(B @ B.T / 2 - 0.6 * np.eye(2), rng.normal(size=2), 0.0))
    fns.append(MaxLinear(rng.normal(size=(4, 2))))
    fns.append(MaxLinear(rng.normal(size=(3, 1))))
    fns.append(MaxLinear(rng.normal(size=(1, 2))))
    fns.append(LogSumExp(rng.normal(size=(4, 2)), 0.3))
    fns.append(LogSumExp(rng.normal(size=(3, 1)), 0.08))
    fns.append(Indicator(Ball(rng.normal(size=2) * 0.5, 1.0 + rng.random())))
    fns.append(Indicator(Box(-1.0 - rng.random(2), 1.0 + rng.random(2))))
    fns.append(Indicator(Halfspace(rng.normal(size=2), float(rng.normal()))))
    fns.append(SquaredDistance(Ball(rng.normal(size=2) * 0.5, 1.0),
                               0.5 + 2.0 * rng.random()))
    fns.append(SquaredDistance(Box(np.array([-1.0, -0.5]), np.array([1.0, 1.5])),
                               1.0 + rng.random()))
    fns.extend(extra)
    return fns


def _smooth_pool(rng) -> list[ConvexFunction]:
    pool = [f for f in _function_pool(rng)
            if isinstance(f, (Quadratic, LogSumExp))]
    return pool


def _sample_tau(rng, f: ConvexFunction) -> float:
    t = float(np.exp(rng.uniform(np.log(0.05), np.log(1.5))))
    if f.lam < 0:
        t = min(t, 0.45 / (-f.lam))
    return t


def _sample_x(rng, f: ConvexFunction, scale: float = 1.5) -> np.ndarray:
    return rng.normal(size=f.dim) * scale


def _sample_domain_x(rng, f: ConvexFunction, scale: float = 1.5) -> np.ndarray:
    x = _sample_x(rng, f, scale)
    if isinstance(f, Indicator):
        x = project(f.region, x)
        if isinstance(f.region, Halfspace):
            # the wall projection can overshoot by an ulp; step inside
            n = f.region.normal
            x = x - (1e-9 * (1.0 + np.linalg.norm(x)) / np.linalg.norm(n)) * n
    return x


def _random_path(rng, f: ConvexFunction, segments: int = 48,
                 spread: float = 1.2) -> Path:
    """Piecewise-linear path on [0, 1] with nodes in the effective domain."""
    d = f.dim
    knots = rng.normal(size=d) * 0.8 + np.vstack(
        [np.zeros(d), np.cumsum(rng.normal(size=(5, d)) * spread / 5, axis=0)])
    s_knots = np.linspace(0.0, 1.0, knots.shape[0])
    s = np.linspace(0.0, 1.0, segments + 1)
    nodes = np.column_stack([np.interp(s, s_knots, knots[:, j])
                             for j in range(d)])
    if isinstance(f, Indicator):
        nodes = f.region.project_many(nodes)
    return Path(s, nodes)


# ---------------------------------------------------------------------------
# convex-scope helpers (public: reused by the acceptance tests)

def envelope_identity_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    """Envelope equals its defining expression at the resolvent, and no
    sampled competitor does better."""
    fails = []
    rel = 1e-6 if isinstance(f, LogSumExp) else 1e-9
    for _ in range(trials):
        tau = _sample_tau(rng, f)
        x = _sample_x(rng, f)
        r = prox(f, tau, x)
        direct = f.value(r.resolvent_point) + float(
            np.sum((x - r.resolvent_point) ** 2)) / (2.0 * tau)
        allowed = rel * (1.0 + abs(direct)) + 10.0 * r.solver_residual
        err = abs(r.envelope_value - direct)
        if not (err <= allowed):
            fails.append(_fail(f, tau=tau, x=x, error=err, allowed=allowed))
            continue
        slack = rel * (1.0 + abs(r.envelope_value)) + 10.0 * r.solver_residual
        for k in range(8):
            step = (0.03, 0.3, 1.0)[k % 3]
            y = r.resolvent_point + rng.normal(size=f.dim) * step
            cand = f.value(y) + float(np.sum((y - x) ** 2)) / (2.0 * tau)
            if cand < r.envelope_value - slack:
                fails.append(_fail(f, tau=tau, x=x, competitor=y,
                                   competitor_value=cand,
                                   envelope=r.envelope_value))
                break
    return fails


def tilted_gradient_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    """The envelope gradient at x + tau*g(x) reproduces g(x) on the domain."""
    fails = []
    for _ in range(trials):
        tau = _sample_tau(rng, f)
        x = _sample_domain_x(rng, f)
        g = min_norm_subgradient(f, x)
        r = prox(f, tau, x + tau * g)
        err = float(np.linalg.norm(r.moreau_gradient - g))
        allowed = 1e-8 * (1.0 + float(np.linalg.norm(g))) \
            + 10.0 * r.solver_residual / tau
        if not (err <= allowed):
            fails.append(_fail(f, tau=tau, x=x, g=g, error=err, allowed=allowed))
    return fails


def slope_chain_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    """slope(J(x)) <= |x-J(x)|/tau <= slope(x)/(1+lambda*tau)."""
    fails = []
    for _ in range(trials):
        tau = _sample_tau(rng, f)
        x = _sample_x(rng, f)
        r = prox(f, tau, x)
        m = float(np.linalg.norm(x - r.resolvent_point)) / tau
        s_res = slope(f, r.resolvent_point)
        s_x = slope(f, x)
        tol = 1e-8 * (1.0 + m) + 10.0 * r.solver_residual / tau
        if s_res > m + tol:
            fails.append(_fail(f, tau=tau, x=x, kind="left",
                               slope_at_resolvent=s_res, ratio=m, allowed=m + tol))
        rhs = s_x / (1.0 + f.lam * tau)
        if m > rhs + tol:
            fails.append(_fail(f, tau=tau, x=x, kind="right",
                               ratio=m, slope_at_x=s_x, allowed=rhs + tol))
    return fails


def resolvent_lipschitz_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    fails = []
    for _ in range(trials):
        tau = _sample_tau(rng, f)
        x = _sample_x(rng, f)
        y = _sample_x(rng, f)
        dist = float(np.linalg.norm(x - y))
        if dist < 1e-6:
            continue
        rx = prox(f, tau, x)
        ry = prox(f, tau, y)
        ratio = float(np.linalg.norm(rx.resolvent_point - ry.resolvent_point)) / dist
        allowed = 1.0 / (1.0 + f.lam * tau) + 1e-8 \
            + (rx.solver_residual + ry.solver_residual) / dist
        if not (ratio <= allowed):
            fails.append(_fail(f, tau=tau, x=x, y=y, ratio=ratio, allowed=allowed))
    return fails


def envelope_gradient_lipschitz_failures(f: ConvexFunction, rng,
                                         trials: int) -> list[dict]:
    fails = []
    for _ in range(trials):
        tau = _sample_tau(rng, f)  # keeps 1 + tau*lam >= 0.55
        x = _sample_x(rng, f)
        y = _sample_x(rng, f)
        dist = float(np.linalg.norm(x - y))
        if dist < 1e-6:
            continue
        rx = prox(f, tau, x)
        ry = prox(f, tau, y)
        ratio = float(np.linalg.norm(rx.moreau_gradient - ry.moreau_gradient)) / dist
        allowed = 3.0 / tau + 1e-8 \
            + (rx.solver_residual + ry.solver_residual) / (tau * dist)
        if not (ratio <= allowed):
            fails.append(_fail(f, tau=tau, x=x, y=y, ratio=ratio, allowed=allowed))
    return fails


def moreau_decomposition_failures(f: MaxLinear, rng, trials: int) -> list[dict]:
    """x = J_tau(x) + tau * proj_hull(x / tau) for max-linear functions."""
    fails = []
    for _ in range(trials):
        tau = _sample_tau(rng, f)
        x = _sample_x(rng, f)
        r = prox(f, tau, x)
        rebuilt = r.resolvent_point + tau * hull_projection(f.vectors, x / tau)
        err = float(np.linalg.norm(rebuilt - x))
        allowed = 1e-9 * (1.0 + float(np.linalg.norm(x)))
        if not (err <= allowed):
            fails.append(_fail(f, tau=tau, x=x, error=err, allowed=allowed))
    return fails


def slope_tau_monotonicity_failures(f: ConvexFunction, rng,
                                    trials: int) -> list[dict]:
    """(1 + lambda*tau) |x - J_tau(x)|/tau is nondecreasing as tau shrinks.

    The correction factor is forced by the resolvent's Lipschitz constant;
    quadratics whose curvature sits exactly at lambda make it an equality.
    For lambda >= 0 the corrected statement implies the plain one, so the
    raw quotient is monotone there as well.
    """
    fails = []
    for _ in range(trials):
        tau0 = _sample_tau(rng, f)
        x = _sample_x(rng, f)
        prev = None
        prev_res = 0.0
        for k in range(6):
            tau = tau0 * 0.5 ** k
            r = prox(f, tau, x)
            m = (1.0 + f.lam * tau) \
                * float(np.linalg.norm(x - r.resolvent_point)) / tau
            if prev is not None:
                tol = 1e-8 * (1.0 + prev) + 10.0 * (prev_res + r.solver_residual) / tau
                if m < prev - tol:
                    fails.append(_fail(f, tau=tau, x=x, ratio=m, previous=prev))
                    break
            prev, prev_res = m, r.solver_residual
    return fails


def sampled_lower_bound_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    fails = []
    for _ in range(trials):
        x = _sample_domain_x(rng, f)
        samples = [x + rng.normal(size=f.dim) * s for s in (0.05, 0.3, 1.0, 2.0)]
        bound = sampled_slope_lower_bound(f, x, samples)
        s = slope(f, x)
        if not (bound <= s + 1e-9 * (1.0 + min(s, 1e12))):
            fails.append(_fail(f, x=x, bound=bound, slope=s))
    return fails


# ---------------------------------------------------------------------------
# action-scope helpers

def _interp_instance(rng, f: ConvexFunction):
    delta = float(np.exp(rng.uniform(np.log(0.2), np.log(1.5))))
    tau = _sample_tau(rng, f)
    x0 = _sample_domain_x(rng, f)
    xd = _sample_domain_x(rng, f)
    return tau, delta, x0, xd


def interpolation_bound_failures(f: ConvexFunction, rng, trials: int,
                                 samples_m: int = 256) -> list[dict]:
    """Measured action of the constructed path stays under the stated bound,
    up to a per-instance refinement-difference quadrature allowance."""
    fails = []
    for _ in range(trials):
        tau, delta, x0, xd = _interp_instance(rng, f)
        path = interpolation_path(f, tau, delta, x0, xd, samples_m)
        act = discrete_action(f, path).total
        fine = interpolation_path(f, tau, delta, x0, xd, 2 * samples_m)
        act_fine = discrete_action(f, fine).total
        bound = interpolation_bound(f, tau, delta, x0, xd)
        quad = 2.0 * abs(act_fine - act) + 1e-9 * (1.0 + abs(bound))
        if not (act <= bound + quad):
            fails.append(_fail(f, tau=tau, delta=delta, x0=x0, xd=xd,
                               action=act, bound=bound, quadrature=quad))
    return fails


def coarsened_bound_failures(f: ConvexFunction, rng, trials: int,
                             samples_m: int = 256) -> list[dict]:
    """Same audit at the matched horizon delta = tau, plus dominance of the
    coarsened bound over the sharp one."""
    fails = []
    for _ in range(trials):
        tau, _, x0, xd = _interp_instance(rng, f)
        path = interpolation_path(f, tau, tau, x0, xd, samples_m)
        act = discrete_action(f, path).total
        fine = interpolation_path(f, tau, tau, x0, xd, 2 * samples_m)
        act_fine = discrete_action(f, fine).total
        coarse = coarsened_interpolation_bound(f, tau, x0, xd)
        sharp = interpolation_bound(f, tau, tau, x0, xd)
        quad = 2.0 * abs(act_fine - act) + 1e-9 * (1.0 + abs(coarse))
        if not (act <= coarse + quad):
            fails.append(_fail(f, tau=tau, x0=x0, xd=xd, action=act,
                               bound=coarse, quadrature=quad))
        if coarse < sharp - 1e-9 * (1.0 + abs(sharp)):
            fails.append(_fail(f, tau=tau, x0=x0, xd=xd, coarse=coarse,
                               sharp=sharp, kind="dominance"))
    return fails


def null_lagrangian_failures(f: ConvexFunction, rng, trials: int,
                             segments: int = 64) -> list[dict]:
    """alt action differs from the action by exactly the endpoint term,
    up to O(1/N) quadrature on smooth kinds."""
    fails = []
    for _ in range(trials):
        path = _random_path(rng, f, segments=segments)
        total = discrete_action(f, path).total
        alt = alt_action(f, path)
        f0 = f.value(path.nodes[0])
        f1 = f.value(path.nodes[-1])
        rhs = total - 2.0 * f1 + 2.0 * f0
        scale = 1.0 + abs(total) + abs(f0) + abs(f1)
        if not (abs(alt - rhs) <= 10.0 * scale / segments):
            fails.append(_fail(f, segments=segments, error=abs(alt - rhs),
                               allowed=10.0 * scale / segments))
    return fails


def upper_gradient_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    fails = []
    for _ in range(trials):
        path = _random_path(rng, f, segments=64)
        res = upper_gradient_residual(f, path)
        tol = upper_gradient_quadrature_bound(f, path)
        if not (res >= -tol):
            fails.append(_fail(f, residual=res, allowed=-tol,
                               start=path.nodes[0], end=path.nodes[-1]))
    return fails


def interpolation_endpoint_failures(f: ConvexFunction, rng,
                                    trials: int) -> list[dict]:
    fails = []
    for _ in range(trials):
        tau, delta, x0, xd = _interp_instance(rng, f)
        path = interpolation_path(f, tau, delta, x0, xd, 32)
        g0 = min_norm_subgradient(f, x0)
        gd = min_norm_subgradient(f, xd)
        r0 = prox(f, tau, x0 + tau * g0)
        rd = prox(f, tau, xd + tau * gd)
        for point, node, r in ((x0, path.nodes[0], r0), (xd, path.nodes[-1], rd)):
            err = float(np.linalg.norm(node - point))
            allowed = max(10.0 * r.solver_residual,
                          1e-9 * (1.0 + float(np.linalg.norm(point))))
            if not (err <= allowed):
                fails.append(_fail(f, tau=tau, delta=delta, target=point,
                                   endpoint=node, error=err, allowed=allowed))
    return fails


def recovery_bound_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    """Action of the patched resolvent pushforward obeys the recovery bound
    when the same function plays member and limit."""
    fails = []
    for _ in range(trials):
        tau = min(_sample_tau(rng, f), 0.35)
        gamma = _random_path(rng, f, segments=48)
        xh0 = gamma.nodes[0]
        xh1 = gamma.nodes[-1]
        s0 = slope(f, xh0)
        s1 = slope(f, xh1)
        if not (math.isfinite(s0) and math.isfinite(s1)):
            continue
        S = max(s0, s1)
        A = discrete_action(f, gamma).total
        rp = recovery_path(f, tau, gamma, xh0, xh1)
        act = discrete_action(f, rp).total
        bound = recovery_action_bound(A, tau, f.lam, S)
        tol = recovery_tolerance(A, tau, f.lam, S)
        if not (act <= bound + tol):
            fails.append(_fail(f, tau=tau, S=S, action=act, limit_action=A,
                               bound=bound, tolerance=tol))
    return fails


# ---------------------------------------------------------------------------
# minimize-scope helpers

def _zero_quadratic(d: int) -> Quadratic:
    return Quadratic(np.zeros((d, d)), np.zeros(d), 0.0)


def kinetic_gradient_failures(rng, trials: int) -> list[dict]:
    """Analytic kinetic gradient against central differences."""
    fails = []
    for _ in range(trials):
        d = int(rng.integers(1, 3))
        n = int(rng.integers(6, 14))
        f = _zero_quadratic(d)
        x0 = rng.normal(size=d)
        xd = rng.normal(size=d)
        dt = 1.0 / n
        obj = _Objective(f, 0.3, x0, xd, dt, 1e-5)
        Z = rng.normal(size=(n - 1, d))
        G = obj.kinetic_gradient(Z)
        h = 1e-6
        for _k in range(3):
            i = int(rng.integers(0, n - 1))
            j = int(rng.integers(0, d))
            Zp = Z.copy(); Zp[i, j] += h
            Zm = Z.copy(); Zm[i, j] -= h
            fd = (obj.value(Zp) - obj.value(Zm)) / (2.0 * h)
            err = abs(G[i, j] - fd)
            if not (err <= 1e-6 * (1.0 + abs(fd))):
                fails.append(_plain({"entry": [i, j], "analytic": G[i, j],
                                     "fd": fd, "error": err}))
    return fails


def objective_gradient_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    """Full smoothed-objective directional derivative against central
    differences (relative 1e-3; the slope part is itself finite-differenced)."""
    fails = []
    for _ in range(trials):
        n = int(rng.integers(8, 16))
        x0 = _sample_domain_x(rng, f)
        xd = _sample_domain_x(rng, f)
        tau = max(0.1, _sample_tau(rng, f))
        obj = _Objective(f, tau, x0, xd, 1.0 / n, 1e-5)
        s = np.linspace(0.0, 1.0, n + 1)[1:-1]
        Z = x0[None, :] + s[:, None] * (xd - x0)[None, :] \
            + rng.normal(size=(n - 1, f.dim)) * 0.1
        _, G = obj.value_and_grad(Z)
        D = rng.normal(size=Z.shape)
        D /= np.linalg.norm(D)
        h = 1e-5 * (1.0 + float(np.abs(Z).max()))
        fd = (obj.value(Z + h * D) - obj.value(Z - h * D)) / (2.0 * h)
        dd = float((G * D).sum())
        if not (abs(dd - fd) <= 1e-3 * (1.0 + abs(fd))):
            fails.append(_fail(f, n=n, tau=tau, analytic=dd, fd=fd))
    return fails


def descent_monotonicity_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    """Accepted objective values never increase within a continuation stage."""
    fails = []
    for _ in range(trials):
        x0 = _sample_domain_x(rng, f)
        xd = _sample_domain_x(rng, f)
        traces: list = []
        cfg = MinimizeConfig(N=24, max_iters=60, grad_tol=1e-6)
        minimize_action(f, x0, xd, 1.0, cfg, stage_traces=traces)
        for stage, tr in enumerate(traces):
            for a, b in zip(tr, tr[1:]):
                if not (b <= a + 1e-12 * (1.0 + abs(a))):
                    fails.append(_fail(f, stage=stage, before=a, after=b))
    return fails


def endpoint_pinning_failures(f: ConvexFunction, rng, trials: int) -> list[dict]:
    fails = []
    for _ in range(trials):
        x0 = _sample_domain_x(rng, f)
        xd = _sample_domain_x(rng, f)
        res = minimize_action(f, x0, xd, 1.0, MinimizeConfig(N=16, max_iters=20))
        if not (np.array_equal(res.path.nodes[0], x0)
                and np.array_equal(res.path.nodes[-1], xd)):
            fails.append(_fail(f, x0=x0, xd=xd,
                               got0=res.path.nodes[0], got1=res.path.nodes[-1]))
    return fails


def dubois_reymond_minimizer_failures() -> list[dict]:
    """Converged smooth minimizers nearly conserve |v|^2 - slope^2."""
    f = Quadratic(np.array([[1.0]]), np.zeros(1), 0.0)
    res = minimize_action(f, [1.0], [2.0], 1.0, MinimizeConfig(N=256))
    path = res.path
    v = path.velocities
    s = f.slope_many(path.chord_midpoints)
    e = np.einsum("ij,ij->i", v, v) - s ** 2
    residual = float(np.abs(e - e.mean()).max())
    allowed = 0.05 * (1.0 + abs(float(e.mean())))
    if residual <= allowed:
        return []
    return [_fail(f, residual=residual, allowed=allowed,
                  converged=res.converged)]


def oracle_sandwich_failures() -> list[dict]:
    """Gradient-descent value against the layered-grid upper bound."""
    fails = []
    f = Quadratic(np.array([[1.0]]), np.zeros(1), 0.0)
    res = minimize_action(f, [1.0], [2.0], 1.0, MinimizeConfig(N=128))
    spec_fine = GridSpec([0.5], [2.5], (64,))
    coarse = grid_oracle(f, [1.0], [2.0], 1.0,
                         GridSpec([0.5], [2.5], (32,)), 16)
    fine = grid_oracle(f, [1.0], [2.0], 1.0, spec_fine, 30)
    bias = speed_quantization_bias(spec_fine, 30, 1.0) \
        + 2.0 * abs(fine - coarse)
    if not (abs(res.value_true - fine) <= 0.05 * max(1.0, fine) + bias):
        fails.append(_fail(f, value=res.value_true, oracle=fine, bias=bias))
    return fails


# ---------------------------------------------------------------------------
# gamma-scope helpers

def _builtin_families():
    lse = family_logsumexp_to_max(
        np.array([[1.0], [-1.0]]), (0.5, 0.2, 0.08, 0.03), [-1.0], [1.0])
    pen = family_penalty_to_indicator(
        Ball(np.zeros(2), 1.5), (1.0, 4.0, 16.0, 64.0),
        [-1.0, 0.0], [1.0, 0.0])
    return lse, pen


def resolvent_table_flags() -> list[str]:
    lse, pen = _builtin_families()
    flags = list(resolvent_convergence_table(lse, 0.5, [[-1.2], [0.4], [1.8]]).flags)
    flags += resolvent_convergence_table(
        pen, 0.5, [[2.0, 0.0], [0.0, 2.5], [0.5, 0.5]]).flags
    return flags


def value_gap_flags() -> list[str]:
    lse, _ = _builtin_families()
    cfg = MinimizeConfig(N=48, max_iters=200, grad_tol=1e-4)
    report = gamma_value_experiment(lse, 1.0, cfg)
    return [fl for fl in report.flags if "eventually decreasing" in fl]


def limsup_flags() -> list[str]:
    _, pen = _builtin_families()
    quad = constant_family(Quadratic(np.array([[1.0]]), np.zeros(1), 0.0),
                           [0.5], [1.5], size=3)
    flags = []
    gamma_q = Path.straight([0.5], [1.5], intervals=40)
    flags += gamma_limsup_experiment(quad, gamma_q, (0.2, 0.05)).flags
    gamma_p = Path.straight([-1.0, 0.0], [1.0, 0.0], intervals=40)
    flags += gamma_limsup_experiment(pen, gamma_p, (0.2, 0.05)).flags
    return list(flags)


def slope_lsc_flags() -> list[str]:
    lse, pen = _builtin_families()
    flags = list(slope_semicontinuity_table(
        lse, [[-1.0], [0.0], [0.6], [1.7]]).flags)
    flags += slope_semicontinuity_table(
        pen, [[0.0, 0.0], [1.0, 0.5], [-0.7, 0.7]]).flags
    return flags


def report_determinism_failures() -> list[dict]:
    lse, _ = _builtin_families()
    docs = []
    for _ in range(2):
        rep = resolvent_convergence_table(lse, 0.4, [[-1.1], [0.9]])
        docs.append(serialize.dumps(rep.to_dict()))
    if docs[0] != docs[1]:
        return [{"reason": "resolvent report not byte-identical across reruns"}]
    return []


# ---------------------------------------------------------------------------
# registry and runner

def _per_function(helper, pool_fn, default: int):
    def runner(rng, samples, extra):
        n = default if samples is None else max(1, int(samples))
        pool = pool_fn(rng, extra) if pool_fn is _function_pool else pool_fn(rng)
        failures = []
        tested = 0
        for f in pool:
            failures.extend(helper(f, rng, n))
            tested += n
        return tested, failures
    return runner


def _interp_pool(rng) -> list[ConvexFunction]:
    return [f for f in _function_pool(rng)
            if not isinstance(f, Indicator)] + [
        Indicator(Ball(np.zeros(2), 1.5))]


def _minimize_pool(rng) -> list[ConvexFunction]:
    B = rng.normal(size=(2, 2))
    return [
        Quadratic(B @ B.T / 2, rng.normal(size=2), 0.0),
        LogSumExp(rng.normal(size=(3, 2)), 0.25),
        MaxLinear(rng.normal(size=(3, 1))),
        SquaredDistance(Ball(np.zeros(2), 1.0), 2.0),
    ]


def _maxlinear_pool(rng) -> list[ConvexFunction]:
    return [f for f in _function_pool(rng) if isinstance(f, MaxLinear)]


def _flags_check(helper):
    def runner(rng, samples, extra):
        flags = helper()
        return 1, [{"flag": fl} for fl in flags]
    return runner


def _plain_check(helper):
    def runner(rng, samples, extra):
        return 1, helper()
    return runner


_REGISTRY: tuple = (
    ("envelope_identity", "convex",
     _per_function(envelope_identity_failures, _function_pool, 25)),
    ("tilted_gradient_identity", "convex",
     _per_function(tilted_gradient_failures, _function_pool, 25)),
    ("slope_chain", "convex",
     _per_function(slope_chain_failures, _function_pool, 30)),
    ("resolvent_lipschitz", "convex",
     _per_function(resolvent_lipschitz_failures, _function_pool, 25)),
    ("envelope_gradient_lipschitz", "convex",
     _per_function(envelope_gradient_lipschitz_failures, _function_pool, 25)),
    ("moreau_decomposition", "convex",
     _per_function(moreau_decomposition_failures, _maxlinear_pool, 30)),
    ("slope_tau_monotonicity", "convex",
     _per_function(slope_tau_monotonicity_failures, _function_pool, 8)),
    ("sampled_lower_bound", "convex",
     _per_function(sampled_lower_bound_failures, _function_pool, 20)),
    ("interpolation_bound", "action",
     _per_function(interpolation_bound_failures, _interp_pool, 2)),
    ("coarsened_bound", "action",
     _per_function(coarsened_bound_failures, _interp_pool, 2)),
    ("null_lagrangian", "action",
     _per_function(null_lagrangian_failures, _smooth_pool, 4)),
    ("upper_gradient", "action",
     _per_function(upper_gradient_failures, _function_pool, 6)),
    ("interpolation_endpoints", "action",
     _per_function(interpolation_endpoint_failures, _interp_pool, 4)),
    ("recovery_bound", "action",
     _per_function(recovery_bound_failures, _interp_pool, 2)),
    ("kinetic_gradient", "minimize",
     lambda rng, samples, extra: (
         (samples or 10), kinetic_gradient_failures(rng, samples or 10))),
    ("objective_gradient", "minimize",
     _per_function(objective_gradient_failures, _minimize_pool, 4)),
    ("descent_monotonicity", "minimize",
     _per_function(descent_monotonicity_failures, _minimize_pool, 2)),
    ("endpoint_pinning", "minimize",
     _per_function(endpoint_pinning_failures, _minimize_pool, 2)),
    ("dubois_reymond_minimizer", "minimize",
     _plain_check(dubois_reymond_minimizer_failures)),
    ("oracle_sandwich", "minimize",
     _plain_check(oracle_sandwich_failures)),
    ("resolvent_gaps_decreasing", "gamma", _flags_check(resolvent_table_flags)),
    ("value_gap_decreasing", "gamma", _flags_check(value_gap_flags)),
    ("recovery_rows_bounded", "gamma", _flags_check(limsup_flags)),
    ("slope_semicontinuity", "gamma", _flags_check(slope_lsc_flags)),
    ("report_determinism", "gamma",
     _plain_check(report_determinism_failures)),
)


def verify_suite(scopes=None, seed: int = 0, samples: int | None = None,
                 extra_functions=()) -> VerifyReport:
    """Run the registered checks for the requested scopes.

    scopes defaults to all of ("convex", "action", "minimize", "gamma");
    a bare string is accepted for one scope.  samples overrides each
    sample-driven check's per-function count.  extra_functions join the
    sampled pool for convex-scope checks, which is how a deliberately
    corrupted descriptor gets flushed out.
    """
    if scopes is None:
        scopes = SCOPES
    if isinstance(scopes, str):
        scopes = (scopes,)
    scopes = tuple(scopes)
    for s in scopes:
        if s not in SCOPES:
            raise ConfigError(f"unknown scope {s!r}; choose from {SCOPES}")
    checks = []
    for idx, (name, scope, runner) in enumerate(_REGISTRY):
        if scope not in scopes:
            continue
        rng = np.random.default_rng([int(seed), idx])
        tested, failures = runner(rng, samples, tuple(extra_functions))
        checks.append(CheckResult(name, scope, int(tested), len(failures),
                                  tuple(failures[:5])))
    return VerifyReport(int(seed), scopes, tuple(checks))
