"""Lambda-convex function kinds and their proximal calculus.

Each kind is a frozen dataclass that knows its value, metric slope,
minimal-norm subgradient, and resolvent (proximal map) J_tau, where

    J_tau(x) = argmin_y  f(y) + |y - x|^2 / (2 tau),

admissible whenever tau > 0 and 1 + tau*lambda > 0.  The envelope value is
f(J_tau(x)) + |x - J_tau(x)|^2/(2 tau) and its gradient is (x - J_tau(x))/tau.

Values of +inf are legal (indicator outside its region) and propagate through
arithmetic; operations that need a finite subgradient raise instead.  Batched
`*_many` methods take (k, d) arrays and are the primitives; the free functions
at the bottom are the scalar-call surface.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    InadmissibleTauError,
    OutsideDomainError,
    SolverError,
)
from .minnorm import hull_projection_with_gap, min_norm_point
from .sets import Ball, Box, ConvexRegion, Halfspace

ACTIVE_TOL = 1e-9       # relative active-set tolerance for piecewise-linear slopes
_NEWTON_TOL = 1e-11     # absolute scale for the smoothed-max resolvent residual
_NEWTON_CAP = 60


def as_point(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr[None]
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be a 1-D point")
    if not np.all(np.isfinite(arr)):
        raise OutsideDomainError(f"{name} must be finite")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"{name} has dimension {arr.size}, expected {dim}")
    return arr


def _batch(X, dim: int) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatchError(f"expected points of dimension {dim}")
    if not np.all(np.isfinite(arr)):
        raise OutsideDomainError("points must be finite")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class ConvexFunction:
    """Common surface for the built-in kinds; subclasses provide the math."""

    lam: float = 0.0

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def value_many(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def slope_many(self, X: np.ndarray, active_tol: float = ACTIVE_TOL) -> np.ndarray:
        raise NotImplementedError

    def subgradient_many(self, X: np.ndarray, active_tol: float = ACTIVE_TOL) -> np.ndarray:
        raise NotImplementedError

    def prox_many(self, tau: float, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def value(self, x) -> float:
        return float(self.value_many(_batch(x, self.dim))[0])

    def require_admissible(self, tau: float, *, envelope_lipschitz: bool = False) -> float:
        tau = float(tau)
        if not (np.isfinite(tau) and tau > 0.0):
            raise InadmissibleTauError("tau must be positive and finite")
        if 1.0 + tau * self.lam <= 1e-12:
            raise InadmissibleTauError(
                f"tau={tau} violates 1 + tau*lambda > 0 for lambda={self.lam}")
        if envelope_lipschitz and 1.0 + tau * self.lam < 0.5 - 1e-12:
            raise InadmissibleTauError(
                f"tau={tau} violates (1 + tau*lambda)^-1 <= 2 for lambda={self.lam}")
        return tau


@dataclass(frozen=True)
class Quadratic(ConvexFunction):
    """f(x) = 0.5 <Qx, x> + <b, x> + c with symmetric Q; lambda = min eig(Q)."""

    Q: np.ndarray
    b: np.ndarray
    c: float = 0.0
    lam: float = field(init=False)

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.ndim == 0:
            Q = Q[None, None]
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ConfigError("Q must be a square matrix")
        if not np.all(np.isfinite(Q)):
            raise ConfigError("Q must be finite")
        scale = max(1.0, float(np.abs(Q).max()))
        if np.abs(Q - Q.T).max() > 1e-10 * scale:
            raise ConfigError("Q must be symmetric")
        Q = 0.5 * (Q + Q.T)
        b = as_point(self.b, Q.shape[0], "b")
        object.__setattr__(self, "Q", _frozen(Q))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "lam", float(np.linalg.eigvalsh(Q).min()))

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def value_many(self, X):
        return 0.5 * np.einsum("ki,ij,kj->k", X, self.Q, X) + X @ self.b + self.c

    def subgradient_many(self, X, active_tol=ACTIVE_TOL):
        return X @ self.Q + self.b

    def slope_many(self, X, active_tol=ACTIVE_TOL):
        return np.linalg.norm(self.subgradient_many(X), axis=1)

    def prox_many(self, tau, X):
        A = np.eye(self.dim) + tau * self.Q
        rhs = X - tau * self.b
        Y = np.linalg.solve(A, rhs.T).T
        residual = np.linalg.norm(Y @ A.T - rhs, axis=1)
        return Y, residual


@dataclass(frozen=True)
class MaxLinear(ConvexFunction):
    """f(x) = max_i <a_i, x>, the support function of conv{a_i}; lambda = 0."""

    vectors: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.vectors, dtype=float)
        if A.ndim == 1:
            A = A[:, None]
        if A.ndim != 2 or A.shape[0] == 0:
            raise ConfigError("vectors must be a nonempty (m, d) array")
        if not np.all(np.isfinite(A)):
            raise ConfigError("vectors must be finite")
        object.__setattr__(self, "vectors", _frozen(A))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def value_many(self, X):
        return (X @ self.vectors.T).max(axis=1)

    def _actives(self, X, active_tol):
        dots = X @ self.vectors.T
        fvals = dots.max(axis=1)
        eta = active_tol * (1.0 + np.abs(fvals))
        return dots >= (fvals - eta)[:, None]

    def subgradient_many(self, X, active_tol=ACTIVE_TOL):
        A = self.vectors
        active = self._actives(X, active_tol)
        out = np.empty((X.shape[0], self.dim))
        counts = active.sum(axis=1)
        single = counts == 1
        if single.any():
            out[single] = A[np.argmax(active[single], axis=1)]
        for i in np.where(~single)[0]:
            out[i] = min_norm_point(A[active[i]])
        return out

    def slope_many(self, X, active_tol=ACTIVE_TOL):
        return np.linalg.norm(self.subgradient_many(X, active_tol), axis=1)

    def prox_many(self, tau, X):
        # Moreau decomposition: J_tau(x) = x - tau * proj_{conv a_i}(x / tau)
        A = self.vectors
        Z = X / tau
        if self.dim == 1:
            lo = float(A.min())
            hi = float(A.max())
            proj = np.clip(Z, lo, hi)
            gaps = np.zeros(X.shape[0])
        else:
            proj = np.empty_like(Z)
            gaps = np.empty(X.shape[0])
            for i in range(X.shape[0]):
                proj[i], gaps[i] = hull_projection_with_gap(A, Z[i])
        Y = X - tau * proj
        residual = tau * np.sqrt(np.maximum(gaps, 0.0))
        return Y, residual


@dataclass(frozen=True)
class LogSumExp(ConvexFunction):
    """f(x) = eps * log( (1/m) sum_i exp(<a_i, x>/eps) ); smooth, lambda = 0."""

    vectors: np.ndarray
    epsilon: float

    def __post_init__(self):
        A = np.asarray(self.vectors, dtype=float)
        if A.ndim == 1:
            A = A[:, None]
        if A.ndim != 2 or A.shape[0] == 0:
            raise ConfigError("vectors must be a nonempty (m, d) array")
        if not np.all(np.isfinite(A)):
            raise ConfigError("vectors must be finite")
        object.__setattr__(self, "vectors", _frozen(A))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError("epsilon must be positive")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def _scores(self, X):
        return (X @ self.vectors.T) / self.epsilon

    def _weights(self, X):
        s = self._scores(X)
        s = s - s.max(axis=1, keepdims=True)
        w = np.exp(s)
        return w / w.sum(axis=1, keepdims=True)

    def value_many(self, X):
        s = self._scores(X)
        m = s.max(axis=1)
        lse = m + np.log(np.exp(s - m[:, None]).sum(axis=1))
        return self.epsilon * (lse - np.log(self.vectors.shape[0]))

    def subgradient_many(self, X, active_tol=ACTIVE_TOL):
        return self._weights(X) @ self.vectors

    def slope_many(self, X, active_tol=ACTIVE_TOL):
        return np.linalg.norm(self.subgradient_many(X), axis=1)

    def _hessian_many(self, X):
        A = self.vectors
        W = self._weights(X)
        G = W @ A
        H = np.einsum("km,md,me->kde", W, A, A) - np.einsum("kd,ke->kde", G, G)
        return H / self.epsilon

    def prox_many(self, tau, X):
        # damped Newton on r(y) = y + tau*grad f(y) - x; I + tau*Hess is SPD
        d = self.dim
        Y = X.copy()
        target = _NEWTON_TOL * (1.0 + np.linalg.norm(X, axis=1))
        r = Y + tau * self.subgradient_many(Y) - X
        rnorm = np.linalg.norm(r, axis=1)
        eye = np.eye(d)
        for _ in range(_NEWTON_CAP):
            active = rnorm > target
            if not active.any():
                break
            Ya = Y[active]
            ra = r[active]
            M = eye[None] + tau * self._hessian_many(Ya)
            step = np.linalg.solve(M, -ra[..., None])[..., 0]
            alpha = np.ones(Ya.shape[0])
            base = np.linalg.norm(ra, axis=1)
            for _ls in range(50):
                trial = Ya + alpha[:, None] * step
                rt = trial + tau * self.subgradient_many(trial) - X[active]
                ok = np.linalg.norm(rt, axis=1) <= (1.0 - 1e-4 * alpha) * base
                if ok.all():
                    break
                alpha[~ok] *= 0.5
            Y[active] = Ya + alpha[:, None] * step
            r[active] = Y[active] + tau * self.subgradient_many(Y[active]) - X[active]
            rnorm[active] = np.linalg.norm(r[active], axis=1)
        else:
            worst = float(rnorm.max())
            raise SolverError(
                f"smoothed-max resolvent Newton stalled at residual {worst:.3e} "
                f"after {_NEWTON_CAP} iterations")
        return Y, rnorm


@dataclass(frozen=True)
class Indicator(ConvexFunction):
    """f = 0 on the region, +inf outside; resolvent is the projection."""

    region: ConvexRegion

    def __post_init__(self):
        if not isinstance(self.region, (Ball, Box, Halfspace)):
            raise ConfigError("indicator region must be a ball, box, or halfspace")

    @property
    def dim(self) -> int:
        return self.region.dim

    def value_many(self, X):
        return np.where(self.region.contains_many(X), 0.0, np.inf)

    def slope_many(self, X, active_tol=ACTIVE_TOL):
        return np.where(self.region.contains_many(X), 0.0, np.inf)

    def subgradient_many(self, X, active_tol=ACTIVE_TOL):
        inside = self.region.contains_many(X)
        if not inside.all():
            raise OutsideDomainError("minimal subgradient undefined outside the region")
        return np.zeros_like(X)

    def prox_many(self, tau, X):
        return self.region.project_many(X), np.zeros(X.shape[0])


@dataclass(frozen=True)
class SquaredDistance(ConvexFunction):
    """f(x) = weight * dist(x, region)^2; smooth (C^1), lambda = 0.

    Resolvent slides toward the projection:
    J_tau(x) = x + s (proj(x) - x) with s = 2 w tau / (1 + 2 w tau).
    """

    region: ConvexRegion
    weight: float

    def __post_init__(self):
        if not isinstance(self.region, (Ball, Box, Halfspace)):
            raise ConfigError("region must be a ball, box, or halfspace")
        object.__setattr__(self, "weight", float(self.weight))
        if not (np.isfinite(self.weight) and self.weight > 0):
            raise ConfigError("weight must be positive")

    @property
    def dim(self) -> int:
        return self.region.dim

    def value_many(self, X):
        return self.weight * self.region.distance_many(X) ** 2

    def subgradient_many(self, X, active_tol=ACTIVE_TOL):
        return 2.0 * self.weight * (X - self.region.project_many(X))

    def slope_many(self, X, active_tol=ACTIVE_TOL):
        return 2.0 * self.weight * self.region.distance_many(X)

    def prox_many(self, tau, X):
        s = 2.0 * self.weight * tau / (1.0 + 2.0 * self.weight * tau)
        Y = X + s * (self.region.project_many(X) - X)
        return Y, np.zeros(X.shape[0])


KINDS = (Quadratic, MaxLinear, LogSumExp, Indicator, SquaredDistance)


@dataclass(frozen=True)
class ProxResult:
    resolvent_point: np.ndarray
    envelope_value: float
    moreau_gradient: np.ndarray
    tau: float
    solver_residual: float


def evaluate(f: ConvexFunction, x) -> float:
    """f(x) as an extended real; +inf outside an indicator's region."""
    return f.value(as_point(x, f.dim))


def prox(f: ConvexFunction, tau: float, x) -> ProxResult:
    """Resolvent point, envelope value, and envelope gradient at x."""
    tau = f.require_admissible(tau)
    x = as_point(x, f.dim)
    Y, res = f.prox_many(tau, x[None, :])
    y = Y[0]
    diff = x - y
    env = f.value(y) + float(diff @ diff) / (2.0 * tau)
    return ProxResult(
        resolvent_point=y,
        envelope_value=env,
        moreau_gradient=diff / tau,
        tau=tau,
        solver_residual=float(res[0]),
    )


def moreau_gradient(f: ConvexFunction, tau: float, x) -> np.ndarray:
    return prox(f, tau, x).moreau_gradient


def min_norm_subgradient(f: ConvexFunction, x, *, active_tol: float = ACTIVE_TOL) -> np.ndarray:
    """Minimal-norm element of the subdifferential; raises outside its domain."""
    x = as_point(x, f.dim)
    return f.subgradient_many(x[None, :], active_tol)[0]


def slope(f: ConvexFunction, x, *, active_tol: float = ACTIVE_TOL) -> float:
    """Metric slope |grad f|(x) = |min-norm subgradient|, +inf outside the domain."""
    x = as_point(x, f.dim)
    return float(f.slope_many(x[None, :], active_tol)[0])


def sampled_slope_lower_bound(f: ConvexFunction, x, samples) -> float:
    """max over sample points y of [f(x) - f(y) + (lambda/2)|x-y|^2]^+ / |x-y|.

    A certified lower bound for the slope; samples must exclude x itself.
    """
    x = as_point(x, f.dim)
    Y = _batch(samples, f.dim)
    if Y.shape[0] == 0:
        raise ConfigError("need at least one sample point")
    diffs = Y - x
    dists = np.linalg.norm(diffs, axis=1)
    if np.any(dists == 0.0):
        raise ConfigError("sample points must differ from x")
    fx = f.value(x)
    if not np.isfinite(fx):
        return np.inf
    numer = fx - f.value_many(Y) + 0.5 * f.lam * dists**2
    quotients = np.maximum(numer, 0.0) / dists
    return float(quotients.max())


@dataclass(frozen=True)
class ResolventSlopeEstimate:
    value: float
    taus: np.ndarray
    profile: np.ndarray
    monotone: bool
    diverged: bool


def resolvent_slope(f: ConvexFunction, x, *, tau0: float = 1.0,
                    levels: int = 13) -> ResolventSlopeEstimate:
    """Slope via the envelope-gradient limit |x - J_tau(x)|/tau as tau -> 0.

    Evaluates the quotient on the halving schedule tau0 * 2^-k (tau0 shrunk
    when lambda < 0 so every step is admissible), audits that the profile is
    nondecreasing as tau falls, and returns the last value plus a first-order
    Richardson correction.  A persistently doubling profile is reported as a
    divergence (slope +inf).
    """
    x = as_point(x, f.dim)
    if f.lam < 0:
        tau0 = min(float(tau0), 0.45 / (-f.lam))
    taus = tau0 * 0.5 ** np.arange(levels)
    profile = np.empty(levels)
    for k, tau in enumerate(taus):
        Y, _ = f.prox_many(float(tau), x[None, :])
        profile[k] = np.linalg.norm(x - Y[0]) / tau
    monotone = bool(np.all(np.diff(profile) >= -1e-8 * (1.0 + profile[:-1])))
    scale = 1.0 + float(np.linalg.norm(x))
    # |x - J_tau(x)| halves per level when the quotient converges and stalls
    # at dist(x, domain) when it diverges
    moved = taus * profile
    diverged = bool(moved[-1] > 1e-9 * scale and moved[-1] > 0.5 * moved[-4])
    if diverged:
        value = np.inf
    else:
        value = float(max(profile[-1], 2.0 * profile[-1] - profile[-2]))
    return ResolventSlopeEstimate(value=value, taus=taus, profile=profile,
                                  monotone=monotone, diverged=diverged)
