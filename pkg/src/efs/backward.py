"""Proximal inversion of forward steps for a single augmented point.

One forward step is undone by minimizing the convex anchor-penalized
objective

    H(v) = ||v - y||^2 / 2 - (gamma / n) * sum_i W(v - x_i)

whose stationary point satisfies the inversion identity
``v - (gamma / n) * sum_i grad W(v - x_i) = y``.  The inner solver is plain
gradient descent with step size beta, capped at T iterations with early
stopping on the gradient norm.  Walking the inversions from snapshot k down
to snapshot 0 transports a fresh point back to the data distribution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InstabilityError
from .forward import ParticleSet, Trajectory
from .potential import PotentialParams, pair_hessian_spectral_bound

logger = logging.getLogger(__name__)

SNAPSHOT_MODES = ("paper", "exact")


@dataclass(frozen=True)
class BackwardConfig:
    """Inner-loop settings for the proximal inversion.

    ``gamma`` must equal the trajectory's forward step size; ``beta`` is the
    inner gradient step; ``T`` caps inner iterations; ``grad_tol`` stops the
    inner loop early once the objective gradient norm falls below it.
    """

    gamma: float
    beta: float
    T: int
    grad_tol: float = 1e-10

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.grad_tol < 0:
            raise ValueError(f"grad_tol must be >= 0, got {self.grad_tol}")


@dataclass(frozen=True)
class BackwardPath:
    """Backward iterates y^(k), ..., y^(0) and per-step final residuals.

    ``points[0]`` is the starting point; ``points[-1]`` is the generated
    sample.  One residual (final inner gradient norm) is recorded per
    inversion, so ``len(points) == len(inner_residuals) + 1``.
    """

    points: np.ndarray
    inner_residuals: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.points)):
            raise ValueError("backward path contains non-finite points")

    @property
    def generated(self) -> np.ndarray:
        return self.points[-1]


def mean_field_gradient(v: np.ndarray, snap: ParticleSet, p: PotentialParams) -> np.ndarray:
    """(1/n) * sum_i grad W(v - x_i) over the snapshot particles."""
    diff = v[None, :] - snap.positions
    q = np.einsum("ad,ad->a", diff, diff) + p.epsilon
    coef = 1.0 - q ** (-(p.s + 2.0) / 2.0)
    return coef @ diff / snap.n


def augmented_forward_map(y: np.ndarray, snap: ParticleSet, gamma: float,
                          p: PotentialParams) -> np.ndarray:
    """The forward map a single augmented point would follow against ``snap``."""
    return y - gamma * mean_field_gradient(np.asarray(y, float), snap, p)


def _mean_potential(v: np.ndarray, snap: ParticleSet, p: PotentialParams) -> float:
    diff = v[None, :] - snap.positions
    sq = np.einsum("ad,ad->a", diff, diff)
    q = sq + p.epsilon
    if np.any(q == 0.0):
        from .errors import SingularityError

        raise SingularityError("objective evaluated at a particle with epsilon=0")
    if p.s == 0:
        w = 0.5 * sq - 0.5 * np.log(q)
    else:
        w = 0.5 * sq + 1.0 / (p.s * q ** (p.s / 2.0))
    return float(w.sum()) / snap.n


def prox_objective(v, anchor, snap: ParticleSet, cfg: BackwardConfig,
                   p: PotentialParams) -> float:
    """The inner objective H(v); convex whenever gamma * L_W < 1."""
    v = np.asarray(v, dtype=np.float64)
    anchor = np.asarray(anchor, dtype=np.float64)
    dv = v - anchor
    return 0.5 * float(dv @ dv) - cfg.gamma * _mean_potential(v, snap, p)


def _prox_gradient(v: np.ndarray, anchor: np.ndarray, snap: ParticleSet,
                   cfg: BackwardConfig, p: PotentialParams) -> np.ndarray:
    return v - anchor - cfg.gamma * mean_field_gradient(v, snap, p)


def _warn_convexity_guard(cfg: BackwardConfig, p: PotentialParams):
    if p.epsilon <= 0:
        return
    bound = 1.0 / pair_hessian_spectral_bound(p)
    if cfg.gamma >= bound:
        logger.warning(
            "gamma=%g is at or above the convexity guard 1/L_W=%g; "
            "the proximal objective may be nonconvex near particles",
            cfg.gamma, bound,
        )


def invert_step(y_j, snap: ParticleSet, cfg: BackwardConfig, p: PotentialParams,
                _warn: bool = True):
    """Invert one forward step: minimize H anchored at ``y_j``.

    Returns ``(v, residual)`` where ``residual`` is the final gradient norm
    of H at v.  Diverging iterates raise :class:`InstabilityError`.
    """
    if _warn:
        _warn_convexity_guard(cfg, p)
    y = np.asarray(y_j, dtype=np.float64)
    v = y.copy()
    for _t in range(cfg.T):
        g = _prox_gradient(v, y, snap, cfg, p)
        res = float(np.linalg.norm(g))
        if not np.isfinite(res):
            raise InstabilityError(
                f"inner iterates diverged (beta={cfg.beta}); reduce the step size")
        if res <= cfg.grad_tol:
            return v, res
        v = v - cfg.beta * g
    g = _prox_gradient(v, y, snap, cfg, p)
    res = float(np.linalg.norm(g))
    if not np.isfinite(res):
        raise InstabilityError(
            f"inner iterates diverged (beta={cfg.beta}); reduce the step size")
    return v, res


def run_backward(y_k, traj: Trajectory, cfg: BackwardConfig,
                 snapshot_mode: str = "paper") -> BackwardPath:
    """Walk the inversions from snapshot k down to snapshot 0.

    ``snapshot_mode="paper"`` uses the same-index schedule: step j inverts
    against snapshot x^(j) for j = k..1.  (A further j = 0 pass would write
    a value the procedure's own output discards, so it is omitted.)
    ``snapshot_mode="exact"`` inverts step j against the pre-step
    snapshot x^(j-1), which makes forward-then-invert recovery exact up to
    the inner tolerance.  Both modes perform k inversions and return a path
    of k + 1 points.
    """
    if snapshot_mode not in SNAPSHOT_MODES:
        raise ValueError(f"snapshot_mode must be one of {SNAPSHOT_MODES}")
    if cfg.gamma != traj.gamma:
        logger.warning("backward gamma=%g differs from trajectory gamma=%g",
                       cfg.gamma, traj.gamma)
    _warn_convexity_guard(cfg, traj.params)
    k = traj.k
    cur = np.asarray(y_k, dtype=np.float64)
    points = [cur]
    residuals = []
    for j in range(k, 0, -1):
        snap = traj.snapshots[j if snapshot_mode == "paper" else j - 1]
        try:
            cur, res = invert_step(cur, snap, cfg, traj.params, _warn=False)
        except InstabilityError as e:
            raise InstabilityError(f"backward step j={j}: {e}") from e
        points.append(cur)
        residuals.append(res)
    return BackwardPath(np.array(points), np.array(residuals))
