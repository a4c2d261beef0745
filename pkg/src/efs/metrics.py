"""Evaluation metrics: Riesz-kernel MMD, uniformity tests, novelty statistics.

The MMD uses the regularized inverse-power kernel
``K(z) = 1 / (s * (||z||^2 + eps)^(s/2))`` as a V-statistic with diagonals
included.  For s > 0 and eps > 0 this is an inverse multiquadric, strictly
positive definite, so the statistic is nonnegative and vanishes only on
identical multisets.  The unregularized, diagonal-excluded U-statistic is
available behind a flag but carries no sign guarantee.

Uniformity against the limiting ball law is tested with a one-sample KS
statistic on scaled distances (reference CDF ``F(u) = u^d`` on [0, 1], with
the scale set to the maximum distance so the support matches), plus, in two
dimensions, a rotation-invariant Kuiper statistic on angles about the
center.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .forward import ParticleSet, Trajectory, interaction_energy
from .pipeline import Enclosure, estimate_enclosure
from .potential import PotentialParams


@dataclass(frozen=True)
class UniformityReport:
    """KS-style statistics (in [0, 1]) of the uniform-ball fit."""

    radial_ks: float
    angular_ks: Optional[float]
    enclosure: Enclosure


def _kernel_mean(a: np.ndarray, b: np.ndarray, s: float, eps: float) -> float:
    diff = a[:, None, :] - b[None, :, :]
    q = np.einsum("abd,abd->ab", diff, diff) + eps
    return float((1.0 / (s * q ** (s / 2.0))).mean())


def mmd_squared(a: ParticleSet, b: ParticleSet, p: PotentialParams,
                unregularized_ustat: bool = False) -> float:
    """Squared MMD between two point sets under the repulsion kernel.

    Symmetric, translation invariant, zero on identical multisets,
    nonnegative up to roundoff.  With ``unregularized_ustat=True`` the
    singular kernel ``1/(s ||z||^s)`` is used with diagonals excluded; that
    variant can go negative and exists for study only.
    """
    if p.s <= 0:
        raise ValueError("the MMD kernel requires s > 0")
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    if unregularized_ustat:
        return (_ustat_mean(a.positions, p.s) + _ustat_mean(b.positions, p.s)
                - 2.0 * _kernel_mean(a.positions, b.positions, p.s, 0.0))
    if p.epsilon <= 0:
        raise ValueError("the regularized MMD requires epsilon > 0")
    return (_kernel_mean(a.positions, a.positions, p.s, p.epsilon)
            + _kernel_mean(b.positions, b.positions, p.s, p.epsilon)
            - 2.0 * _kernel_mean(a.positions, b.positions, p.s, p.epsilon))


def _ustat_mean(x: np.ndarray, s: float) -> float:
    n = x.shape[0]
    diff = x[:, None, :] - x[None, :, :]
    q = np.einsum("abd,abd->ab", diff, diff)
    np.fill_diagonal(q, 1.0)
    k = 1.0 / (s * q ** (s / 2.0))
    np.fill_diagonal(k, 0.0)
    return float(k.sum()) / (n * (n - 1))


def ks_statistic(u: np.ndarray, cdf) -> float:
    """One-sample KS distance of samples ``u`` to the distribution ``cdf``."""
    u = np.sort(np.asarray(u, dtype=np.float64))
    n = u.size
    f = cdf(u)
    d_plus = float(np.max(np.arange(1, n + 1) / n - f))
    d_minus = float(np.max(f - np.arange(0, n) / n))
    return max(d_plus, d_minus, 0.0)


def kuiper_statistic(angles: np.ndarray) -> float:
    """Kuiper statistic of angles against the uniform circular law.

    D+ + D- of the wrapped empirical CDF; invariant under rotation and in
    [0, 1].
    """
    u = np.sort(np.mod(angles, 2.0 * np.pi) / (2.0 * np.pi))
    n = u.size
    d_plus = float(np.max(np.arange(1, n + 1) / n - u))
    d_minus = float(np.max(u - np.arange(0, n) / n))
    return max(d_plus, 0.0) + max(d_minus, 0.0)


def uniformity_report(ps: ParticleSet) -> UniformityReport:
    """Empirical test of the uniform-ball limit law.

    Radial: KS of (distance to center) / (max distance) against F(u) = u^d.
    Angular (d = 2 only): Kuiper statistic of angles about the center.
    """
    if ps.n < 10:
        raise ValueError(f"need at least 10 points, got {ps.n}")
    enc = estimate_enclosure(ps)
    rel = ps.positions - enc.center
    dist = np.linalg.norm(rel, axis=1)
    rmax = float(dist.max())
    radial = ks_statistic(dist / rmax, lambda u: u**ps.d)
    angular = None
    if ps.d == 2:
        angular = kuiper_statistic(np.arctan2(rel[:, 1], rel[:, 0]))
    return UniformityReport(radial_ks=radial, angular_ks=angular, enclosure=enc)


def nn_novelty(generated: ParticleSet, training: ParticleSet):
    """Nearest-neighbor novelty of generated points against the training set.

    Returns ``(min_nn, mean_nn, self_nn_mean)`` where the last entry is the
    training set's own mean nearest-neighbor distance, for normalization.
    """
    if generated.d != training.d:
        raise ValueError(f"dimension mismatch: {generated.d} vs {training.d}")
    tree = cKDTree(training.positions)
    dist, _ = tree.query(generated.positions, k=1)
    self_dist, _ = tree.query(training.positions, k=2)
    return float(dist.min()), float(dist.mean()), float(self_dist[:, 1].mean())


def energy_trace(traj: Trajectory):
    """Interaction energy per snapshot (length k + 1)."""
    return [interaction_energy(s, traj.params) for s in traj.snapshots]
