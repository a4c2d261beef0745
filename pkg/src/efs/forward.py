"""Interaction energy and the forward gradient-descent transport.

Particles interact through the pair potential of :mod:`efs.potential`.  The
per-particle force is

    Delta_i = (1 / (n - 1)) * sum_{a != i} grad W(x_i - x_a)

and one forward step moves every particle simultaneously (Jacobi update)
from the old snapshot: ``x_i <- x_i - gamma * Delta_i``.  Pairwise work is
blocked over rows so memory stays bounded at large n; each row's inner sum
is a fixed-order numpy reduction over the full index range, so results are
independent of block size and thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularityError
from .potential import PotentialParams

# Rows per pairwise block; ~n * _BLOCK * d doubles live at once.
_BLOCK = 128


@dataclass(frozen=True)
class ParticleSet:
    """n points in R^d, the support of the empirical measure.

    ``positions`` is an n x d float64 matrix; row i is particle x_i.  The
    array is frozen (read-only) so sets can be shared across threads.
    """

    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64, copy=True)
        if pos.ndim != 2:
            raise ValueError(f"positions must be 2-d, got shape {pos.shape}")
        if pos.shape[0] < 1:
            raise ValueError("need at least 1 particle")
        if pos.shape[1] < 1:
            raise ValueError("dimension must be >= 1")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions contain non-finite values")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class Trajectory:
    """Ordered forward snapshots x^(0) ... x^(k) plus the run configuration."""

    snapshots: tuple
    gamma: float
    params: PotentialParams

    def __post_init__(self):
        snaps = tuple(self.snapshots)
        if not snaps:
            raise ValueError("trajectory needs at least one snapshot")
        n, d = snaps[0].n, snaps[0].d
        for j, s in enumerate(snaps):
            if (s.n, s.d) != (n, d):
                raise ValueError(f"snapshot {j} has shape {(s.n, s.d)}, expected {(n, d)}")
        object.__setattr__(self, "snapshots", snaps)

    @property
    def k(self) -> int:
        return len(self.snapshots) - 1

    @property
    def n(self) -> int:
        return self.snapshots[0].n

    @property
    def d(self) -> int:
        return self.snapshots[0].d


def _pair_blocks(x: np.ndarray, eps: float):
    """Yield (row slice, squared distances, regularized squared distances).

    The diagonal of each block is flagged so callers can exclude the
    self-pair; coincident distinct pairs with eps=0 raise.
    """
    n = x.shape[0]
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        diff = x[i0:i1, None, :] - x[None, :, :]
        sq = np.einsum("abd,abd->ab", diff, diff)
        rows = np.arange(i0, i1)
        q = sq + eps
        if eps == 0.0:
            off = q == 0.0
            off[rows - i0, rows] = False
            if np.any(off):
                raise SingularityError("coincident particles with epsilon=0")
        yield i0, i1, diff, sq, q


def interaction_energy(ps: ParticleSet, p: PotentialParams) -> float:
    """Average pair energy over all ordered distinct pairs (the objective E_n)."""
    x = ps.positions
    n = ps.n
    if n < 2:
        raise ValueError("interaction energy needs at least 2 particles")
    total = 0.0
    for i0, i1, _diff, sq, q in _pair_blocks(x, p.epsilon):
        qs = q.copy()
        rows = np.arange(i0, i1)
        qs[rows - i0, rows] = 1.0  # neutralize self-pairs before the power
        if p.s == 0:
            w = 0.5 * sq - 0.5 * np.log(qs)
        else:
            w = 0.5 * sq + 1.0 / (p.s * qs ** (p.s / 2.0))
        w[rows - i0, rows] = 0.0
        total += float(w.sum())
    return total / (n * (n - 1))


def forward_gradient(ps: ParticleSet, p: PotentialParams) -> np.ndarray:
    """Per-particle forces; row i is Delta_i.  Columns sum to zero."""
    x = ps.positions
    n = ps.n
    if n < 2:
        raise ValueError("forces need at least 2 particles")
    out = np.empty_like(x)
    for i0, i1, diff, _sq, q in _pair_blocks(x, p.epsilon):
        qs = q.copy()
        rows = np.arange(i0, i1)
        qs[rows - i0, rows] = 1.0
        coef = 1.0 - qs ** (-(p.s + 2.0) / 2.0)
        coef[rows - i0, rows] = 0.0  # diff is zero there anyway; keep it exact
        out[i0:i1] = np.einsum("ab,abd->ad", coef, diff)
    out /= n - 1
    return out


def forward_step(ps: ParticleSet, gamma: float, p: PotentialParams) -> ParticleSet:
    """One simultaneous gradient step; preserves the center of mass."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    delta = forward_gradient(ps, p)
    return ParticleSet(ps.positions - gamma * delta)


def run_forward(ps0: ParticleSet, gamma: float, k: int, p: PotentialParams) -> Trajectory:
    """Run k forward steps, recording every snapshot (k + 1 in total)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    snaps = [ps0]
    for j in range(k):
        try:
            snaps.append(forward_step(snaps[-1], gamma, p))
        except SingularityError as e:
            raise SingularityError(f"forward iteration {j}: {e}") from e
    return Trajectory(tuple(snaps), gamma=float(gamma), params=p)
