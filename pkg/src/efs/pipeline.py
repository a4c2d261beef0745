"""End-to-end generation: forward transport, augmentation, backward pass.

A run transports the training set forward, estimates the enclosing sphere of
the final snapshot, augments fresh points (uniform sphere draw or latent
interpolation), and inverts each augmented point back through the stored
snapshots.  Augmented points never interact with one another; each sees only
the stored snapshots, so samples are independent and can run in parallel.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backward import BackwardConfig, BackwardPath, run_backward
from .errors import DegenerateEnclosureError
from .forward import ParticleSet, Trajectory, run_forward
from .potential import PotentialParams
from .rng import SplitMix64, spawn_seed

logger = logging.getLogger(__name__)

AUGMENTATION_MODES = ("sphere", "interpolation")


@dataclass(frozen=True)
class Enclosure:
    """Center and radius of the estimated enclosing sphere."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be finite and positive, got {self.radius}")


@dataclass(frozen=True)
class SampleBatch:
    """Generated points with full provenance.

    ``seeds`` holds one recorded RNG seed per sample for sphere-mode draws
    (None for deterministic interpolation paths); a batch regenerates
    bit-exactly from its seeds and configs.
    """

    generated: np.ndarray
    seeds: Optional[tuple]
    mode: str
    paths: Optional[tuple] = None


def default_threads() -> int:
    env = os.environ.get("EFS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring invalid EFS_THREADS=%r", env)
    return 1


def estimate_enclosure(ps: ParticleSet) -> Enclosure:
    """Coordinate-wise mean center, mean distance-to-center radius."""
    if ps.n < 2:
        raise ValueError("enclosure estimation needs at least 2 particles")
    c = ps.positions.mean(axis=0)
    r = float(np.linalg.norm(ps.positions - c, axis=1).mean())
    if r <= 0.0:
        raise DegenerateEnclosureError("all points coincide")
    return Enclosure(center=c, radius=r)


def sample_sphere(enc: Enclosure, d: int, rng: SplitMix64) -> np.ndarray:
    """One point uniform on the sphere of the enclosure (exact radius)."""
    if d < 2:
        raise ValueError("sphere sampling needs dimension >= 2")
    if enc.center.shape != (d,):
        raise ValueError(f"enclosure center has dimension {enc.center.shape[0]}, expected {d}")
    while True:
        u = rng.normals(d)
        norm = float(np.linalg.norm(u))
        if norm > 0.0:
            break
    return enc.center + enc.radius * (u / norm)


def sample_ball(enc: Enclosure, d: int, rng: SplitMix64) -> np.ndarray:
    """One point uniform in the ball of the enclosure (direction then radius)."""
    point = sample_sphere(enc, d, rng)
    scale = rng.uniform() ** (1.0 / d)
    return enc.center + scale * (point - enc.center)


def interpolate_latent(ps: ParticleSet, i: int, j: int, t: float) -> np.ndarray:
    """Convex combination (1 - t) * x_i + t * x_j."""
    if not 0 <= i < ps.n or not 0 <= j < ps.n:
        raise IndexError(f"indices ({i}, {j}) out of range for n={ps.n}")
    if i == j:
        raise ValueError("interpolation indices must be distinct")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    return (1.0 - t) * ps.positions[i] + t * ps.positions[j]


def _validate_exponent(s: float, d: int):
    if not (d - 2 <= s < d):
        logger.warning(
            "s=%g is outside [d-2, d)=[%d, %d) where the uniform-limit theory applies",
            s, d - 2, d,
        )


def _backward_many(starts, traj: Trajectory, bwd: BackwardConfig,
                   snapshot_mode: str, threads: Optional[int]):
    """Invert a list of start points; parallel across samples, order-stable."""
    workers = threads if threads is not None else default_threads()
    if workers <= 1 or len(starts) <= 1:
        return [run_backward(y, traj, bwd, snapshot_mode=snapshot_mode) for y in starts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(
            lambda y: run_backward(y, traj, bwd, snapshot_mode=snapshot_mode), starts))


def efs_generate(ps0: ParticleSet, gamma: float, k: int, params: PotentialParams,
                 bwd: BackwardConfig, m: int, mode: str = "sphere", seed: int = 0,
                 snapshot_mode: str = "paper", use_ball: bool = False,
                 seeds: Optional[list] = None, keep_paths: bool = True,
                 threads: Optional[int] = None):
    """Full pipeline: forward once, augment m points, invert each.

    Returns ``(Trajectory, SampleBatch)``.  Per-sample seeds are spawned from
    ``seed`` unless an explicit ``seeds`` list is given (replay).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if mode not in AUGMENTATION_MODES:
        raise ValueError(f"mode must be one of {AUGMENTATION_MODES}")
    _validate_exponent(params.s, ps0.d)
    traj = run_forward(ps0, gamma, k, params)
    batch = generate_from_trajectory(
        traj, bwd, m, mode=mode, seed=seed, snapshot_mode=snapshot_mode,
        use_ball=use_ball, seeds=seeds, keep_paths=keep_paths, threads=threads)
    return traj, batch


def generate_from_trajectory(traj: Trajectory, bwd: BackwardConfig, m: int,
                             mode: str = "sphere", seed: int = 0,
                             snapshot_mode: str = "paper", use_ball: bool = False,
                             seeds: Optional[list] = None, keep_paths: bool = True,
                             threads: Optional[int] = None) -> SampleBatch:
    """Augment m points against a stored trajectory and invert them."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if mode not in AUGMENTATION_MODES:
        raise ValueError(f"mode must be one of {AUGMENTATION_MODES}")
    if seeds is not None and len(seeds) != m:
        raise ValueError(f"got {len(seeds)} replay seeds for m={m}")
    final = traj.snapshots[-1]
    if seeds is None:
        seeds = [spawn_seed(seed, i) for i in range(m)]
    enc = estimate_enclosure(final) if mode == "sphere" else None
    starts = []
    for i, child in enumerate(seeds):
        rng = SplitMix64(child)
        if mode == "sphere":
            y = sample_ball(enc, final.d, rng) if use_ball else sample_sphere(enc, final.d, rng)
        else:
            a = rng.integer(final.n)
            b = rng.integer(final.n - 1)
            if b >= a:
                b += 1
            t = rng.uniform()
            y = interpolate_latent(final, a, b, t)
        starts.append(y)
    try:
        paths = _backward_many(starts, traj, bwd, snapshot_mode, threads)
    except Exception as e:
        raise type(e)(f"backward stage: {e}") from e
    generated = np.array([p.generated for p in paths])
    return SampleBatch(generated=generated, seeds=tuple(seeds), mode=mode,
                       paths=tuple(paths) if keep_paths else None)


def interpolation_path(traj: Trajectory, i: int, j: int, steps: int,
                       bwd: BackwardConfig, snapshot_mode: str = "paper",
                       threads: Optional[int] = None) -> SampleBatch:
    """Backward-map the straight segment between x_i^(k) and x_j^(k).

    The segment is sampled at ``steps`` equispaced t values in [0, 1]
    (endpoints included), so the first and last generated points recover the
    two training particles' initial positions up to inversion error.
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    final = traj.snapshots[-1]
    if not 0 <= i < final.n or not 0 <= j < final.n:
        raise IndexError(f"indices ({i}, {j}) out of range for n={final.n}")
    if i == j:
        raise ValueError("interpolation indices must be distinct")
    ts = np.linspace(0.0, 1.0, steps)
    starts = [(1.0 - t) * final.positions[i] + t * final.positions[j] for t in ts]
    paths = _backward_many(starts, traj, bwd, snapshot_mode, threads)
    generated = np.array([p.generated for p in paths])
    return SampleBatch(generated=generated, seeds=None, mode="interpolation",
                       paths=tuple(paths))
