"""Seeded synthetic datasets and point-cloud ingestion.

All generators are pure functions of (parameters, seed); Gaussian draws use
Box-Muller on the package RNG so outputs are identical across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import persist
from .forward import ParticleSet
from .rng import SplitMix64

DEFAULT_MIXTURE_MEANS = ((2.0, 2.0), (-2.0, 2.0), (-2.0, -2.0), (2.0, -2.0))
DEFAULT_MIXTURE_STD = 0.3

SWISS_THETA_LO = 1.5 * math.pi
SWISS_THETA_HI = 4.5 * math.pi


@dataclass(frozen=True)
class LabeledPoints:
    """A particle set plus optional integer component labels."""

    points: ParticleSet
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int32)
            if labels.shape != (self.points.n,):
                raise ValueError(
                    f"labels shape {labels.shape} does not match n={self.points.n}")
            object.__setattr__(self, "labels", labels)


def gaussian_mixture(n: int, means=None, stds=None, weights=None,
                     seed: int = 0) -> LabeledPoints:
    """n i.i.d. draws from an isotropic Gaussian mixture, with labels.

    Defaults to four components at (+-2, +-2) with std 0.3 and equal
    weights.  Consumes n component uniforms first, then n*d normals.
    """
    if means is None:
        means = DEFAULT_MIXTURE_MEANS
    means = np.atleast_2d(np.asarray(means, dtype=np.float64))
    ncomp, d = means.shape
    if ncomp == 0:
        raise ValueError("mixture needs at least one component")
    if stds is None:
        stds = [DEFAULT_MIXTURE_STD] * ncomp
    stds = np.asarray(stds, dtype=np.float64)
    if weights is None:
        weights = [1.0 / ncomp] * ncomp
    weights = np.asarray(weights, dtype=np.float64)
    if stds.shape != (ncomp,) or weights.shape != (ncomp,):
        raise ValueError("means, stds and weights must have equal length")
    if np.any(stds < 0):
        raise ValueError("stds must be nonnegative")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be nonnegative and sum to 1")
    rng = SplitMix64(seed)
    u = rng.uniforms(n)
    cum = np.cumsum(weights)
    cum[-1] = 1.0  # close the last bin against rounding
    labels = np.searchsorted(cum, u, side="left").astype(np.int32)
    normals = rng.normals(n * d).reshape(n, d)
    points = means[labels] + stds[labels, None] * normals
    return LabeledPoints(points=ParticleSet(points), labels=labels)


def swiss_roll(n: int, noise: float = 0.2, seed: int = 0) -> LabeledPoints:
    """2-d Swiss roll: theta ~ U[1.5pi, 4.5pi], point = theta*(cos, sin)/3 + noise.

    Labels bucket theta into quartiles for coloring.  Consumes n theta
    uniforms first, then 2n normals.
    """
    if noise < 0:
        raise ValueError("noise must be >= 0")
    rng = SplitMix64(seed)
    theta = SWISS_THETA_LO + (SWISS_THETA_HI - SWISS_THETA_LO) * rng.uniforms(n)
    base = np.stack([theta * np.cos(theta), theta * np.sin(theta)], axis=1) / 3.0
    pts = base + noise * rng.normals(2 * n).reshape(n, 2)
    frac = (theta - SWISS_THETA_LO) / (SWISS_THETA_HI - SWISS_THETA_LO)
    labels = np.minimum((frac * 4).astype(np.int32), 3)
    return LabeledPoints(points=ParticleSet(pts), labels=labels)


def save_points(lp: LabeledPoints, path, fmt: Optional[str] = None):
    """Write a labeled point cloud as csv or efsb (by extension if fmt=None)."""
    fmt = fmt or _infer_format(path)
    if fmt == "csv":
        persist.write_csv(path, lp.points.positions, labels=lp.labels)
    elif fmt == "efsb":
        persist.write_efsb(path, [lp.points.positions], labels=lp.labels)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def load_points(path, fmt: Optional[str] = None) -> LabeledPoints:
    fmt = fmt or _infer_format(path)
    if fmt == "csv":
        points, labels = persist.read_csv(path)
    elif fmt == "efsb":
        blob = persist.read_efsb(path)
        points, labels = blob.snapshots[0], blob.labels
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return LabeledPoints(points=ParticleSet(points), labels=labels)


def _infer_format(path) -> str:
    name = str(path)
    if name.endswith(".csv"):
        return "csv"
    if name.endswith(".efsb"):
        return "efsb"
    raise ValueError(f"cannot infer format from {name!r}; pass fmt explicitly")
