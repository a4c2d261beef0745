"""The attractive-repulsive pair potential and its derivatives.

The pair interaction combines a quadratic attraction with a regularized
inverse-power repulsion:

    W(z) = ||z||^2 / 2 + 1 / (s * (||z||^2 + eps)^(s/2))        for s > 0
    W(z) = ||z||^2 / 2 - log(||z||^2 + eps) / 2                 for s = 0

The gradient has the single closed form

    grad W(z) = z * (1 - (||z||^2 + eps)^(-(s+2)/2))

valid for every s >= 0, including the logarithmic branch.  All functions here
are pure and stateless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError


@dataclass(frozen=True)
class PotentialParams:
    """Exponent ``s`` and regularizer ``epsilon`` of the pair potential.

    ``epsilon`` is in squared-length units.  Both must be nonnegative;
    ``epsilon > 0`` is required by any evaluation at zero separation and by
    the curvature bounds.
    """

    s: float
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.s) and self.s >= 0):
            raise ValueError(f"s must be finite and >= 0, got {self.s}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")


def _check_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("input vector has non-finite components")
    return z


def potential_value(z, p: PotentialParams) -> float:
    """Evaluate W(z).  Radial: depends on ``z`` only through its norm."""
    z = _check_vector(z)
    r2 = float(z @ z)
    q = r2 + p.epsilon
    if q == 0.0:
        raise SingularityError("potential evaluated at zero separation with epsilon=0")
    if p.s == 0:
        return 0.5 * r2 - 0.5 * np.log(q)
    return 0.5 * r2 + 1.0 / (p.s * q ** (p.s / 2.0))


def potential_gradient(z, p: PotentialParams) -> np.ndarray:
    """Evaluate grad W(z); a vector parallel to ``z`` and odd in ``z``."""
    z = _check_vector(z)
    r2 = float(z @ z)
    q = r2 + p.epsilon
    if q == 0.0:
        raise SingularityError("gradient at zero separation with epsilon=0")
    return z * (1.0 - q ** (-(p.s + 2.0) / 2.0))


def pair_hessian_spectral_bound(p: PotentialParams) -> float:
    """Upper bound on the spectral norm of the pair Hessian, uniform in z.

    Returns ``1 + (s + 3) * eps^(-(s+2)/2)``.  Finite-difference Hessians at
    any separation stay below this value.
    """
    if p.epsilon <= 0:
        raise SingularityError("curvature bound requires epsilon > 0")
    return 1.0 + (p.s + 3.0) * p.epsilon ** (-(p.s + 2.0) / 2.0)


def paper_prox_step_bound(n: int, p: PotentialParams) -> float:
    """Sufficient step-size bound for the joint proximal inversion problem.

    Returns ``(n - 1) / (1 + s^2 * eps^(-s/2 - 1))``.  Exposed as a
    diagnostic only; the operational convexity guard for the backward pass is
    ``gamma < 1 / pair_hessian_spectral_bound``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if p.epsilon <= 0:
        raise SingularityError("proximal step bound requires epsilon > 0")
    return (n - 1) / (1.0 + p.s**2 * p.epsilon ** (-p.s / 2.0 - 1.0))
