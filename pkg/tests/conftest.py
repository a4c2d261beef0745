"""Shared numerical helpers for the test suite."""

import numpy as np

from efs.rng import SplitMix64


def fd_gradient(f, z, h=1e-7):
    """Central-difference gradient of a scalar function of a vector."""
    z = np.asarray(z, dtype=np.float64)
    g = np.zeros_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = h
        g[i] = (f(z + e) - f(z - e)) / (2.0 * h)
    return g


def fd_hessian(f, z, h=1e-5):
    """Central-difference Hessian (symmetric) of a scalar function."""
    z = np.asarray(z, dtype=np.float64)
    d = z.size
    H = np.zeros((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        H[i, i] = (f(z + ei) - 2.0 * f(z) + f(z - ei)) / h**2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h
            H[i, j] = H[j, i] = (
                f(z + ei + ej) - f(z + ei - ej) - f(z - ei + ej) + f(z - ei - ej)
            ) / (4.0 * h**2)
    return H


def random_rotation(d, seed=0):
    """A random d x d rotation matrix (QR of a Gaussian matrix, det +1)."""
    rng = SplitMix64(seed)
    m = rng.normals(d * d).reshape(d, d)
    q, r = np.linalg.qr(m)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
