"""Brute-force reference computations, independent of the package's optimizer and norm code."""

import math

import numpy as np


def schatten_from_svd(stack, p):
    s = np.linalg.svd(stack, compute_uv=False)
    if math.isinf(p):
        return s.max(axis=-1)
    return (s ** p).sum(axis=-1) ** (1.0 / p)


def dense_grid_max(x, y, p, period=math.pi, points=100_000, chunk=20_000):
    """Max of ``||cos(t) X + sin(t) Y||_p`` over a uniform grid of ``points`` angles."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    best = -np.inf
    ts = period * np.arange(points) / points
    for k in range(0, points, chunk):
        t = ts[k:k + chunk]
        stack = np.cos(t)[:, None, None] * x + np.sin(t)[:, None, None] * y
        best = max(best, float(schatten_from_svd(stack, p).max()))
    return best


def omega_grid(a, p, points=100_000):
    a = np.asarray(a, dtype=complex)
    # Re(e^{it} A) = (e^{it} A + e^{-it} A*)/2, expanded in cos/sin
    x = (a + a.conj().T) / 2
    y = (1j * a - 1j * a.conj().T) / 2
    return dense_grid_max(x, y, p, points=points)
