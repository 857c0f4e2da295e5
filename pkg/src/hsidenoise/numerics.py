"""Dense SVD and 3-D DFT wrappers with the conventions the solver relies on.

DFT convention: unnormalized forward transform, ``1/(M*N*p)``-scaled
inverse (numpy's default ``norm="backward"``).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "ThinSvd",
    "thin_svd",
    "dft3_forward",
    "dft3_inverse",
    "difference_transfer",
]

AXES = {"x": 0, "y": 1, "z": 2}


class ThinSvd(NamedTuple):
    left: np.ndarray
    values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.values) @ self.right.T


def thin_svd(matrix) -> ThinSvd:
    """Thin SVD ``D = P diag(s) Q^T`` with ``r = min(a, b)`` components.

    Works on stacks too: a ``(..., a, b)`` input gives batched factors.
    Singular values come back in descending order.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        raise ValueError("thin_svd: non-finite entries in input")
    u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    return ThinSvd(u, s, np.swapaxes(vt, -1, -2))


def dft3_forward(cube) -> np.ndarray:
    cube = np.asarray(cube)
    if cube.ndim != 3:
        raise ValueError("dft3_forward expects a 3-D grid")
    return np.fft.fftn(cube, axes=(0, 1, 2))


def dft3_inverse(grid) -> np.ndarray:
    """Inverse transform; returns the complex result (callers drop ``.imag``)."""
    grid = np.asarray(grid)
    if grid.ndim != 3:
        raise ValueError("dft3_inverse expects a 3-D grid")
    return np.fft.ifftn(grid, axes=(0, 1, 2))


def difference_transfer(axis, dims) -> np.ndarray:
    """Fourier multiplier of the periodic forward difference along ``axis``.

    ``lambda_k = exp(2*pi*i*k/n) - 1`` broadcast to a full ``dims`` grid, so
    ``dft3_forward(D_axis x) == lambda * dft3_forward(x)``.
    """
    ax = AXES[axis] if isinstance(axis, str) else int(axis)
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise ValueError(f"bad dims {dims}")
    n = dims[ax]
    lam = np.exp(2j * np.pi * np.arange(n) / n) - 1.0
    shape = [1, 1, 1]
    shape[ax] = n
    return np.broadcast_to(lam.reshape(shape), dims).copy()
