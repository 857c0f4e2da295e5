"""Spatial-spectral total variation with periodic boundaries.

A gradient stack is an array of shape ``(3, M, N, p)`` holding the
tau-weighted forward differences along rows (x), columns (y) and bands (z).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import dft3_forward, dft3_inverse, difference_transfer

__all__ = [
    "TvWeights",
    "apply_D",
    "apply_Dt",
    "sstv_norm",
    "precompute_denominator",
    "solve_B",
]

IMAG_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TvWeights:
    tau_x: float = 1.0
    tau_y: float = 1.0
    tau_z: float = 0.5

    def __post_init__(self):
        for name in ("tau_x", "tau_y", "tau_z"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    def as_tuple(self):
        return (self.tau_x, self.tau_y, self.tau_z)


def apply_D(cube, w: TvWeights = TvWeights()) -> np.ndarray:
    cube = np.asarray(cube, dtype=np.float64)
    out = np.empty((3,) + cube.shape)
    for axis, tau in enumerate(w.as_tuple()):
        out[axis] = tau * (np.roll(cube, -1, axis=axis) - cube)
    return out


def apply_Dt(stack, w: TvWeights = TvWeights()) -> np.ndarray:
    """Adjoint of :func:`apply_D`: a tau-weighted backward difference."""
    stack = np.asarray(stack, dtype=np.float64)
    if stack.ndim != 4 or stack.shape[0] != 3:
        raise ValueError(f"expected a (3, M, N, p) gradient stack, got {stack.shape}")
    out = np.zeros(stack.shape[1:])
    for axis, tau in enumerate(w.as_tuple()):
        g = stack[axis]
        out += tau * (np.roll(g, 1, axis=axis) - g)
    return out


def sstv_norm(cube, w: TvWeights = TvWeights()) -> float:
    return float(np.abs(apply_D(cube, w)).sum())


def precompute_denominator(dims, w: TvWeights = TvWeights()) -> np.ndarray:
    """``1 + sum_axis tau**2 * |lambda_axis|**2`` on the full Fourier grid."""
    denom = np.ones(tuple(dims))
    for axis, tau in zip("xyz", w.as_tuple()):
        denom += tau ** 2 * np.abs(difference_transfer(axis, dims)) ** 2
    return denom


def _denominator_matches(denom, w):
    # Probe the first non-DC frequency on each axis.
    if denom[0, 0, 0] != 1.0:
        return False
    for axis, tau in enumerate(w.as_tuple()):
        n = denom.shape[axis]
        if n < 2:
            continue
        idx = [0, 0, 0]
        idx[axis] = 1
        expected = 1.0 + tau ** 2 * (2.0 - 2.0 * np.cos(2.0 * np.pi / n))
        if abs(denom[tuple(idx)] - expected) > 1e-12 * expected:
            return False
    return True


def solve_B(C, ZC, A, ZB, rho, denom, w: TvWeights = TvWeights()) -> np.ndarray:
    """Solve ``(D^T D + I) B = D^T (C + ZC/rho) + (A + ZB/rho)`` by FFT."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    A = np.asarray(A, dtype=np.float64)
    if denom.shape != A.shape:
        raise ValueError(f"denominator shape {denom.shape} != cube shape {A.shape}")
    if not _denominator_matches(denom, w):
        raise ValueError("denominator was built for different TV weights")
    rhs = apply_Dt(C + ZC / rho, w) + A + ZB / rho
    sol = dft3_inverse(dft3_forward(rhs) / denom)
    scale = max(np.abs(sol.real).max(), 1e-300)
    if np.abs(sol.imag).max() > IMAG_TOLERANCE * scale:
        raise ArithmeticError("solve_B: inverse transform left a non-negligible imaginary part;"
                              " denominator does not match the weights")
    return sol.real
