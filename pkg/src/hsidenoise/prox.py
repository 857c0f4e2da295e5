"""Norms and shrinkage operators.

Nonconvex pair:

* ``l2log_norm`` / ``l2log_shrink`` -- column-wise ``sum_j log(1 + ||a_j||_2)``
  and its closed-form proximal map.
* ``logdet_norm`` / ``logdet_svt`` -- ``sum_s log(1 + sigma_s)`` and its
  singular-value proximal map.

Convex baselines (used by the ablation mode): ``nuclear_svt``,
``l21_shrink`` and the signed element-wise ``soft_threshold``.

Matrix operators accept stacks of matrices ``(..., d, n)``; "column" always
means the last axis indexes columns.
"""
from __future__ import annotations

import numpy as np

from .numerics import thin_svd

__all__ = [
    "log_scalar_shrink",
    "l2log_norm",
    "l21_norm",
    "logdet_norm",
    "nuclear_norm",
    "l2log_shrink",
    "logdet_svt",
    "soft_threshold",
    "nuclear_svt",
    "l21_shrink",
]


def _check_threshold(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and >= 0, got {value}")
    return value


def log_scalar_shrink(r, alpha):
    """Minimizer over ``x >= 0`` of ``0.5*(x - r)**2 + alpha*log(1 + x)``.

    ``r`` is a nonnegative array (column norms or singular values). The
    stationary point ``xi = (r-1)/2 + sqrt((1+r)**2/4 - alpha)`` is kept
    only when it is real with ``(1+r)**2/4 > alpha``, positive, and no worse
    than ``x = 0``; otherwise the result is 0. Ties go to ``xi``.
    """
    alpha = _check_threshold(alpha, "alpha")
    r = np.asarray(r, dtype=np.float64)
    if alpha == 0.0:
        return r.copy()
    disc = (1.0 + r) ** 2 / 4.0 - alpha
    admissible = disc > 0
    xi = np.where(admissible, (r - 1.0) / 2.0 + np.sqrt(np.where(admissible, disc, 0.0)), 0.0)
    admissible &= xi > 0
    safe_xi = np.where(admissible, xi, 0.0)
    f_xi = 0.5 * (safe_xi - r) ** 2 + alpha * np.log1p(safe_xi)
    f_zero = 0.5 * r ** 2
    keep = admissible & (f_xi <= f_zero)
    return np.where(keep, xi, 0.0)


def l2log_norm(A) -> float:
    A = np.asarray(A, dtype=np.float64)
    return float(np.log1p(np.linalg.norm(A, axis=-2)).sum())


def l21_norm(A) -> float:
    A = np.asarray(A, dtype=np.float64)
    return float(np.linalg.norm(A, axis=-2).sum())


def logdet_norm(A) -> float:
    """``sum_s log(1 + sigma_s(A))``."""
    s = np.linalg.svd(np.asarray(A, dtype=np.float64), compute_uv=False)
    return float(np.log1p(s).sum())


def nuclear_norm(A) -> float:
    return float(np.linalg.svd(np.asarray(A, dtype=np.float64), compute_uv=False).sum())


def _column_rescale(Y, new_norms, norms):
    scale = np.divide(new_norms, norms, out=np.zeros_like(norms), where=norms > 0)
    return Y * scale[..., None, :]


def l2log_shrink(Y, alpha) -> np.ndarray:
    """Solve ``min_W 0.5*||Y - W||_F**2 + alpha*||W||_{2,log}`` column-wise.

    Each nonzero column keeps its direction and has its length replaced by
    :func:`log_scalar_shrink` of its norm. Zero columns stay zero.
    """
    Y = np.asarray(Y, dtype=np.float64)
    alpha = _check_threshold(alpha, "alpha")
    if alpha == 0.0:
        return Y.copy()
    norms = np.linalg.norm(Y, axis=-2)
    return _column_rescale(Y, log_scalar_shrink(norms, alpha), norms)


def logdet_svt(X, delta) -> np.ndarray:
    """Solve ``min_L 0.5*||X - L||_F**2 + delta*sum log(1 + sigma(L))``.

    Singular values are shrunk by :func:`log_scalar_shrink`; the singular
    vectors of ``X`` are reused.
    """
    delta = _check_threshold(delta, "delta")
    X = np.asarray(X, dtype=np.float64)
    svd = thin_svd(X)
    shrunk = log_scalar_shrink(svd.values, delta)
    return (svd.left * shrunk[..., None, :]) @ np.swapaxes(svd.right, -1, -2)


def soft_threshold(x, theta):
    """Signed element-wise soft threshold ``sign(x) * max(|x| - theta, 0)``."""
    theta = _check_threshold(theta, "theta")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)


def nuclear_svt(X, theta) -> np.ndarray:
    theta = _check_threshold(theta, "theta")
    svd = thin_svd(X)
    shrunk = np.maximum(svd.values - theta, 0.0)
    return (svd.left * shrunk[..., None, :]) @ np.swapaxes(svd.right, -1, -2)


def l21_shrink(Y, theta) -> np.ndarray:
    """Group soft threshold: ``y <- max(1 - theta/||y||, 0) * y`` per column."""
    theta = _check_threshold(theta, "theta")
    Y = np.asarray(Y, dtype=np.float64)
    norms = np.linalg.norm(Y, axis=-2)
    return _column_rescale(Y, np.maximum(norms - theta, 0.0), norms)
