"""Band-wise image quality metrics on [0, 1]-normalized cubes.

PSNR uses a fixed peak of 1. SSIM is the single-scale Gaussian-window form
(11x11, sigma 1.5, K1=0.01, K2=0.03, data range 1) averaged over the valid
window positions. ERGAS is ``100 * sqrt(mean_b (RMSE_b / mean_b)**2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "PERFECT_PSNR",
    "MetricsReport",
    "psnr_band",
    "ssim_band",
    "ergas",
    "spectral_signature",
    "per_band_psnr",
    "per_band_ssim",
    "evaluate",
]

# Sentinel for identical bands (zero MSE).
PERFECT_PSNR = math.inf

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def psnr_band(reference, test) -> float:
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {test.shape}")
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return PERFECT_PSNR
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_1d(size, sigma):
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-0.5 * (x / sigma) ** 2)
    return g / g.sum()


def _window_len(dim):
    # Largest odd length that fits, capped at the nominal window.
    n = min(SSIM_WINDOW, dim)
    return n if n % 2 == 1 else n - 1


def _ssim_window(shape):
    gr = _gaussian_1d(_window_len(shape[0]), SSIM_SIGMA)
    gc = _gaussian_1d(_window_len(shape[1]), SSIM_SIGMA)
    w = np.outer(gr, gc)
    return w / w.sum()


def _filter_valid(img, w):
    return np.einsum("ijkl,kl->ij", sliding_window_view(img, w.shape), w)


def ssim_map(reference, test) -> np.ndarray:
    """Local SSIM at every valid window position."""
    x = np.asarray(reference, dtype=np.float64)
    y = np.asarray(test, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 2:
        raise ValueError(f"expected two equal 2-D bands, got {x.shape} and {y.shape}")
    w = _ssim_window(x.shape)
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2
    mx = _filter_valid(x, w)
    my = _filter_valid(y, w)
    vx = _filter_valid(x * x, w) - mx * mx
    vy = _filter_valid(y * y, w) - my * my
    cxy = _filter_valid(x * y, w) - mx * my
    num = (2 * mx * my + c1) * (2 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return num / den


def ssim_band(reference, test) -> float:
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape == test.shape and np.array_equal(reference, test):
        return 1.0
    return float(ssim_map(reference, test).mean())


def ergas(reference, test) -> float:
    """Zero-mean reference bands are skipped with a warning."""
    ref = np.asarray(reference, dtype=np.float64)
    tst = np.asarray(test, dtype=np.float64)
    if ref.shape != tst.shape or ref.ndim != 3:
        raise ValueError(f"shape mismatch {ref.shape} vs {tst.shape}")
    mu = ref.mean(axis=(0, 1))
    rmse = np.sqrt(np.mean((ref - tst) ** 2, axis=(0, 1)))
    ok = mu != 0
    skipped = int((~ok).sum())
    if skipped:
        warnings.warn(f"ergas: skipped {skipped} zero-mean band(s)", RuntimeWarning, stacklevel=2)
    if not ok.any():
        return 0.0 if np.all(rmse == 0) else math.nan
    return float(100.0 * np.sqrt(np.mean((rmse[ok] / mu[ok]) ** 2)))


def spectral_signature(cube, row, col) -> np.ndarray:
    cube = np.asarray(cube)
    M, N = cube.shape[:2]
    if not (0 <= row < M and 0 <= col < N):
        raise IndexError(f"pixel ({row}, {col}) outside {M}x{N} image")
    return cube[row, col, :].copy()


def per_band_psnr(reference, test) -> np.ndarray:
    return np.array([psnr_band(reference[:, :, b], test[:, :, b])
                     for b in range(reference.shape[2])])


def per_band_ssim(reference, test) -> np.ndarray:
    return np.array([ssim_band(reference[:, :, b], test[:, :, b])
                     for b in range(reference.shape[2])])


@dataclass
class MetricsReport:
    per_band_psnr: list
    per_band_ssim: list
    mpsnr: float
    mssim: float
    ergas: float

    def to_dict(self):
        return asdict(self)

    def table(self) -> str:
        lines = ["band\tpsnr_db\tssim"]
        for b, (p, s) in enumerate(zip(self.per_band_psnr, self.per_band_ssim)):
            lines.append(f"{b + 1}\t{p:.6f}\t{s:.6f}")
        lines.append(f"MPSNR\t{self.mpsnr:.6f}")
        lines.append(f"MSSIM\t{self.mssim:.6f}")
        lines.append(f"ERGAS\t{self.ergas:.6f}")
        return "\n".join(lines) + "\n"


def evaluate(reference, test, quiet=False) -> MetricsReport:
    """Per-band PSNR/SSIM plus their means and ERGAS. ``quiet`` silences
    the zero-mean-band warning from :func:`ergas`."""
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {test.shape}")
    psnr = per_band_psnr(reference, test)
    ssim = per_band_ssim(reference, test)
    with warnings.catch_warnings():
        if quiet:
            warnings.simplefilter("ignore", RuntimeWarning)
        e = ergas(reference, test)
    return MetricsReport(psnr.tolist(), ssim.tolist(), float(psnr.mean()),
                         float(ssim.mean()), e)
