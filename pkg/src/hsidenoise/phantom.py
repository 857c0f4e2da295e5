"""Synthetic clean cubes for desk-scale experiments."""
from __future__ import annotations

import numpy as np

from .cube import normalize_bands

__all__ = ["PHANTOM_SETTINGS", "smooth_spectra", "piecewise_phantom", "rank_one_phantom"]

# Per-mode (lam, gamma) tuned by grid search on the default 64x64x32
# piecewise phantom under Case-1 noise.
PHANTOM_SETTINGS = {
    "l3s3tv": {"lam": 0.7, "gamma": 0.003},
    "convex_rpca_sstv": {"lam": 1.0, "gamma": 0.03},
    "l3s3_no_tv": {"lam": 0.3, "gamma": 0.0},
}


def smooth_spectra(n_materials, bands, rng) -> np.ndarray:
    """``(n_materials, bands)`` smooth, positive reflectance-like curves."""
    t = np.linspace(0.0, 1.0, bands)
    out = np.empty((n_materials, bands))
    for k in range(n_materials):
        centers = rng.uniform(0, 1, 3)
        widths = rng.uniform(0.08, 0.3, 3)
        heights = rng.uniform(0.2, 1.0, 3)
        curve = 0.1 + sum(h * np.exp(-0.5 * ((t - c) / w) ** 2)
                          for c, w, h in zip(centers, widths, heights))
        out[k] = curve
    return out


def piecewise_phantom(M=64, N=64, p=32, n_materials=4, n_regions=10, seed=0):
    """Piecewise-constant, rank <= ``n_materials`` cube normalized to [0, 1].

    The label map is a Voronoi partition of ``n_regions`` random sites, each
    region painted with one of ``n_materials`` smooth spectra.

    Returns
    -------
    cube : ndarray, shape (M, N, p)
    labels : ndarray, shape (M, N)
    """
    rng = np.random.default_rng(seed)
    spectra = smooth_spectra(n_materials, p, rng)
    sites = rng.uniform(0, 1, (n_regions, 2)) * (M, N)
    site_material = np.arange(n_regions) % n_materials
    rng.shuffle(site_material)
    rr, cc = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    d2 = (rr[..., None] - sites[:, 0]) ** 2 + (cc[..., None] - sites[:, 1]) ** 2
    labels = site_material[np.argmin(d2, axis=-1)]
    cube, _ = normalize_bands(spectra[labels])
    return cube, labels


def rank_one_phantom(M=32, N=32, p=16, seed=0):
    """Outer product of a smooth spatial map and a smooth spectrum, in [0, 1]."""
    rng = np.random.default_rng(seed)
    spectrum = smooth_spectra(1, p, rng)[0]
    spectrum = spectrum / spectrum.max()
    r = np.linspace(0, np.pi, M)[:, None]
    c = np.linspace(0, np.pi, N)[None, :]
    spatial = 0.5 + 0.4 * np.sin(r + 0.3) * np.cos(0.7 * c)
    return spatial[:, :, None] * spectrum[None, None, :]
