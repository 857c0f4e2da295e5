"""Seeded synthetic corruption: Gaussian, per-band SNR Gaussian, deadlines,
stripes, salt-and-pepper impulses, and the six composite test cases.

Randomness
----------
Every draw comes from numpy's ``Philox`` counter-based generator seeded by
``SeedSequence(seed, spawn_key=(stage, band))``. ``stage`` identifies the
primitive (see ``STAGE_*``) and ``band`` is the 0-based band index, so each
band of each primitive owns an independent, reproducible substream. Two
cases that share a primitive (Case 1 and Case 2 both add the same Gaussian
field) therefore produce identical draws for it.

Band ranges are 1-based and inclusive, as in the usual 224-band protocol.
:func:`map_band_range` rescales them for cubes with fewer bands.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .cube import as_cube

__all__ = [
    "NOMINAL_BANDS",
    "NoiseSpec",
    "rng_for",
    "map_band_range",
    "add_gaussian",
    "add_gaussian_snr",
    "add_deadlines",
    "add_stripes",
    "add_impulse",
    "simulate",
    "make_case",
]

NOMINAL_BANDS = 224

STAGE_GAUSSIAN = 1
STAGE_SNR = 2
STAGE_DEADLINES = 3
STAGE_STRIPES = 4
STAGE_SALT_PEPPER = 5
STAGE_IMPULSE = 6
STAGE_IMPULSE_DENSITY = 7


def rng_for(seed, stage, band=0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stage), int(band)))
    return np.random.Generator(np.random.Philox(ss))


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def map_band_range(band_range, bands, nominal=NOMINAL_BANDS):
    """Map a 1-based inclusive range defined for ``nominal`` bands onto a cube
    with ``bands`` bands. Returns a 1-based inclusive ``(first, last)``."""
    first, last = band_range
    if bands >= nominal:
        return first, min(last, bands)
    lo = max(1, _round_half_up(first * bands / nominal))
    hi = min(bands, max(lo, _round_half_up(last * bands / nominal)))
    return lo, hi


def _band_indices(band_range, bands):
    if band_range is None:
        return range(bands)
    first, last = band_range
    if not (1 <= first <= last):
        raise ValueError(f"invalid band range {band_range}")
    if first > bands:
        raise ValueError(f"band range {band_range} outside a {bands}-band cube")
    return range(first - 1, min(last, bands))


def _check_range(rng_range, name):
    lo, hi = rng_range
    if lo > hi:
        raise ValueError(f"{name}: empty range {rng_range}")
    return lo, hi


def add_gaussian(cube, variance, seed, as_sigma=False):
    """Add i.i.d. zero-mean Gaussian noise with the given variance.

    With ``as_sigma=True`` the number is read as a standard deviation.
    """
    cube = as_cube(cube, copy=True)
    if variance < 0:
        raise ValueError("variance must be >= 0")
    std = float(variance) if as_sigma else math.sqrt(variance)
    if std == 0:
        return cube
    M, N, p = cube.shape
    for b in range(p):
        cube[:, :, b] += rng_for(seed, STAGE_GAUSSIAN, b).normal(0.0, std, (M, N))
    return cube


def add_gaussian_snr(cube, snr_db_range, seed):
    """Per band, draw a target SNR (dB) uniformly and add Gaussian noise with
    variance ``power / 10**(snr/10)``, ``power`` being the band's mean square.

    Returns the noisy cube and the realized SNR per band (``None`` for a
    zero-power band, which is left untouched).
    """
    lo, hi = _check_range(snr_db_range, "snr_db_range")
    cube = as_cube(cube, copy=True)
    M, N, p = cube.shape
    snrs = []
    for b in range(p):
        rng = rng_for(seed, STAGE_SNR, b)
        snr = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
        power = float(np.mean(cube[:, :, b] ** 2))
        if power == 0:
            snrs.append(None)
            continue
        std = math.sqrt(power / 10.0 ** (snr / 10.0))
        cube[:, :, b] += rng.normal(0.0, std, (M, N))
        snrs.append(snr)
    return cube, snrs


def add_deadlines(cube, band_range=None, count_range=(3, 10), width_range=(1, 3), seed=0,
                  return_info=False):
    """Zero out 1..3-column-wide runs of pixel columns in the chosen bands."""
    cube = as_cube(cube, copy=True)
    cmin, cmax = _check_range(count_range, "count_range")
    wmin, wmax = _check_range(width_range, "width_range")
    if wmin < 1:
        raise ValueError("deadline width must be >= 1")
    M, N, p = cube.shape
    info = {}
    for b in _band_indices(band_range, p):
        rng = rng_for(seed, STAGE_DEADLINES, b)
        count = int(rng.integers(cmin, cmax, endpoint=True))
        lines = []
        for _ in range(count):
            width = min(int(rng.integers(wmin, wmax, endpoint=True)), N)
            start = int(rng.integers(0, N - width, endpoint=True))
            cube[:, start:start + width, b] = 0.0
            lines.append((start, width))
        info[b + 1] = lines
    return (cube, info) if return_info else cube


def add_stripes(cube, band_range=None, column_count_range=(20, 40), value_range=(-0.25, 0.25),
                seed=0, return_info=False):
    """Shift whole pixel columns by a per-column constant in the chosen bands.

    Columns are drawn without replacement; counts above ``N`` are clamped.
    """
    cube = as_cube(cube, copy=True)
    cmin, cmax = _check_range(column_count_range, "column_count_range")
    vmin, vmax = _check_range(value_range, "value_range")
    M, N, p = cube.shape
    info = {}
    for b in _band_indices(band_range, p):
        rng = rng_for(seed, STAGE_STRIPES, b)
        count = min(int(rng.integers(cmin, cmax, endpoint=True)), N)
        cols = rng.choice(N, size=count, replace=False)
        values = rng.uniform(vmin, vmax, size=count) if vmax > vmin else np.full(count, vmin)
        cube[:, cols, b] += values
        info[b + 1] = [(int(c), float(v)) for c, v in zip(cols, values)]
    return (cube, info) if return_info else cube


def add_impulse(cube, density, seed, stage=STAGE_SALT_PEPPER, return_info=False):
    """Salt-and-pepper noise: per band, ``floor(density*M*N)`` distinct pixels
    are set to 0 or 1 with equal probability.

    ``density`` is a scalar or one value per band.
    """
    cube = as_cube(cube, copy=True)
    M, N, p = cube.shape
    dens = np.broadcast_to(np.asarray(density, dtype=np.float64), (p,))
    if np.any((dens < 0) | (dens > 1)):
        raise ValueError("density must lie in [0, 1]")
    counts = []
    for b in range(p):
        k = int(math.floor(dens[b] * M * N))
        counts.append(k)
        if k == 0:
            continue
        rng = rng_for(seed, stage, b)
        idx = rng.choice(M * N, size=k, replace=False)
        vals = rng.integers(0, 2, size=k).astype(np.float64)
        band = cube[:, :, b].reshape(-1)
        band[idx] = vals
        cube[:, :, b] = band.reshape(M, N)
    return (cube, counts) if return_info else cube


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters of one synthetic case. ``None`` fields take the case
    defaults; anything else overrides them."""

    case_id: int
    seed: int = 0
    gaussian_variance: Optional[float] = None
    variance_as_sigma: bool = False
    deadline_bands: tuple = (81, 120)
    deadline_count: tuple = (3, 10)
    deadline_width: tuple = (1, 3)
    stripe_bands: tuple = (161, 190)
    stripe_count: tuple = (20, 40)
    stripe_values: tuple = (-0.25, 0.25)
    snr_range: Optional[tuple] = None
    salt_pepper_density: float = 0.2
    impulse_density_range: tuple = (0.0196, 0.0784)
    nominal_bands: int = NOMINAL_BANDS
    clip: bool = False

    def __post_init__(self):
        if self.case_id not in range(1, 7):
            raise ValueError(f"case_id must be in 1..6, got {self.case_id}")
        for name in ("deadline_count", "deadline_width", "stripe_count", "stripe_values",
                     "impulse_density_range", "deadline_bands", "stripe_bands"):
            _check_range(getattr(self, name), name)
        if not 0 <= self.salt_pepper_density <= 1:
            raise ValueError("salt_pepper_density must lie in [0, 1]")
        lo, hi = self.impulse_density_range
        if lo < 0 or hi > 1:
            raise ValueError("impulse_density_range must lie in [0, 1]")

    def variance(self) -> float:
        if self.gaussian_variance is not None:
            return self.gaussian_variance
        return 0.14 if self.case_id == 3 else 0.1

    def snr(self) -> tuple:
        if self.snr_range is not None:
            return tuple(self.snr_range)
        return (15.0, 25.0) if self.case_id == 5 else (45.0, 55.0)

    def to_dict(self):
        return asdict(self)


def simulate(clean, spec: NoiseSpec):
    """Apply case ``spec.case_id`` to ``clean`` and report what was drawn.

    Case 1: Gaussian (variance 0.1). Case 2: Case 1 plus deadlines.
    Case 3: Gaussian (variance 0.14) plus stripes. Case 4: Case 2 plus
    stripes. Case 5: per-band SNR 15-25 dB Gaussian, 20% salt-and-pepper,
    then a per-band impulse density in [0.0196, 0.0784]. Case 6: as Case 5
    with SNR 45-55 dB.

    Returns
    -------
    noisy : ndarray
    report : dict
        Realized parameters (mapped band ranges, SNRs, deadline and stripe
        positions, impulse densities).
    """
    clean = as_cube(clean)
    p = clean.shape[2]
    case = spec.case_id
    report = {"case_id": case, "seed": spec.seed, "bands": p}
    dl_bands = map_band_range(spec.deadline_bands, p, spec.nominal_bands)
    st_bands = map_band_range(spec.stripe_bands, p, spec.nominal_bands)

    if case in (1, 2, 3, 4):
        var = spec.variance()
        noisy = add_gaussian(clean, var, spec.seed, as_sigma=spec.variance_as_sigma)
        report["gaussian_variance"] = var
        report["variance_as_sigma"] = spec.variance_as_sigma
        if case in (2, 4):
            noisy, lines = add_deadlines(noisy, dl_bands, spec.deadline_count,
                                         spec.deadline_width, spec.seed, return_info=True)
            report["deadline_bands"] = list(dl_bands)
            report["deadlines"] = {str(k): v for k, v in lines.items()}
        if case in (3, 4):
            noisy, stripes = add_stripes(noisy, st_bands, spec.stripe_count,
                                         spec.stripe_values, spec.seed, return_info=True)
            report["stripe_bands"] = list(st_bands)
            report["stripes"] = {str(k): v for k, v in stripes.items()}
    else:
        noisy, snrs = add_gaussian_snr(clean, spec.snr(), spec.seed)
        report["snr_db"] = snrs
        noisy = add_impulse(noisy, spec.salt_pepper_density, spec.seed, stage=STAGE_SALT_PEPPER)
        report["salt_pepper_density"] = spec.salt_pepper_density
        lo, hi = spec.impulse_density_range
        dens = [float(rng_for(spec.seed, STAGE_IMPULSE_DENSITY, b).uniform(lo, hi))
                for b in range(p)]
        noisy = add_impulse(noisy, dens, spec.seed, stage=STAGE_IMPULSE)
        report["impulse_density"] = dens

    if spec.clip:
        noisy = np.clip(noisy, 0.0, 1.0)
    report["clipped"] = spec.clip
    return noisy, report


def make_case(clean, spec: NoiseSpec) -> np.ndarray:
    return simulate(clean, spec)[0]
