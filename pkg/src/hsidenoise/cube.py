"""Cube storage helpers: band normalization, overlapping patch layout and
Casorati extraction/scatter.

A cube is a plain ``float64`` ndarray of shape ``(M, N, p)``: rows, columns,
bands. A Casorati matrix of an ``m x n`` patch has shape ``(m*n, p)``; column
``t`` is band ``t`` of the patch flattened in column-major (Fortran) order, so
pixel ``(r, c)`` of the patch lands in row ``r + c*m``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BandScale",
    "PatchGrid",
    "as_cube",
    "normalize_bands",
    "denormalize",
    "plan_patches",
    "extract_casorati",
    "scatter_add",
    "extract_all",
    "scatter_all",
]


def as_cube(values, copy=False) -> np.ndarray:
    """Validate ``values`` as an (M, N, p) cube and return it as float64."""
    arr = np.array(values, dtype=np.float64) if copy else np.asarray(values, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ValueError(f"expected a nonempty (M, N, p) cube, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class BandScale:
    """Per-band ``(min, max)`` pairs recorded by :func:`normalize_bands`."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise ValueError("mins and maxs must be 1-D arrays of equal length")
        if np.any(self.maxs < self.mins):
            raise ValueError("band max below band min")

    @property
    def bands(self) -> int:
        return self.mins.shape[0]


def normalize_bands(cube):
    """Map every band affinely onto [0, 1].

    Constant bands map to zeros; the stored scale still restores them.

    Returns
    -------
    normalized : ndarray
    scale : BandScale
    """
    cube = as_cube(cube)
    mins = cube.min(axis=(0, 1))
    maxs = cube.max(axis=(0, 1))
    span = maxs - mins
    safe = np.where(span > 0, span, 1.0)
    out = (cube - mins) / safe
    out[:, :, span == 0] = 0.0
    return out, BandScale(mins.copy(), maxs.copy())


def denormalize(cube, scale: BandScale) -> np.ndarray:
    """Inverse of :func:`normalize_bands`."""
    cube = as_cube(cube)
    if cube.shape[2] != scale.bands:
        raise ValueError(f"cube has {cube.shape[2]} bands, scale has {scale.bands}")
    return cube * (scale.maxs - scale.mins) + scale.mins


def _axis_anchors(size: int, patch: int, stride: int) -> np.ndarray:
    starts = list(range(0, size - patch + 1, stride))
    if starts[-1] != size - patch:
        starts.append(size - patch)
    return np.array(starts, dtype=np.intp)


@dataclass(frozen=True)
class PatchGrid:
    """Overlapping patch layout over an ``M x N`` image.

    ``anchors`` holds the top-left ``(row, col)`` of every patch in
    row-major anchor order; ``overlap_counts[a, b]`` is the number of
    patches covering pixel ``(a, b)``.
    """

    rows: int
    cols: int
    patch_rows: int
    patch_cols: int
    stride_rows: int
    stride_cols: int
    anchors: np.ndarray
    overlap_counts: np.ndarray

    def __len__(self):
        return len(self.anchors)

    @property
    def patch_size(self) -> int:
        return self.patch_rows * self.patch_cols

    def footprint(self, k: int) -> tuple[slice, slice]:
        if not 0 <= k < len(self.anchors):
            raise IndexError(f"anchor index {k} out of range [0, {len(self.anchors)})")
        r, c = self.anchors[k]
        return slice(r, r + self.patch_rows), slice(c, c + self.patch_cols)


def plan_patches(M, N, m, n, stride_r, stride_c) -> PatchGrid:
    """Lay out ``m x n`` patches with the given strides, clamping the last
    anchor on each axis so every patch stays inside the image."""
    if not (1 <= m <= M and 1 <= n <= N):
        raise ValueError(f"patch {m}x{n} does not fit in image {M}x{N}")
    if stride_r < 1 or stride_c < 1:
        raise ValueError("strides must be >= 1")
    if stride_r > m or stride_c > n:
        raise ValueError(f"strides ({stride_r}, {stride_c}) larger than patch {m}x{n} leave gaps")
    rows = _axis_anchors(M, m, stride_r)
    cols = _axis_anchors(N, n, stride_c)
    anchors = np.array([(r, c) for r in rows for c in cols], dtype=np.intp)
    counts = np.zeros((M, N), dtype=np.int64)
    for r, c in anchors:
        counts[r:r + m, c:c + n] += 1
    return PatchGrid(M, N, m, n, stride_r, stride_c, anchors, counts)


def extract_casorati(cube, grid: PatchGrid, k: int) -> np.ndarray:
    """Casorati matrix ``(m*n, p)`` of patch ``k``; a copy, never a view."""
    rs, cs = grid.footprint(k)
    patch = cube[rs, cs, :]
    return patch.reshape(grid.patch_size, cube.shape[2], order="F").copy()


def scatter_add(accumulator, grid: PatchGrid, k: int, patch) -> None:
    """Add a Casorati matrix back onto its footprint (adjoint of extract)."""
    p = accumulator.shape[2]
    if patch.shape != (grid.patch_size, p):
        raise ValueError(f"patch shape {patch.shape} != {(grid.patch_size, p)}")
    rs, cs = grid.footprint(k)
    accumulator[rs, cs, :] += patch.reshape(grid.patch_rows, grid.patch_cols, p, order="F")


def extract_all(cube, grid: PatchGrid) -> np.ndarray:
    """Stack of every patch's Casorati matrix, shape ``(K, m*n, p)``."""
    out = np.empty((len(grid), grid.patch_size, cube.shape[2]))
    for k in range(len(grid)):
        rs, cs = grid.footprint(k)
        out[k] = cube[rs, cs, :].reshape(grid.patch_size, -1, order="F")
    return out


def scatter_all(patches, grid: PatchGrid, bands: int) -> np.ndarray:
    """Sum of all patches scattered onto a zero cube, in anchor order."""
    acc = np.zeros((grid.rows, grid.cols, bands))
    for k in range(len(grid)):
        scatter_add(acc, grid, k, patches[k])
    return acc
