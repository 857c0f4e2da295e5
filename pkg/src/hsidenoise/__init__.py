"""Hyperspectral image denoising by local low-rank and column-sparse
separation with spatial-spectral total variation."""

from .config import RunConfig, dump_config, load_config, parse_config
from .cube import BandScale, PatchGrid, denormalize, normalize_bands, plan_patches
from .fileio import read_cube, write_cube
from .metrics import MetricsReport, evaluate
from .noisegen import NoiseSpec, make_case, simulate
from .solver import DenoiseResult, SolverConfig, run
from .sstv import TvWeights

__version__ = "0.1.0"

__all__ = [
    "BandScale",
    "DenoiseResult",
    "MetricsReport",
    "NoiseSpec",
    "PatchGrid",
    "RunConfig",
    "SolverConfig",
    "TvWeights",
    "denormalize",
    "dump_config",
    "evaluate",
    "load_config",
    "make_case",
    "normalize_bands",
    "parse_config",
    "plan_patches",
    "read_cube",
    "run",
    "simulate",
    "write_cube",
]
