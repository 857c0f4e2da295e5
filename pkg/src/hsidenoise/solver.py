"""ADMM solver for local low-rank + column-sparse separation with SSTV.

Model, per overlapping patch ``k`` with Casorati matrices ``O_k, L_k, S_k``::

    min  sum_k [ logdet(L_k) + lam * ||S_k||_{2,log} ] + gamma * SSTV(L)
    s.t. O_k = L_k + S_k,  L_k = A_k,  A = B,  C = D B

The augmented Lagrangian is minimized block by block (L, S per patch, then
A, B, C), followed by multiplier ascent and a geometric increase of ``rho``.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import metrics as _metrics
from .cube import PatchGrid, as_cube, extract_all, plan_patches, scatter_all
from .prox import l21_shrink, l2log_shrink, logdet_svt, nuclear_svt, soft_threshold
from .sstv import TvWeights, apply_D, precompute_denominator, solve_B

__all__ = [
    "MODES",
    "NonFiniteError",
    "SolverConfig",
    "SolverState",
    "IterationTrace",
    "DenoiseResult",
    "initial_state",
    "update_L_patch",
    "update_S_patch",
    "update_A",
    "update_C",
    "update_multipliers",
    "residuals",
    "assemble",
    "run",
]

log = logging.getLogger(__name__)

MODES = ("l3s3tv", "convex_rpca_sstv", "l3s3_no_tv")


class NonFiniteError(ArithmeticError):
    """Raised when an iterate stops being finite."""

    def __init__(self, iteration, variable):
        super().__init__(f"non-finite values in {variable} at iteration {iteration}")
        self.iteration = iteration
        self.variable = variable


@dataclass(frozen=True)
class SolverConfig:
    """Scalars and layout options for :func:`run`.

    ``lam`` weights the column-sparse term, ``gamma`` the SSTV term.
    ``literal_l_update`` switches the L-step to the unaveraged form
    ``logdet_svt(X, 1/rho)`` with ``X`` the raw sum of both anchors; it is
    kept for comparison only and is not the minimizer of the L sub-problem.
    ``deterministic`` is accepted for config compatibility: the scatter
    reduction in the A-step always runs serially, so results never depend
    on ``threads``.
    """

    lam: float = 1.0
    gamma: float = 2e-3
    weights: TvWeights = field(default_factory=TvWeights)
    rho0: float = 1e-2
    rho_max: float = 1e6
    kappa: float = 1.5
    epsilon: float = 1e-6
    t_max: int = 100
    patch_rows: int = 20
    patch_cols: int = 20
    stride_rows: int = 10
    stride_cols: int = 10
    mode: str = "l3s3tv"
    literal_l_update: bool = False
    threads: int = 1
    deterministic: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if not self.kappa > 1:
            raise ValueError("kappa must be > 1")
        if not 0 < self.rho0 <= self.rho_max:
            raise ValueError("need 0 < rho0 <= rho_max")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if min(self.patch_rows, self.patch_cols, self.stride_rows, self.stride_cols) < 1:
            raise ValueError("patch sizes and strides must be >= 1")
        if self.stride_rows > self.patch_rows or self.stride_cols > self.patch_cols:
            raise ValueError("strides must not exceed the patch size")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def uses_tv(self) -> bool:
        return self.mode != "l3s3_no_tv"

    def grid_for(self, M, N) -> PatchGrid:
        """Patch layout for an ``M x N`` image; patches larger than the image
        are shrunk to the image size."""
        m, n = min(self.patch_rows, M), min(self.patch_cols, N)
        return plan_patches(M, N, m, n, min(self.stride_rows, m), min(self.stride_cols, n))


@dataclass
class SolverState:
    """All iterates. Patch-wise quantities are ``(K, m*n, p)`` stacks."""

    L: np.ndarray
    S: np.ndarray
    ZO: np.ndarray
    ZA: np.ndarray
    A: np.ndarray
    B: np.ndarray
    ZB: np.ndarray
    C: np.ndarray
    ZC: np.ndarray
    rho: float
    iteration: int = 0

    def copy(self) -> "SolverState":
        return SolverState(**{k: (v.copy() if isinstance(v, np.ndarray) else v)
                              for k, v in self.__dict__.items()})


@dataclass
class IterationTrace:
    residuals: list = field(default_factory=list)
    rho: list = field(default_factory=list)
    mpsnr: list = field(default_factory=list)
    mssim: list = field(default_factory=list)
    ergas: list = field(default_factory=list)

    def __len__(self):
        return len(self.rho)

    def residual_array(self) -> np.ndarray:
        return np.array(self.residuals, dtype=np.float64).reshape(-1, 4)

    def max_residuals(self) -> np.ndarray:
        return self.residual_array().max(axis=1)


@dataclass
class DenoiseResult:
    denoised: np.ndarray
    sparse: np.ndarray
    trace: IterationTrace
    converged: bool
    iterations_used: int
    state: Optional[SolverState] = None


def initial_state(O, grid: PatchGrid, config: SolverConfig) -> SolverState:
    """``L = A = B = O``, ``S = 0``, ``C = D O``, every multiplier zero."""
    O = as_cube(O)
    O_patches = extract_all(O, grid)
    stack = apply_D(O, config.weights)
    return SolverState(
        L=O_patches.copy(),
        S=np.zeros_like(O_patches),
        ZO=np.zeros_like(O_patches),
        ZA=np.zeros_like(O_patches),
        A=O.copy(),
        B=O.copy(),
        ZB=np.zeros_like(O),
        C=stack,
        ZC=np.zeros_like(stack),
        rho=float(config.rho0),
    )


def update_L_patch(O_ij, S_ij, ZO_ij, A_ij, ZA_ij, rho, svt=logdet_svt, literal=False):
    """L-step for one patch (or a stack of patches).

    The two quadratic anchors ``O - S + ZO/rho`` and ``A - ZA/rho`` carry
    weight ``rho/2`` each, so the minimizer is ``svt(X/2, 1/(2*rho))`` with
    ``X`` their sum.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    X = O_ij - S_ij + ZO_ij / rho + A_ij - ZA_ij / rho
    if literal:
        return svt(X, 1.0 / rho)
    return svt(0.5 * X, 0.5 / rho)


def update_S_patch(O_ij, L_ij, ZO_ij, lam, rho, shrink=l2log_shrink):
    if rho <= 0:
        raise ValueError("rho must be positive")
    return shrink(O_ij - L_ij + ZO_ij / rho, lam / rho)


def update_A(L, ZA, B, ZB, rho, grid: PatchGrid, use_B=True):
    """Element-wise closed form: average of the B anchor and every covering
    patch anchor ``L_k + ZA_k/rho``. Without the B block the average runs
    over the patches alone."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    p = L.shape[-1]
    total = scatter_all(L + ZA / rho, grid, p)
    counts = grid.overlap_counts[:, :, None].astype(np.float64)
    if use_B:
        return (B - ZB / rho + total) / (1.0 + counts)
    return total / counts


def update_C(B, ZC, gamma, rho, w: TvWeights = TvWeights()):
    if rho <= 0:
        raise ValueError("rho must be positive")
    return soft_threshold(apply_D(B, w) - ZC / rho, gamma / rho)


def update_multipliers(state: SolverState, O, grid: PatchGrid, config: SolverConfig,
                       O_patches=None, DB=None) -> SolverState:
    """Dual ascent on every constraint, then ``rho <- min(rho*kappa, rho_max)``.

    Mutates and returns ``state``. ``O_patches``/``DB`` may be passed to
    avoid recomputation.
    """
    rho = state.rho
    if O_patches is None:
        O_patches = extract_all(as_cube(O), grid)
    A_patches = extract_all(state.A, grid)
    state.ZO += rho * (O_patches - state.L - state.S)
    state.ZA += rho * (state.L - A_patches)
    if config.uses_tv:
        if DB is None:
            DB = apply_D(state.B, config.weights)
        state.ZB += rho * (state.A - state.B)
        state.ZC += rho * (state.C - DB)
    state.rho = min(rho * config.kappa, config.rho_max)
    return state


def residuals(state: SolverState, O, grid: PatchGrid, weights: TvWeights = TvWeights(),
              uses_tv=True, O_patches=None, DB=None):
    """Infinity-norm constraint violations
    ``(O_k - L_k - S_k, L_k - A_k, A - B, C - D B)``."""
    if O_patches is None:
        O_patches = extract_all(as_cube(O), grid)
    A_patches = extract_all(state.A, grid)
    r_sep = float(np.abs(O_patches - state.L - state.S).max())
    r_la = float(np.abs(state.L - A_patches).max())
    if not uses_tv:
        return r_sep, r_la, 0.0, 0.0
    if DB is None:
        DB = apply_D(state.B, weights)
    r_ab = float(np.abs(state.A - state.B).max())
    r_cdb = float(np.abs(state.C - DB).max())
    return r_sep, r_la, r_ab, r_cdb


def assemble(patches, grid: PatchGrid) -> np.ndarray:
    """Overlap-count-weighted average of patch matrices back onto the cube."""
    total = scatter_all(patches, grid, patches.shape[-1])
    return total / grid.overlap_counts[:, :, None]


def _patch_operators(mode):
    if mode == "convex_rpca_sstv":
        return nuclear_svt, l21_shrink
    return logdet_svt, l2log_shrink


def _update_patches(state, O_patches, grid, config, svt, shrink, pool):
    rho = state.rho
    A_patches = extract_all(state.A, grid)

    def work(sl):
        L = update_L_patch(O_patches[sl], state.S[sl], state.ZO[sl], A_patches[sl],
                           state.ZA[sl], rho, svt=svt, literal=config.literal_l_update)
        S = update_S_patch(O_patches[sl], L, state.ZO[sl], config.lam, rho, shrink=shrink)
        return sl, L, S

    K = O_patches.shape[0]
    if pool is None:
        chunks = [slice(0, K)]
        results = map(work, chunks)
    else:
        bounds = np.linspace(0, K, min(config.threads, K) + 1).astype(int)
        chunks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        results = pool.map(work, chunks)
    # Slots are disjoint, so the write order does not affect the result.
    for sl, L, S in results:
        state.L[sl] = L
        state.S[sl] = S


def _check_finite(state, iteration):
    for name in ("L", "S", "A", "B", "C"):
        if not np.all(np.isfinite(getattr(state, name))):
            raise NonFiniteError(iteration, name)


def run(O, config: SolverConfig = SolverConfig(), reference=None,
        callback: Optional[Callable[[int, SolverState], None]] = None,
        keep_state=False) -> DenoiseResult:
    """Denoise a normalized cube ``O`` of shape ``(M, N, p)``.

    Parameters
    ----------
    O : array_like
        Observed cube, expected in [0, 1] (values outside are tolerated).
    config : SolverConfig
    reference : array_like, optional
        Clean cube; when given, MPSNR/MSSIM/ERGAS of the current estimate
        are recorded every iteration.
    callback : callable, optional
        Called as ``callback(t, state)`` after each iteration.
    keep_state : bool
        Attach the final :class:`SolverState` to the result.

    Returns
    -------
    DenoiseResult
    """
    O = as_cube(O)
    if not np.all(np.isfinite(O)):
        raise NonFiniteError(0, "O")
    M, N, p = O.shape
    grid = config.grid_for(M, N)
    if config.mode == "l3s3_no_tv" and config.gamma != 0:
        config = replace(config, gamma=0.0)
    svt, shrink = _patch_operators(config.mode)
    w = config.weights
    O_patches = extract_all(O, grid)
    denom = precompute_denominator(O.shape, w) if config.uses_tv else None
    state = initial_state(O, grid, config)
    trace = IterationTrace()
    converged = False

    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        for t in range(1, config.t_max + 1):
            rho = state.rho
            _update_patches(state, O_patches, grid, config, svt, shrink, pool)
            state.A = update_A(state.L, state.ZA, state.B, state.ZB, rho, grid,
                               use_B=config.uses_tv)
            DB = None
            if config.uses_tv:
                state.B = solve_B(state.C, state.ZC, state.A, state.ZB, rho, denom, w)
                DB = apply_D(state.B, w)
                state.C = soft_threshold(DB - state.ZC / rho, config.gamma / rho)
            else:
                state.B = state.A
            _check_finite(state, t)
            update_multipliers(state, O, grid, config, O_patches=O_patches, DB=DB)
            state.iteration = t

            res = residuals(state, O, grid, w, config.uses_tv, O_patches=O_patches, DB=DB)
            trace.residuals.append(res)
            trace.rho.append(rho)
            if reference is not None:
                report = _metrics.evaluate(reference, assemble(state.L, grid), quiet=True)
                trace.mpsnr.append(report.mpsnr)
                trace.mssim.append(report.mssim)
                trace.ergas.append(report.ergas)
            if callback is not None:
                callback(t, state)
            log.debug("iter %d rho=%.3g residuals=%s", t, rho, res)
            if max(res) <= config.epsilon:
                converged = True
                break
    finally:
        if pool is not None:
            pool.shutdown()

    return DenoiseResult(
        denoised=assemble(state.L, grid),
        sparse=assemble(state.S, grid),
        trace=trace,
        converged=converged,
        iterations_used=state.iteration,
        state=state if keep_state else None,
    )
