"""Independent reference computations and the self-check suite.

Nothing here calls the operators it checks: the shrinkage oracles minimize
the scalar objectives numerically, the eigen-oracle is a plain cyclic
Jacobi sweep, the DFT oracle multiplies by explicit DFT matrices, and the
difference operators are assembled as dense matrices from index arithmetic.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "golden_section",
    "scan_minimize",
    "log_prox_oracle",
    "jacobi_eigvalsh",
    "direct_dft3",
    "dense_difference_matrix",
    "dense_solve_B",
    "CheckResult",
    "run_selfcheck",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-13, max_iter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    cands = [(f(a), a), (fc, c), (fd, d), (f(b), b)]
    fx, x = min(cands)
    return x, fx


def scan_minimize(f, lo, hi, n_grid=2001, vectorized=False):
    """Global minimum of a scalar ``f`` on ``[lo, hi]``: a uniform grid scan
    followed by golden-section refinement of every grid-local minimum.

    With ``vectorized=True`` the grid is evaluated in one call of ``f``.
    """
    if hi <= lo:
        return lo, float(f(lo))
    xs = np.linspace(lo, hi, n_grid)
    fs = np.asarray(f(xs), dtype=np.float64) if vectorized else np.array([f(x) for x in xs])
    padded = np.concatenate(([np.inf], fs, [np.inf]))
    local = np.flatnonzero((fs <= padded[:-2]) & (fs <= padded[2:]))
    best_x, best_f = xs[0], fs[0]
    for i in local:
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, n_grid - 1)]
        x, fx = golden_section(f, a, b)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, float(best_f)


def log_prox_oracle(r, alpha, n_grid=2001):
    """``min_{0 <= s <= r} 0.5*(s - r)**2 + alpha*log(1 + s)`` by scanning.

    The minimizer never exceeds ``r`` because the penalty is increasing.
    """
    def f(s):
        return 0.5 * (s - r) ** 2 + alpha * np.log1p(s)
    return scan_minimize(f, 0.0, float(r), n_grid, vectorized=True)


def jacobi_eigvalsh(sym, tol=1e-15, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(sym, dtype=np.float64)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * max(1.0, float(np.abs(a).max())):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))[::-1]


def _dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def direct_dft3(x):
    """Unnormalized 3-D DFT by explicit matrix products (O(n^2) per axis)."""
    x = np.asarray(x, dtype=np.complex128)
    F0, F1, F2 = (_dft_matrix(n) for n in x.shape)
    return np.einsum("ai,bj,ck,ijk->abc", F0, F1, F2, x)


def dense_difference_matrix(dims, weights=(1.0, 1.0, 0.5)):
    """Dense ``(3*M*N*p, M*N*p)`` matrix of the weighted periodic forward
    differences, rows ordered axis-major then C-order over the cube."""
    M, N, p = dims
    size = M * N * p
    D = np.zeros((3 * size, size))

    def flat(i, j, b):
        return (i * N + j) * p + b

    for i in range(M):
        for j in range(N):
            for b in range(p):
                row = flat(i, j, b)
                nbrs = (flat((i + 1) % M, j, b), flat(i, (j + 1) % N, b), flat(i, j, (b + 1) % p))
                for axis, (nb, tau) in enumerate(zip(nbrs, weights)):
                    D[axis * size + row, nb] += tau
                    D[axis * size + row, row] -= tau
    return D


def dense_solve_B(C, ZC, A, ZB, rho, weights=(1.0, 1.0, 0.5)):
    """Reference solve of ``(D^T D + I) B = D^T (C + ZC/rho) + A + ZB/rho``."""
    dims = A.shape
    D = dense_difference_matrix(dims, weights)
    lhs = D.T @ D + np.eye(D.shape[1])
    rhs = D.T @ (C + ZC / rho).reshape(-1) + (A + ZB / rho).reshape(-1)
    return np.linalg.solve(lhs, rhs).reshape(dims)


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""


def _check_l2log(rng, n, shrink):
    worst = -np.inf
    for _ in range(n):
        d = int(rng.integers(1, 6))
        y = rng.normal(size=(d, 1)) * rng.uniform(0.05, 4.0)
        alpha = float(rng.uniform(0.0, 3.0))
        w = shrink(y, alpha)
        obj = 0.5 * float(np.sum((y - w) ** 2)) + alpha * math.log1p(float(np.linalg.norm(w)))
        _, ref = log_prox_oracle(float(np.linalg.norm(y)), alpha)
        worst = max(worst, abs(obj - ref))
    return CheckResult("l2log_shrink vs 1-D scan", worst <= 1e-8, 1e-8 - worst,
                       f"max |objective gap| {worst:.3e} over {n} columns")


def _check_logdet(rng, n, svt):
    worst = -np.inf
    for _ in range(n):
        a, b = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        X = rng.normal(size=(a, b)) * rng.uniform(0.05, 3.0)
        delta = float(rng.uniform(0.0, 2.0))
        L = svt(X, delta)
        sig = np.linalg.svd(L, compute_uv=False)
        obj = 0.5 * float(np.sum((X - L) ** 2)) + delta * float(np.log1p(sig).sum())
        ref = sum(log_prox_oracle(s, delta)[1]
                  for s in np.sqrt(np.clip(jacobi_eigvalsh(X.T @ X if b <= a else X @ X.T), 0, None)))
        worst = max(worst, abs(obj - ref))
    return CheckResult("logdet_svt vs per-singular-value scan", worst <= 1e-8, 1e-8 - worst,
                       f"max |objective gap| {worst:.3e} over {n} matrices")


def _check_solve_B(rng, n):
    from .sstv import TvWeights, precompute_denominator, solve_B

    worst_res, worst_diff = 0.0, 0.0
    for _ in range(n):
        dims = tuple(int(v) for v in rng.integers(1, 6, size=3))
        w = TvWeights(*rng.uniform(0.1, 2.0, size=3))
        C, ZC = rng.normal(size=(3,) + dims), rng.normal(size=(3,) + dims)
        A, ZB = rng.normal(size=dims), rng.normal(size=dims)
        rho = float(rng.uniform(0.1, 10.0))
        B = solve_B(C, ZC, A, ZB, rho, precompute_denominator(dims, w), w)
        D = dense_difference_matrix(dims, w.as_tuple())
        lhs = (D.T @ D) @ B.reshape(-1) + B.reshape(-1)
        rhs = D.T @ (C + ZC / rho).reshape(-1) + (A + ZB / rho).reshape(-1)
        worst_res = max(worst_res, float(np.abs(lhs - rhs).max()))
        ref = dense_solve_B(C, ZC, A, ZB, rho, w.as_tuple())
        worst_diff = max(worst_diff, float(np.abs(ref - B).max()))
    ok = worst_res <= 1e-8 and worst_diff <= 1e-7
    return CheckResult("solve_B vs dense solve", ok, min(1e-8 - worst_res, 1e-7 - worst_diff),
                       f"residual {worst_res:.3e}, max diff {worst_diff:.3e} over {n} instances")


def _check_adjoint(rng, n):
    from .cube import extract_casorati, plan_patches, scatter_add
    from .sstv import TvWeights, apply_D, apply_Dt

    worst = 0.0
    for _ in range(n):
        dims = tuple(int(v) for v in rng.integers(1, 7, size=3))
        w = TvWeights(*rng.uniform(0.0, 2.0, size=3))
        x, y = rng.normal(size=dims), rng.normal(size=(3,) + dims)
        gap = abs(float(np.vdot(apply_D(x, w), y) - np.vdot(x, apply_Dt(y, w))))
        worst = max(worst, gap / (np.linalg.norm(x) * np.linalg.norm(y)))
        M, N, p = dims
        m, nn = int(rng.integers(1, M + 1)), int(rng.integers(1, N + 1))
        grid = plan_patches(M, N, m, nn, int(rng.integers(1, m + 1)), int(rng.integers(1, nn + 1)))
        k = int(rng.integers(0, len(grid)))
        patch = rng.normal(size=(m * nn, p))
        acc = np.zeros(dims)
        scatter_add(acc, grid, k, patch)
        gap = abs(float(np.vdot(extract_casorati(x, grid, k), patch) - np.vdot(x, acc)))
        worst = max(worst, gap / (np.linalg.norm(x) * np.linalg.norm(patch)))
    return CheckResult("adjoint pairs (D/Dt, extract/scatter)", worst <= 1e-10, 1e-10 - worst,
                       f"max relative inner-product gap {worst:.3e}")


def log_norm_normal_bound(d):
    """``2**(1/4) * Gamma(d/2 + 1/4) / Gamma(d/2)``."""
    return 2.0 ** 0.25 * math.exp(gammaln(d / 2 + 0.25) - gammaln(d / 2))


def _mc_mean(samples):
    vals = np.log1p(np.linalg.norm(samples, axis=1))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def _check_log_norm_bounds(rng, draws, d=5):
    out = []
    mean, se = _mc_mean(rng.standard_normal((draws, d)))
    bound = log_norm_normal_bound(d)
    margin = bound - (mean + 3 * se)
    out.append(CheckResult("log-norm expectation bound, normal", margin > 0, margin,
                           f"mean {mean:.5f} +/- {se:.1e}, bound {bound:.5f}"))
    mean, se = _mc_mean(rng.uniform(0.0, 1.0, (draws, d)))
    margin = d / 2 - (mean + 3 * se)
    out.append(CheckResult("log-norm expectation bound, uniform", margin > 0, margin,
                           f"mean {mean:.5f} +/- {se:.1e}, bound {d / 2:.5f}"))
    return out


def run_selfcheck(deep=False, seed=0, shrink=None, svt=None):
    """Run every oracle check; returns a list of :class:`CheckResult`.

    ``shrink``/``svt`` substitute the operators under test (used to confirm
    that a corrupted operator is caught).
    """
    from .prox import l2log_shrink, logdet_svt

    shrink = shrink or l2log_shrink
    svt = svt or logdet_svt
    rng = np.random.default_rng(seed)
    scale = 10 if deep else 1
    results = []
    for fn, args in ((_check_l2log, (rng, 200 * scale, shrink)),
                     (_check_logdet, (rng, 100 * scale, svt)),
                     (_check_solve_B, (rng, 10 * scale)),
                     (_check_adjoint, (rng, 50 * scale))):
        t0 = time.perf_counter()
        res = fn(*args)
        res.detail += f" [{time.perf_counter() - t0:.2f}s]"
        results.append(res)
    results.extend(_check_log_norm_bounds(rng, 100_000 * scale))
    return results
