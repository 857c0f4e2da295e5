"""
Column shrinkage: log-norm versus l2,1
======================================

Both operators shrink a column towards zero along its own direction. The
l2,1 operator subtracts a constant from the norm; the log-norm operator
removes little from large columns and zeroes small ones outright.
"""

import numpy as np

from hsidenoise.prox import l21_shrink, l2log_shrink, log_scalar_shrink

alpha = 1.0
norms = np.array([0.1, 0.5, 0.9, 1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0])

# %%
# Output norm as a function of input norm. Column norms below the jump stay
# at zero; above it, the shrinkage amount decays like ``alpha / (1 + r)``.

print(f"alpha = {alpha}")
print(f"{'input':>8} {'log-norm':>10} {'l2,1':>8}")
for r in norms:
    y = np.array([[r]])
    print(f"{r:8.2f} {l2log_shrink(y, alpha)[0, 0]:10.4f} {l21_shrink(y, alpha)[0, 0]:8.4f}")

# %%
# The jump location: the smallest norm that survives.

grid = np.linspace(0, 3, 30001)
survive = grid[log_scalar_shrink(grid, alpha) > 0]
print(f"\nsmallest surviving norm for alpha={alpha}: {survive.min():.4f}")

# %%
# Direction is preserved: only the length of a column changes.

rng = np.random.default_rng(0)
Y = rng.normal(size=(4, 3)) * 2
W = l2log_shrink(Y, alpha)
cos = np.sum(Y * W, axis=0) / (np.linalg.norm(Y, axis=0) * np.linalg.norm(W, axis=0) + 1e-300)
print("cosine between input and output columns:", np.round(cos, 12))
