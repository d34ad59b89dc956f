"""Compiled inner loops: Numerov sweeps and the Sturm sequence count."""

import numpy as np
from numba import njit

_BIG = 1e250


@njit(cache=True)
def numerov_sweep(f, h, y0, y1, reverse):
    """Integrate ``y'' = f y`` across the grid with Numerov's scheme.

    Starts from ``(y0, y1)`` at indices (0, 1), or (n-1, n-2) when
    ``reverse``.  The whole prefix is rescaled when magnitudes approach
    overflow, so only ratios and signs are meaningful.  Returns the
    solution and the number of sign changes along the sweep.
    """
    n = f.size
    w = f * (h * h / 12.0)
    y = np.zeros(n)
    if reverse:
        start, step = n - 1, -1
    else:
        start, step = 0, 1
    y[start] = y0
    y[start + step] = y1
    nodes = 0
    if y0 * y1 < 0.0:
        nodes += 1
    i = start + step
    for _ in range(n - 2):
        nxt = i + step
        prv = i - step
        y[nxt] = ((2.0 + 10.0 * w[i]) * y[i] - (1.0 - w[prv]) * y[prv]) / (1.0 - w[nxt])
        if y[nxt] * y[i] < 0.0 or (y[nxt] == 0.0 and y[i] != 0.0):
            nodes += 1
        if abs(y[nxt]) > _BIG:
            if reverse:
                for j in range(nxt, n):
                    y[j] /= _BIG
            else:
                for j in range(0, nxt + 1):
                    y[j] /= _BIG
        i = nxt
    return y, nodes


@njit(cache=True)
def sturm_count(diag, off2, x):
    """Number of eigenvalues below ``x`` of the symmetric tridiagonal matrix.

    ``off2`` holds the squared off-diagonal.  Counts negative pivots of the
    LDL^T factorisation of ``T - x I``.
    """
    count = 0
    d = diag[0] - x
    if d < 0.0:
        count += 1
    for i in range(1, diag.size):
        if d == 0.0:
            d = 1e-300
        d = diag[i] - x - off2[i - 1] / d
        if d < 0.0:
            count += 1
    return count
