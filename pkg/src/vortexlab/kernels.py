"""Numba-compiled velocity summation kernels.

All sums run over sources in fixed (cloud-major, particle-index) order;
parallelism is over evaluation points only, so each output component is
accumulated by a single thread in a fixed order and results are
bit-reproducible at any thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def direct_velocity(px, py, gamma, ex, ey, delta2):
    """Blob-kernel velocity at (ex, ey) induced by all sources.

    Returns (ux, uy, n_singular) where n_singular counts exact coincidences
    hit with delta2 == 0 (the caller turns those into an error).
    """
    m = ex.size
    ux = np.empty(m)
    uy = np.empty(m)
    bad = np.zeros(m, dtype=np.int64)
    for i in prange(m):
        sx = 0.0
        sy = 0.0
        for q in range(px.size):
            dx = ex[i] - px[q]
            dy = ey[i] - py[q]
            r2 = dx * dx + dy * dy + delta2
            if r2 == 0.0:
                bad[i] += 1
            else:
                w = gamma[q] / r2
                sx += -dy * w
                sy += dx * w
        ux[i] = sx
        uy[i] = sy
    return ux, uy, int(bad.sum())


@njit(cache=True, parallel=True)
def pair_log_energy(px, py, gamma, floor):
    """sum_{p != q} gamma_p gamma_q log(max(|x_p - x_q|, floor))."""
    n = px.size
    partial = np.zeros(n)
    for i in prange(n):
        s = 0.0
        for q in range(n):
            if q == i:
                continue
            dx = px[i] - px[q]
            dy = py[i] - py[q]
            r = np.sqrt(dx * dx + dy * dy)
            if r < floor:
                r = floor
            s += gamma[q] * np.log(r)
        partial[i] = gamma[i] * s
    return partial.sum()


@njit(cache=True, parallel=True)
def self_velocity(px, py, gamma, delta2):
    """Velocity at every particle from every other particle (self excluded)."""
    n = px.size
    ux = np.empty(n)
    uy = np.empty(n)
    for i in prange(n):
        sx = 0.0
        sy = 0.0
        for q in range(n):
            if q == i:
                continue
            dx = px[i] - px[q]
            dy = py[i] - py[q]
            r2 = dx * dx + dy * dy + delta2
            w = gamma[q] / r2
            sx += -dy * w
            sy += dx * w
        ux[i] = sx
        uy[i] = sy
    return ux, uy
