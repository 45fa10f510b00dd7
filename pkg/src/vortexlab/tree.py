"""Barnes-Hut quadtree with complex multipole expansion of the blob kernel.

Far-field cells are evaluated through the expansion of the exact kernel
(conjugate velocity -i * sum_k a_k / (z - c)^{k+1}, a_k the cell's complex
moments) plus a dipole-order correction for the blob term
h(D) = i delta^2 / (D (|D|^2 + delta^2)); the neglected quadrupole of the
correction falls off like delta^2 * s^2 / d^5.

Multipole acceptance: a cell of side s is accepted at distance d from its
center when s < theta * d AND d > 2s AND d > 5*delta.  The second clause
keeps the expansion parameter bounded for shallow cells; the third keeps
the blob correction in its far-field regime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .core import FloatArray
from .errors import ValidationError


@dataclass
class TreeParams:
    opening_angle: float = 0.5
    leaf_capacity: int = 16
    expansion_order: int = 4

    def __post_init__(self):
        if not 0.0 < self.opening_angle < 1.0:
            raise ValidationError("opening_angle must lie in (0, 1)")
        if self.leaf_capacity < 1:
            raise ValidationError("leaf_capacity must be >= 1")
        if self.expansion_order < 0:
            raise ValidationError("expansion_order must be >= 0")


@dataclass
class Quadtree:
    cx: FloatArray
    cy: FloatArray
    size: FloatArray          # full side length per node
    children: np.ndarray      # (nnodes, 4) int64, -1 = absent
    start: np.ndarray         # (nnodes,) offset into permuted particle arrays
    count: np.ndarray
    is_leaf: np.ndarray       # bool
    coef_re: FloatArray       # (nnodes, order+1)
    coef_im: FloatArray
    px: FloatArray            # permuted particle data
    py: FloatArray
    gamma: FloatArray


def build_quadtree(px, py, gamma, params: TreeParams) -> Quadtree:
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    n = px.size
    if n == 0:
        raise ValidationError("cannot build a tree with no particles")

    x_lo, x_hi = float(px.min()), float(px.max())
    y_lo, y_hi = float(py.min()), float(py.max())
    half = 0.5 * max(x_hi - x_lo, y_hi - y_lo, 1e-300) * (1.0 + 1e-12)
    root_cx = 0.5 * (x_lo + x_hi)
    root_cy = 0.5 * (y_lo + y_hi)

    perm = np.arange(n)
    cx, cy, size, children, start, count = [], [], [], [], [], []

    # (node_id, seg_start, seg_end, center_x, center_y, half_size, depth)
    stack = [(0, 0, n, root_cx, root_cy, half, 0)]
    cx.append(root_cx)
    cy.append(root_cy)
    size.append(2 * half)
    children.append([-1, -1, -1, -1])
    start.append(0)
    count.append(n)

    max_depth = 64
    while stack:
        nid, s, e, ncx, ncy, nh, depth = stack.pop()
        if e - s <= params.leaf_capacity or depth >= max_depth:
            continue
        seg = perm[s:e]
        qx = px[seg] > ncx
        qy = py[seg] > ncy
        quad = qx.astype(np.int64) + 2 * qy.astype(np.int64)
        order_in_seg = np.argsort(quad, kind="stable")
        perm[s:e] = seg[order_in_seg]
        counts = np.bincount(quad, minlength=4)
        offs = s + np.concatenate([[0], np.cumsum(counts)])
        qh = 0.5 * nh
        for q in range(4):
            if counts[q] == 0:
                continue
            ccx = ncx + (qh if q & 1 else -qh)
            ccy = ncy + (qh if q & 2 else -qh)
            cid = len(cx)
            children[nid][q] = cid
            cx.append(ccx)
            cy.append(ccy)
            size.append(2 * qh)
            children.append([-1, -1, -1, -1])
            start.append(int(offs[q]))
            count.append(int(counts[q]))
            stack.append((cid, int(offs[q]), int(offs[q + 1]), ccx, ccy, qh, depth + 1))

    nnodes = len(cx)
    children = np.asarray(children, dtype=np.int64)
    is_leaf = (children == -1).all(axis=1)
    start = np.asarray(start, dtype=np.int64)
    count = np.asarray(count, dtype=np.int64)
    cx = np.asarray(cx)
    cy = np.asarray(cy)
    size = np.asarray(size)

    ppx, ppy, pg = px[perm], py[perm], gamma[perm]
    zc = ppx + 1j * ppy
    p = params.expansion_order
    coef = np.zeros((nnodes, p + 1), dtype=np.complex128)
    for i in range(nnodes):
        seg = zc[start[i] : start[i] + count[i]] - (cx[i] + 1j * cy[i])
        g = pg[start[i] : start[i] + count[i]]
        w = g.astype(np.complex128)
        for k in range(p + 1):
            coef[i, k] = w.sum()
            w = w * seg
    return Quadtree(
        cx=cx, cy=cy, size=size, children=children, start=start, count=count,
        is_leaf=is_leaf, coef_re=np.ascontiguousarray(coef.real),
        coef_im=np.ascontiguousarray(coef.imag), px=ppx, py=ppy, gamma=pg,
    )


@njit(cache=True, parallel=True)
def _tree_velocity(
    cx, cy, size, children, start, count, is_leaf, coef_re, coef_im,
    px, py, gamma, ex, ey, delta2, theta2,
):
    m = ex.size
    ux = np.empty(m)
    uy = np.empty(m)
    for i in prange(m):
        x = ex[i]
        y = ey[i]
        sx = 0.0
        sy = 0.0
        stack = np.empty(256, dtype=np.int64)
        top = 0
        stack[top] = 0
        top += 1
        while top > 0:
            top -= 1
            nid = stack[top]
            dx = x - cx[nid]
            dy = y - cy[nid]
            d2 = dx * dx + dy * dy
            s = size[nid]
            if (not is_leaf[nid]) and s * s < theta2 * d2 and d2 > 4.0 * s * s and d2 > 25.0 * delta2:
                # multipole: conj-velocity -i * sum_k a_k * inv^{k+1} + blob correction
                inv_re = dx / d2
                inv_im = -dy / d2
                t_re = inv_re
                t_im = inv_im
                acc_re = 0.0
                acc_im = 0.0
                for k in range(coef_re.shape[1]):
                    a_re = coef_re[nid, k]
                    a_im = coef_im[nid, k]
                    acc_re += a_re * t_re - a_im * t_im
                    acc_im += a_re * t_im + a_im * t_re
                    nt_re = t_re * inv_re - t_im * inv_im
                    nt_im = t_re * inv_im + t_im * inv_re
                    t_re = nt_re
                    t_im = nt_im
                # ubar = -i * acc
                ub_re = acc_im
                ub_im = -acc_re
                if delta2 > 0.0:
                    # blob-minus-exact difference h(D) = i delta^2 / (D(|D|^2+delta^2)),
                    # expanded to dipole order: a0*h(d) - a1*h_D(d) - conj(a1)*h_Dbar(d)
                    a = d2 + delta2
                    g0 = coef_re[nid, 0]
                    a1_re = coef_re[nid, 1]
                    a1_im = coef_im[nid, 1]
                    f0 = delta2 / a
                    f1 = delta2 * (2.0 * d2 + delta2) / (a * a)
                    f2 = delta2 / (a * a)
                    inv2_re = inv_re * inv_re - inv_im * inv_im
                    inv2_im = 2.0 * inv_re * inv_im
                    # part = a0*inv*f0 + a1*inv^2*f1 + conj(a1)*f2; correction = i*part
                    p_re = g0 * inv_re * f0 \
                        + (a1_re * inv2_re - a1_im * inv2_im) * f1 + a1_re * f2
                    p_im = g0 * inv_im * f0 \
                        + (a1_re * inv2_im + a1_im * inv2_re) * f1 - a1_im * f2
                    ub_re += -p_im
                    ub_im += p_re
                sx += ub_re
                sy += -ub_im
            elif is_leaf[nid]:
                for q in range(start[nid], start[nid] + count[nid]):
                    ddx = x - px[q]
                    ddy = y - py[q]
                    r2 = ddx * ddx + ddy * ddy + delta2
                    if r2 > 0.0:
                        w = gamma[q] / r2
                        sx += -ddy * w
                        sy += ddx * w
            else:
                for q in range(4):
                    c = children[nid, q]
                    if c >= 0:
                        stack[top] = c
                        top += 1
        ux[i] = sx
        uy[i] = sy
    return ux, uy


def tree_velocity(tree: Quadtree, ex, ey, delta: float, params: TreeParams):
    """Evaluate the induced velocity at the given points via the tree.

    Coincident evaluation/source pairs contribute zero when delta > 0 (zero
    numerator); with delta = 0 they are skipped, matching the self-excluded
    direct sum.
    """
    ex = np.asarray(ex, dtype=np.float64)
    ey = np.asarray(ey, dtype=np.float64)
    ux, uy = _tree_velocity(
        tree.cx, tree.cy, tree.size, tree.children, tree.start, tree.count,
        tree.is_leaf, tree.coef_re, tree.coef_im, tree.px, tree.py, tree.gamma,
        ex, ey, delta * delta, params.opening_angle**2,
    )
    return ux, uy
