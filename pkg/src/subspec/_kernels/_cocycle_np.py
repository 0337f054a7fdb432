"""Vectorized numpy implementation of the cocycle kernels.

The cocycle matrix of a substitution is encoded positionally: entry k of the
flattened rule list contributes exp(-2*pi*i <pops[k], xi>) to matrix entry
(rows[k], cols[k]).  Products along the torus orbit xi -> S^T xi (mod 1) are
accumulated with per-step max-abs renormalization and a log-scale so that
arbitrarily deep products never overflow.
"""

from __future__ import annotations

import numpy as np


def cocycle_matrices(pops, rows, cols, d, xi):
    """Evaluate the cocycle matrix at a batch of torus points.

    pops: (L, d) float64, rows/cols: (L,) intp, xi: (m, d) float64.
    Returns (m, d, d) complex128.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=np.float64))
    m = xi.shape[0]
    phases = np.exp(-2j * np.pi * (pops @ xi.T))  # (L, m)
    out = np.zeros((d * d, m), dtype=np.complex128)
    np.add.at(out, rows * d + cols, phases)
    return np.ascontiguousarray(out.T.reshape(m, d, d))


def cocycle_products(pops, rows, cols, d, st, xi, n, want_traj=False):
    """Renormalized products M((S^T)^{n-1} xi) ... M(S^T xi) M(xi).

    st: (d, d) float64 copy of S^T.  Returns (prod, logscale, traj) where
    prod is (m, d, d) complex128 with unit max-norm per sample (zero matrix
    for degenerate samples), logscale is (m,) float64 with -inf marking a
    zero product, and traj (present when want_traj) is (m, n) float64 of
    log Frobenius norms of the partial products.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=np.float64))
    m = xi.shape[0]
    prod = np.broadcast_to(np.eye(d, dtype=np.complex128), (m, d, d)).copy()
    logscale = np.zeros(m)
    traj = np.full((m, n), -np.inf) if want_traj else None
    cur = np.mod(xi, 1.0)
    flat = rows * d + cols
    for t in range(n):
        phases = np.exp(-2j * np.pi * (pops @ cur.T))
        M = np.zeros((d * d, m), dtype=np.complex128)
        np.add.at(M, flat, phases)
        Mm = np.ascontiguousarray(M.T.reshape(m, d, d))
        prod = Mm @ prod
        scale = np.abs(prod).max(axis=(1, 2))
        # exact-cancellation products leave only rounding noise; treat a step
        # that shrinks the max entry below 1e-12 of the factor scale as zero
        floor_ = 1e-12 * np.maximum(np.abs(Mm).max(axis=(1, 2)), 1.0)
        alive = scale > floor_
        logscale[~alive] = -np.inf
        prod[~alive] = 0.0
        prod[alive] /= scale[alive, None, None]
        logscale[alive] += np.log(scale[alive])
        if want_traj:
            fro = np.linalg.norm(prod, axis=(1, 2))
            lg = np.full(m, -np.inf)
            np.log(fro, where=fro > 0.0, out=lg)
            traj[:, t] = logscale + lg
        cur = np.mod(cur @ st.T, 1.0)
    return prod, logscale, traj
