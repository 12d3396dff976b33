"""Pure-numpy kernels, semantically identical to the compiled ``_core``.

Kept algorithm-for-algorithm in sync with ``_core.pyx``: same update order,
same convergence rule, same tie-breaking (first index wins).  Results may
differ from the compiled backend in the last bits because numpy reductions
sum in a different order.
"""

import numpy as np


def box_lmo(w, lo, hi):
    """Minimize <w, v> over the box [lo, hi]; ties at w[i] == 0 pick lo[i]."""
    return np.where(w >= 0.0, lo, hi)


def l1_ball_lmo(w, radius):
    """Minimize <w, v> over the l1 ball: all mass on the first largest |w[i]|."""
    mags = np.abs(w)
    best = int(np.argmax(mags))
    out = np.zeros(w.shape[0])
    if mags[best] > 0.0:
        out[best] = -radius if w[best] > 0.0 else radius
    return out


def simplex_lmo(w):
    """Minimize <w, v> over the probability simplex: first smallest coordinate."""
    out = np.zeros(w.shape[0])
    out[int(np.argmin(w))] = 1.0
    return out


def top_singular_pair(mat, v0, max_iters, tol):
    """Alternating power iteration toward the leading singular triple.

    Same contract as the compiled version: returns
    ``(u, v, sigma, iters, converged)`` with ``mat @ v == sigma * u``
    enforced by a final re-projection; sigma == 0 with converged=False
    signals a null-space start vector.
    """
    v = np.array(v0, dtype=np.float64, copy=True)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("power iteration start vector is zero")
    v /= nv

    u = np.zeros(mat.shape[0])
    sigma_prev = -1.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        u = mat @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return u, v, 0.0, it, False
        u /= nu

        v = mat.T @ u
        sigma = np.linalg.norm(v)
        if sigma == 0.0:
            return u, v, 0.0, it, False
        v /= sigma

        if abs(sigma - sigma_prev) <= tol * sigma:
            converged = True
            break
        sigma_prev = sigma

    u = mat @ v
    nu = np.linalg.norm(u)
    if nu > 0.0:
        u = u / nu
    return u, v, float(nu), it, converged
