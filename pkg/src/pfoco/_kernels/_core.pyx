# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner kernels: coordinate-wise LMO selection rules and the
alternating power iteration behind the nuclear-norm-ball LMO.

Semantics must stay in lockstep with ``_fallback``; only speed differs.
Last-bit floating point results may diverge between the two backends
because summation orders differ.
"""

from libc.math cimport fabs, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def box_lmo(double[::1] w, double[::1] lo, double[::1] hi):
    """Minimize <w, v> over the box [lo, hi]; ties at w[i] == 0 pick lo[i]."""
    cdef Py_ssize_t i, n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(n):
        out[i] = lo[i] if w[i] >= 0.0 else hi[i]
    return out_arr


def l1_ball_lmo(double[::1] w, double radius):
    """Minimize <w, v> over the l1 ball: all mass on the first largest |w[i]|."""
    cdef Py_ssize_t i, best = 0, n = w.shape[0]
    cdef double mag, best_mag = fabs(w[0])
    for i in range(1, n):
        mag = fabs(w[i])
        if mag > best_mag:
            best_mag = mag
            best = i
    out_arr = np.zeros(n, dtype=np.float64)
    if best_mag > 0.0:
        out_arr[best] = -radius if w[best] > 0.0 else radius
    return out_arr


def simplex_lmo(double[::1] w):
    """Minimize <w, v> over the probability simplex: first smallest coordinate."""
    cdef Py_ssize_t i, best = 0, n = w.shape[0]
    cdef double best_val = w[0]
    for i in range(1, n):
        if w[i] < best_val:
            best_val = w[i]
            best = i
    out_arr = np.zeros(n, dtype=np.float64)
    out_arr[best] = 1.0
    return out_arr


def top_singular_pair(double[:, ::1] mat, double[::1] v0, int max_iters, double tol):
    """Alternating power iteration toward the leading singular triple.

    Runs u <- mat v / |mat v|, v <- mat^T u / |mat^T u| from the start
    vector ``v0`` and stops once the singular-value estimate changes by at
    most ``tol * sigma`` between sweeps, or after ``max_iters`` sweeps.

    Returns ``(u, v, sigma, iters, converged)`` with the invariant
    ``mat @ v == sigma * u`` enforced exactly by a final re-projection, so
    the triple is self-consistent even when not converged.  A zero sigma
    with ``converged=False`` signals that the start vector fell in the
    null space; the caller reseeds.
    """
    cdef Py_ssize_t m = mat.shape[0], n = mat.shape[1]
    cdef Py_ssize_t i, j
    cdef int it = 0
    cdef bint converged = False
    cdef double sigma = 0.0, sigma_prev = -1.0, acc, nu

    u_arr = np.zeros(m, dtype=np.float64)
    v_arr = np.array(v0, dtype=np.float64, copy=True)
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr

    acc = 0.0
    for j in range(n):
        acc += v[j] * v[j]
    acc = sqrt(acc)
    if acc == 0.0:
        raise ValueError("power iteration start vector is zero")
    for j in range(n):
        v[j] /= acc

    for it in range(1, max_iters + 1):
        nu = 0.0
        for i in range(m):
            acc = 0.0
            for j in range(n):
                acc += mat[i, j] * v[j]
            u[i] = acc
            nu += acc * acc
        nu = sqrt(nu)
        if nu == 0.0:
            return u_arr, v_arr, 0.0, it, False
        for i in range(m):
            u[i] /= nu

        sigma = 0.0
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc += mat[i, j] * u[i]
            v[j] = acc
            sigma += acc * acc
        sigma = sqrt(sigma)
        if sigma == 0.0:
            return u_arr, v_arr, 0.0, it, False
        for j in range(n):
            v[j] /= sigma

        if fabs(sigma - sigma_prev) <= tol * sigma:
            converged = True
            break
        sigma_prev = sigma

    nu = 0.0
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += mat[i, j] * v[j]
        u[i] = acc
        nu += acc * acc
    nu = sqrt(nu)
    if nu > 0.0:
        for i in range(m):
            u[i] /= nu
    return u_arr, v_arr, nu, it, converged
