"""Compiled inner loops for the QUBO solvers.

Both kernels maintain the local field ``h = A z`` so a single-bit flip costs
O(n): flipping bit ``i`` by ``s = 1 - 2 z_i`` changes ``z^T A z`` by
``2 s h_i + A_ii`` (``A`` symmetric).
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def anneal_read(a, state, betas, uniforms):
    """Metropolis sweeps over all bits in index order; ``state`` is updated in place."""
    n = state.shape[0]
    h = np.zeros(n)
    for i in range(n):
        if state[i]:
            for j in range(n):
                h[j] += a[j, i]
    for t in range(betas.shape[0]):
        beta = betas[t]
        for i in range(n):
            s = 1.0 - 2.0 * state[i]
            delta = 2.0 * s * h[i] + a[i, i]
            if delta <= 0.0 or uniforms[t, i] < np.exp(-beta * delta):
                state[i] = 1 - state[i]
                for j in range(n):
                    h[j] += s * a[j, i]
    return state


@njit(cache=True, nogil=True)
def enumerate_min(a, tol):
    """Exhaustive minimum of ``z^T A z`` over all ``2^n`` bit vectors.

    States are visited in Gray-code order. Bit ``i`` of the vector is bit
    ``n - 1 - i`` of the integer code, so integer order is lexicographic
    order; among energies within ``tol`` of the best, the smallest code wins.
    Returns ``(code, energy)``.
    """
    n = a.shape[0]
    z = np.zeros(n, dtype=np.int8)
    h = np.zeros(n)
    e = 0.0
    best_e = 0.0
    best_code = np.int64(0)
    code = np.int64(0)
    total = np.int64(1) << n
    for t in range(1, total):
        # Gray code flips the lowest set bit position of t
        p = 0
        tt = t
        while (tt & 1) == 0:
            tt >>= 1
            p += 1
        code ^= np.int64(1) << p
        i = n - 1 - p
        s = 1.0 - 2.0 * z[i]
        e += 2.0 * s * h[i] + a[i, i]
        z[i] = 1 - z[i]
        for j in range(n):
            h[j] += s * a[j, i]
        if e < best_e - tol:
            best_e = e
            best_code = code
        elif e <= best_e + tol:
            if code < best_code:
                best_code = code
            if e < best_e:
                best_e = e
    return best_code, best_e


@njit(cache=True, nogil=True)
def branch_and_bound_min(a, tol):
    """Exact minimum of ``z^T A z`` by depth-first branch and bound.

    Bits are fixed in index order, 0 before 1, so leaves are reached in
    lexicographic order and a later leaf replaces the incumbent only if it is
    lower by more than ``tol``; ties therefore resolve to the
    lexicographically smallest vector, as in :func:`enumerate_min`.

    With bits ``m..n-1`` free, the bound is
    ``E_fixed + sum_j min(0, A_jj + 2 h_j + sum_{l>=m, l!=j} min(0, A_jl))``.
    """
    n = a.shape[0]
    neg = np.minimum(a, 0.0)
    # negsuf[m, j] = sum_{l >= m, l != j} min(0, A_jl)
    negsuf = np.zeros((n + 1, n))
    for m in range(n - 1, -1, -1):
        for j in range(n):
            negsuf[m, j] = negsuf[m + 1, j] + (neg[j, m] if m != j else 0.0)

    z = np.zeros(n, dtype=np.int8)
    best_z = np.zeros(n, dtype=np.int8)
    h = np.zeros(n)
    e = 0.0
    best_e = np.inf
    stage = np.zeros(n + 1, dtype=np.int8)
    i = 0
    while i >= 0:
        if i == n:
            if e < best_e - tol:
                best_e = e
                best_z[:] = z
            i -= 1
            continue
        if stage[i] == 0:
            stage[i] = 1
            lb = e
            for j in range(i + 1, n):
                lb += min(0.0, a[j, j] + 2.0 * h[j] + negsuf[i + 1, j])
            if lb < best_e - tol:
                i += 1
                stage[i] = 0
            continue
        if stage[i] == 1:
            stage[i] = 2
            e += a[i, i] + 2.0 * h[i]
            for j in range(n):
                h[j] += a[j, i]
            z[i] = 1
            lb = e
            for j in range(i + 1, n):
                lb += min(0.0, a[j, j] + 2.0 * h[j] + negsuf[i + 1, j])
            if lb < best_e - tol:
                i += 1
                stage[i] = 0
            continue
        if z[i] == 1:
            for j in range(n):
                h[j] -= a[j, i]
            e -= a[i, i] + 2.0 * h[i]
            z[i] = 0
        i -= 1
    return best_z, best_e
