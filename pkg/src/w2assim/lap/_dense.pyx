# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense square linear assignment (shortest augmenting paths).

One augmentation per row: a Dijkstra pass over reduced costs finds the
cheapest alternating path to a free column, dual potentials are updated so
reduced costs stay nonnegative, and the path is flipped.  Mirrors
``_dense_py.lap_dense`` operation for operation (same tie-breaking), so the
two backends return identical assignments, not just equal costs.
"""

from libc.math cimport INFINITY

import numpy as np


def lap_dense(double[:, ::1] cost):
    """Solve min-cost perfect matching on a dense square cost matrix.

    Returns ``(col4row, u, v)``: the column matched to each row and the dual
    potentials certifying optimality (all reduced costs ``c[i, j] - u[i] -
    v[j]`` are nonnegative up to roundoff, zero on matched pairs).
    """
    cdef Py_ssize_t n = cost.shape[0]
    if cost.shape[1] != n:
        raise ValueError("cost matrix must be square")

    u_arr = np.zeros(n, dtype=np.float64)
    v_arr = np.zeros(n, dtype=np.float64)
    col4row_arr = np.full(n, -1, dtype=np.intp)
    row4col_arr = np.full(n, -1, dtype=np.intp)
    spc_arr = np.empty(n, dtype=np.float64)
    path_arr = np.empty(n, dtype=np.intp)
    sr_arr = np.zeros(n, dtype=np.uint8)
    sc_arr = np.zeros(n, dtype=np.uint8)
    remaining_arr = np.empty(n, dtype=np.intp)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] spc = spc_arr
    cdef Py_ssize_t[::1] col4row = col4row_arr
    cdef Py_ssize_t[::1] row4col = row4col_arr
    cdef Py_ssize_t[::1] path = path_arr
    cdef Py_ssize_t[::1] remaining = remaining_arr
    cdef unsigned char[::1] sr = sr_arr
    cdef unsigned char[::1] sc = sc_arr

    cdef Py_ssize_t cur_row, i, j, it, kbest, nrem, sink, tmp
    cdef double dist, lowest, r

    if n == 0:
        return col4row_arr, u_arr, v_arr

    for cur_row in range(n):
        for j in range(n):
            spc[j] = INFINITY
            remaining[j] = j
            sr[j] = 0
            sc[j] = 0
        nrem = n
        dist = 0.0
        i = cur_row
        sink = -1

        while sink == -1:
            sr[i] = 1
            lowest = INFINITY
            kbest = -1
            for it in range(nrem):
                j = remaining[it]
                r = dist + cost[i, j] - u[i] - v[j]
                if r < spc[j]:
                    spc[j] = r
                    path[j] = i
                # Prefer the last free column among equals: it ends the
                # augmentation immediately.
                if spc[j] < lowest or (spc[j] == lowest and row4col[j] == -1):
                    lowest = spc[j]
                    kbest = it
            dist = lowest
            j = remaining[kbest]
            sc[j] = 1
            remaining[kbest] = remaining[nrem - 1]
            nrem -= 1
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]

        u[cur_row] += dist
        for i in range(n):
            if sr[i] and i != cur_row:
                u[i] += dist - spc[col4row[i]]
        for j in range(n):
            if sc[j]:
                v[j] -= dist - spc[j]

        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            tmp = col4row[i]
            col4row[i] = j
            j = tmp
            if i == cur_row:
                break

    return col4row_arr, u_arr, v_arr
