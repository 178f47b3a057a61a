"""Pure-Python (vectorized numpy) dense square linear assignment.

Same shortest-augmenting-path algorithm as the compiled ``_dense`` kernel,
with the relaxation step vectorized over the unscanned columns.  Arithmetic
and tie-breaking are arranged to match the compiled kernel exactly, so both
backends return identical assignments on identical input.
"""

import numpy as np


def lap_dense(cost):
    """Solve min-cost perfect matching on a dense square cost matrix.

    Returns ``(col4row, u, v)``: the column matched to each row and the dual
    potentials certifying optimality.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n = cost.shape[0]
    if cost.ndim != 2 or cost.shape[1] != n:
        raise ValueError("cost matrix must be square")

    u = np.zeros(n)
    v = np.zeros(n)
    col4row = np.full(n, -1, dtype=np.intp)
    row4col = np.full(n, -1, dtype=np.intp)

    for cur_row in range(n):
        spc = np.full(n, np.inf)
        path = np.empty(n, dtype=np.intp)
        sr = np.zeros(n, dtype=bool)
        remaining = np.arange(n)
        nrem = n
        dist = 0.0
        i = cur_row
        sink = -1

        while sink == -1:
            sr[i] = True
            rem = remaining[:nrem]
            r = dist + cost[i, rem] - u[i] - v[rem]
            better = r < spc[rem]
            if better.any():
                touched = rem[better]
                spc[touched] = r[better]
                path[touched] = i
            vals = spc[rem]
            lowest = vals.min()
            # Prefer the last free column among equals (same rule as the
            # compiled kernel): it ends the augmentation immediately.
            cand = rem[vals == lowest]
            free = cand[row4col[cand] == -1]
            j = int(free[-1]) if free.size else int(cand[0])
            dist = float(lowest)
            k = int(np.nonzero(rem == j)[0][0])
            remaining[k] = remaining[nrem - 1]
            nrem -= 1
            if row4col[j] == -1:
                sink = j
            else:
                i = int(row4col[j])

        u[cur_row] += dist
        rows = np.flatnonzero(sr)
        rows = rows[rows != cur_row]
        if rows.size:
            u[rows] += dist - spc[col4row[rows]]
        scanned_cols = np.ones(n, dtype=bool)
        scanned_cols[remaining[:nrem]] = False
        cols = np.flatnonzero(scanned_cols)
        v[cols] -= dist - spc[cols]

        j = sink
        while True:
            i = int(path[j])
            row4col[j] = i
            col4row[i], j = j, int(col4row[i])
            if i == cur_row:
                break

    return col4row, u, v
