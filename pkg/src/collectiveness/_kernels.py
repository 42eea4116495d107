"""Numba kernels for the hot loops: clique spreading and K-NN selection.

Kept separate so the rest of the package stays plain numpy.  The spreading
kernel is a literal transcription of the per-core rules documented in
:mod:`collectiveness.ncl`; keep the two in sync.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# node state codes used while spreading
_UNTOUCHED, _QUEUED, _RENEWED, _PRIVILEGED = 0, 1, 2, 3


@njit(cache=True)
def spread_cliques(n, out_indptr, out_dst, in_indptr, in_src, in_w,
                   cores, lam, use_min, batched):
    """Run information spreading from each core node; return clique rows.

    Per iteration, the ready set is every unrenewed node with at least one
    privileged in-neighbor (tracked incrementally as the unrenewed
    out-neighbors of the nodes privileged last iteration); ready nodes are
    processed in ascending id.  With ``batched`` False a privilege grant is
    visible to later nodes of the same iteration, with True the grants
    apply only once the iteration is over.
    """
    m = cores.shape[0]
    cliques = np.zeros((m, n), dtype=np.bool_)
    info = np.zeros(n, dtype=np.float64)
    state = np.zeros(n, dtype=np.uint8)
    frontier = np.empty(n, dtype=np.int64)
    granted = np.empty(n, dtype=np.int64)

    for ci in range(m):
        core = cores[ci]
        for j in range(n):
            info[j] = 0.0
            state[j] = 0  # untouched
        info[core] = 1.0
        state[core] = 3  # privileged (and renewed)
        frontier[0] = core
        n_front = 1

        while n_front > 0:
            n_cand = 0
            for fi in range(n_front):
                x = frontier[fi]
                for e in range(out_indptr[x], out_indptr[x + 1]):
                    z = out_dst[e]
                    if state[z] == 0:
                        state[z] = 1  # queued for this iteration
                        n_cand += 1
            if n_cand == 0:
                break

            n_granted = 0
            for z in range(n):  # ascending id over the queued nodes
                if state[z] != 1:
                    continue
                if use_min:
                    v = np.inf
                    for e in range(in_indptr[z], in_indptr[z + 1]):
                        if state[in_src[e]] == 3:
                            val = in_w[e] * info[in_src[e]]
                            if val < v:
                                v = val
                else:
                    s = 0.0
                    cnt = 0
                    for e in range(in_indptr[z], in_indptr[z + 1]):
                        if state[in_src[e]] == 3:
                            s += in_w[e] * info[in_src[e]]
                            cnt += 1
                    v = s / cnt
                info[z] = v
                if v > lam:
                    granted[n_granted] = z
                    n_granted += 1
                    state[z] = 2 if batched else 3
                else:
                    state[z] = 2  # renewed, final
            if batched:
                for t in range(n_granted):
                    state[granted[t]] = 3
            for t in range(n_granted):
                frontier[t] = granted[t]
            n_front = n_granted

        for j in range(n):
            cliques[ci, j] = state[j] == 3
    return cliques


@njit(cache=True)
def knn_select(pos, k, side):
    """Indices of each point's k nearest others, ties by ascending id.

    Compares squared distances; ``side > 0`` switches to wrap-around
    (torus) differences.  Insertion keeps equal distances in ascending-id
    order because shifts and replacements are strict.
    """
    n = pos.shape[0]
    wrap = side > 0.0
    half = side * 0.5
    out = np.empty((n, k), dtype=np.int64)
    best_d = np.empty(k, dtype=np.float64)
    best_i = np.empty(k, dtype=np.int64)
    for i in range(n):
        xi = pos[i, 0]
        yi = pos[i, 1]
        cnt = 0
        for j in range(n):
            if j == i:
                continue
            dx = xi - pos[j, 0]
            if dx < 0.0:
                dx = -dx
            dy = yi - pos[j, 1]
            if dy < 0.0:
                dy = -dy
            if wrap:
                if dx > half:
                    dx = side - dx
                if dy > half:
                    dy = side - dy
            d = dx * dx + dy * dy
            if cnt < k:
                p = cnt
                while p > 0 and best_d[p - 1] > d:
                    best_d[p] = best_d[p - 1]
                    best_i[p] = best_i[p - 1]
                    p -= 1
                best_d[p] = d
                best_i[p] = j
                cnt += 1
            elif d < best_d[k - 1]:
                p = k - 1
                while p > 0 and best_d[p - 1] > d:
                    best_d[p] = best_d[p - 1]
                    best_i[p] = best_i[p - 1]
                    p -= 1
                best_d[p] = d
                best_i[p] = j
        out[i] = best_i[:k]
    return out
