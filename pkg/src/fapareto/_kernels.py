"""Inner loops for Pareto ranking and hypervolume.

Each kernel has a numba version (``*_nb``) and a vectorised numpy version
(``*_np``). Both produce bit-identical results; the public names are bound
to one of them according to :data:`fapareto._accel.USE_NUMBA`.
"""

import numpy as np

from ._accel import USE_NUMBA, njit


# --- dominance depth -------------------------------------------------------

@njit
def dominance_ranks_nb(F):
    n, m = F.shape
    dom_count = np.zeros(n, dtype=np.int64)
    dominated = np.zeros((n, n), dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            le = True
            lt = False
            for k in range(m):
                if F[i, k] > F[j, k]:
                    le = False
                    break
                if F[i, k] < F[j, k]:
                    lt = True
            if le and lt:
                dominated[i, j] = True
                dom_count[j] += 1
    ranks = np.full(n, -1, dtype=np.int64)
    current = np.empty(n, dtype=np.int64)
    n_cur = 0
    for i in range(n):
        if dom_count[i] == 0:
            current[n_cur] = i
            n_cur += 1
    rank = 0
    nxt = np.empty(n, dtype=np.int64)
    while n_cur > 0:
        n_nxt = 0
        for a in range(n_cur):
            i = current[a]
            ranks[i] = rank
            for j in range(n):
                if dominated[i, j]:
                    dom_count[j] -= 1
                    if dom_count[j] == 0:
                        nxt[n_nxt] = j
                        n_nxt += 1
        for a in range(n_nxt):
            current[a] = nxt[a]
        n_cur = n_nxt
        rank += 1
    return ranks


def dominance_ranks_np(F):
    F = np.asarray(F, dtype=np.float64)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominated = le & lt
    dom_count = dominated.sum(axis=0)
    ranks = np.full(F.shape[0], -1, dtype=np.int64)
    alive = np.ones(F.shape[0], dtype=bool)
    rank = 0
    while alive.any():
        front = alive & (dom_count == 0)
        ranks[front] = rank
        alive &= ~front
        dom_count = dom_count - dominated[front].sum(axis=0)
        rank += 1
    return ranks


# --- 2-D hypervolume sweep -------------------------------------------------

@njit
def hv2d_nb(P, ref_x, ref_y):
    n = P.shape[0]
    xs = np.empty(n)
    ys = np.empty(n)
    k = 0
    for i in range(n):
        if P[i, 0] < ref_x and P[i, 1] < ref_y:
            xs[k] = P[i, 0]
            ys[k] = P[i, 1]
            k += 1
    if k == 0:
        return 0.0
    xs = xs[:k]
    ys = ys[:k]
    order = np.argsort(ys, kind="mergesort")
    xs = xs[order]
    ys = ys[order]
    order = np.argsort(xs, kind="mergesort")
    xs = xs[order]
    ys = ys[order]
    # non-dominated staircase: strictly improving second objective
    fx = np.empty(k)
    fy = np.empty(k)
    nf = 0
    best = ref_y
    for i in range(k):
        if ys[i] < best:
            fx[nf] = xs[i]
            fy[nf] = ys[i]
            nf += 1
            best = ys[i]
    total = 0.0
    for i in range(nf):
        nxt = fx[i + 1] if i + 1 < nf else ref_x
        total += (nxt - fx[i]) * (ref_y - fy[i])
    return total


def hv2d_np(P, ref_x, ref_y):
    P = np.asarray(P, dtype=np.float64).reshape(-1, 2)
    P = P[(P[:, 0] < ref_x) & (P[:, 1] < ref_y)]
    if P.shape[0] == 0:
        return 0.0
    P = P[np.lexsort((P[:, 1], P[:, 0]))]
    prev_best = np.concatenate(([ref_y], np.minimum.accumulate(P[:, 1])[:-1]))
    F = P[P[:, 1] < prev_best]
    nxt = np.append(F[1:, 0], ref_x)
    # cumsum accumulates left to right, matching the loop kernel bit for bit
    return float(np.cumsum((nxt - F[:, 0]) * (ref_y - F[:, 1]))[-1])


# --- Monte Carlo dominated-sample counting --------------------------------

@njit
def count_dominated_nb(P, S):
    hits = 0
    for s in range(S.shape[0]):
        for i in range(P.shape[0]):
            if P[i, 0] <= S[s, 0] and P[i, 1] <= S[s, 1]:
                hits += 1
                break
    return hits


def count_dominated_np(P, S, chunk=65536):
    hits = 0
    for start in range(0, S.shape[0], chunk):
        blk = S[start : start + chunk]
        cover = (P[None, :, 0] <= blk[:, None, 0]) & (P[None, :, 1] <= blk[:, None, 1])
        hits += int(cover.any(axis=1).sum())
    return hits


if USE_NUMBA:
    dominance_ranks = dominance_ranks_nb
    hv2d = hv2d_nb
    count_dominated = count_dominated_nb
else:
    dominance_ranks = dominance_ranks_np
    hv2d = hv2d_np
    count_dominated = count_dominated_np
