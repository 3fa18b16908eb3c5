# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: greedy max-min tree accretion and round draining.

Expression order matches ldsim._kernels_py exactly so both backends are
bit-for-bit interchangeable.
"""

import numpy as np

from libc.math cimport INFINITY

BACKEND = "cython"


def greedy_parents(long[::1] indptr, long[::1] indices, double[::1] weights,
                   double[::1] residual, double rx, long bs):
    """Accrete a BS-rooted tree maximizing the minimum expected lifetime.

    Returns an int64 parent array of length bs, or None if disconnected.
    """
    cdef long n = bs
    parent_arr = np.full(n, -1, dtype=np.int64)
    wpar_arr = np.zeros(n, dtype=np.float64)
    indeg_arr = np.zeros(n + 1, dtype=np.int64)
    intree_arr = np.zeros(n + 1, dtype=np.uint8)
    tree_arr = np.zeros(n + 1, dtype=np.int64)

    cdef long[::1] parent = parent_arr
    cdef double[::1] wpar = wpar_arr
    cdef long[::1] indeg = indeg_arr
    cdef unsigned char[::1] in_tree = intree_arr
    cdef long[::1] tree_nodes = tree_arr

    cdef long tcount = 1
    cdef double m_cur = INFINITY
    cdef long it, t, i, j, e, best_c, best_p
    cdef double li_after, lj, s, best_score, best_w, best_lj, lp

    in_tree[bs] = 1
    tree_nodes[0] = bs

    for it in range(n):
        best_score = -INFINITY
        best_c = -1
        best_p = -1
        best_w = 0.0
        best_lj = 0.0
        for t in range(tcount):
            i = tree_nodes[t]
            if i == bs:
                li_after = INFINITY
            else:
                li_after = residual[i] / ((indeg[i] + 1) * rx + wpar[i])
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if in_tree[j]:
                    continue
                lj = residual[j] / weights[e]
                s = li_after
                if lj < s:
                    s = lj
                if m_cur < s:
                    s = m_cur
                if s > best_score or (
                    s == best_score
                    and (j < best_c or (j == best_c and i < best_p))
                ):
                    best_score = s
                    best_c = j
                    best_p = i
                    best_w = weights[e]
                    best_lj = lj
        if best_c < 0:
            return None
        parent[best_c] = best_p
        wpar[best_c] = best_w
        in_tree[best_c] = 1
        tree_nodes[tcount] = best_c
        tcount += 1
        indeg[best_p] += 1
        if best_lj < m_cur:
            m_cur = best_lj
        if best_p != bs:
            lp = residual[best_p] / (indeg[best_p] * rx + wpar[best_p])
            if lp < m_cur:
                m_cur = lp
    return parent_arr


def drain_rounds(double[::1] residual, double[::1] drained, double[::1] cost,
                 long max_rounds):
    """Charge whole rounds until death or the round budget is spent.

    Returns (completed_rounds, dead_node); dead_node is -1 when the
    budget ran out first.  max_rounds < 0 means unbounded.
    """
    cdef long n = residual.shape[0]
    cdef long completed = 0
    cdef long i, dead
    cdef double cmin

    if max_rounds < 0:
        cmin = cost[0]
        for i in range(1, n):
            if cost[i] < cmin:
                cmin = cost[i]
        if cmin <= 0.0:
            raise ValueError("unbounded drain with non-positive round cost")

    while max_rounds < 0 or completed < max_rounds:
        dead = -1
        for i in range(n):
            if residual[i] < cost[i]:
                dead = i
                break
        if dead >= 0:
            return completed, dead
        for i in range(n):
            residual[i] -= cost[i]
            drained[i] += cost[i]
        completed += 1
    return completed, -1
