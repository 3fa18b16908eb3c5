"""Pure-Python fallback for the compiled kernels.

Mirrors ldsim._kernels operation-for-operation (same IEEE-754 expression
order) so both backends produce bit-identical trees and drain traces.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_INF = float("inf")


def greedy_parents(indptr, indices, weights, residual, rx, bs):
    """Accrete a BS-rooted tree maximizing the minimum expected lifetime.

    Each step attaches the frontier edge whose hypothetical
    post-attachment minimum lifetime is largest; ties break on smallest
    child id, then smallest parent id.  Returns an int64 parent array of
    length bs (one entry per sensor), or None if the graph is
    disconnected.
    """
    n = bs
    parent = np.full(n, -1, dtype=np.int64)
    wpar = [0.0] * n  # weight of the edge to the current parent
    indeg = [0] * (n + 1)
    in_tree = [False] * (n + 1)
    in_tree[bs] = True
    tree_nodes = [bs]
    res = [float(x) for x in residual]
    ip = [int(x) for x in indptr]
    idx = [int(x) for x in indices]
    wts = [float(x) for x in weights]
    m_cur = _INF  # current min lifetime over non-root tree nodes

    for _ in range(n):
        best_score = -_INF
        best_c = -1
        best_p = -1
        best_w = 0.0
        best_lj = 0.0
        for i in tree_nodes:
            if i == bs:
                li_after = _INF
            else:
                li_after = res[i] / ((indeg[i] + 1) * rx + wpar[i])
            for e in range(ip[i], ip[i + 1]):
                j = idx[e]
                if in_tree[j]:
                    continue
                lj = res[j] / wts[e]
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
                    best_w = wts[e]
                    best_lj = lj
        if best_c < 0:
            return None
        parent[best_c] = best_p
        wpar[best_c] = best_w
        in_tree[best_c] = True
        tree_nodes.append(best_c)
        indeg[best_p] += 1
        if best_lj < m_cur:
            m_cur = best_lj
        if best_p != bs:
            lp = res[best_p] / (indeg[best_p] * rx + wpar[best_p])
            if lp < m_cur:
                m_cur = lp
    return parent


def drain_rounds(residual, drained, cost, max_rounds):
    """Charge whole rounds until death or the round budget is spent.

    A node dies when its residual is strictly below its round cost at
    round start.  Returns (completed_rounds, dead_node) with dead_node=-1
    when the budget ran out first.  max_rounds < 0 means unbounded.
    """
    if max_rounds < 0 and float(cost.min()) <= 0.0:
        raise ValueError("unbounded drain with non-positive round cost")
    completed = 0
    while max_rounds < 0 or completed < max_rounds:
        short = np.flatnonzero(residual < cost)
        if len(short):
            return completed, int(short[0])
        residual -= cost
        drained += cost
        completed += 1
    return completed, -1
