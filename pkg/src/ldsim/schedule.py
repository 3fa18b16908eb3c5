"""Routing trees, expected-lifetime evaluation, and tree builders.

Builders: the greedy max-min accretion (the schedule the simulator
defends), minimum spanning tree (Prim), shortest path tree (Dijkstra),
and an exhaustive optimum for tiny instances used as a test oracle.
"""

from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from ._backend import greedy_parents
from .energy import RadioParams, edge_weight, edge_weights_array, rx_cost
from .errors import Disconnected, TooLarge
from .topology import TopologyGraph

BRUTE_FORCE_MAX_N = 9


@dataclass(frozen=True)
class RoutingTree:
    """BS-rooted arborescence: every sensor forwards to its parent."""

    root: int
    parent: dict  # sensor id -> node id
    in_degree: dict  # node id -> count
    depth: int  # longest hop path from any sensor to the root

    @classmethod
    def from_parent_map(cls, root: int, parent: dict) -> "RoutingTree":
        children = {}
        for c, p in parent.items():
            children.setdefault(p, []).append(c)
        in_degree = {i: 0 for i in list(parent) + [root]}
        for p in parent.values():
            in_degree[p] = in_degree.get(p, 0) + 1
        depth = 0
        seen = {root}
        frontier = deque([(root, 0)])
        while frontier:
            u, d = frontier.popleft()
            depth = max(depth, d)
            for c in children.get(u, ()):
                if c in seen:
                    raise ValueError("parent map contains a cycle")
                seen.add(c)
                frontier.append((c, d + 1))
        if len(seen) != len(parent) + 1:
            raise ValueError("parent map does not reach the root everywhere")
        return cls(root=root, parent=dict(parent), in_degree=in_degree, depth=depth)

    @property
    def sensors(self):
        return sorted(self.parent)

    def to_json(self) -> str:
        return json.dumps(
            {
                "root": "BS",
                "parent": {str(i): p for i, p in sorted(self.parent.items())},
                "kappa": self.depth,
            }
        )


@dataclass(frozen=True)
class LifetimeEstimate:
    per_node: dict  # sensor id -> expected rounds
    l_min: float
    argmin: int


def round_cost(i: int, t: RoutingTree, p: RadioParams, g: TopologyGraph) -> float:
    """Per-round energy of sensor i under tree t: receive from children,
    transmit once to the parent."""
    w = edge_weight(p, g.distance(i, t.parent[i]))
    return t.in_degree.get(i, 0) * rx_cost(p) + w


def expected_lifetime(i, t: RoutingTree, ledger, p: RadioParams, g: TopologyGraph) -> float:
    """Rounds sensor i can sustain its current role: RE_i / round cost."""
    if i == t.root:
        raise ValueError("the root has no lifetime bound")
    return ledger[i] / round_cost(i, t, p, g)


def min_expected_lifetime(t: RoutingTree, ledger, p: RadioParams, g: TopologyGraph) -> LifetimeEstimate:
    """Per-node lifetimes plus the global minimum; ties pick smallest id."""
    per_node = {}
    l_min = math.inf
    argmin = -1
    for i in t.sensors:
        li = expected_lifetime(i, t, ledger, p, g)
        per_node[i] = li
        if li < l_min:
            l_min = li
            argmin = i
    return LifetimeEstimate(per_node=per_node, l_min=l_min, argmin=argmin)


def build_greedy_maxmin(g: TopologyGraph, ledger, p: RadioParams) -> RoutingTree:
    """Greedy accretion maximizing the post-attachment minimum lifetime.

    Starts from {BS}; each of the n steps attaches the frontier edge
    (parent in tree, child outside) whose score -- the hypothetical
    minimum expected lifetime over all tree sensors after the attachment
    -- is maximal.  Ties break on smallest child id, then smallest
    parent id.
    """
    weights = edge_weights_array(p, g.dist)
    parent = greedy_parents(
        g.indptr,
        g.indices,
        np.ascontiguousarray(weights),
        np.ascontiguousarray(ledger.residual),
        rx_cost(p),
        g.bs,
    )
    if parent is None:
        raise Disconnected("greedy accretion ran out of frontier edges")
    return RoutingTree.from_parent_map(g.bs, {i: int(parent[i]) for i in range(g.n)})


def build_mst(g: TopologyGraph, p: RadioParams) -> RoutingTree:
    """Prim from the BS over transmit-cost weights, edges oriented to BS.

    Tie order is lexicographic (weight, child id, parent id).
    """
    parent = {}
    in_tree = {g.bs}
    heap = []
    for j, d in g.neighbors(g.bs):
        heapq.heappush(heap, (edge_weight(p, d), j, g.bs))
    while heap:
        _, c, pa = heapq.heappop(heap)
        if c in in_tree:
            continue
        parent[c] = pa
        in_tree.add(c)
        for j, d in g.neighbors(c):
            if j not in in_tree:
                heapq.heappush(heap, (edge_weight(p, d), j, c))
    if len(parent) != g.n:
        raise Disconnected("graph has sensors unreachable from the BS")
    return RoutingTree.from_parent_map(g.bs, parent)


def build_spt(g: TopologyGraph, p: RadioParams) -> RoutingTree:
    """Dijkstra shortest path tree sunk at the BS.

    Ties on path cost prefer fewer hops, then the smaller parent id.
    """
    dist = {g.bs: 0.0}
    hops = {g.bs: 0}
    parent = {}
    heap = [(0.0, 0, g.bs)]
    done = set()
    while heap:
        du, hu, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, d in g.neighbors(u):
            nd = du + edge_weight(p, d)
            nh = hu + 1
            if (
                v not in dist
                or nd < dist[v]
                or (nd == dist[v] and (nh, u) < (hops[v], parent.get(v, g.bs)))
            ):
                if v not in done:
                    dist[v] = nd
                    hops[v] = nh
                    parent[v] = u
                    heapq.heappush(heap, (nd, nh, v))
    if len(parent) != g.n:
        raise Disconnected("graph has sensors unreachable from the BS")
    return RoutingTree.from_parent_map(g.bs, parent)


def tree_depth(t: RoutingTree) -> int:
    """Longest hop path from any sensor to the root (kappa)."""
    return t.depth


def _arborescence_l_min(parent, g, weights_by_pair, residual, rx):
    indeg = [0] * (g.n + 1)
    for pa in parent:
        indeg[pa] += 1
    l_min = math.inf
    for i, pa in enumerate(parent):
        li = residual[i] / (indeg[i] * rx + weights_by_pair[i][pa])
        if li < l_min:
            l_min = li
    return l_min


def brute_force_optimal(g: TopologyGraph, ledger, p: RadioParams):
    """Exact max-min-lifetime arborescence by exhaustive search.

    Only feasible for toy instances (the underlying objective is
    NP-hard); capped at 9 sensors.  Branch-and-bound over per-sensor
    parent choices; the bound uses the fact that lifetimes only shrink
    as in-degrees grow.
    """
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"brute force capped at n={BRUTE_FORCE_MAX_N}, got {n}")
    rx = rx_cost(p)
    residual = [ledger[i] for i in range(n)]
    nbr_weights = []
    for i in range(n):
        nbr_weights.append(
            {j: edge_weight(p, d) for j, d in g.neighbors(i)}
        )
    choices = [sorted(nbr_weights[i]) for i in range(n)]
    if any(not c for c in choices):
        raise Disconnected("a sensor has no neighbors at all")

    best_val = -math.inf
    best_parent = None
    parent = [-1] * n
    indeg = [0] * (n + 1)

    def creates_cycle(start):
        u = parent[start]
        while u != g.bs and u >= 0:
            if u == start:
                return True
            u = parent[u] if u < n else -1
        return False

    def partial_min():
        m = math.inf
        for i in range(n):
            if parent[i] < 0:
                continue
            li = residual[i] / (indeg[i] * rx + nbr_weights[i][parent[i]])
            if li < m:
                m = li
        return m

    def dfs(i):
        nonlocal best_val, best_parent
        if i == n:
            val = partial_min()
            if val > best_val:
                best_val = val
                best_parent = parent[:]
            return
        for pa in choices[i]:
            parent[i] = pa
            indeg[pa] += 1
            if not creates_cycle(i) and partial_min() > best_val:
                dfs(i + 1)
            indeg[pa] -= 1
            parent[i] = -1

    dfs(0)
    if best_parent is None:
        raise Disconnected("no BS-rooted spanning arborescence exists")
    tree = RoutingTree.from_parent_map(g.bs, dict(enumerate(best_parent)))
    return tree, best_val
