"""Random sensor deployments and the range-limited topology graph.

Node ids are dense: sensors are 0..n-1, the base station is the
distinguished id n.  Two nodes are adjacent iff their Euclidean distance
is strictly below the transmission range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConnectivityFailure

DEFAULT_REGION = (200.0, 200.0)
DEFAULT_MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("coordinates must be finite")


def resolve_bs_placement(policy, region) -> Point2D:
    """Turn a placement policy into base-station coordinates.

    Accepted policies: ``"center"``, ``"corner"``, an ``(x, y)`` pair, or a
    string ``"x,y"``.
    """
    w, h = region
    if isinstance(policy, Point2D):
        return policy
    if isinstance(policy, (tuple, list)):
        return Point2D(float(policy[0]), float(policy[1]))
    if policy == "center":
        return Point2D(w / 2.0, h / 2.0)
    if policy == "corner":
        return Point2D(0.0, 0.0)
    if isinstance(policy, str) and "," in policy:
        xs, ys = policy.split(",", 1)
        return Point2D(float(xs), float(ys))
    raise ValueError(f"unknown bs placement policy: {policy!r}")


@dataclass(frozen=True)
class Deployment:
    """Sensor positions plus the base station for one trial."""

    sensor_positions: tuple  # tuple[Point2D, ...], index == sensor id
    bs_position: Point2D
    region: tuple  # (width, height)
    seed: int

    @property
    def n(self) -> int:
        return len(self.sensor_positions)

    @property
    def bs_id(self) -> int:
        return self.n

    def positions_array(self) -> np.ndarray:
        """All node coordinates, BS last, shape (n+1, 2)."""
        pts = [(p.x, p.y) for p in self.sensor_positions]
        pts.append((self.bs_position.x, self.bs_position.y))
        return np.asarray(pts, dtype=np.float64)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "region": [self.region[0], self.region[1]],
                "bs": [self.bs_position.x, self.bs_position.y],
                "sensors": [[p.x, p.y] for p in self.sensor_positions],
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Deployment":
        obj = json.loads(text)
        return cls(
            sensor_positions=tuple(Point2D(x, y) for x, y in obj["sensors"]),
            bs_position=Point2D(*obj["bs"]),
            region=(obj["region"][0], obj["region"][1]),
            seed=obj["seed"],
        )


@dataclass(frozen=True)
class TopologyGraph:
    """Symmetric range graph in CSR form.

    ``indptr``/``indices``/``dist`` store the sorted adjacency of every
    node (both directions of each undirected edge).
    """

    node_count: int
    r_max: float
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    dist: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        """Number of sensors (BS excluded)."""
        return self.node_count - 1

    @property
    def bs(self) -> int:
        return self.node_count - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int):
        """Pairs ``(j, d_ij)`` for every neighbor of node i, ids ascending."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.dist[lo:hi].tolist()))

    def neighbor_ids(self, i: int):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi].tolist()

    def has_edge(self, i: int, j: int) -> bool:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return j in self.indices[lo:hi]

    def distance(self, i: int, j: int) -> float:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        row = self.indices[lo:hi]
        pos = np.searchsorted(row, j)
        if pos >= len(row) or row[pos] != j:
            raise KeyError(f"no edge ({i}, {j})")
        return float(self.dist[lo + pos])

    def edge_set(self):
        """Undirected edges as a set of (min, max) pairs."""
        out = set()
        for i in range(self.node_count):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            for j in self.indices[lo:hi]:
                if i < j:
                    out.add((i, int(j)))
        return out


def deploy_random(n, region=DEFAULT_REGION, bs_placement="center", seed=0) -> Deployment:
    """Drop n sensors i.i.d. uniform over the region; deterministic per seed."""
    if n < 1:
        raise ValueError("need at least one sensor")
    w, h = float(region[0]), float(region[1])
    if w <= 0 or h <= 0:
        raise ValueError("region dimensions must be positive")
    rng = np.random.default_rng(seed)
    xy = rng.random((n, 2)) * np.array([w, h])
    sensors = tuple(Point2D(float(x), float(y)) for x, y in xy)
    return Deployment(
        sensor_positions=sensors,
        bs_position=resolve_bs_placement(bs_placement, (w, h)),
        region=(w, h),
        seed=seed,
    )


def build_topology(dep: Deployment, r_max: float) -> TopologyGraph:
    """Range graph: nodes adjacent iff distance strictly below r_max."""
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    pos = dep.positions_array()
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.sqrt((diff * diff).sum(axis=2))
    adj = d < r_max
    np.fill_diagonal(adj, False)
    nn = dep.n + 1
    indptr = np.zeros(nn + 1, dtype=np.int64)
    indices = []
    dists = []
    for i in range(nn):
        js = np.flatnonzero(adj[i])
        indices.append(js.astype(np.int64))
        dists.append(d[i, js])
        indptr[i + 1] = indptr[i] + len(js)
    return TopologyGraph(
        node_count=nn,
        r_max=float(r_max),
        indptr=indptr,
        indices=np.concatenate(indices) if indices else np.zeros(0, np.int64),
        dist=np.concatenate(dists) if dists else np.zeros(0),
    )


def is_connected(g: TopologyGraph) -> bool:
    """True iff every sensor is reachable from the BS."""
    seen = np.zeros(g.node_count, dtype=bool)
    stack = [g.bs]
    seen[g.bs] = True
    while stack:
        u = stack.pop()
        lo, hi = g.indptr[u], g.indptr[u + 1]
        for v in g.indices[lo:hi]:
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return bool(seen.all())


def deploy_connected(
    n,
    region=DEFAULT_REGION,
    bs_placement="center",
    seed=0,
    r_max=80.0,
    max_attempts=DEFAULT_MAX_ATTEMPTS,
) -> Deployment:
    """Rejection-sample deployments until the r_max topology is connected.

    Attempt seeds are derived deterministically from ``seed``, so the
    returned deployment is a pure function of the arguments.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    attempt_seeds = np.random.SeedSequence(seed).generate_state(
        max_attempts, np.uint64
    )
    for s in attempt_seeds:
        dep = deploy_random(n, region, bs_placement, int(s))
        if is_connected(build_topology(dep, r_max)):
            return dep
    raise ConnectivityFailure(max_attempts)
