import math

import pytest

from ldsim.energy import RadioParams
from ldsim.topology import Deployment, Point2D, build_topology, deploy_connected


def region_for(n, r_max):
    """Region side scaled so random graphs at this density usually connect."""
    side = max(60.0, r_max * math.sqrt(n) / 2.0)
    return (side, side)


def random_connected(n, r_max, seed, region=None):
    """A connected random deployment plus its topology graph."""
    if region is None:
        region = region_for(n, r_max)
    dep = deploy_connected(n, region, "center", seed, r_max)
    return dep, build_topology(dep, r_max)


def make_chain(n, spacing=30.0, r_max=40.0):
    """BS at the left end, n sensors in a line; only consecutive nodes
    are within range, so the chain is the unique spanning tree."""
    sensors = tuple(Point2D((i + 1) * spacing, 0.5) for i in range(n))
    dep = Deployment(
        sensor_positions=sensors,
        bs_position=Point2D(0.0, 0.5),
        region=((n + 1) * spacing + 1.0, 1.0),
        seed=0,
    )
    return dep, build_topology(dep, r_max)


def abstract_graph(dists, n):
    """Topology with hand-picked edge distances.

    ``dists`` maps unordered sensor/BS pairs to distances; combined with
    ``unit_radio`` the edge weight becomes 2 + d**2, which lets tests
    express the worked examples' abstract integer weights.
    """
    import numpy as np

    from ldsim.topology import TopologyGraph

    nn = n + 1
    adj = {i: {} for i in range(nn)}
    for (i, j), d in dists.items():
        adj[i][j] = d
        adj[j][i] = d
    indptr = [0]
    indices = []
    dvals = []
    for i in range(nn):
        for j in sorted(adj[i]):
            indices.append(j)
            dvals.append(adj[i][j])
        indptr.append(len(indices))
    return TopologyGraph(
        node_count=nn,
        r_max=float("inf"),
        indptr=np.array(indptr, dtype=np.int64),
        indices=np.array(indices, dtype=np.int64),
        dist=np.array(dvals, dtype=np.float64),
    )


@pytest.fixture
def unit_radio():
    """Rx = 2 and edge weight 2 + d**2: the worked examples' convention."""
    return RadioParams(eps_elec=2.0, eps_amp=1.0, k=1)


@pytest.fixture
def paper_radio():
    return RadioParams.default()
