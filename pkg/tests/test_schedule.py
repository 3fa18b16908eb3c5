import math

import pytest

from conftest import abstract_graph, make_chain, random_connected
from oracles import (
    arborescence_min_lifetime,
    bfs_depth,
    enumerate_arborescences,
    tree_total_weight,
)

from ldsim.energy import EnergyLedger, RadioParams, edge_weight, rx_cost
from ldsim.errors import Disconnected, TooLarge
from ldsim.schedule import (
    RoutingTree,
    brute_force_optimal,
    build_greedy_maxmin,
    build_mst,
    build_spt,
    expected_lifetime,
    min_expected_lifetime,
    tree_depth,
)

S3 = math.sqrt(3.0)  # distance giving abstract weight 5 under unit_radio
S7 = math.sqrt(7.0)  # weight 9
TINY = 1e-7  # weight ~2 (the additive floor of the model)


def chain_graph():
    # BS <- a <- b with w(a,BS)=5, w(b,a)=3
    return abstract_graph({(0, 2): S3, (0, 1): 1.0}, n=2)


def triangle_graph():
    # w(a,BS)=5, w(b,BS)=9, w(a,b)~2
    return abstract_graph({(0, 2): S3, (1, 2): S7, (0, 1): TINY}, n=2)


def ledger1000(n=2):
    return EnergyLedger(n, 1000.0)


def test_expected_lifetime_chain_example(unit_radio):
    g = chain_graph()
    t = RoutingTree.from_parent_map(2, {0: 2, 1: 0})
    led = ledger1000()
    la = expected_lifetime(0, t, led, unit_radio, g)
    lb = expected_lifetime(1, t, led, unit_radio, g)
    assert la == pytest.approx(1000.0 / 7.0, rel=1e-12)
    assert lb == pytest.approx(1000.0 / 3.0, rel=1e-12)
    est = min_expected_lifetime(t, led, unit_radio, g)
    assert est.l_min == la
    assert est.argmin == 0


def test_expected_lifetime_leaf_has_no_rx_term(unit_radio):
    g = chain_graph()
    t = RoutingTree.from_parent_map(2, {0: 2, 1: 0})
    led = ledger1000()
    w = edge_weight(unit_radio, g.distance(1, 0))
    assert expected_lifetime(1, t, led, unit_radio, g) == led[1] / w


def test_expected_lifetime_zero_residual(unit_radio):
    g = chain_graph()
    t = RoutingTree.from_parent_map(2, {0: 2, 1: 0})
    led = EnergyLedger(2, 0.0)
    assert expected_lifetime(1, t, led, unit_radio, g) == 0.0


def test_expected_lifetime_rejects_root(unit_radio):
    g = chain_graph()
    t = RoutingTree.from_parent_map(2, {0: 2, 1: 0})
    with pytest.raises(ValueError):
        expected_lifetime(2, t, ledger1000(), unit_radio, g)


def test_min_lifetime_tie_prefers_smallest_id(unit_radio):
    g = abstract_graph({(0, 2): 1.0, (1, 2): 1.0}, n=2)
    t = RoutingTree.from_parent_map(2, {0: 2, 1: 2})
    est = min_expected_lifetime(t, ledger1000(), unit_radio, g)
    assert est.per_node[0] == est.per_node[1]
    assert est.argmin == 0


def test_min_lifetime_single_sensor(unit_radio):
    g = abstract_graph({(0, 1): 2.0}, n=1)
    t = RoutingTree.from_parent_map(1, {0: 1})
    est = min_expected_lifetime(t, EnergyLedger(1, 1000.0), unit_radio, g)
    assert est.l_min == 1000.0 / edge_weight(unit_radio, 2.0)


def test_min_lifetime_matches_per_node_recomputation(unit_radio):
    _, g = random_connected(8, 50.0, seed=13)
    led = EnergyLedger(8, 1000.0)
    radio = unit_radio
    t = build_greedy_maxmin(g, led, radio)
    est = min_expected_lifetime(t, led, radio, g)
    recomputed = min(
        expected_lifetime(i, t, led, radio, g) for i in range(8)
    )
    assert est.l_min == recomputed


def test_greedy_worked_example(unit_radio):
    g = triangle_graph()
    led = ledger1000()
    t = build_greedy_maxmin(g, led, unit_radio)
    # step 1 attaches a directly (score 200 beats 111.1);
    # step 2 hangs b below a (142.857 beats 111.1 via the BS)
    assert t.parent == {0: 2, 1: 0}
    est = min_expected_lifetime(t, led, unit_radio, g)
    assert est.l_min == pytest.approx(1000.0 / 7.0, rel=1e-6)


def test_brute_force_enumerates_all_three_arborescences(unit_radio):
    g = triangle_graph()
    led = ledger1000()
    rx = rx_cost(unit_radio)

    def weight_of(i, p):
        return edge_weight(unit_radio, g.distance(i, p))

    neighbor_lists = [g.neighbor_ids(i) for i in range(2)]
    values = sorted(
        arborescence_min_lifetime(c, [led[0], led[1]], rx, weight_of)
        for c in enumerate_arborescences(2, 2, neighbor_lists)
    )
    assert values == pytest.approx(
        [1000.0 / 11.0, 1000.0 / 9.0, 1000.0 / 7.0], rel=1e-6
    )
    _, best = brute_force_optimal(g, led, unit_radio)
    assert best == pytest.approx(1000.0 / 7.0, rel=1e-6)


def test_greedy_attains_optimum_on_worked_example(unit_radio):
    g = triangle_graph()
    led = ledger1000()
    t = build_greedy_maxmin(g, led, unit_radio)
    greedy_lmin = min_expected_lifetime(t, led, unit_radio, g).l_min
    _, best = brute_force_optimal(g, led, unit_radio)
    assert greedy_lmin == best


def test_greedy_star_is_forced(unit_radio):
    g = abstract_graph({(0, 3): 1.0, (1, 3): 2.0, (2, 3): 3.0}, n=3)
    t = build_greedy_maxmin(g, EnergyLedger(3, 1000.0), unit_radio)
    assert t.parent == {0: 3, 1: 3, 2: 3}
    assert tree_depth(t) == 1


def test_greedy_disconnected_raises(unit_radio):
    g = abstract_graph({(0, 1): 1.0, (2, 3): 1.0}, n=3)  # sensor 0,1 islanded
    with pytest.raises(Disconnected):
        build_greedy_maxmin(g, EnergyLedger(3, 1000.0), unit_radio)


def test_greedy_is_valid_spanning_arborescence(paper_radio):
    for seed in range(10):
        n = 5 + seed * 3
        _, g = random_connected(n, 60.0, seed=seed)
        led = EnergyLedger(n, 0.25)
        t = build_greedy_maxmin(g, led, paper_radio)
        assert sorted(t.parent) == list(range(n))
        for i, p in t.parent.items():
            assert g.has_edge(i, p)
        assert t.in_degree == _indeg_of(t.parent, g.bs)
        assert tree_depth(t) == bfs_depth(t.parent, g.bs)


def _indeg_of(parent, root):
    indeg = {i: 0 for i in list(parent) + [root]}
    for p in parent.values():
        indeg[p] += 1
    return indeg


def test_greedy_never_beats_brute_force(paper_radio):
    for seed in range(25):
        n = 4 + seed % 5
        _, g = random_connected(n, 45.0, seed=100 + seed)
        led = EnergyLedger(n, 0.25)
        t = build_greedy_maxmin(g, led, paper_radio)
        greedy_lmin = min_expected_lifetime(t, led, paper_radio, g).l_min
        _, best = brute_force_optimal(g, led, paper_radio)
        assert greedy_lmin <= best


def test_baselines_never_beat_brute_force(paper_radio):
    for seed in range(10):
        n = 4 + seed % 4
        _, g = random_connected(n, 45.0, seed=300 + seed)
        led = EnergyLedger(n, 0.25)
        _, best = brute_force_optimal(g, led, paper_radio)
        for build in (build_mst, build_spt):
            t = build(g, paper_radio)
            assert min_expected_lifetime(t, led, paper_radio, g).l_min <= best


def test_brute_force_matches_naive_enumeration(paper_radio):
    rx = rx_cost(paper_radio)
    for seed in range(8):
        n = 3 + seed % 3
        _, g = random_connected(n, 45.0, seed=500 + seed)
        led = EnergyLedger(n, 0.25)

        def weight_of(i, p):
            return edge_weight(paper_radio, g.distance(i, p))

        neighbor_lists = [g.neighbor_ids(i) for i in range(n)]
        naive = max(
            arborescence_min_lifetime(
                c, [led[i] for i in range(n)], rx, weight_of
            )
            for c in enumerate_arborescences(n, g.bs, neighbor_lists)
        )
        _, best = brute_force_optimal(g, led, paper_radio)
        assert best == naive


def test_brute_force_size_cap(paper_radio):
    _, g = random_connected(10, 60.0, seed=1)
    with pytest.raises(TooLarge):
        brute_force_optimal(g, EnergyLedger(10, 0.25), paper_radio)


def test_greedy_scale_invariance(paper_radio):
    _, g = random_connected(15, 55.0, seed=77)
    trees = []
    for scale in (0.25, 0.5, 2.0, 8.0):
        led = EnergyLedger(15, scale)
        trees.append(build_greedy_maxmin(g, led, paper_radio).parent)
    assert all(t == trees[0] for t in trees)


def test_greedy_deterministic(paper_radio):
    _, g = random_connected(20, 55.0, seed=42)
    led = EnergyLedger(20, 0.25)
    a = build_greedy_maxmin(g, led, paper_radio)
    b = build_greedy_maxmin(g, led, paper_radio)
    assert a.parent == b.parent


def test_mst_triangle(unit_radio):
    g = abstract_graph({(0, 2): 1.0, (1, 2): 2.0, (0, 1): 1.5}, n=2)
    t = build_mst(g, unit_radio)
    # keeps the two lightest edges: (a,BS) weight 3 and (a,b) weight 4.25
    assert t.parent == {0: 2, 1: 0}


def test_mst_chain_is_unique_tree(paper_radio):
    _, g = make_chain(6)
    t = build_mst(g, paper_radio)
    assert t.parent == {0: 6, 1: 0, 2: 1, 3: 2, 4: 3, 5: 4}
    assert tree_depth(t) == 6


def test_mst_total_weight_matches_enumeration(paper_radio):
    for seed in range(8):
        n = 4 + seed % 4
        _, g = random_connected(n, 45.0, seed=700 + seed)

        def weight_of(i, p):
            return edge_weight(paper_radio, g.distance(i, p))

        neighbor_lists = [g.neighbor_ids(i) for i in range(n)]
        best = min(
            tree_total_weight(c, weight_of)
            for c in enumerate_arborescences(n, g.bs, neighbor_lists)
        )
        t = build_mst(g, paper_radio)
        total = sum(weight_of(i, p) for i, p in t.parent.items())
        assert total == pytest.approx(best, rel=1e-12)


def test_spt_routes_through_cheaper_relay(unit_radio):
    g = triangle_graph()
    t = build_spt(g, unit_radio)
    # b via a costs ~7 < 9 direct
    assert t.parent == {0: 2, 1: 0}


def test_spt_single_sensor(paper_radio):
    g = abstract_graph({(0, 1): 10.0}, n=1)
    t = build_spt(g, paper_radio)
    assert t.parent == {0: 1}


def test_spt_distances_match_bellman_ford(paper_radio):
    from oracles import bellman_ford

    for seed in range(8):
        n = 4 + seed % 5
        _, g = random_connected(n, 45.0, seed=900 + seed)
        weighted = [
            (i, j, edge_weight(paper_radio, g.distance(i, j)))
            for i, j in g.edge_set()
        ]
        dist = bellman_ford(g.node_count, weighted, g.bs)
        t = build_spt(g, paper_radio)
        for i in range(n):
            cost = 0.0
            u = i
            while u != g.bs:
                p = t.parent[u]
                cost += edge_weight(paper_radio, g.distance(u, p))
                u = p
            assert cost == pytest.approx(dist[i], rel=1e-12)


def test_tree_depth_examples(paper_radio):
    _, g = make_chain(5)
    assert tree_depth(build_mst(g, paper_radio)) == 5
    star = abstract_graph({(i, 4): 1.0 for i in range(4)}, n=4)
    assert tree_depth(build_mst(star, paper_radio)) == 1


def test_tree_json_shape():
    t = RoutingTree.from_parent_map(2, {0: 2, 1: 0})
    import json

    obj = json.loads(t.to_json())
    assert obj == {"root": "BS", "parent": {"0": 2, "1": 0}, "kappa": 2}


def test_parent_map_validation():
    with pytest.raises(ValueError):
        RoutingTree.from_parent_map(2, {0: 1, 1: 0})  # cycle, root unreached
