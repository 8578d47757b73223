import math
import random

import pytest

from tsgn import (
    TransactionGraph,
    build_directed_tsgn,
    build_multiple_tsgn,
    build_temporal_tsgn,
    build_tsgn,
    map_weight,
    undirected_projection,
)

from oracles import (
    TIME_VIOLATING_PAIRS,
    star_with_neighbor_trades_pairs,
    star_with_neighbor_trades,
    time_filtered_flow_graph,
    two_transaction_chains,
    head_to_tail_pairs,
    is_dag,
    random_digraph,
    random_multigraph,
    random_undirected_graph,
    shared_endpoint_pairs,
    time_ordered_pairs,
)


# ------------------------------------------------------------- weight mapping

def test_map_weight_zero_pair_is_exactly_zero():
    assert map_weight(0.0, 0.0) == 0.0


def test_map_weight_unit_pair():
    assert map_weight(1.0, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_map_weight_known_log_value():
    assert map_weight(2 * math.e, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_map_weight_is_symmetric_and_monotone():
    rnd = random.Random(42)
    prev = None
    for _ in range(2000):
        a, b = rnd.uniform(0, 50), rnd.uniform(0, 50)
        assert map_weight(a, b) == map_weight(b, a)
    # non-decreasing in a + b over the positive branch
    sums = sorted(rnd.uniform(1e-9, 100) for _ in range(500))
    values = [map_weight(s / 2, s / 2) for s in sums]
    assert all(x <= y for x, y in zip(values, values[1:]))


def test_map_weight_allows_negative_results():
    assert map_weight(0.5, 0.5) < 0
    assert map_weight(0.0, 2.0) == pytest.approx(0.0)  # log branch, not the zero case


# ------------------------------------------------------------------ plain map

def test_star_with_neighbor_trades_adjacency():
    t = build_tsgn(star_with_neighbor_trades())
    assert t.node_count == 7
    assert t.edge_pairs() == frozenset(star_with_neighbor_trades_pairs())


def test_single_edge_maps_to_single_isolated_node():
    g = TransactionGraph.build([("a", "b", 1)], "a", directed=False)
    t = build_tsgn(g)
    assert t.node_count == 1
    assert t.edge_count == 0


def test_triangle_maps_to_triangle():
    g = TransactionGraph.build(
        [("a", "b", 1), ("b", "c", 1), ("a", "c", 1)], "a", directed=False
    )
    t = build_tsgn(g)
    assert t.edge_pairs() == frozenset(shared_endpoint_pairs(g.edges))
    assert t.edge_count == 3


def test_edgeless_graph_maps_to_empty_tsgn():
    g = TransactionGraph.build([], "a", directed=False)
    t = build_tsgn(g)
    assert t.node_count == 0 and t.edge_count == 0


def test_plain_mapping_matches_brute_force_on_random_graphs():
    rnd = random.Random(7)
    for _ in range(300):
        g = random_undirected_graph(rnd)
        t = build_tsgn(g)
        assert t.edge_pairs() == frozenset(shared_endpoint_pairs(g.edges))
        assert t.node_count == g.edge_count


def test_plain_mapping_projects_directed_input_first():
    rnd = random.Random(8)
    for _ in range(100):
        g = random_multigraph(rnd)
        t = build_tsgn(g)
        plain = undirected_projection(g)
        assert t.node_count == plain.edge_count
        assert t.edge_pairs() == frozenset(shared_endpoint_pairs(plain.edges))


def test_plain_edge_weights_use_map_weight():
    g = TransactionGraph.build(
        [("a", "b", 2), ("b", "c", 6)], "b", directed=False
    )
    t = build_tsgn(g)
    assert t.edge_count == 1
    assert t.edges[0][2] == pytest.approx(math.log(4.0))


# --------------------------------------------------------------- directed map

def test_directed_chain_yields_single_edge():
    g = TransactionGraph.build([("a", "b", 1), ("b", "c", 1)], "b")
    t = build_directed_tsgn(g)
    assert t.edge_pairs() == frozenset({(0, 1)})


def test_shared_source_yields_no_edge():
    g = TransactionGraph.build([("a", "b", 1), ("a", "c", 1)], "a")
    assert build_directed_tsgn(g).edge_count == 0


def test_antiparallel_pair_yields_two_cycle():
    g = TransactionGraph.build([("a", "b", 1), ("b", "a", 1)], "a")
    t = build_directed_tsgn(g)
    assert t.edge_pairs() == frozenset({(0, 1), (1, 0)})


def test_directed_mapping_rejects_undirected_input():
    g = TransactionGraph.build([("a", "b", 1)], "a", directed=False)
    with pytest.raises(ValueError, match="direction attribute required"):
        build_directed_tsgn(g)


def test_directed_mapping_rejects_multiedge_input():
    g = TransactionGraph.build(
        [("a", "b", 1, 1), ("a", "b", 1, 2)], "a", temporal=True, multiedge=True
    )
    with pytest.raises(ValueError, match="simple graph required"):
        build_directed_tsgn(g)


def test_directed_mapping_matches_brute_force_on_random_graphs():
    rnd = random.Random(11)
    for _ in range(300):
        g = random_digraph(rnd)
        t = build_directed_tsgn(g)
        assert t.edge_pairs() == frozenset(head_to_tail_pairs(g.edges))
        assert t.node_count == g.edge_count


# --------------------------------------------------------------- temporal map

def test_time_ordered_chain_is_kept():
    g = TransactionGraph.build(
        [("v1", "v2", 1, 4), ("v2", "v3", 1, 7)], "v2", temporal=True
    )
    assert build_temporal_tsgn(g).edge_pairs() == frozenset({(0, 1)})


def test_time_reversed_chain_is_dropped():
    g = TransactionGraph.build(
        [("v1", "v2", 1, 7), ("v2", "v3", 1, 4)], "v2", temporal=True
    )
    assert build_temporal_tsgn(g).edge_count == 0


def test_equal_timestamps_yield_no_edge():
    g = TransactionGraph.build(
        [("v1", "v2", 1, 4), ("v2", "v3", 1, 4)], "v2", temporal=True
    )
    assert build_temporal_tsgn(g).edge_count == 0


def test_time_filter_drops_exactly_the_late_pairs():
    g = time_filtered_flow_graph()
    directed = build_directed_tsgn(g).edge_pairs()
    temporal = build_temporal_tsgn(g).edge_pairs()
    assert TIME_VIOLATING_PAIRS <= directed
    assert directed - temporal == TIME_VIOLATING_PAIRS
    assert {(0, 1), (2, 4)} <= temporal  # the (t1,t2) and (t3,t5) flows survive


def test_two_transaction_chains():
    chains = two_transaction_chains()
    results = {key: build_temporal_tsgn(g).edge_count for key, g in chains.items()}
    assert results == {"a": 1, "b": 0, "c": 0, "d": 0}


def test_temporal_mapping_requires_timestamps():
    g = TransactionGraph.build(
        [("a", "b", 1, 4), ("b", "c", 1)], "a", temporal=True
    )
    with pytest.raises(ValueError, match=r"edge 1 \(b->c\) has no timestamp"):
        build_temporal_tsgn(g)


def test_temporal_mapping_requires_temporal_flag():
    g = TransactionGraph.build([("a", "b", 1)], "a")
    with pytest.raises(ValueError, match="temporal attribute required"):
        build_temporal_tsgn(g)


def test_temporal_subset_of_directed_and_acyclic():
    rnd = random.Random(13)
    for _ in range(300):
        g = random_digraph(rnd, temporal=True)
        directed = build_directed_tsgn(g)
        temporal = build_temporal_tsgn(g)
        assert temporal.edge_pairs() <= directed.edge_pairs()
        assert temporal.edge_count <= directed.edge_count
        ids = [r.edge_id for r in temporal.nodes]
        assert is_dag(ids, temporal.edge_pairs())
        assert temporal.edge_pairs() == frozenset(time_ordered_pairs(g.edges))


# --------------------------------------------------------------- multiple map

def test_parallel_edges_each_get_a_node():
    g = TransactionGraph.build(
        [("a", "b", 1, 1), ("a", "b", 1, 5), ("b", "c", 1, 9)],
        "a",
        temporal=True,
        multiedge=True,
    )
    t = build_multiple_tsgn(g)
    assert t.node_count == 3
    assert t.edge_pairs() == frozenset({(0, 2), (1, 2)})


def test_antiparallel_loop_is_broken_by_timestamps():
    g = TransactionGraph.build(
        [("a", "b", 1, 1), ("b", "a", 1, 3)], "a", temporal=True, multiedge=True
    )
    t = build_multiple_tsgn(g)
    assert t.edge_pairs() == frozenset({(0, 1)})


def test_multiple_reduces_to_temporal_on_simple_graphs():
    rnd = random.Random(17)
    for _ in range(100):
        g = random_digraph(rnd, temporal=True)
        assert build_multiple_tsgn(g).edges == build_temporal_tsgn(g).edges


def test_multiple_mapping_matches_brute_force_and_is_acyclic():
    rnd = random.Random(19)
    for _ in range(300):
        g = random_multigraph(rnd)
        t = build_multiple_tsgn(g)
        assert t.node_count == g.edge_count
        assert t.edge_pairs() == frozenset(time_ordered_pairs(g.edges))
        assert is_dag([r.edge_id for r in t.nodes], t.edge_pairs())


def test_mapped_outputs_are_deterministically_ordered():
    rnd = random.Random(23)
    for _ in range(50):
        g = random_multigraph(rnd)
        t1 = build_multiple_tsgn(g)
        t2 = build_multiple_tsgn(g)
        assert t1 == t2
        assert list(t1.edges) == sorted(t1.edges)
        ids = [r.edge_id for r in t1.nodes]
        assert ids == sorted(ids)
