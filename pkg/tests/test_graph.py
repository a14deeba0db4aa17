import numpy as np
import pytest

import blocklearn as bl
from conftest import random_graph
from oracles import brute_block_stats


def test_undirected_edges_canonical(tiny_graph):
    assert np.all(tiny_graph.edges[:, 0] <= tiny_graph.edges[:, 1])
    assert tiny_graph.num_edges == 7


def test_neighbors_symmetric(tiny_graph):
    for u, v in tiny_graph.edges:
        assert v in tiny_graph.neighbors(u)
        assert u in tiny_graph.neighbors(v)


def test_degree(tiny_graph, tiny_directed):
    assert tiny_graph.degree(2) == 3
    # node 3 has out {3, 0} plus in {2, 3}
    assert tiny_directed.degree(3) == 4


def test_duplicate_edge_rejected():
    with pytest.raises(bl.GraphError):
        bl.make_graph(3, [(0, 1), (1, 0)], directed=False)
    with pytest.raises(bl.GraphError):
        bl.make_graph(3, [(0, 1), (0, 1)], directed=True)


def test_self_loop_policy():
    with pytest.raises(bl.GraphError):
        bl.make_graph(3, [(1, 1)], directed=False)
    g = bl.make_graph(3, [(1, 1)], directed=True)
    assert g.allow_self_loops
    g2 = bl.make_graph(3, [(1, 1)], directed=False, allow_self_loops=True)
    assert g2.num_edges == 1


def test_endpoint_out_of_range():
    with pytest.raises(bl.GraphError):
        bl.make_graph(3, [(0, 3)], directed=False)


def test_block_stats_matches_bruteforce():
    rng = np.random.default_rng(11)
    for directed in (False, True):
        for trial in range(20):
            g = random_graph(rng, n=int(rng.integers(2, 9)), directed=directed)
            k = int(rng.integers(1, 4))
            labels = bl.Labeling(rng.integers(0, k, g.n), k)
            stats = bl.block_stats(g, labels)
            assert np.array_equal(stats.edge_counts, brute_block_stats(g, labels))
            assert np.array_equal(stats.group_sizes, np.bincount(labels.labels, minlength=k))


def test_pair_counts_undirected_no_selfloops():
    g = bl.make_graph(4, [(0, 1)], directed=False)
    labels = bl.Labeling(np.array([0, 0, 1, 1]), 2)
    N = bl.block_stats(g, labels).pair_counts()
    assert N[0, 0] == 1   # 2 choose 2
    assert N[0, 1] == 4
    assert N[1, 1] == 1
    assert N[1, 0] == 0   # lower triangle unused


def test_pair_counts_directed_selfloops():
    g = bl.make_graph(4, [(0, 1)], directed=True)
    labels = bl.Labeling(np.array([0, 0, 1, 1]), 2)
    N = bl.block_stats(g, labels).pair_counts()
    assert N[0, 0] == 4   # 2*2 ordered pairs incl. self-loops
    assert N[0, 1] == 4 and N[1, 0] == 4


def test_relabel_delta_matches_recount():
    rng = np.random.default_rng(5)
    for directed in (False, True):
        for trial in range(20):
            g = random_graph(rng, n=7, directed=directed)
            k = 3
            labels = bl.Labeling(rng.integers(0, k, g.n), k)
            stats = bl.block_stats(g, labels)
            v = int(rng.integers(g.n))
            new = int(rng.integers(k))
            moved = bl.relabel_delta(stats, g, labels, v, new)
            labels2 = labels.copy()
            labels2.labels[v] = new
            fresh = bl.block_stats(g, labels2)
            assert np.array_equal(moved.edge_counts, fresh.edge_counts)
            assert np.array_equal(moved.group_sizes, fresh.group_sizes)
            # original untouched
            assert np.array_equal(stats.edge_counts, bl.block_stats(g, labels).edge_counts)


def test_unexplored_subgraph(tiny_graph):
    partial = bl.PartialLabeling()
    partial.add(2, 0)
    partial.add(5, 1)
    sub, keep = bl.unexplored_subgraph(tiny_graph, partial)
    assert sub.n == 4
    assert list(keep) == [0, 1, 3, 4]
    # surviving edges: (0,1), (3,4) in original ids
    assert sub.num_edges == 2


def test_partial_labeling_rejects_duplicates():
    p = bl.PartialLabeling()
    p.add(1, 0)
    with pytest.raises(bl.LabelingError):
        p.add(1, 1)
