import random

import networkx as nx
import pytest

from strongdeps.graph import DiGraph
from strongdeps.graphstats import GraphStats, format_stats_table, small_world_stats


def random_digraph(rng, n, p):
    g = DiGraph(range(n))
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                g.add_edge(u, v)
    return g


def reference_stats(g):
    d = nx.DiGraph()
    d.add_nodes_from(g.vertices)
    d.add_edges_from(g.edges())
    u = d.to_undirected()
    comps = list(nx.connected_components(u))
    largest = max(comps, key=len)
    sub = u.subgraph(largest)
    dist = nx.average_shortest_path_length(sub) if len(largest) > 1 else 0.0
    return nx.average_clustering(u), dist, len(comps), len(largest), nx.density(d)


def test_triangle():
    s = small_world_stats(DiGraph("abc", [("a", "b"), ("b", "c"), ("c", "a")]))
    assert s.clustering == 1.0 and s.average_distance == 1.0
    assert s.wcc_count == 1 and s.density == 0.5


def test_empty():
    assert small_world_stats(DiGraph()) == GraphStats()


@pytest.mark.parametrize("seed", range(20))
def test_against_networkx(seed):
    rng = random.Random(seed)
    g = random_digraph(rng, 50, rng.choice([0.01, 0.03, 0.06, 0.1]))
    s = small_world_stats(g)
    clustering, dist, wcc, largest, density = reference_stats(g)
    assert abs(s.clustering - clustering) <= 1e-9
    assert abs(s.average_distance - dist) <= 1e-9
    assert s.wcc_count == wcc and s.largest_wcc == largest
    assert abs(s.density - density) <= 1e-9
    assert s.average_degree == g.num_edges / 50


def test_relabel_invariance():
    rng = random.Random(4)
    g = random_digraph(rng, 30, 0.08)
    perm = list(range(30))
    rng.shuffle(perm)
    h = DiGraph([perm[v] for v in g.vertices], [(perm[a], perm[b]) for a, b in g.edges()])
    a, b = small_world_stats(g), small_world_stats(h)
    assert a.clustering == pytest.approx(b.clustering, abs=1e-12)
    assert a.average_distance == pytest.approx(b.average_distance, abs=1e-12)
    assert (a.wcc_count, a.largest_wcc, a.edges) == (b.wcc_count, b.largest_wcc, b.edges)


def test_sampled_distance_is_deterministic():
    rng = random.Random(6)
    g = random_digraph(rng, 60, 0.05)
    a = small_world_stats(g, max_exact=10, n_samples=20, seed=1)
    b = small_world_stats(g, max_exact=10, n_samples=20, seed=1)
    assert a == b
    exact = small_world_stats(g)
    assert abs(a.average_distance - exact.average_distance) < 1.0


def test_table_rows():
    text = format_stats_table({"Direct": small_world_stats(DiGraph("ab", [("a", "b")]))})
    labels = [line.split("|")[0].strip() for line in text.splitlines()[2:]]
    assert labels == [
        "Vertices",
        "Edges",
        "Average degree",
        "Clustering coeff.",
        "Average distance",
        "Components (WCCs)",
        "Largest WCC",
        "Density",
    ]
