import itertools

import networkx as nx
import numpy as np
import pytest

from conftest import complete_graph, cycle_graph, path_graph, random_graph
from netemd.graph import Graph
from netemd.orbits import (N_GRAPHLETS, N_ORBITS, ego_graphlet_counts, graphlet_catalogue, graphlet_census,
                           lookup_tables, orbit_counts)
from oracles import brute_force_orbits, to_networkx


def _nx_graphlet(gl):
    h = nx.Graph()
    h.add_nodes_from(range(gl.size))
    h.add_edges_from(gl.edges)
    return h


class TestCatalogue:
    def test_sizes(self):
        cat = graphlet_catalogue()
        assert [gl.id for gl in cat] == list(range(30))
        for size in range(2, 6):
            assert sum(gl.size <= size for gl in cat) == N_GRAPHLETS[size]
            assert max(o for gl in cat if gl.size <= size for o in gl.node_orbits) + 1 == N_ORBITS[size]

    def test_every_connected_graph_listed_once(self):
        atlas = [g for g in nx.graph_atlas_g() if 2 <= g.number_of_nodes() <= 5 and nx.is_connected(g)]
        cat = [_nx_graphlet(gl) for gl in graphlet_catalogue()]
        assert len(atlas) == len(cat) == 30
        for g in atlas:
            assert sum(nx.is_isomorphic(g, h) for h in cat) == 1

    def test_orbits_are_automorphism_classes(self):
        seen = set()
        for gl in graphlet_catalogue():
            h = _nx_graphlet(gl)
            classes = {v: {v} for v in h}
            for m in nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter():
                for v, w in m.items():
                    classes[v].add(w)
            for v in h:
                same = {w for w in h if gl.node_orbits[w] == gl.node_orbits[v]}
                assert same == classes[v]
            ids = set(gl.node_orbits)
            assert not ids & seen, "orbit ids must not be shared across graphlets"
            seen |= ids
        assert seen == set(range(73))

    def test_small_orbit_numbering(self):
        # the standard 0-14 numbering: read off each orbit's degree inside its graphlet
        expect = {0: 1, 1: 1, 2: 2, 3: 2, 4: 1, 5: 2, 6: 1, 7: 3, 8: 2, 9: 1, 10: 2, 11: 3, 12: 2, 13: 3, 14: 3}
        for gl in graphlet_catalogue()[:9]:
            h = _nx_graphlet(gl)
            for v, o in enumerate(gl.node_orbits):
                assert h.degree(v) == expect[o]

    def test_lookup_covers_all_labelled_connected_graphs(self):
        _, graphlet_of = lookup_tables()
        for size in range(2, 6):
            pairs = list(itertools.combinations(range(size), 2))
            n_connected = 0
            for bits in itertools.product([0, 1], repeat=len(pairs)):
                h = nx.empty_graph(size)
                h.add_edges_from(itertools.compress(pairs, bits))
                n_connected += nx.is_connected(h)
            # labelled connected graphs on 2..5 nodes: 1, 4, 38, 728
            assert int((graphlet_of[size] >= 0).sum()) == n_connected


def test_triangle_and_path():
    t = orbit_counts(complete_graph(3), 3).counts
    assert t.tolist() == [[2, 0, 0, 1]] * 3
    p = orbit_counts(path_graph(3), 3).counts
    assert p[1].tolist() == [2, 0, 1, 0]
    assert p[0].tolist() == [1, 1, 0, 0]


def test_table_shapes():
    g = cycle_graph(6)
    for size, cols in ((2, 1), (3, 4), (4, 15), (5, 73)):
        tab = orbit_counts(g, size)
        assert tab.counts.shape == (6, cols)
        assert tab.orbit_ids == list(range(cols))
    with pytest.raises(ValueError):
        orbit_counts(g, 6)


def test_matches_brute_force(rng):
    for seed in range(12):
        g = random_graph(int(rng.integers(5, 12)), float(rng.uniform(0.2, 0.6)), rng)
        counts, census = brute_force_orbits(g, 5)
        assert np.array_equal(orbit_counts(g, 5).counts, counts)
        assert np.array_equal(graphlet_census(g, 5), census)


def test_smaller_caps_are_column_prefixes(rng):
    g = random_graph(12, 0.3, rng)
    full = orbit_counts(g, 5).counts
    for size in (2, 3, 4):
        assert np.array_equal(orbit_counts(g, size).counts, full[:, :N_ORBITS[size]])


def test_orbit_sums_match_census(rng):
    g = random_graph(14, 0.35, rng)
    counts = orbit_counts(g, 5).counts
    census = graphlet_census(g, 5)
    for gl in graphlet_catalogue():
        for o in set(gl.node_orbits):
            assert counts[:, o].sum() == census[gl.id] * gl.node_orbits.count(o)


def test_known_identities(rng):
    g = random_graph(25, 0.2, rng)
    c = orbit_counts(g, 4).counts
    deg = g.degrees()
    assert np.array_equal(c[:, 0], deg)
    tri = nx.triangles(to_networkx(g))
    assert c[:, 3].tolist() == [tri[v] for v in range(g.node_count)]
    # every pair of neighbours is either a 2-path centred at v or closes a triangle
    assert np.array_equal(c[:, 2] + c[:, 3], deg * (deg - 1) // 2)


def test_isolated_nodes_and_empty_graph():
    g = Graph.from_edges(5, [(0, 1)])
    c = orbit_counts(g, 5).counts
    assert c[2:].sum() == 0 and c[0, 0] == 1
    assert orbit_counts(Graph.from_edges(0, []), 4).counts.shape == (0, 15)


def test_relabelling_permutes_rows(rng):
    g = random_graph(12, 0.4, rng)
    perm = rng.permutation(12)
    a = orbit_counts(g, 5).counts
    b = orbit_counts(g.relabel(perm), 5).counts
    assert np.array_equal(b[perm], a)


def test_complete_graph_single_orbit():
    c = orbit_counts(complete_graph(7), 5).counts
    assert np.all(c == c[0])
    assert c[0, 0] == 6 and c[0, 3] == 15 and c[0, 14] == 20 and c[0, 72] == 15
    assert c[0].sum() == 6 + 15 + 20 + 15


class TestEgo:
    def test_complete_graph(self):
        e = ego_graphlet_counts(complete_graph(4))
        assert e.shape == (4, 9)
        assert e[0].tolist() == [6, 0, 4, 0, 0, 0, 0, 0, 1]

    def test_path_centre(self):
        e = ego_graphlet_counts(path_graph(3))
        assert e[1].tolist()[:2] == [2, 1]
        assert e[0].tolist()[:2] == [1, 0]

    def test_matches_brute_force(self, rng):
        from netemd.graph import ego_network
        for _ in range(4):
            g = random_graph(10, 0.4, rng)
            e = ego_graphlet_counts(g)
            for v in range(10):
                _, census = brute_force_orbits(ego_network(g, v), 4)
                assert np.array_equal(e[v], census)
