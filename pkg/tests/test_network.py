"""
Tests for graph parsing, generators and enumeration.
"""
import pytest

from src.services.errors import (
    DuplicateEdgeError,
    GraphError,
    GraphParameterError,
    GraphParseError,
    SelfLoopError,
    SizeError,
)
from src.services.network import (
    Graph,
    enumerate_trees,
    generate,
    is_maximal_independent,
    maximal_independent_sets,
    parse_edge_list,
)


class TestParsing:
    """Edge-list text input."""

    def test_path(self):
        g = parse_edge_list("1 2\n2 3")
        assert g.n == 3
        assert [g.degree(i) for i in g.nodes] == [1, 2, 1]

    def test_ten_node_graph(self, ten_node_graph):
        text = "\n".join(f"{u} {v}" for u, v in ten_node_graph.edges)
        g = parse_edge_list(text)
        assert g.n == 10
        assert g.extended_sizes().tolist() == [2, 2, 2, 5, 5, 5, 5, 4, 2, 2]

    def test_comments_and_header(self):
        g = parse_edge_list(b"# two edges and an isolated node\nn 4\n1 2  # first\n2 3\n")
        assert g.n == 4
        assert g.degree(4) == 0

    def test_self_loop(self):
        with pytest.raises(SelfLoopError) as exc:
            parse_edge_list("1 1")
        assert exc.value.line == 1

    def test_duplicate_edge_either_direction(self):
        with pytest.raises(DuplicateEdgeError) as exc:
            parse_edge_list("1 2\n2 1")
        assert "line 2" in str(exc.value)

    @pytest.mark.parametrize("text", ["1", "a b", "0 1", "n 2\n1 3", "n x"])
    def test_malformed(self, text):
        with pytest.raises(GraphParseError):
            parse_edge_list(text)

    def test_text_round_trip(self, ten_node_graph):
        assert parse_edge_list(ten_node_graph.to_edge_list_text()) == ten_node_graph


class TestGraph:
    """Graph accessors."""

    def test_from_edges_normalizes(self):
        g = Graph.from_edges(3, [(2, 1), (3, 2)])
        assert g.edges == ((1, 2), (2, 3))

    def test_from_edges_range(self):
        with pytest.raises(GraphError):
            Graph.from_edges(2, [(1, 3)])

    def test_closed_neighborhood(self, ten_node_graph):
        assert ten_node_graph.closed_neighborhood(8) == [7, 8, 9, 10]
        assert ten_node_graph.neighbors(1) == [4]

    def test_adjacency_is_symmetric(self, ten_node_graph):
        a = ten_node_graph.adjacency_matrix()
        assert (a == a.T).all()
        assert a.sum() == 2 * len(ten_node_graph.edges)

    def test_connectivity(self, ten_node_graph):
        assert ten_node_graph.is_connected()
        assert not generate("empty", 3).is_connected()


class TestGenerators:
    """Named topologies."""

    def test_cycle(self):
        g = generate("cycle", 6)
        assert set(g.extended_sizes().tolist()) == {3}

    def test_star_center_is_node_one(self):
        g = generate("star", 4)
        assert g.extended_size(1) == 4
        assert [g.extended_size(i) for i in (2, 3, 4)] == [2, 2, 2]

    def test_k_regular_matches_circulant_fixture(self, regular4_graph):
        g = generate("k_regular", 6, k=4)
        assert all(g.degree(i) == 4 for i in g.nodes)
        assert g == regular4_graph

    def test_odd_degree_regular(self):
        g = generate("k_regular", 6, k=3)
        assert all(g.degree(i) == 3 for i in g.nodes)

    def test_impossible_regular(self):
        with pytest.raises(GraphParameterError):
            generate("k_regular", 5, k=3)

    def test_k_required(self):
        with pytest.raises(GraphParameterError):
            generate("k_regular", 6)

    def test_small_cycle(self):
        with pytest.raises(GraphParameterError):
            generate("cycle", 2)

    def test_complete_and_path(self):
        assert len(generate("complete", 4).edges) == 6
        assert generate("path", 4).edges == ((1, 2), (2, 3), (3, 4))


class TestIndependentSets:
    """
    Maximal independent set enumeration.

    Why: Best shot equilibria are read straight off these sets; a missed
    set is a missed equilibrium.
    """

    def test_ten_node_contains_known_sets(self, ten_node_graph):
        sets = maximal_independent_sets(ten_node_graph)
        assert frozenset({1, 2, 3, 7, 9, 10}) in sets
        assert frozenset({2, 3, 4, 8}) in sets
        assert all(is_maximal_independent(ten_node_graph, s) for s in sets)

    def test_complete_graph_singletons(self):
        sets = maximal_independent_sets(generate("complete", 4))
        assert sets == [frozenset({1}), frozenset({2}), frozenset({3}), frozenset({4})]

    def test_limit(self, ten_node_graph):
        assert len(maximal_independent_sets(ten_node_graph, limit=2)) == 2

    def test_sampling_returns_maximal_sets(self):
        g = generate("cycle", 40)
        sets = maximal_independent_sets(g, limit=5, seed=1)
        assert 0 < len(sets) <= 5
        assert all(is_maximal_independent(g, s) for s in sets)

    def test_exact_cap(self):
        with pytest.raises(SizeError):
            maximal_independent_sets(generate("cycle", 31), exhaustive=True)

    def test_not_maximal(self, ten_node_graph):
        assert not is_maximal_independent(ten_node_graph, {1, 2})


class TestTrees:
    """
    Labeled tree enumeration.

    Why: The star-minimality experiment is exhaustive, so the tree count
    must match Cayley's formula exactly.
    """

    @pytest.mark.parametrize("n, count", [(3, 3), (4, 16), (5, 125)])
    def test_cayley_counts(self, n, count):
        trees = enumerate_trees(n)
        assert len(trees) == count
        assert all(len(t.edges) == n - 1 and t.is_connected() for t in trees)

    def test_stars_among_five_node_trees(self):
        stars = [t for t in enumerate_trees(5) if max(t.degree(i) for i in t.nodes) == 4]
        assert len(stars) == 5

    def test_cap(self):
        with pytest.raises(SizeError):
            enumerate_trees(9)
