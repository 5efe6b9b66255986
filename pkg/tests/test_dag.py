import pytest
from hypothesis import given

from conftest import dags, dags_with_subset
from transit_clusters.dag import (
    Dag,
    connected_components,
    edge_cut_subgraph,
    induced_subgraph,
    parse_graph,
    relatives,
    serialize_graph,
)
from transit_clusters.errors import CycleDetected, DuplicateVertexLabel, GraphSyntaxError, SelfLoop, UnknownVertex
from transit_clusters.fixtures import NAMES, fixture_path, load, path_graph

G1 = "a -> b\nc1 -> b\nc2 -> b\nc1 -> a\nc2 -> a\n"


class TestParse:
    def test_single_node(self):
        g = parse_graph("node a")
        assert g.labels == ("a",) and g.edges == ()

    def test_fig1_g1(self):
        g = parse_graph(G1)
        assert g.labels == ("a", "b", "c1", "c2")
        assert g.label_edges() == {("a", "b"), ("c1", "b"), ("c2", "b"), ("c1", "a"), ("c2", "a")}

    def test_two_cycle(self):
        with pytest.raises(CycleDetected) as info:
            parse_graph("a -> b\nb -> a")
        assert set(info.value.cycle) == {"a", "b"}

    def test_declared_then_first_mention(self):
        g = parse_graph("# header\nnode z\n\nb -> a\nlatent u\nu -> b\n")
        assert g.labels == ("z", "u", "b", "a")
        assert g.names(g.latent) == ["u"]

    @pytest.mark.parametrize(
        "text, error",
        [
            ("a -> a", SelfLoop),
            ("node a\nnode a", DuplicateVertexLabel),
            ("a -> b -> c", GraphSyntaxError),
            ("edge a b", GraphSyntaxError),
            ("node #x", GraphSyntaxError),
        ],
    )
    def test_errors(self, text, error):
        with pytest.raises(error):
            parse_graph(text)

    def test_syntax_error_has_line(self):
        with pytest.raises(GraphSyntaxError) as info:
            parse_graph("a -> b\n\nbogus line here")
        assert info.value.line == 3

    def test_longer_cycle_is_named(self):
        with pytest.raises(CycleDetected) as info:
            parse_graph("a -> b\nb -> c\nc -> d\nd -> b")
        assert set(info.value.cycle) == {"b", "c", "d"}

    @pytest.mark.parametrize("name", NAMES)
    def test_fixture_round_trip(self, name):
        g = load(name)
        again = parse_graph(serialize_graph(g))
        assert again == g and again.labels == g.labels

    @given(dags(1, 10, connected=False))
    def test_round_trip(self, g):
        again = parse_graph(serialize_graph(g))
        assert again.labels == g.labels and again.edges == g.edges


class TestRelatives:
    def test_fig3a_parents(self):
        g = load("fig3a")
        assert relatives(g, g.mask("e1"), "parents", False) == g.mask("r1")

    def test_empty(self):
        g = load("fig3a")
        assert relatives(g, 0, "ancestors", True) == 0

    def test_path(self):
        g = path_graph(3)
        assert relatives(g, g.mask("v3"), "ancestors", False) == g.mask("v1,v2")
        assert relatives(g, g.mask("v1"), "descendants", True) == g.full

    def test_neighbors_and_connected(self):
        g = parse_graph("a -> b\nc -> b\nnode d")
        assert relatives(g, g.mask("a"), "neighbors", False) == g.mask("b")
        assert relatives(g, g.mask("a"), "connected", True) == g.mask("a,b,c")

    def test_unknown(self):
        g = path_graph(3)
        with pytest.raises(UnknownVertex):
            relatives(g, 1 << 7, "parents", True)
        with pytest.raises(UnknownVertex):
            g.mask("nope")

    @given(dags_with_subset(1, 9))
    def test_ancestors_closed(self, gs):
        g, a = gs
        an = relatives(g, a, "ancestors", True)
        assert an & a == a
        assert relatives(g, an, "ancestors", True) == an

    @given(dags(1, 9, connected=False))
    def test_ancestor_descendant_converse(self, g):
        for v in range(g.n):
            for w in range(g.n):
                down = relatives(g, 1 << v, "descendants", True) >> w & 1
                up = relatives(g, 1 << w, "ancestors", True) >> v & 1
                assert down == up


class TestSubgraphs:
    def test_induced_no_edges(self):
        g = parse_graph(G1)
        sub = induced_subgraph(g, g.mask("c1,c2"))
        assert sub.labels == ("c1", "c2") and sub.edges == ()

    def test_induced_identity(self):
        g = load("fig3a")
        assert induced_subgraph(g, g.full) == g

    def test_induced_fig3a(self):
        g = load("fig3a")
        sub = induced_subgraph(g, g.mask("r1,r2,r3,e1,e2"))
        assert sub.label_edges() == {("r2", "r1"), ("r3", "r2"), ("r1", "e1"), ("e1", "e2")}

    def test_cut_identity(self):
        g = load("fig3a")
        assert edge_cut_subgraph(g, 0, 0) == g

    def test_cut_fig3a(self):
        # every edge into a receiver or out of an emitter goes, including r2->r1 and r3->r2
        g = load("fig3a")
        cut = edge_cut_subgraph(g, g.mask("r1,r2,r3"), g.mask("e1,e2"))
        assert cut.label_edges() == {("r1", "e1")}

    def test_cut_single_edge(self):
        g = parse_graph("a -> b")
        assert edge_cut_subgraph(g, g.mask("b"), 0).edges == ()

    @given(dags_with_subset(1, 8), dags_with_subset(1, 8))
    def test_cut_subset_and_idempotent(self, ga, gb):
        g, a = ga
        b = gb[1] & g.full
        once = edge_cut_subgraph(g, a, b)
        assert once.label_edges() <= g.label_edges()
        assert edge_cut_subgraph(once, a, b) == once


class TestComponents:
    def test_single(self):
        assert connected_components(Dag(["a"])) == [1]

    def test_fig1(self):
        g = parse_graph(G1)
        assert connected_components(g) == [g.full]

    def test_two_islands(self):
        g = parse_graph("a -> b\nc -> d")
        assert connected_components(g) == [g.mask("a,b"), g.mask("c,d")]

    @given(dags(1, 10, connected=False))
    def test_partition(self, g):
        comps = connected_components(g)
        union = 0
        for c in comps:
            assert not union & c
            union |= c
            assert relatives(g, c & -c, "connected", True) == c
        assert union == g.full
        assert comps == sorted(comps, key=lambda m: m & -m)


def test_fixture_files_exist():
    for name in NAMES:
        assert fixture_path(name).is_file()
