import itertools
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import naive
from conftest import causal_diagrams
from transit_clusters.bits import iter_bits
from transit_clusters.dag import Dag, connected_components, parse_graph
from transit_clusters.causal import (
    CausalQuery,
    c_components,
    classify_cluster,
    cluster_diagram,
    d_separated,
    identifiable,
    latent_project,
    preservation_report,
    validate_causal_diagram,
)
from transit_clusters.enumeration import brute_force_transit_clusters
from transit_clusters.errors import (
    ClusterIntersectsQuery,
    InvalidCausalDiagram,
    LatentChildLatent,
    LatentHasParent,
    LatentTooManyChildren,
    NotATransitCluster,
    QueryOutsideObserved,
    SetsOverlap,
)
from transit_clusters.extension import apply_extension
from transit_clusters.fixtures import load
from transit_clusters.random_graphs import random_extension_op


def diagram(name):
    return validate_causal_diagram(load(name))


def query(d, outcome, treatment):
    return CausalQuery.from_labels(d, outcome.split(","), treatment.split(","))


def blocks(d):
    return sorted(d.dag.format_set(b) for b in c_components(d))


class TestValidation:
    def test_fig5a(self):
        d = diagram("fig5a")
        assert d.dag.format_set(d.latent) == "u1,u2"

    def test_all_observed(self):
        d = validate_causal_diagram(parse_graph("a -> b\nb -> c"))
        assert d.latent == 0 and d.observed == d.dag.full

    def test_explicit_labels(self):
        g = parse_graph("u -> a\nu -> b\na -> b")
        assert validate_causal_diagram(g, {"u"}).latent == g.mask("u")

    def test_latent_child_latent(self):
        g = parse_graph("u -> v\nv -> a")
        with pytest.raises(LatentChildLatent):
            validate_causal_diagram(g, {"u", "v"})

    def test_latent_has_parent(self):
        with pytest.raises(LatentHasParent):
            validate_causal_diagram(parse_graph("a -> u\nu -> b"), {"u"})

    def test_too_many_children(self):
        with pytest.raises(LatentTooManyChildren):
            validate_causal_diagram(parse_graph("u -> a\nu -> b\nu -> c"), {"u"})


class TestComponents:
    def test_fig5a(self):
        assert blocks(diagram("fig5a")) == ["a,b,r,u1,u2", "e"]

    def test_fig1_g2(self):
        assert blocks(diagram("fig1_g2")) == ["a,b,u", "c1", "c2"]

    def test_no_latents(self):
        d = validate_causal_diagram(parse_graph("a -> b\nb -> c"))
        assert blocks(d) == ["a", "b", "c"]


class TestProjection:
    def test_fig5a(self):
        p = latent_project(diagram("fig5a"))
        assert p.directed.label_edges() == {("r", "e"), ("e", "b"), ("b", "a")}
        assert p.bidirected == {("b", "r"), ("a", "r")}

    def test_fig4(self):
        p = latent_project(diagram("fig4"))
        assert p.directed.label_edges() == {("b", "t"), ("t", "a")}
        assert p.bidirected == {("a", "b")}

    def test_no_latents(self):
        g = parse_graph("a -> b\nb -> c")
        p = latent_project(validate_causal_diagram(g))
        assert p.bidirected == frozenset() and p.directed.label_edges() == g.label_edges()

    def test_single_child_latent_dropped(self):
        g = parse_graph("latent u\nu -> a\na -> b")
        p = latent_project(validate_causal_diagram(g))
        assert p.bidirected == frozenset() and p.directed.labels == ("a", "b")


class TestDSeparation:
    def test_chain(self):
        g = parse_graph("a -> b\nb -> c")
        assert d_separated(g, g.mask("a"), g.mask("c"), g.mask("b"))
        assert not d_separated(g, g.mask("a"), g.mask("c"), 0)

    def test_collider(self):
        g = parse_graph("a -> b\nc -> b")
        assert d_separated(g, g.mask("a"), g.mask("c"), 0)
        assert not d_separated(g, g.mask("a"), g.mask("c"), g.mask("b"))

    def test_fig4(self):
        d = diagram("fig4")
        g = d.dag
        assert d_separated(d, g.mask("b"), g.mask("a"), g.mask("t,u"))
        assert not d_separated(d, g.mask("b"), g.mask("a"), g.mask("t"))

    def test_overlap(self):
        g = parse_graph("a -> b")
        with pytest.raises(SetsOverlap):
            d_separated(g, g.mask("a"), g.mask("a"), 0)


class TestClassify:
    def test_fig1_g2(self):
        d = diagram("fig1_g2")
        cls = classify_cluster(d, d.dag.mask("c1,c2"))
        assert cls.plain and str(cls).startswith("plain=true")

    def test_fig5a(self):
        d = diagram("fig5a")
        assert str(classify_cluster(d, d.dag.mask("r,e"))) == "plain=false congested=false"

    def test_all_observed(self):
        g = load("fig3a")
        d = validate_causal_diagram(g)
        for e in brute_force_transit_clusters(g):
            assert classify_cluster(d, e.cluster).plain

    def test_not_cluster(self):
        d = diagram("fig1_g2")
        with pytest.raises(NotATransitCluster):
            classify_cluster(d, d.dag.mask("a,c2"))


class TestIdentify:
    def test_fig5a(self):
        d = diagram("fig5a")
        assert identifiable(d, query(d, "a", "b")).decision
        d2, _ = cluster_diagram(d, d.dag.mask("r,e"), "t")
        res = identifiable(d2, query(d2, "a", "b"))
        assert not res.decision and res.witness is not None

    def test_fig5b(self):
        d = diagram("fig5b")
        assert identifiable(d, query(d, "a1,a2", "b1,b2")).decision
        d2, _ = cluster_diagram(d, d.dag.mask("r,e"), "t")
        assert not identifiable(d2, query(d2, "a1,a2", "b1,b2")).decision

    @pytest.mark.parametrize("outcome, treatment", [("b", "a"), ("a", "b")])
    def test_fig1_g2(self, outcome, treatment):
        d = diagram("fig1_g2")
        assert identifiable(d, query(d, outcome, treatment)).decision
        d2, _ = cluster_diagram(d, d.dag.mask("c1,c2"), "t")
        assert identifiable(d2, query(d2, outcome, treatment)).decision

    def test_fig4(self):
        d = diagram("fig4")
        assert identifiable(d, query(d, "a", "b")).decision

    def test_bow(self):
        d = validate_causal_diagram(parse_graph("latent u\nx -> y\nu -> x\nu -> y"))
        res = identifiable(d, query(d, "y", "x"))
        assert not res.decision
        g = d.dag
        assert res.witness.describe(g) == "root_set: y\nlarger_forest: x,y\nsmaller_forest: y"

    def test_query_errors(self):
        d = diagram("fig4")
        with pytest.raises(QueryOutsideObserved):
            identifiable(d, query(d, "u", "b"))
        with pytest.raises(QueryOutsideObserved):
            identifiable(d, CausalQuery(d.dag.mask("a"), 0))
        with pytest.raises(SetsOverlap):
            identifiable(d, query(d, "a", "a"))


class TestPreservation:
    def test_fig1_g2(self):
        d = diagram("fig1_g2")
        rep = preservation_report(d, d.dag.mask("c1,c2"), query(d, "a", "b"))
        assert rep.theorem_applies and rep.id_original and rep.id_clustered and rep.consistent

    def test_fig5a(self):
        d = diagram("fig5a")
        rep = preservation_report(d, d.dag.mask("r,e"), query(d, "a", "b"))
        assert (rep.theorem_applies, rep.id_original, rep.id_clustered, rep.consistent) == (False, True, False, True)

    def test_fig5b(self):
        d = diagram("fig5b")
        rep = preservation_report(d, d.dag.mask("r,e"), query(d, "a1,a2", "b1,b2"))
        assert (rep.theorem_applies, rep.id_original, rep.id_clustered) == (False, True, False)

    def test_intersects(self):
        d = diagram("fig5a")
        with pytest.raises(ClusterIntersectsQuery):
            preservation_report(d, d.dag.mask("r,e"), query(d, "e", "b"))


# --- properties ----------------------------------------------------------------


def random_query(d, rnd):
    obs = list(iter_bits(d.observed))
    rnd.shuffle(obs)
    if len(obs) < 2:
        return None
    k = rnd.randint(1, len(obs) - 1)
    a = obs[: rnd.randint(1, k)]
    b = obs[k : k + rnd.randint(1, len(obs) - k)]
    return CausalQuery(sum(1 << v for v in a), sum(1 << v for v in b))


@given(causal_diagrams(6, 4), st.randoms(use_true_random=False))
def test_identify_matches_hedge_search(g, rnd):
    d = validate_causal_diagram(g)
    q = random_query(d, rnd)
    assume(q is not None)
    adm = latent_project(d)
    h = adm.directed
    hedge = naive.has_hedge(h.labels, h.label_edges(), adm.bidirected, g.names(q.outcome), g.names(q.treatment))
    assert identifiable(d, q).decision == (not hedge)


@given(causal_diagrams(7, 4), st.randoms(use_true_random=False))
def test_hedge_witness(g, rnd):
    d = validate_causal_diagram(g)
    q = random_query(d, rnd)
    assume(q is not None)
    res = identifiable(d, q)
    if res.decision:
        assert res.witness is None
        return
    w = res.witness
    assert w.smaller_forest & ~w.larger_forest == 0
    assert w.larger_forest & q.treatment and not w.smaller_forest & q.treatment
    assert w.root_set and w.root_set & ~w.smaller_forest == 0
    cut = Dag(g.labels, [(u, v) for u, v in g.edges if not q.treatment >> v & 1])
    assert w.root_set & ~cut.ancestors(q.outcome) == 0


@given(causal_diagrams(6, 3), st.randoms(use_true_random=False))
def test_relabel_invariance(g, rnd):
    d = validate_causal_diagram(g)
    q = random_query(d, rnd)
    assume(q is not None)
    names = list(g.labels)
    new = [f"w{k}" for k in range(g.n)]
    rnd.shuffle(new)
    rename = dict(zip(names, new))
    g2 = Dag([rename[a] for a in names], g.edges, g.latent)
    d2 = validate_causal_diagram(g2)
    q2 = CausalQuery(q.outcome, q.treatment)
    assert identifiable(d, q).decision == identifiable(d2, q2).decision


@given(causal_diagrams(6, 3))
def test_c_components_match_paths(g):
    d = validate_causal_diagram(g)
    latent = set(g.names(d.latent))
    block_of = {v: b for b in c_components(d) for v in iter_bits(b)}
    obs = list(iter_bits(d.observed))
    for i, j in itertools.combinations(obs, 2):
        linked = naive.c_linked(list(g.labels), g.label_edges(), latent, g.labels[i], g.labels[j])
        assert linked == (block_of[i] == block_of[j])


@given(causal_diagrams(7, 4))
def test_c_components_refine_weak_components(g):
    d = validate_causal_diagram(g)
    parts = c_components(d)
    assert sum(parts) == g.full and all(a & b == 0 for a, b in itertools.combinations(parts, 2))
    weak = connected_components(g)
    assert all(any(b & ~w == 0 for w in weak) for b in parts)
    plain = validate_causal_diagram(Dag(g.labels, g.edges), set())
    assert all(bin(b).count("1") == 1 for b in c_components(plain))


@given(causal_diagrams(5, 3), st.randoms(use_true_random=False))
def test_d_separation_matches_paths(g, rnd):
    vs = list(range(g.n))
    rnd.shuffle(vs)
    k1 = rnd.randint(1, g.n - 1)
    x, rest = vs[:k1], vs[k1:]
    y = rest[: max(1, len(rest) // 2)] if rest else []
    z = [v for v in rest[len(y) :] if rnd.random() < 0.5]
    assume(y)
    mask = lambda s: sum(1 << v for v in s)  # noqa: E731
    ours = d_separated(g, mask(x), mask(y), mask(z))
    ref = naive.d_separated(
        list(g.labels), g.label_edges(), set(g.names(mask(x))), set(g.names(mask(y))), set(g.names(mask(z)))
    )
    assert ours == ref


def preservation_cases(g, rnd):
    d = validate_causal_diagram(g)
    q = random_query(d, rnd)
    if q is None:
        return d, None, []
    used = q.outcome | q.treatment
    cases = [e.cluster for e in brute_force_transit_clusters(g, g.full & ~used)]
    return d, q, cases


@given(causal_diagrams(7, 4), st.randoms(use_true_random=False))
def test_preservation_theorem(g, rnd):
    d, q, cases = preservation_cases(g, rnd)
    assume(q is not None and cases)
    for t in cases:
        rep = preservation_report(d, t, q)
        assert rep.consistent


def test_preservation_sweep_seeded():
    from transit_clusters.random_graphs import random_causal_diagram

    rng = random.Random(11)
    applied = 0
    for _ in range(150):
        g = random_causal_diagram(rng.randint(3, 7), rng.randint(0, 4), rng.choice([0.2, 0.4, 0.6]), rng)
        d, q, cases = preservation_cases(g, rng)
        for t in cases:
            rep = preservation_report(d, t, q)
            applied += rep.theorem_applies
            assert rep.consistent
    assert applied > 100


@given(causal_diagrams(6, 3), st.randoms(use_true_random=False), st.integers(1, 3))
def test_extension_keeps_identifiability(g, rnd, steps):
    d, q, cases = preservation_cases(g, rnd)
    assume(q is not None)
    cases = [t for t in cases if (lambda c: c.plain or c.congested)(classify_cluster(d, t))]
    assume(cases)
    t = rnd.choice(cases)
    decision = identifiable(d, q).decision
    for k in range(steps):
        step = random_extension_op(d.dag, t, rnd, f"n{k}")
        g2, t2 = apply_extension(d.dag, t, step)
        try:
            d2 = validate_causal_diagram(g2)
        except InvalidCausalDiagram:
            break  # copying a latent parent can give it a third child
        cls = classify_cluster(d2, t2)
        if not (cls.plain or cls.congested):
            break
        d, t = d2, t2
        assert identifiable(d, q).decision == decision


@given(causal_diagrams(6, 3), st.randoms(use_true_random=False))
def test_d_separation_transport(g, rnd):
    clusters = [e.cluster for e in brute_force_transit_clusters(g)]
    assume(clusters)
    t = rnd.choice(clusters)
    outside = [v for v in range(g.n) if not t >> v & 1]
    assume(len(outside) >= 2)
    rnd.shuffle(outside)
    x, y = outside[0], outside[1]
    z = sum(1 << v for v in outside[2:] if rnd.random() < 0.5)
    with_t = rnd.random() < 0.5
    clustered = cluster_diagram(validate_causal_diagram(g), t, "t_rep")[1]
    h = clustered.graph
    to_h = lambda m: h.mask(g.names(m))  # noqa: E731
    z_h = to_h(z) | (1 << clustered.representative_index if with_t else 0)
    if d_separated(h, to_h(1 << x), to_h(1 << y), z_h):
        assert d_separated(g, 1 << x, 1 << y, z | (t if with_t else 0))
