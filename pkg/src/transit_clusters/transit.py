"""Receivers, emitters, the five-condition transit check, and contraction."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bits import iter_bits, lowest
from .dag import Dag, connected_components, edge_cut_subgraph, induced_subgraph, weak_closure
from .errors import (
    ClusterIsWholeGraph,
    EmptyCluster,
    GraphNotConnected,
    LabelCollision,
    NotATransitCluster,
    NotDisjoint,
)

__all__ = [
    "CONDITION_NAMES",
    "ClusteredGraph",
    "TransitSignature",
    "TransitVerdict",
    "apply_clustering",
    "check_transit_cluster",
    "contract",
    "interior_graph",
    "is_transit_component",
    "signature",
    "union_compatible",
]

CONDITION_NAMES = (
    "receivers share external parents",
    "emitters share external children",
    "every member reaches a receiver or emitter in the interior graph",
    "every receiver has an emitter descendant",
    "every emitter has a receiver ancestor",
)


@dataclass(frozen=True)
class TransitSignature:
    cluster: int
    receivers: int
    emitters: int
    external_parents: int
    external_children: int

    @property
    def key(self) -> tuple[int, int]:
        """What the union test compares: (external parents, external children)."""
        return (self.external_parents, self.external_children)


@dataclass(frozen=True)
class TransitVerdict:
    is_cluster: bool
    conditions: tuple[bool, bool, bool, bool, bool]
    failed_condition: int | None = None
    witness: tuple[int, ...] | None = None

    def describe(self, g: Dag) -> str:
        if self.is_cluster:
            return "yes"
        who = ",".join(g.labels[v] for v in self.witness or ())
        k = self.failed_condition
        return f"no (condition {k} failed: {CONDITION_NAMES[k - 1]}; witness {who})"


@dataclass(frozen=True)
class ClusteredGraph:
    """Result of contracting a transit cluster to one vertex."""

    graph: Dag
    representative: str
    original_members: int
    mapping: dict[str, str] = field(repr=False)
    source: Dag = field(repr=False, compare=False)

    @property
    def representative_index(self) -> int:
        return self.graph.index[self.representative]


def _check_proper(g: Dag, t: int) -> None:
    g.check_mask(t)
    if not t:
        raise EmptyCluster("cluster must be non-empty")
    if t == g.full:
        raise ClusterIsWholeGraph("cluster must be a proper subset of the vertices")


def signature(g: Dag, t: int) -> TransitSignature:
    _check_proper(g, t)
    rec = emi = ext_pa = ext_ch = 0
    for v in iter_bits(t):
        pa = g.parents[v] & ~t
        ch = g.children[v] & ~t
        if pa:
            rec |= 1 << v
            ext_pa |= pa
        if ch:
            emi |= 1 << v
            ext_ch |= ch
    return TransitSignature(t, rec, emi, ext_pa, ext_ch)


def interior_graph(g: Dag, t: int) -> Dag:
    """G[T=]: G[T] without edges into receivers or out of emitters."""
    sig = signature(g, t)
    return induced_subgraph(edge_cut_subgraph(g, sig.receivers, sig.emitters), t)


def _evaluate(g: Dag, sig: TransitSignature) -> TransitVerdict:
    t, rec, emi = sig.cluster, sig.receivers, sig.emitters
    results = [True] * 5
    witnesses: list[tuple[int, ...] | None] = [None] * 5

    first = lowest(rec)
    for r in iter_bits(rec):
        if g.parents[r] & ~t != g.parents[first] & ~t:
            results[0], witnesses[0] = False, (first, r)
            break
    first = lowest(emi)
    for e in iter_bits(emi):
        if g.children[e] & ~t != g.children[first] & ~t:
            results[1], witnesses[1] = False, (first, e)
            break
    stray = t & ~weak_closure(g, rec | emi, within=t, no_in=rec, no_out=emi)
    if stray:
        results[2], witnesses[2] = False, (lowest(stray),)
    if emi:
        for r in iter_bits(rec):
            if not g.descendant_table[r] & emi:
                results[3], witnesses[3] = False, (r,)
                break
    if rec:
        for e in iter_bits(emi):
            if not g.ancestor_table[e] & rec:
                results[4], witnesses[4] = False, (e,)
                break

    if all(results):
        return TransitVerdict(True, tuple(results))
    k = results.index(False)
    return TransitVerdict(False, tuple(results), k + 1, witnesses[k])


def check_transit_cluster(g: Dag, t: int) -> TransitVerdict:
    """Evaluate all five transit-cluster conditions for ``t`` in a connected DAG."""
    _check_proper(g, t)
    if not g.is_connected:
        raise GraphNotConnected("transit clusters are defined for weakly connected DAGs only")
    return _evaluate(g, signature(g, t))


def require_transit_cluster(g: Dag, t: int) -> TransitSignature:
    verdict = check_transit_cluster(g, t)
    if not verdict.is_cluster:
        raise NotATransitCluster(f"{{{g.format_set(t)}}} is not a transit cluster: {verdict.describe(g)}", verdict)
    return signature(g, t)


def contract(g: Dag, t: int, label: str) -> ClusteredGraph:
    """Replace ``t`` by one vertex inheriting its external parents and children.

    No transit check is made here; the result may be cyclic (and then raises
    ``CycleDetected``) when ``t`` is an arbitrary set.
    """
    _check_proper(g, t)
    outside = g.full & ~t
    if any(g.labels[v] == label for v in iter_bits(outside)):
        raise LabelCollision(f"label {label!r} already names a vertex outside the cluster")
    # the representative takes the slot of the cluster's first member
    anchor = lowest(t)
    order = [v for v in range(g.n) if not t >> v & 1 or v == anchor]
    pos = {v: i for i, v in enumerate(order)}
    rep = pos[anchor]
    new_labels = [label if v == anchor else g.labels[v] for v in order]

    def image(v: int) -> int:
        return rep if t >> v & 1 else pos[v]

    edges = {(image(u), image(v)) for u, v in g.edges if not (t >> u & 1 and t >> v & 1)}
    latent = 0
    for v in iter_bits(g.latent & outside):
        latent |= 1 << pos[v]
    graph = Dag(new_labels, edges, latent)
    mapping = {g.labels[v]: new_labels[image(v)] for v in range(g.n)}
    return ClusteredGraph(graph, label, t, mapping, g)


def apply_clustering(g: Dag, t: int, label: str) -> ClusteredGraph:
    """Contract a verified transit cluster."""
    require_transit_cluster(g, t)
    result = contract(g, t, label)
    sig = signature(g, t)
    rep = result.representative_index
    out = result.graph
    # parents / children of the representative are the external sets of T
    assert out.parents[rep] == out.mask(g.names(sig.external_parents))
    assert out.children[rep] == out.mask(g.names(sig.external_children))
    return result


def is_transit_component(g: Dag, t: int) -> bool:
    if not check_transit_cluster(g, t).is_cluster:
        return False
    return len(connected_components(induced_subgraph(g, t))) == 1


def union_compatible(g: Dag, s: int, t: int) -> bool:
    """Whether the union test for disjoint transit clusters ``s`` and ``t`` holds.

    Compares the receivers' external parents and the emitters' external
    children of both sets.
    """
    if s & t:
        raise NotDisjoint("union test is defined for disjoint clusters")
    return require_transit_cluster(g, s).key == require_transit_cluster(g, t).key
