"""Causal diagrams: observed/latent split, c-components, and identifiability.

Latent vertices are parentless and have at most two observed children, so the
latent projection is simply the observed subgraph plus one bidirected edge
per two-child latent.  Identification runs the standard recursive procedure on
that projection with vertex sets as bitmasks; when it fails it returns the
two c-forests of the hedge it stopped at.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .bits import iter_bits, lowest, popcount
from .dag import Dag, induced_subgraph
from .errors import (
    ClusterIntersectsQuery,
    LatentChildLatent,
    LatentHasParent,
    LatentTooManyChildren,
    QueryOutsideObserved,
    SetsOverlap,
)
from .transit import ClusteredGraph, apply_clustering, require_transit_cluster

__all__ = [
    "Admg",
    "CausalDiagram",
    "CausalQuery",
    "ClusterClass",
    "HedgeWitness",
    "IdResult",
    "PreservationReport",
    "c_components",
    "classify_cluster",
    "cluster_diagram",
    "d_separated",
    "identifiable",
    "latent_project",
    "preservation_report",
    "validate_causal_diagram",
]


@dataclass(frozen=True)
class CausalDiagram:
    dag: Dag
    observed: int
    latent: int

    @property
    def labels(self) -> tuple[str, ...]:
        return self.dag.labels


def validate_causal_diagram(g: Dag, latent_labels: set[str] | None = None) -> CausalDiagram:
    """Check the latent conventions; ``None`` takes the flags recorded on ``g``."""
    latent = g.latent if latent_labels is None else g.mask(sorted(latent_labels))
    for u in iter_bits(latent):
        name = g.labels[u]
        if g.parents[u]:
            raise LatentHasParent(f"latent {name!r} has parents {g.format_set(g.parents[u])}")
        if popcount(g.children[u]) > 2:
            raise LatentTooManyChildren(f"latent {name!r} has {popcount(g.children[u])} children")
        if g.children[u] & latent:
            raise LatentChildLatent(f"latent {name!r} points to latent {g.format_set(g.children[u] & latent)}")
    return CausalDiagram(g, g.full & ~latent, latent)


def c_components(d: CausalDiagram) -> list[int]:
    """Blocks of observed vertices linked through shared latent parents.

    Each latent joins the block of its children; a childless latent is a block
    of its own.  Blocks are ordered by their smallest member.
    """
    g = d.dag
    root = list(range(g.n))

    def find(v: int) -> int:
        while root[v] != v:
            root[v] = root[root[v]]
            v = root[v]
        return v

    for u in iter_bits(d.latent):
        for c in iter_bits(g.children[u]):
            root[find(c)] = find(u)
    blocks: dict[int, int] = {}
    for v in range(g.n):
        blocks[find(v)] = blocks.get(find(v), 0) | 1 << v
    return sorted(blocks.values(), key=lowest)


@dataclass(frozen=True)
class Admg:
    """Directed part over the observed vertices plus bidirected pairs."""

    directed: Dag
    bidirected: frozenset[tuple[str, str]]

    @cached_property
    def sibling(self) -> tuple[int, ...]:
        """Bidirected neighbours of each vertex as bitmasks over ``directed``."""
        out = [0] * self.directed.n
        for a, b in self.bidirected:
            i, j = self.directed.index[a], self.directed.index[b]
            out[i] |= 1 << j
            out[j] |= 1 << i
        return tuple(out)

    def districts(self, within: int) -> list[int]:
        """c-components of the subgraph induced by ``within``."""
        left = within
        out = []
        while left:
            block = frontier = left & -left
            while frontier:
                nxt = 0
                for v in iter_bits(frontier):
                    nxt |= self.sibling[v]
                frontier = nxt & within & ~block
                block |= frontier
            out.append(block)
            left &= ~block
        return out


def latent_project(d: CausalDiagram) -> Admg:
    g = d.dag
    directed = induced_subgraph(g, d.observed)
    directed = Dag(directed.labels, directed.edges)  # projection carries no latent flags
    pairs = set()
    for u in iter_bits(d.latent):
        kids = g.sorted_names(g.children[u])
        if len(kids) == 2:
            pairs.add((kids[0], kids[1]))
    return Admg(directed, frozenset(pairs))


# --- d-separation ----------------------------------------------------------


def d_separated(d: CausalDiagram | Dag, x: int, y: int, z: int) -> bool:
    """Whether ``z`` blocks every path between ``x`` and ``y`` (latents included).

    Reachability over (vertex, direction) pairs: a ball arriving from a child
    may continue anywhere unless its vertex is in ``z``; one arriving from a
    parent continues to children when outside ``z`` and bounces back to parents
    when the vertex has a descendant in ``z``.
    """
    g = d.dag if isinstance(d, CausalDiagram) else d
    for m in (x, y, z):
        g.check_mask(m)
    if x & y or x & z or y & z:
        raise SetsOverlap("x, y and z must be pairwise disjoint")
    if not x or not y:
        return True
    an_z = g.ancestors(z)
    up, down = 0, 1  # travelling towards parents / towards children
    seen: set[tuple[int, int]] = set()
    queue = deque((v, up) for v in iter_bits(x))
    reached = 0
    while queue:
        v, way = queue.popleft()
        if (v, way) in seen:
            continue
        seen.add((v, way))
        if not z >> v & 1:
            reached |= 1 << v
        if way == up and not z >> v & 1:
            queue.extend((p, up) for p in iter_bits(g.parents[v]))
            queue.extend((c, down) for c in iter_bits(g.children[v]))
        elif way == down:
            if not z >> v & 1:
                queue.extend((c, down) for c in iter_bits(g.children[v]))
            if an_z >> v & 1:
                queue.extend((p, up) for p in iter_bits(g.parents[v]))
    return not reached & y


# --- clusters in causal diagrams -------------------------------------------


@dataclass(frozen=True)
class ClusterClass:
    plain: bool
    congested: bool

    def __str__(self) -> str:
        return f"plain={str(self.plain).lower()} congested={str(self.congested).lower()}"


def classify_cluster(d: CausalDiagram, t: int) -> ClusterClass:
    """Plain: receivers' external parents and all emitters observed.

    Congested: all of ``t`` inside one c-component and all emitters observed.
    """
    sig = require_transit_cluster(d.dag, t)
    emitters_observed = not sig.emitters & d.latent
    plain = emitters_observed and not sig.external_parents & d.latent
    congested = emitters_observed and any(t & ~block == 0 for block in c_components(d))
    return ClusterClass(plain, congested)


def cluster_diagram(d: CausalDiagram, t: int, label: str) -> tuple[CausalDiagram, ClusteredGraph]:
    """Contract a transit cluster; the representative is observed and latent members vanish."""
    clustered = apply_clustering(d.dag, t, label)
    g = clustered.graph
    return CausalDiagram(g, g.full & ~g.latent, g.latent), clustered


# --- identification --------------------------------------------------------


@dataclass(frozen=True)
class CausalQuery:
    """p(outcome | do(treatment)) with both sets as bitmasks over the diagram."""

    outcome: int
    treatment: int

    @classmethod
    def from_labels(cls, d: CausalDiagram, outcome, treatment) -> CausalQuery:
        return cls(d.dag.mask(outcome), d.dag.mask(treatment))

    def check(self, d: CausalDiagram) -> None:
        for name, m in (("outcome", self.outcome), ("treatment", self.treatment)):
            d.dag.check_mask(m)
            if not m:
                raise QueryOutsideObserved(f"{name} set is empty")
            if m & d.latent:
                raise QueryOutsideObserved(f"{name} contains latent {d.dag.format_set(m & d.latent)}")
        if self.outcome & self.treatment:
            raise SetsOverlap("outcome and treatment overlap")


@dataclass(frozen=True)
class HedgeWitness:
    """Two c-forests sharing a root set; vertex sets over the original diagram."""

    root_set: int
    larger_forest: int
    smaller_forest: int

    def describe(self, g: Dag) -> str:
        return (
            f"root_set: {g.format_set(self.root_set)}\n"
            f"larger_forest: {g.format_set(self.larger_forest)}\n"
            f"smaller_forest: {g.format_set(self.smaller_forest)}"
        )


@dataclass(frozen=True)
class IdResult:
    decision: bool
    witness: HedgeWitness | None = field(default=None)


class _Identifier:
    def __init__(self, admg: Admg):
        self.admg = admg
        self.g = admg.directed

    def ancestors(self, y: int, within: int, cut: int = 0) -> int:
        """Ancestors of ``y`` in the subgraph on ``within`` with edges into ``cut`` removed."""
        parents = self.g.parents
        seen = frontier = y
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                if not cut >> v & 1:
                    nxt |= parents[v]
            frontier = nxt & within & ~seen
            seen |= frontier
        return seen

    def roots(self, s: int) -> int:
        """Members of ``s`` without children inside ``s``."""
        return sum(1 << v for v in iter_bits(s) if not self.g.children[v] & s)

    def run(self, y: int, x: int, v: int) -> tuple[int, int] | None:
        """None when identifiable, else the hedge (F, F') at which the recursion stops."""
        while True:
            if not x:
                return None
            an_y = self.ancestors(y, v)
            if v & ~an_y:
                v, x = an_y, x & an_y
                continue
            w = v & ~x & ~self.ancestors(y, v, cut=x)
            if w:
                x |= w
                continue
            parts = self.admg.districts(v & ~x)
            if len(parts) > 1:
                for s in parts:
                    hedge = self.run(s, v & ~s, v)
                    if hedge is not None:
                        return hedge
                return None
            (s,) = parts
            whole = self.admg.districts(v)
            if len(whole) == 1:
                return v, s
            if s in whole:
                return None
            (bigger,) = [c for c in whole if s & c == s]
            v, x = bigger, x & bigger


def identifiable(d: CausalDiagram, q: CausalQuery) -> IdResult:
    """Decide whether p(outcome | do(treatment)) is identifiable from the observed law."""
    q.check(d)
    admg = latent_project(d)
    h = admg.directed
    to_h = lambda m: h.mask(d.dag.names(m))  # noqa: E731
    to_g = lambda m: d.dag.mask(h.names(m))  # noqa: E731
    ident = _Identifier(admg)
    hedge = ident.run(to_h(q.outcome), to_h(q.treatment), h.full)
    if hedge is None:
        return IdResult(True)
    big, small = hedge
    return IdResult(False, HedgeWitness(to_g(ident.roots(small)), to_g(big), to_g(small)))


# --- preservation ----------------------------------------------------------


@dataclass(frozen=True)
class PreservationReport:
    cls: ClusterClass
    id_original: bool
    id_clustered: bool

    @property
    def theorem_applies(self) -> bool:
        return self.cls.plain or self.cls.congested

    @property
    def consistent(self) -> bool:
        return not self.theorem_applies or self.id_original == self.id_clustered


def preservation_report(d: CausalDiagram, t: int, q: CausalQuery, label: str = "t") -> PreservationReport:
    """Identifiability of ``q`` before and after clustering ``t``."""
    q.check(d)
    if t & (q.outcome | q.treatment):
        raise ClusterIntersectsQuery(f"cluster meets the query at {d.dag.format_set(t & (q.outcome | q.treatment))}")
    cls = classify_cluster(d, t)
    before = identifiable(d, q).decision
    d2, _ = cluster_diagram(d, t, label)
    q2 = CausalQuery.from_labels(d2, d.dag.names(q.outcome), d.dag.names(q.treatment))
    after = identifiable(d2, q2).decision
    return PreservationReport(cls, before, after)
