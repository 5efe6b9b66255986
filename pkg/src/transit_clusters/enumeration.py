"""Listing transit components and transit clusters.

``find_transit_components`` screens candidate receiver/emitter sets built from
the child sets and parent sets of single vertices.  ``find_transit_clusters``
streams every cluster by growing unions of compatible, disjoint components
depth first.  ``brute_force_transit_clusters`` is the exhaustive oracle both are
tested against.
"""

from __future__ import annotations

from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

from .bits import iter_bits, popcount
from .dag import Dag, weak_closure
from .errors import GraphNotConnected, GraphTooLargeForOracle, InventoryGraphMismatch
from .transit import TransitSignature, check_transit_cluster, signature

__all__ = [
    "Census",
    "ComponentInventory",
    "OracleEntry",
    "Restriction",
    "brute_force_transit_clusters",
    "census",
    "find_transit_clusters",
    "find_transit_components",
]

ORACLE_MAX_VERTICES = 20


@dataclass(frozen=True)
class Restriction:
    """The vertices allowed to appear in a cluster."""

    allowed: int

    @classmethod
    def everything(cls, g: Dag) -> Restriction:
        return cls(g.full)


def _allowed(g: Dag, r: Restriction | int | None) -> int:
    if r is None:
        return g.full
    allowed = r.allowed if isinstance(r, Restriction) else r
    g.check_mask(allowed)
    return allowed


def _set_order(g: Dag, mask: int) -> tuple[int, list[str]]:
    return popcount(mask), g.sorted_names(mask)


@dataclass(frozen=True)
class ComponentInventory:
    graph: Dag
    allowed: int
    components: tuple[int, ...]
    signatures: dict[int, TransitSignature] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[int]:
        return iter(self.components)


def _require_connected(g: Dag) -> None:
    if not g.is_connected:
        raise GraphNotConnected("graph must be weakly connected; run each component separately")


def _grow(g: Dag, seed: int, vi: int, vj: int, allowed: int) -> int | None:
    """Smallest vertex set containing ``seed`` that any matching component must contain.

    The guess is that some vertex with child set ``vi`` is an external parent
    (so members inside ``vi`` are exactly the receivers) and some vertex with
    parent set ``vj`` is an external child (so members inside ``vj`` are the
    emitters).  Each rule below adds vertices that cannot lie outside such a
    component.  Returns ``None`` once the set leaves ``allowed`` or covers V.
    """
    parents, children = g.parents, g.children
    both = bool(vi) and bool(vj)
    t = seed
    while True:
        new = 0
        for u in iter_bits(t):
            # a non-receiver keeps all of its parents, a non-emitter all of its children
            if not vi >> u & 1:
                new |= parents[u]
            if not vj >> u & 1:
                new |= children[u]
        rec, emi = t & vi, t & vj
        if rec:
            common, union = g.full, 0
            for u in iter_bits(rec):
                common &= parents[u]
                union |= parents[u]
            # an external parent is shared by all receivers ...
            new |= union & ~common
            if both:
                # ... and is never a descendant of the cluster
                new |= union & g.descendants(t)
        if emi:
            common, union = g.full, 0
            for u in iter_bits(emi):
                common &= children[u]
                union |= children[u]
            new |= union & ~common
            if both:
                new |= union & g.ancestors(t)
        new &= ~t
        if not new:
            return t
        t |= new
        if t & ~allowed or t == g.full:
            return None


def _scan_pair(g: Dag, allowed: int, vi: int, vj: int, tried: set[int], out: set[int]) -> None:
    parents, children = g.parents, g.children
    z = vi & g.ancestors(vj) if vj else vi
    w = vj & g.descendants(vi) if vi else vj
    if any(not parents[v] for v in iter_bits(z)) or any(not children[v] for v in iter_bits(w)):
        return
    if not (z or w):
        return
    # z and w over-approximate the receivers and emitters; seeding the growth
    # with one receiver and one emitter pins down a single component
    for a in list(iter_bits(z)) or [-1]:
        for b in list(iter_bits(w)) or [-1]:
            seed = (1 << a if a >= 0 else 0) | (1 << b if b >= 0 else 0)
            t = _grow(g, seed, vi, vj, allowed)
            if t is None or t in tried:
                continue
            tried.add(t)
            if check_transit_cluster(g, t).is_cluster and weak_closure(g, t & -t, within=t) == t:
                out.add(t)


def find_transit_components(g: Dag, r: Restriction | int | None = None, threads: int = 1) -> ComponentInventory:
    """All transit components contained in the allowed set, sorted by (size, labels)."""
    _require_connected(g)
    allowed = _allowed(g, r)
    # distinct candidate receiver sets (children of a vertex) and emitter sets (parents of a vertex)
    receiver_candidates = sorted({g.children[v] & allowed for v in range(g.n)})
    emitter_candidates = sorted({g.parents[v] & allowed for v in range(g.n)})

    def scan(vi: int) -> set[int]:
        found: set[int] = set()
        tried: set[int] = set()
        for vj in emitter_candidates:
            _scan_pair(g, allowed, vi, vj, tried, found)
        return found

    found: set[int] = set()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(scan, receiver_candidates):
                found |= part
    else:
        for vi in receiver_candidates:
            found |= scan(vi)
    comps = tuple(sorted(found, key=lambda m: _set_order(g, m)))
    return ComponentInventory(g, allowed, comps, {c: signature(g, c) for c in comps})


def find_transit_clusters(g: Dag, inventory: ComponentInventory) -> Iterator[int]:
    """Lazily yield every cluster that is a union of inventory components, each once.

    Components come first in inventory order, then unions in depth-first
    order.  A component ``S`` joins the growing union ``T`` when the two are
    disjoint and share external receiver parents and emitter children; the
    union keeps that shared signature, so it is carried along the stack
    instead of recomputed.
    """
    if inventory.graph is not g and inventory.graph != g:
        raise InventoryGraphMismatch("inventory was computed for a different graph")
    comps = inventory.components
    keys = [inventory.signatures[c].key for c in comps]
    seen = set(comps)
    yield from comps
    m = len(comps)
    for i, base in enumerate(comps):
        key = keys[i]
        # frame: [current union, index of the next component to try]
        stack = [[base, i + 1]]
        while stack:
            frame = stack[-1]
            union, j = frame
            while j < m and (comps[j] & union or keys[j] != key or comps[j] | union in seen):
                j += 1
            if j == m:
                stack.pop()
                continue
            frame[1] = j + 1
            grown = union | comps[j]
            seen.add(grown)
            yield grown
            stack.append([grown, j + 1])


class OracleEntry(NamedTuple):
    cluster: int
    is_component: bool


def brute_force_transit_clusters(g: Dag, r: Restriction | int | None = None) -> list[OracleEntry]:
    """Check every non-empty proper subset of the allowed set; exponential."""
    if g.n > ORACLE_MAX_VERTICES:
        raise GraphTooLargeForOracle(f"oracle is capped at {ORACLE_MAX_VERTICES} vertices, got {g.n}")
    allowed = _allowed(g, r)
    _require_connected(g)
    members = list(iter_bits(allowed))
    hits = []
    for code in range(1, 1 << len(members)):
        t = 0
        for k, v in enumerate(members):
            if code >> k & 1:
                t |= 1 << v
        if t == g.full:
            continue
        if check_transit_cluster(g, t).is_cluster:
            connected = weak_closure(g, t & -t, within=t) == t
            hits.append(OracleEntry(t, connected))
    hits.sort(key=lambda e: _set_order(g, e.cluster))
    return hits


class Census(NamedTuple):
    component_count: int
    bound: int


def census(g: Dag) -> Census:
    count = len(find_transit_components(g))
    bound = g.n * (g.n + 1) // 2 - 1
    assert count <= bound, f"{count} components exceeds the bound {bound}"
    return Census(count, bound)
