"""Immutable DAG with bitmask adjacency, the edge-list format, and set queries.

Vertex sets are plain ``int`` bitmasks over the graph's dense vertex indices.
Graphs never change after construction, so the ancestor/descendant tables are
computed once on first use and shared by every reader.
"""

from __future__ import annotations

import re
from collections import deque
from collections.abc import Iterable, Sequence
from functools import cached_property

from .bits import iter_bits, to_mask
from .errors import (
    CycleDetected,
    DuplicateVertexLabel,
    GraphSyntaxError,
    SelfLoop,
    UnknownVertex,
)

__all__ = [
    "Dag",
    "RELATIVE_KINDS",
    "connected_components",
    "edge_cut_subgraph",
    "induced_subgraph",
    "parse_graph",
    "relatives",
    "serialize_graph",
    "weak_closure",
]

_WHITESPACE = re.compile(r"\s")

RELATIVE_KINDS = ("parents", "children", "ancestors", "descendants", "neighbors", "connected")


def check_label(label: str) -> None:
    if not label:
        raise ValueError("empty vertex label")
    if _WHITESPACE.search(label) or "->" in label or label.startswith("#"):
        raise ValueError(f"invalid vertex label {label!r}")


class Dag:
    """A directed acyclic graph over labelled vertices ``0..n-1``.

    ``parents[v]`` and ``children[v]`` are bitmasks.  ``latent`` is a bitmask
    of vertices flagged with ``latent`` in the edge-list file; the graph
    algorithms ignore it and only the causal layer reads it.
    """

    __slots__ = ("labels", "index", "parents", "children", "latent", "full", "__dict__")

    def __init__(
        self,
        labels: Sequence[str],
        edges: Iterable[tuple[int, int]] = (),
        latent: int = 0,
    ):
        self.labels: tuple[str, ...] = tuple(labels)
        self.index: dict[str, int] = {}
        for i, label in enumerate(self.labels):
            check_label(label)
            if label in self.index:
                raise DuplicateVertexLabel(f"duplicate vertex label {label!r}")
            self.index[label] = i
        n = len(self.labels)
        self.full = (1 << n) - 1
        parents = [0] * n
        children = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise UnknownVertex(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise SelfLoop(f"self-loop on {self.labels[u]!r}")
            children[u] |= 1 << v
            parents[v] |= 1 << u
        if latent & ~self.full:
            raise UnknownVertex("latent mask references unknown vertices")
        self.parents: tuple[int, ...] = tuple(parents)
        self.children: tuple[int, ...] = tuple(children)
        self.latent = latent
        self.topological_order  # noqa: B018 -- validates acyclicity eagerly

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str]],
        nodes: Iterable[str] = (),
        latent: Iterable[str] = (),
    ) -> Dag:
        """Build a graph from label pairs; vertex order is ``nodes`` then first mention."""
        order: dict[str, None] = dict.fromkeys(nodes)
        pairs = list(edges)
        for u, v in pairs:
            order.setdefault(u)
            order.setdefault(v)
        latent = list(latent)
        for u in latent:
            order.setdefault(u)
        labels = list(order)
        idx = {label: i for i, label in enumerate(labels)}
        return cls(labels, {(idx[u], idx[v]) for u, v in pairs}, to_mask(idx[u] for u in latent))

    # -- basic queries ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges sorted by (tail index, head index)."""
        return tuple((u, v) for u in range(self.n) for v in iter_bits(self.children[u]))

    def label_edges(self) -> set[tuple[str, str]]:
        return {(self.labels[u], self.labels[v]) for u, v in self.edges}

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.children[u] >> v & 1)

    def mask(self, labels: Iterable[str] | str) -> int:
        """Bitmask of the given labels (a single comma-separated string is accepted)."""
        if isinstance(labels, str):
            labels = [s.strip() for s in labels.split(",") if s.strip()]
        m = 0
        for label in labels:
            try:
                m |= 1 << self.index[label]
            except KeyError:
                raise UnknownVertex(f"unknown vertex {label!r}") from None
        return m

    def names(self, mask: int) -> list[str]:
        """Labels of ``mask`` in vertex order."""
        return [self.labels[i] for i in iter_bits(mask)]

    def sorted_names(self, mask: int) -> list[str]:
        return sorted(self.names(mask))

    def format_set(self, mask: int) -> str:
        """Comma-separated, lexicographically sorted labels (the cluster file format)."""
        return ",".join(self.sorted_names(mask))

    def check_mask(self, mask: int) -> None:
        if mask < 0 or mask & ~self.full:
            raise UnknownVertex(f"vertex set {mask:#x} has members outside the graph")

    # -- closures ----------------------------------------------------------

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        indeg = [bin(p).count("1") for p in self.parents]
        ready = deque(i for i in range(self.n) if indeg[i] == 0)
        order = []
        while ready:
            u = ready.popleft()
            order.append(u)
            for v in iter_bits(self.children[u]):
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
        if len(order) != self.n:
            raise CycleDetected(self._find_cycle(set(range(self.n)) - set(order)))
        return tuple(order)

    def _find_cycle(self, pool: set[int]) -> list[str]:
        # every vertex left over by Kahn's algorithm has a parent in the pool
        v = min(pool)
        seen: dict[int, int] = {}
        path: list[int] = []
        while v not in seen:
            seen[v] = len(path)
            path.append(v)
            v = min(p for p in iter_bits(self.parents[v]) if p in pool)
        cycle = path[seen[v] :]
        cycle.reverse()
        return [self.labels[i] for i in cycle]

    @cached_property
    def ancestor_table(self) -> tuple[int, ...]:
        """``ancestor_table[v]`` is An(v) including v."""
        table = [0] * self.n
        for v in self.topological_order:
            m = 1 << v
            for p in iter_bits(self.parents[v]):
                m |= table[p]
            table[v] = m
        return tuple(table)

    @cached_property
    def descendant_table(self) -> tuple[int, ...]:
        table = [0] * self.n
        for v in reversed(self.topological_order):
            m = 1 << v
            for c in iter_bits(self.children[v]):
                m |= table[c]
            table[v] = m
        return tuple(table)

    def ancestors(self, a: int) -> int:
        """An(a), inclusive."""
        m = 0
        for v in iter_bits(a):
            m |= self.ancestor_table[v]
        return m

    def descendants(self, a: int) -> int:
        m = 0
        for v in iter_bits(a):
            m |= self.descendant_table[v]
        return m

    def parents_of(self, a: int) -> int:
        """Pa(a) without a itself."""
        m = 0
        for v in iter_bits(a):
            m |= self.parents[v]
        return m & ~a

    def children_of(self, a: int) -> int:
        m = 0
        for v in iter_bits(a):
            m |= self.children[v]
        return m & ~a

    @cached_property
    def is_connected(self) -> bool:
        return self.n > 0 and weak_closure(self, 1) == self.full

    # -- value semantics ---------------------------------------------------

    def _key(self) -> tuple:
        return (self.labels, self.edges, self.latent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, edges={len(self.edges)})"


def weak_closure(g: Dag, seeds: int, within: int | None = None, no_in: int = 0, no_out: int = 0) -> int:
    """Vertices connected to ``seeds`` ignoring direction.

    Only vertices in ``within`` are visited; an edge ``u -> v`` is usable unless
    ``v`` is in ``no_in`` or ``u`` is in ``no_out``.
    """
    if within is None:
        within = g.full
    reached = seeds & within
    frontier = reached
    parents, children = g.parents, g.children
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            if not no_out >> v & 1:
                nxt |= children[v] & ~no_in
            if not no_in >> v & 1:
                nxt |= parents[v] & ~no_out
        nxt &= within & ~reached
        reached |= nxt
        frontier = nxt
    return reached


def relatives(g: Dag, a: int, kind: str, inclusive: bool) -> int:
    """Relative set of ``a``; ``inclusive=False`` gives the starred (a-excluding) set."""
    g.check_mask(a)
    if kind == "parents":
        m = g.parents_of(a)
    elif kind == "children":
        m = g.children_of(a)
    elif kind == "ancestors":
        m = g.ancestors(a)
    elif kind == "descendants":
        m = g.descendants(a)
    elif kind == "neighbors":
        m = g.parents_of(a) | g.children_of(a)
    elif kind == "connected":
        m = weak_closure(g, a)
    else:
        raise ValueError(f"unknown relative kind {kind!r}; expected one of {RELATIVE_KINDS}")
    return m | a if inclusive else m & ~a


def induced_subgraph(g: Dag, w: int) -> Dag:
    """G[w] with vertices renumbered in their original order."""
    g.check_mask(w)
    keep = list(iter_bits(w))
    pos = {v: i for i, v in enumerate(keep)}
    edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    latent = to_mask(pos[v] for v in keep if g.latent >> v & 1)
    return Dag([g.labels[v] for v in keep], edges, latent)


def edge_cut_subgraph(g: Dag, no_in: int, no_out: int) -> Dag:
    """Same vertices; drop edges into ``no_in`` and edges out of ``no_out``."""
    g.check_mask(no_in)
    g.check_mask(no_out)
    if not no_in and not no_out:
        return g
    edges = [(u, v) for u, v in g.edges if not (no_in >> v & 1 or no_out >> u & 1)]
    return Dag(g.labels, edges, g.latent)


def connected_components(g: Dag) -> list[int]:
    """Weakly connected components, ordered by their smallest vertex."""
    comps = []
    rest = g.full
    while rest:
        comp = weak_closure(g, rest & -rest)
        comps.append(comp)
        rest &= ~comp
    return comps


# -- edge-list text format ----------------------------------------------------


def parse_graph(text: str) -> Dag:
    """Parse the edge-list format.

    Lines are ``# comment``, ``node <label>``, ``latent <label>`` or
    ``<label> -> <label>``; blank lines are ignored.  Declared vertices come
    first in declaration order, then undeclared ones in order of first mention.
    """
    declared: dict[str, bool] = {}
    mentioned: dict[str, None] = {}
    edges: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" in line:
            parts = line.split("->")
            if len(parts) != 2:
                raise GraphSyntaxError(lineno, f"expected '<label> -> <label>', got {line!r}")
            u, v = parts[0].strip(), parts[1].strip()
            for label in (u, v):
                _validate(label, lineno)
            if u == v:
                raise SelfLoop(f"line {lineno}: self-loop on {u!r}")
            edges.append((u, v, lineno))
            mentioned.setdefault(u)
            mentioned.setdefault(v)
            continue
        tokens = line.split()
        if len(tokens) != 2 or tokens[0] not in ("node", "latent"):
            raise GraphSyntaxError(lineno, f"unrecognised line {line!r}")
        label = tokens[1]
        _validate(label, lineno)
        if label in declared:
            raise DuplicateVertexLabel(f"line {lineno}: vertex {label!r} declared twice")
        declared[label] = tokens[0] == "latent"
    labels = list(declared) + [m for m in mentioned if m not in declared]
    idx = {label: i for i, label in enumerate(labels)}
    latent = to_mask(idx[label] for label, is_latent in declared.items() if is_latent)
    return Dag(labels, {(idx[u], idx[v]) for u, v, _ in edges}, latent)


def _validate(label: str, lineno: int) -> None:
    try:
        check_label(label)
    except ValueError as exc:
        raise GraphSyntaxError(lineno, str(exc)) from None


def serialize_graph(g: Dag) -> str:
    lines = [("latent " if g.latent >> i & 1 else "node ") + label for i, label in enumerate(g.labels)]
    lines += [f"{g.labels[u]} -> {g.labels[v]}" for u, v in g.edges]
    return "\n".join(lines) + "\n"
