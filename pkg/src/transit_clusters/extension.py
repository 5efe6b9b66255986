"""Peripheral extension: ten rewriting operations that grow a transit cluster.

Every operation keeps the set a transit cluster and leaves the clustered graph
unchanged.  ``derive_extension_sequence`` runs the marking schedule in reverse:
starting from the clustered graph and its single representative, it emits the
operations that rebuild the original cluster.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .bits import iter_bits, lowest, popcount
from .dag import Dag, check_label
from .errors import (
    CycleDetected,
    ExtensionError,
    FreshLabelCollision,
    NotConstructible,
    OpPreconditionViolated,
    TraceSyntaxError,
    WouldCreateCycle,
)
from .transit import apply_clustering, require_transit_cluster

__all__ = [
    "OP_ARITY",
    "ExtensionOp",
    "ExtensionTrace",
    "apply_extension",
    "derive_extension_sequence",
    "format_trace",
    "label_isomorphic",
    "parse_trace",
    "replay",
]

# name -> argument roles; "new" marks a fresh label
OP_ARITY: dict[str, tuple[str, ...]] = {
    "AddInternalEdge": ("ti", "tj"),
    "InsertMediator": ("ti", "tj", "new"),
    "DivideVertex": ("ti", "new"),
    "AddParentLeaf": ("ti", "new"),
    "AddChildLeaf": ("ti", "new"),
    "AddReceiver": ("new", "tj"),
    "AddEmitter": ("tj", "new"),
    "AddReceiverEmitterPair": ("new", "new"),
    "AddReceiverNoEmitters": ("new",),
    "AddEmitterNoReceivers": ("new",),
}


@dataclass(frozen=True)
class ExtensionOp:
    name: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.name not in OP_ARITY:
            raise OpPreconditionViolated(f"unknown operation {self.name!r}")
        if len(self.args) != len(OP_ARITY[self.name]):
            raise OpPreconditionViolated(f"{self.name} takes {len(OP_ARITY[self.name])} labels, got {len(self.args)}")

    @property
    def fresh(self) -> tuple[str, ...]:
        return tuple(a for a, role in zip(self.args, OP_ARITY[self.name]) if role == "new")

    def __str__(self) -> str:
        return f"op={self.name} args={','.join(self.args)}"


@dataclass(frozen=True)
class ExtensionTrace:
    ops: tuple[ExtensionOp, ...]
    start_graph: Dag
    start_cluster: int
    # generated label -> label of the vertex it rebuilds (derived traces only)
    origin: dict[str, str] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.ops)


def _labels_in(g: Dag, t: int, op: ExtensionOp) -> list[int]:
    """Indices of the existing-member arguments; fresh labels are checked too."""
    out = []
    for a, role in zip(op.args, OP_ARITY[op.name]):
        if role == "new":
            try:
                check_label(a)
            except ValueError as exc:
                raise OpPreconditionViolated(f"{op.name}: {exc}") from exc
            if a in g.index:
                raise FreshLabelCollision(f"{op.name}: label {a!r} already exists")
            continue
        if a not in g.index:
            raise OpPreconditionViolated(f"{op.name}: no vertex named {a!r}")
        v = g.index[a]
        if not t >> v & 1:
            raise OpPreconditionViolated(f"{op.name}: {a!r} is not a cluster member")
        out.append(v)
    if len(set(op.fresh)) != len(op.fresh):
        raise FreshLabelCollision(f"{op.name}: the two new labels coincide")
    return out


def apply_extension(g: Dag, t: int, op: ExtensionOp) -> tuple[Dag, int]:
    """Apply one operation to the transit cluster ``t``; returns (G+, T+).

    Receivers and emitters are recomputed from the current graph, so the
    preconditions always refer to the cluster as it is now.
    """
    sig = require_transit_cluster(g, t)
    rec, emi = sig.receivers, sig.emitters
    members = _labels_in(g, t, op)
    labels = list(g.labels)
    edges = set(g.edges)

    def add_vertex(label: str) -> int:
        labels.append(label)
        return len(labels) - 1

    def on_rec_emi_path(v: int) -> bool:
        return bool(g.ancestor_table[v] & rec) and bool(g.descendant_table[v] & emi)

    def need_both() -> None:
        if not (rec and emi):
            raise OpPreconditionViolated(f"{op.name} needs both receivers and emitters")

    grown = t
    name = op.name
    if name == "AddInternalEdge":
        i, j = members
        if i == j:
            raise OpPreconditionViolated("AddInternalEdge: self-loop")
        if g.has_edge(i, j):
            raise OpPreconditionViolated(f"AddInternalEdge: {op.args[0]} -> {op.args[1]} already present")
        if g.ancestor_table[i] >> j & 1:
            raise WouldCreateCycle(f"AddInternalEdge: {op.args[1]} is an ancestor of {op.args[0]}")
        edges.add((i, j))
    elif name == "InsertMediator":
        i, j = members
        if not g.has_edge(i, j):
            raise OpPreconditionViolated(f"InsertMediator: no edge {op.args[0]} -> {op.args[1]}")
        k = add_vertex(op.args[2])
        edges.discard((i, j))
        edges |= {(i, k), (k, j)}
        grown |= 1 << k
    elif name == "DivideVertex":
        (i,) = members
        k = add_vertex(op.args[1])
        for c in iter_bits(g.children[i]):
            edges.discard((i, c))
            edges.add((k, c))
        edges.add((i, k))
        grown |= 1 << k
    elif name == "AddParentLeaf":
        (i,) = members
        if rec >> i & 1:
            raise OpPreconditionViolated(f"AddParentLeaf: {op.args[0]} is a receiver")
        k = add_vertex(op.args[1])
        edges.add((k, i))
        grown |= 1 << k
    elif name == "AddChildLeaf":
        (i,) = members
        if emi >> i & 1:
            raise OpPreconditionViolated(f"AddChildLeaf: {op.args[0]} is an emitter")
        k = add_vertex(op.args[1])
        edges.add((i, k))
        grown |= 1 << k
    elif name == "AddReceiver":
        need_both()
        (j,) = members
        if not on_rec_emi_path(j):
            raise OpPreconditionViolated(f"AddReceiver: {op.args[1]} is not on a receiver-to-emitter path")
        k = add_vertex(op.args[0])
        edges |= {(p, k) for p in iter_bits(sig.external_parents)}
        edges.add((k, j))
        grown |= 1 << k
    elif name == "AddEmitter":
        need_both()
        (j,) = members
        if not on_rec_emi_path(j):
            raise OpPreconditionViolated(f"AddEmitter: {op.args[0]} is not on a receiver-to-emitter path")
        k = add_vertex(op.args[1])
        edges |= {(k, c) for c in iter_bits(sig.external_children)}
        edges.add((j, k))
        grown |= 1 << k
    elif name == "AddReceiverEmitterPair":
        need_both()
        k1 = add_vertex(op.args[0])
        k2 = add_vertex(op.args[1])
        edges |= {(p, k1) for p in iter_bits(sig.external_parents)}
        edges |= {(k2, c) for c in iter_bits(sig.external_children)}
        edges.add((k1, k2))
        grown |= 1 << k1 | 1 << k2
    elif name == "AddReceiverNoEmitters":
        if not rec or emi:
            raise OpPreconditionViolated("AddReceiverNoEmitters needs receivers and no emitters")
        k = add_vertex(op.args[0])
        edges |= {(p, k) for p in iter_bits(sig.external_parents)}
        grown |= 1 << k
    else:  # AddEmitterNoReceivers
        if rec or not emi:
            raise OpPreconditionViolated("AddEmitterNoReceivers needs emitters and no receivers")
        k = add_vertex(op.args[0])
        edges |= {(k, c) for c in iter_bits(sig.external_children)}
        grown |= 1 << k
    try:
        out = Dag(labels, edges, g.latent)
    except CycleDetected as exc:
        raise WouldCreateCycle(f"{op.name}: {exc}") from exc
    return out, grown


def replay(trace: ExtensionTrace) -> tuple[Dag, int]:
    """Fold the trace over its start state; errors carry the failing step index."""
    g, t = trace.start_graph, trace.start_cluster
    for step, op in enumerate(trace.ops):
        try:
            g, t = apply_extension(g, t, op)
        except ExtensionError as exc:
            exc.step = step
            exc.args = (f"step {step}: {exc.args[0] if exc.args else ''}",)
            raise
    return g, t


def format_trace(trace: ExtensionTrace) -> str:
    return "".join(f"{op}\n" for op in trace.ops)


def parse_trace(text: str, start_graph: Dag, start_cluster: int) -> ExtensionTrace:
    """Read ``op=<Name> args=a,b`` lines; blank lines and ``#`` comments skipped."""
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = dict(part.split("=", 1) for part in line.split() if "=" in part)
        if "op" not in fields or len(fields) != len(line.split()):
            raise TraceSyntaxError(f"line {lineno}: expected 'op=<Name> args=<labels>'")
        args = tuple(a for a in fields.get("args", "").split(",") if a)
        try:
            ops.append(ExtensionOp(fields["op"], args))
        except OpPreconditionViolated as exc:
            raise TraceSyntaxError(f"line {lineno}: {exc}") from exc
    return ExtensionTrace(tuple(ops), start_graph, start_cluster)


# --- derivation ------------------------------------------------------------


class _Builder:
    """Emits operations while tracking which original vertices exist already."""

    def __init__(self, g: Dag, t: int, rep: str, taken: set[str]):
        self.g = g
        self.t = t
        self.rep = rep
        self.taken = taken
        self.counter = 0
        self.ops: list[ExtensionOp] = []
        self.name: dict[int, str] = {}  # original vertex -> label in the rebuilt graph

    def fresh(self, v: int) -> str:
        while True:
            self.counter += 1
            label = f"{self.rep}_{self.counter}"
            if label not in self.taken:
                break
        self.taken.add(label)
        self.name[v] = label
        return label

    @property
    def marked(self) -> int:
        m = 0
        for v in self.name:
            m |= 1 << v
        return m

    def emit(self, name: str, *args: str) -> None:
        self.ops.append(ExtensionOp(name, tuple(args)))

    def mediators(self, path: list[int]) -> None:
        """Fill in the interior of ``path`` whose two end vertices already exist and are adjacent."""
        end = path[-1]
        prev = path[0]
        for v in path[1:-1]:
            self.emit("InsertMediator", self.name[prev], self.name[end], self.fresh(v))
            prev = v


def _bfs_path(g: Dag, start: int, within: int, is_target, forward: bool) -> list[int] | None:
    """Shortest directed path inside ``within`` from ``start`` to a target; ties by index."""
    step = g.children if forward else g.parents
    prev = {start: start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u != start and is_target(u):
            path = [u]
            while path[-1] != start:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in iter_bits(step[u] & within):
            if w not in prev:
                prev[w] = u
                queue.append(w)
    return None


def derive_extension_sequence(g: Dag, t: int, label: str = "t") -> ExtensionTrace:
    """Operations that rebuild ``(g, t)`` from ``({label}, clustered g)``.

    The trace records, for every generated label, the original member it
    stands for.  A cluster with two or more members that are both receiver
    and emitter raises :class:`NotConstructible`: no operation ever creates
    such a vertex apart from the starting representative.
    """
    sig = require_transit_cluster(g, t)
    rec, emi = sig.receivers, sig.emitters
    both_kinds = rec & emi
    if popcount(both_kinds) >= 2:
        raise NotConstructible(
            f"members {g.format_set(both_kinds)} are each both receiver and emitter; "
            "the operations create at most one such vertex"
        )
    clustered = apply_clustering(g, t, label)
    start = clustered.graph
    b = _Builder(g, t, label, set(start.labels) | set(g.labels))
    induced = {v: g.children[v] & t for v in range(g.n)}

    def path_inside(u: int, v: int) -> list[int] | None:
        return _bfs_path(g, u, t, lambda w: w == v, forward=True)

    if rec and emi:
        if both_kinds:
            b.name[lowest(both_kinds)] = label
        else:
            # globally shortest receiver -> emitter path inside T: its interior is plain
            best = None
            for r in iter_bits(rec):
                p = _bfs_path(g, r, t, lambda w: emi >> w & 1, forward=True)
                if p and (best is None or len(p) < len(best)):
                    best = p
            assert best is not None
            r, e = best[0], best[-1]
            b.name[r] = label
            b.emit("DivideVertex", label, b.fresh(e))
            b.mediators(best)
        # receivers: descendants first, so any receiver met on the way already exists
        pos = {v: k for k, v in enumerate(g.topological_order)}
        for r in sorted(iter_bits(rec & ~b.marked), key=lambda v: -pos[v]):
            path = _bfs_path(g, r, t, lambda w: bool(b.marked >> w & 1 or emi >> w & 1), forward=True)
            assert path is not None
            end = path[-1]
            if b.marked >> end & 1:
                b.emit("AddReceiver", b.fresh(r), b.name[end])
            else:
                new_r = b.fresh(r)
                b.emit("AddReceiverEmitterPair", new_r, b.fresh(end))
            b.mediators(path)
        # emitters: ancestors first; every receiver exists by now
        for e in sorted(iter_bits(emi & ~b.marked), key=lambda v: pos[v]):
            back = _bfs_path(g, e, t, lambda w: bool(b.marked >> w & 1), forward=False)
            assert back is not None
            path = back[::-1]
            b.emit("AddEmitter", b.name[path[0]], b.fresh(e))
            b.mediators(path)
    elif rec:
        first = lowest(rec)
        b.name[first] = label
        for r in iter_bits(rec & ~(1 << first)):
            b.emit("AddReceiverNoEmitters", b.fresh(r))
    else:
        first = lowest(emi)
        b.name[first] = label
        for e in iter_bits(emi & ~(1 << first)):
            b.emit("AddEmitterNoReceivers", b.fresh(e))

    # remaining members hang off existing ones through interior-graph edges
    queue = deque(sorted(b.name))
    while queue:
        u = queue.popleft()
        for v in iter_bits(induced[u] & ~b.marked):
            if not (emi >> u & 1 or rec >> v & 1):
                b.emit("AddChildLeaf", b.name[u], b.fresh(v))
                queue.append(v)
        for v in iter_bits(g.parents[u] & t & ~b.marked):
            if not (rec >> u & 1 or emi >> v & 1):
                b.emit("AddParentLeaf", b.name[u], b.fresh(v))
                queue.append(v)
    assert b.marked == t, "condition 3 guarantees every member is reached"

    # internal edges the schedule has not produced yet
    made: set[tuple[int, int]] = set()
    cur_graph, cur_t = start, 1 << start.index[label]
    for op in b.ops:
        cur_graph, cur_t = apply_extension(cur_graph, cur_t, op)
    inv = {lab: v for v, lab in b.name.items()}
    for x, y in cur_graph.edges:
        lx, ly = cur_graph.labels[x], cur_graph.labels[y]
        if lx in inv and ly in inv:
            made.add((inv[lx], inv[ly]))
    for u, v in g.edges:
        if t >> u & 1 and t >> v & 1 and (u, v) not in made:
            b.emit("AddInternalEdge", b.name[u], b.name[v])

    origin = {b.name[v]: g.labels[v] for v in iter_bits(t)}
    return ExtensionTrace(tuple(b.ops), start, 1 << start.index[label], origin)


# --- comparison ------------------------------------------------------------


def label_isomorphic(g1: Dag, t1: int, g2: Dag, t2: int, hint: dict[str, str] | None = None) -> bool:
    """Whether the graphs agree up to renaming cluster members.

    Vertices outside the clusters must carry identical labels; a bijection
    between the members is searched exhaustively (with ``hint`` tried first).
    """
    out1, out2 = g1.full & ~t1, g2.full & ~t2
    if sorted(g1.names(out1)) != sorted(g2.names(out2)) or popcount(t1) != popcount(t2):
        return False
    if sorted(g1.names(g1.latent & out1)) != sorted(g2.names(g2.latent & out2)):
        return False
    target = g2.label_edges()
    members1 = g1.names(t1)
    members2 = g2.names(t2)

    def matches(m: dict[str, str]) -> bool:
        rename = lambda a: m.get(a, a)  # noqa: E731
        return {(rename(a), rename(b)) for a, b in g1.label_edges()} == target

    if hint is not None and set(hint) == set(members1) and matches(hint):
        return True
    if len(members1) > 8:
        raise ValueError("isomorphism search is limited to 8 cluster members")

    # degree profile prunes candidates before the permutation search
    def profile(g: Dag, v: int, t: int) -> tuple:
        return (
            popcount(g.parents[v] & t),
            popcount(g.children[v] & t),
            tuple(sorted(g.names(g.parents[v] & ~t))),
            tuple(sorted(g.names(g.children[v] & ~t))),
        )

    prof2 = {a: profile(g2, g2.index[a], t2) for a in members2}
    options = {a: [c for c in members2 if prof2[c] == profile(g1, g1.index[a], t1)] for a in members1}

    def search(i: int, m: dict[str, str], used: set[str]) -> bool:
        if i == len(members1):
            return matches(m)
        a = members1[i]
        for c in options[a]:
            if c not in used:
                m[a] = c
                used.add(c)
                if search(i + 1, m, used):
                    return True
                used.discard(c)
                del m[a]
        return False

    return search(0, {}, set())
