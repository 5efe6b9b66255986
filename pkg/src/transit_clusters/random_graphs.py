"""Seeded random DAGs and causal diagrams for property tests and sweeps."""

from __future__ import annotations

import random

from .dag import Dag, connected_components


def random_dag(n: int, density: float, rng: random.Random, connected: bool = True) -> Dag:
    """Edges i -> j (i before j in a random order) kept with probability ``density``.

    With ``connected=True`` the weak components are then chained together by
    extra edges that respect the same order.
    """
    order = list(range(n))
    rng.shuffle(order)
    rank = {v: k for k, v in enumerate(order)}
    edges = {(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density}
    labels = [f"v{i}" for i in range(n)]
    g = Dag(labels, edges)
    if connected:
        comps = connected_components(g)
        while len(comps) > 1:
            a = rng.choice([v for v in range(n) if comps[0] >> v & 1])
            b = rng.choice([v for v in range(n) if comps[1] >> v & 1])
            edges.add((a, b) if rank[a] < rank[b] else (b, a))
            g = Dag(labels, edges)
            comps = connected_components(g)
    return g


def random_causal_diagram(
    n_observed: int,
    n_latent: int,
    density: float,
    rng: random.Random,
    single_child_rate: float = 0.15,
) -> Dag:
    """A connected DAG whose latents are parentless with one or two observed children."""
    base = random_dag(n_observed, density, rng, connected=False)
    labels = list(base.labels) + [f"u{j}" for j in range(n_latent)]
    edges = set(base.edges)
    latent = 0
    for j in range(n_latent):
        u = n_observed + j
        latent |= 1 << u
        k = 1 if n_observed == 1 or rng.random() < single_child_rate else 2
        for child in rng.sample(range(n_observed), k):
            edges.add((u, child))
    g = Dag(labels, edges, latent)
    comps = connected_components(g)
    while len(comps) > 1:
        # bridge with an observed -> observed edge respecting a topological order
        pos = {v: k for k, v in enumerate(g.topological_order)}
        a = rng.choice([v for v in range(n_observed) if comps[0] >> v & 1] or [None])
        b = rng.choice([v for v in range(n_observed) if comps[1] >> v & 1] or [None])
        if a is None or b is None:
            return random_causal_diagram(n_observed, n_latent, density, rng, single_child_rate)
        edges.add((a, b) if pos[a] < pos[b] else (b, a))
        g = Dag(labels, edges, latent)
        comps = connected_components(g)
    return g


def random_extension_op(g: Dag, t: int, rng: random.Random, fresh: str):
    """A uniformly chosen legal operation on the transit cluster ``t``.

    New vertices are named ``fresh`` and ``fresh + "b"``.  Returns ``None``
    only when no operation applies, which cannot happen for a valid cluster.
    """
    from .bits import iter_bits
    from .extension import ExtensionOp
    from .transit import require_transit_cluster

    sig = require_transit_cluster(g, t)
    rec, emi = sig.receivers, sig.emitters
    members = list(iter_bits(t))
    lab = g.labels
    on_path = [v for v in members if g.ancestor_table[v] & rec and g.descendant_table[v] & emi]
    choices = []
    choices += [ExtensionOp("DivideVertex", (lab[v], fresh)) for v in members]
    choices += [ExtensionOp("InsertMediator", (lab[u], lab[v], fresh)) for u, v in g.edges if t >> u & 1 and t >> v & 1]
    choices += [
        ExtensionOp("AddInternalEdge", (lab[u], lab[v]))
        for u in members
        for v in members
        if u != v and not g.has_edge(u, v) and not g.ancestor_table[u] >> v & 1
    ]
    choices += [ExtensionOp("AddParentLeaf", (lab[v], fresh)) for v in members if not rec >> v & 1]
    choices += [ExtensionOp("AddChildLeaf", (lab[v], fresh)) for v in members if not emi >> v & 1]
    if rec and emi:
        choices += [ExtensionOp("AddReceiver", (fresh, lab[v])) for v in on_path]
        choices += [ExtensionOp("AddEmitter", (lab[v], fresh)) for v in on_path]
        choices.append(ExtensionOp("AddReceiverEmitterPair", (fresh, fresh + "b")))
    if rec and not emi:
        choices.append(ExtensionOp("AddReceiverNoEmitters", (fresh,)))
    if emi and not rec:
        choices.append(ExtensionOp("AddEmitterNoReceivers", (fresh,)))
    return rng.choice(choices) if choices else None
