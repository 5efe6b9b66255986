"""Frequency of the two extension-theorem gaps on random clusters: mediators
on emitter -> receiver edges, and clusters with several members that are both
receiver and emitter."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from _config import parse_config

from transit_clusters.bits import iter_bits, popcount
from transit_clusters.enumeration import brute_force_transit_clusters
from transit_clusters.errors import NotConstructible
from transit_clusters.extension import apply_extension, derive_extension_sequence, label_isomorphic, replay
from transit_clusters.random_graphs import random_dag, random_extension_op
from transit_clusters.transit import check_transit_cluster


@dataclass(frozen=True)
class ExtensionConfig:
    ops: int = 5000
    round_trips: int = 1000
    max_n: int = 9
    seed: int = 0


def _draw(rng: random.Random, max_n: int):
    while True:
        g = random_dag(rng.randint(3, max_n), rng.choice([0.2, 0.4, 0.6]), rng)
        clusters = [e.cluster for e in brute_force_transit_clusters(g) if popcount(e.cluster) <= 8]
        if clusters:
            return g, rng.choice(clusters)


def main(cfg: ExtensionConfig) -> None:
    rng = random.Random(cfg.seed)
    broken: Counter[str] = Counter()
    for k in range(cfg.ops):
        g, t = _draw(rng, cfg.max_n)
        step = random_extension_op(g, t, rng, f"n{k}")
        g2, t2 = apply_extension(g, t, step)
        if not check_transit_cluster(g2, t2).is_cluster:
            broken[step.name] += 1
    outcome: Counter[str] = Counter()
    for _ in range(cfg.round_trips):
        g, t = _draw(rng, cfg.max_n)
        try:
            trace = derive_extension_sequence(g, t, "rep")
        except NotConstructible:
            outcome["not_constructible"] += 1
            continue
        g2, t2 = replay(trace)
        hint = {g2.labels[v]: trace.origin[g2.labels[v]] for v in iter_bits(t2)}
        outcome["ok" if label_isomorphic(g2, t2, g, t, hint) else "mismatch"] += 1
    print(f"ops={cfg.ops} closure_failures={dict(broken)}")
    print(f"round_trips={cfg.round_trips} " + " ".join(f"{k}={v}" for k, v in sorted(outcome.items())))


if __name__ == "__main__":
    main(parse_config(ExtensionConfig, __doc__))
