"""Check identifiability preservation for every plain or congested cluster
disjoint from a random query, on random causal diagrams."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from _config import parse_config

from transit_clusters.bits import iter_bits
from transit_clusters.causal import CausalQuery, preservation_report, validate_causal_diagram
from transit_clusters.enumeration import brute_force_transit_clusters
from transit_clusters.random_graphs import random_causal_diagram


@dataclass(frozen=True)
class PreservationConfig:
    diagrams: int = 500
    max_observed: int = 8
    max_latent: int = 4
    seed: int = 0


def main(cfg: PreservationConfig) -> int:
    rng = random.Random(cfg.seed)
    tally: Counter[str] = Counter()
    for _ in range(cfg.diagrams):
        g = random_causal_diagram(
            rng.randint(3, cfg.max_observed), rng.randint(0, cfg.max_latent), rng.choice([0.2, 0.4, 0.6]), rng
        )
        d = validate_causal_diagram(g)
        obs = list(iter_bits(d.observed))
        rng.shuffle(obs)
        k = rng.randint(1, len(obs) - 1)
        q = CausalQuery(
            sum(1 << v for v in obs[: rng.randint(1, k)]),
            sum(1 << v for v in obs[k : k + rng.randint(1, len(obs) - k)]),
        )
        for e in brute_force_transit_clusters(g, g.full & ~(q.outcome | q.treatment)):
            rep = preservation_report(d, e.cluster, q)
            kind = "applies" if rep.theorem_applies else "outside"
            tally[f"{kind}_{'same' if rep.id_original == rep.id_clustered else 'changed'}"] += 1
    for key in sorted(tally):
        print(f"{key}={tally[key]}")
    return int(tally["applies_changed"] > 0)


if __name__ == "__main__":
    raise SystemExit(main(parse_config(PreservationConfig, __doc__)))
