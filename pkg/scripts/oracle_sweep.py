"""Compare the component finder and cluster stream with the brute-force oracle."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from _config import parse_config

from transit_clusters.enumeration import (
    brute_force_transit_clusters,
    census,
    find_transit_clusters,
    find_transit_components,
)
from transit_clusters.random_graphs import random_dag


@dataclass(frozen=True)
class SweepConfig:
    graphs: int = 1000
    min_n: int = 3
    max_n: int = 10
    densities: tuple[float, ...] = (0.2, 0.4, 0.6)
    restricted_share: float = 0.5
    seed: int = 0


def main(cfg: SweepConfig) -> int:
    rng = random.Random(cfg.seed)
    comp_miss = clust_miss = over_bound = 0
    start = time.perf_counter()
    for _ in range(cfg.graphs):
        g = random_dag(rng.randint(cfg.min_n, cfg.max_n), rng.choice(cfg.densities), rng)
        r = rng.getrandbits(g.n) if rng.random() < cfg.restricted_share else g.full
        oracle = brute_force_transit_clusters(g, r)
        inv = find_transit_components(g, r)
        comp_miss += set(inv) != {e.cluster for e in oracle if e.is_component}
        clust_miss += set(find_transit_clusters(g, inv)) != {e.cluster for e in oracle}
        c = census(g)
        over_bound += c.component_count > c.bound
    took = time.perf_counter() - start
    print(
        f"graphs={cfg.graphs} component_mismatches={comp_miss} cluster_mismatches={clust_miss} over_bound={over_bound} seconds={took:.1f}"
    )
    return int(comp_miss or clust_miss or over_bound)


if __name__ == "__main__":
    raise SystemExit(main(parse_config(SweepConfig, __doc__)))
