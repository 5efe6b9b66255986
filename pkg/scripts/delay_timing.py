"""Time the cluster stream on the Fig. 3(b) family: total time and largest gap."""

from __future__ import annotations

import time
from dataclasses import dataclass

from _config import parse_config

from transit_clusters.enumeration import find_transit_clusters, find_transit_components
from transit_clusters.fixtures import fig3b


@dataclass(frozen=True)
class TimingConfig:
    ks: tuple[int, ...] = (4, 6, 8, 10, 12, 14)
    max_clusters: int = 1000


def main(cfg: TimingConfig) -> None:
    print(f"{'k':>3} {'n':>4} {'components':>10} {'emitted':>8} {'total_s':>8} {'max_gap_ms':>10}")
    for k in cfg.ks:
        g = fig3b(k)
        start = last = time.perf_counter()
        inv = find_transit_components(g)
        gap, count = 0.0, 0
        for _ in find_transit_clusters(g, inv):
            now = time.perf_counter()
            gap, last = max(gap, now - last), now
            count += 1
            if count == cfg.max_clusters:
                break
        print(f"{k:>3} {g.n:>4} {len(inv):>10} {count:>8} {last - start:>8.3f} {gap * 1000:>10.2f}")


if __name__ == "__main__":
    main(parse_config(TimingConfig, __doc__))
