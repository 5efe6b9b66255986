"""Edge-list files for the worked example graphs, plus two graph families."""

from __future__ import annotations

from importlib import resources

from ..dag import Dag, parse_graph

NAMES = ("fig1_g1", "fig1_g2", "fig3a", "fig3b_k2", "fig3b_k3", "fig3b_k4", "fig3c", "fig4", "fig5a", "fig5b")


def fixture_path(name: str):
    return resources.files(__package__).joinpath(f"{name}.txt")


def load(name: str) -> Dag:
    return parse_graph(fixture_path(name).read_text())


def fig3b(k: int) -> Dag:
    """x -> ri -> ei -> y for i = 1..k: every union of the {ri, ei} pairs is a cluster."""
    edges = []
    for i in range(1, k + 1):
        edges += [("x", f"r{i}"), (f"r{i}", f"e{i}"), (f"e{i}", "y")]
    return Dag.from_edges(edges)


def path_graph(n: int) -> Dag:
    """v1 -> v2 -> ... -> vn."""
    if n == 1:
        return Dag(["v1"])
    return Dag.from_edges((f"v{i}", f"v{i + 1}") for i in range(1, n))
