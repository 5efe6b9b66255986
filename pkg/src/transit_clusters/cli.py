"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (message on stderr), 2 on a
usage error or an unreadable input file.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from collections.abc import Iterator, Sequence
from pathlib import Path

from .causal import (
    CausalDiagram,
    CausalQuery,
    classify_cluster,
    identifiable,
    preservation_report,
    validate_causal_diagram,
)
from .dag import Dag, connected_components, induced_subgraph, parse_graph, serialize_graph
from .enumeration import census, find_transit_clusters, find_transit_components
from .errors import TransitError
from .extension import derive_extension_sequence, format_trace, parse_trace, replay
from .transit import ClusteredGraph, apply_clustering, check_transit_cluster

__all__ = ["export_dot", "main", "run"]


class UsageError(Exception):
    pass


def export_dot(obj: Dag | CausalDiagram | ClusteredGraph) -> str:
    """DOT digraph; latent vertices are boxes, observed ones ellipses."""
    if isinstance(obj, ClusteredGraph):
        g = obj.graph
    elif isinstance(obj, CausalDiagram):
        g = obj.dag
    else:
        g = obj
    lines = ["digraph {"]
    for i, label in enumerate(g.labels):
        shape = "box" if g.latent >> i & 1 else "ellipse"
        lines.append(f'  "{label}" [shape={shape}];')
    lines += [f'  "{g.labels[u]}" -> "{g.labels[v]}";' for u, v in g.edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _label_list(value: str) -> list[str]:
    return [s for s in value.replace(",", " ").split() if s]


def _restriction(g: Dag, value: str | None) -> int | None:
    if value is None:
        return None
    path = Path(value)
    text = _read(value) if path.is_file() else value
    return g.mask(_label_list(text))


def _pieces(g: Dag, per_component: bool) -> list[Dag]:
    if not per_component:
        return [g]
    return [induced_subgraph(g, c) for c in connected_components(g)]


def _need(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} requires --{name}")


def _cmd_components(g: Dag, args) -> Iterator[str] | dict:
    results = []
    for piece in _pieces(g, args.per_component):
        inv = find_transit_components(piece, _restriction(piece, args.restrict), threads=args.threads)
        results.append([piece.format_set(c) for c in inv])
    if args.json:
        return {"components": results if args.per_component else results[0]}
    return _blocks(results, args.per_component)


def _blocks(results: list[list[str]], per_component: bool) -> Iterator[str]:
    for k, rows in enumerate(results):
        if per_component:
            yield f"# component {k + 1}"
        yield from rows


def _cmd_clusters(g: Dag, args) -> Iterator[str] | dict:
    results = []
    for piece in _pieces(g, args.per_component):
        inv = find_transit_components(piece, _restriction(piece, args.restrict), threads=args.threads)
        stream = iter(inv) if args.components_only else find_transit_clusters(piece, inv)
        if args.limit is not None:
            stream = itertools.islice(stream, args.limit)
        if args.count:
            results.append([str(sum(1 for _ in stream))])
        else:
            # each page is sorted so the output does not depend on the search order
            found = list(stream)
            found.sort(key=lambda m: (bin(m).count("1"), piece.sorted_names(m)))
            results.append([piece.format_set(c) for c in found])
    if args.json:
        key = "count" if args.count else "clusters"
        data = [int(r[0]) for r in results] if args.count else results
        return {key: data if args.per_component else data[0]}
    return _blocks(results, args.per_component)


def _cmd_check(g: Dag, args) -> Iterator[str] | dict:
    _need(args, "cluster")
    t = g.mask(args.cluster)
    v = check_transit_cluster(g, t)
    if args.json:
        return {
            "cluster": g.format_set(t),
            "is_cluster": v.is_cluster,
            "conditions": list(v.conditions),
            "failed_condition": v.failed_condition,
            "witness": [g.labels[w] for w in v.witness] if v.witness else None,
        }
    return iter([f"TRANSIT CLUSTER: {v.describe(g)}"])


def _cmd_contract(g: Dag, args) -> Iterator[str] | dict:
    _need(args, "cluster")
    res = apply_clustering(g, g.mask(args.cluster), args.label)
    if args.json:
        return {"graph": serialize_graph(res.graph), "mapping": res.mapping}
    return iter(serialize_graph(res.graph).splitlines())


def _cmd_classify(g: Dag, args) -> Iterator[str] | dict:
    _need(args, "cluster")
    d = validate_causal_diagram(g)
    cls = classify_cluster(d, g.mask(args.cluster))
    if args.json:
        return {"plain": cls.plain, "congested": cls.congested}
    return iter([str(cls)])


def _query(g: Dag, args) -> tuple[CausalDiagram, CausalQuery]:
    _need(args, "treat", "outcome")
    d = validate_causal_diagram(g)
    return d, CausalQuery.from_labels(d, _label_list(args.outcome), _label_list(args.treat))


def _cmd_identify(g: Dag, args) -> Iterator[str] | dict:
    d, q = _query(g, args)
    res = identifiable(d, q)
    w = res.witness
    if args.json:
        out: dict = {"identifiable": res.decision}
        if w:
            out["witness"] = {
                "root_set": g.sorted_names(w.root_set),
                "larger_forest": g.sorted_names(w.larger_forest),
                "smaller_forest": g.sorted_names(w.smaller_forest),
            }
        return out
    if res.decision:
        return iter(["IDENTIFIABLE"])
    return iter(["NOT IDENTIFIABLE", "hedge:", *("  " + line for line in w.describe(g).splitlines())])


def _cmd_preserve(g: Dag, args) -> Iterator[str] | dict:
    _need(args, "cluster")
    d, q = _query(g, args)
    rep = preservation_report(d, g.mask(args.cluster), q, args.label)
    fields = {
        "plain": rep.cls.plain,
        "congested": rep.cls.congested,
        "id_original": rep.id_original,
        "id_clustered": rep.id_clustered,
        "theorem_applies": rep.theorem_applies,
        "consistent": rep.consistent,
    }
    if args.json:
        return fields
    return (f"{k}={str(v).lower()}" for k, v in fields.items())


def _cmd_derive(g: Dag, args) -> Iterator[str] | dict:
    _need(args, "cluster")
    trace = derive_extension_sequence(g, g.mask(args.cluster), args.label)
    if args.json:
        return {"ops": [str(op) for op in trace.ops], "origin": trace.origin}
    return iter(format_trace(trace).splitlines())


def _cmd_extend(g: Dag, args) -> Iterator[str] | dict:
    _need(args, "cluster", "script")
    t = g.mask(args.cluster)
    trace = parse_trace(_read(args.script), g, t)
    g2, t2 = replay(trace)
    if args.json:
        return {"graph": serialize_graph(g2), "cluster": g2.sorted_names(t2)}
    return iter([f"# cluster: {g2.format_set(t2)}", *serialize_graph(g2).splitlines()])


def _cmd_census(g: Dag, args) -> Iterator[str] | dict:
    results = [census(piece) for piece in _pieces(g, args.per_component)]
    if args.json:
        data = [{"component_count": c.component_count, "bound": c.bound} for c in results]
        return {"census": data if args.per_component else data[0]}
    return _blocks([[f"components={c.component_count} bound={c.bound}"] for c in results], args.per_component)


def _cmd_dot(g: Dag, args) -> Iterator[str] | dict:
    target = g if args.cluster is None else apply_clustering(g, g.mask(args.cluster), args.label)
    text = export_dot(target)
    if args.json:
        return {"dot": text}
    return iter(text.splitlines())


COMMANDS = {
    "components": (_cmd_components, "list transit components"),
    "clusters": (_cmd_clusters, "list transit clusters"),
    "check": (_cmd_check, "check the five transit-cluster conditions for --cluster"),
    "contract": (_cmd_contract, "replace --cluster by one vertex and print the graph"),
    "classify": (_cmd_classify, "report whether --cluster is plain and/or congested"),
    "identify": (_cmd_identify, "decide identifiability of p(outcome | do(treat))"),
    "preserve": (_cmd_preserve, "compare identifiability before and after clustering"),
    "derive": (_cmd_derive, "print operations that rebuild --cluster from one vertex"),
    "extend": (_cmd_extend, "replay an operation script on --cluster"),
    "census": (_cmd_census, "count components against the n(n+1)/2 - 1 bound"),
    "dot": (_cmd_dot, "export the graph (or its clustering) as DOT"),
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transit-clusters", description="Transit clusters in DAGs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("graph", help="edge-list file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--cluster", help="comma-separated cluster labels")
        p.add_argument("--label", default="t", help="label for the contracted vertex (default t)")
        if name in ("components", "clusters", "census"):
            p.add_argument("--per-component", action="store_true", help="run each weak component separately")
        if name in ("components", "clusters"):
            p.add_argument("--restrict", help="allowed vertices: a file or a comma-separated list")
            p.add_argument("--threads", type=int, default=1, help="worker threads for the component scan")
        if name == "clusters":
            p.add_argument("--components-only", action="store_true")
            p.add_argument("--limit", type=int, help="stop after N clusters")
            p.add_argument("--count", action="store_true", help="print only the number of clusters")
        if name in ("identify", "preserve"):
            p.add_argument("--treat", help="treatment labels")
            p.add_argument("--outcome", help="outcome labels")
        if name == "extend":
            p.add_argument("--script", help="trace file with one 'op=<Name> args=<labels>' per line")
    return parser


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[args.command][0]
    try:
        g = parse_graph(_read(args.graph))
        result = handler(g, args)
        if isinstance(result, dict):
            stdout.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
        else:
            for line in result:
                stdout.write(line + "\n")
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except TransitError as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
