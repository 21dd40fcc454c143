"""Minimum spanning arborescence (Chu-Liu/Edmonds) with every path directed to the root."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .errors import InfeasibleError
from .graph import Edge


@dataclass(frozen=True)
class ArborescenceResult:
    edges: frozenset[int]
    total_cost: int
    root: Hashable


def _as_tuples(edges: Iterable) -> list[tuple[Hashable, Hashable, int, int]]:
    out = []
    for e in edges:
        if isinstance(e, Edge):
            out.append((e.tail, e.head, e.cost, e.edge_id))
        else:
            u, v, w, i = e
            out.append((u, v, w, i))
    return out


def min_spanning_arborescence(graph, root: Hashable, nodes: Iterable[Hashable] | None = None) -> ArborescenceResult:
    """Cheapest edge set giving every node exactly one directed path to ``root``.

    ``graph`` is an object with ``edges`` (and optionally ``nodes``), or an
    iterable of :class:`Edge` / ``(tail, head, cost, edge_id)`` tuples. When
    ``nodes`` is omitted the node set is taken from the graph or its edges.
    Ties are broken toward the lowest edge id.
    """
    raw = getattr(graph, "edges", graph)
    edges = _as_tuples(raw)
    if nodes is None:
        nodes = getattr(graph, "nodes", None)
    if nodes is None:
        nodes = [n for e in edges for n in e[:2]]
    node_list = list(dict.fromkeys([*nodes, root]))
    cost = {i: w for _, _, w, i in edges}
    chosen = _edmonds(node_list, [(u, v, w, i, i) for u, v, w, i in edges], root)
    return ArborescenceResult(frozenset(chosen), sum(cost[i] for i in chosen), root)


def _edmonds(nodes: list, edges: list[tuple], root) -> set[int]:
    # edges: (tail, head, weight, tie_id, key); key identifies the original edge
    best: dict = {}
    for e in edges:
        u, v, w, tie, _ = e
        if u == root or u == v:
            continue
        cur = best.get(u)
        if cur is None or (w, tie) < (cur[2], cur[3]):
            best[u] = e
    for n in nodes:
        if n != root and n not in best:
            raise InfeasibleError(f"node {n!r} cannot reach the root", node=str(n))

    cycle = _find_cycle(nodes, best, root)
    if cycle is None:
        return {best[u][4] for u in best}

    cyc = set(cycle)
    c = ("__contracted__", len(nodes), tuple(sorted(map(repr, cycle))))
    new_nodes = [n for n in nodes if n not in cyc] + [c]
    new_edges = []
    origin = {}
    for e in edges:
        u, v, w, tie, key = e
        if u in cyc and v in cyc:
            continue
        if u in cyc:
            new_edges.append((c, v, w - best[u][2], tie, key))
            origin[key] = u
        elif v in cyc:
            new_edges.append((u, c, w, tie, key))
        else:
            new_edges.append(e)
    picked = _edmonds(new_nodes, new_edges, root)
    exit_node = next(origin[k] for k in picked if k in origin)
    return picked | {best[u][4] for u in cycle if u != exit_node}


def _find_cycle(nodes, best, root):
    state: dict = {}
    for start in nodes:
        if start == root or start in state:
            continue
        path = []
        u = start
        while u != root and u not in state:
            state[u] = start
            path.append(u)
            u = best[u][1]
        if u != root and state.get(u) == start:
            return path[path.index(u):]
    return None
