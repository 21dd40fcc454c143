"""Node-capacitated maximum flow and local node connectivity.

All flows are computed with breadth-first augmenting paths (Edmonds-Karp);
arcs are scanned in insertion order so results are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import ObsNetError
from .graph import Edge, NodeId, PhysicalGraph, Role

INF = float("inf")

_SUPER_SINK = ("__sink__",)


@dataclass
class FlowNetwork:
    """Directed network with integral arc capacities, one source and a sink set.

    Sinks are aggregated through a synthetic super-sink reached by arcs of
    infinite capacity.
    """

    nodes: list[Hashable] = field(default_factory=list)
    arcs: list[tuple[Hashable, Hashable, float]] = field(default_factory=list)
    source: Hashable = None
    sinks: set[Hashable] = field(default_factory=set)

    def add_arc(self, tail: Hashable, head: Hashable, capacity: float) -> int:
        self.arcs.append((tail, head, capacity))
        return len(self.arcs) - 1


class _Residual:
    __slots__ = ("index", "head", "cap", "adj")

    def __init__(self, nodes: Sequence[Hashable]):
        self.index = {n: i for i, n in enumerate(nodes)}
        self.head: list[int] = []
        self.cap: list[float] = []
        self.adj: list[list[int]] = [[] for _ in nodes]

    def add(self, u: int, v: int, c: float) -> int:
        a = len(self.head)
        self.head += [v, u]
        self.cap += [c, 0]
        self.adj[u].append(a)
        self.adj[v].append(a + 1)
        return a


def _build(net: FlowNetwork) -> tuple[_Residual, int, int]:
    if net.source in net.sinks:
        raise ObsNetError("source equals a sink")
    nodes = dict.fromkeys([*net.nodes, net.source, *net.sinks])
    for t, h, _ in net.arcs:
        nodes.setdefault(t)
        nodes.setdefault(h)
    nodes.setdefault(_SUPER_SINK)
    res = _Residual(list(nodes))
    for t, h, c in net.arcs:
        if c < 0:
            raise ObsNetError("negative capacity")
        res.add(res.index[t], res.index[h], c)
    sink = res.index[_SUPER_SINK]
    for s in net.sinks:
        res.add(res.index[s], sink, INF)
    return res, res.index[net.source], sink


def _augment(res: _Residual, s: int, t: int, limit: float = INF) -> float:
    total = 0
    n = len(res.adj)
    head, cap, adj = res.head, res.cap, res.adj
    while total < limit:
        pred = [-1] * n
        pred[s] = -2
        queue = deque([s])
        found = False
        while queue and not found:
            u = queue.popleft()
            for a in adj[u]:
                if cap[a] > 0:
                    v = head[a]
                    if pred[v] == -1:
                        pred[v] = a
                        if v == t:
                            found = True
                            break
                        queue.append(v)
        if not found:
            break
        push = limit - total
        v = t
        while v != s:
            a = pred[v]
            push = min(push, cap[a])
            v = head[a ^ 1]
        v = t
        while v != s:
            a = pred[v]
            cap[a] -= push
            cap[a ^ 1] += push
            v = head[a ^ 1]
        total += push
    return total


def _source_side(res: _Residual, s: int) -> set[int]:
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in res.adj[u]:
            if res.cap[a] > 0 and res.head[a] not in seen:
                seen.add(res.head[a])
                queue.append(res.head[a])
    return seen


def max_flow(net: FlowNetwork, limit: float = INF) -> float:
    """Maximum flow from ``net.source`` to the aggregated sinks.

    ``limit`` stops augmentation once that much flow has been routed, which is
    enough for threshold questions such as "are there at least c paths".
    """
    res, s, t = _build(net)
    value = _augment(res, s, t, limit)
    return int(value) if float(value).is_integer() else value


def min_cut(net: FlowNetwork) -> tuple[float, set[Hashable]]:
    """Return the max-flow value and the inclusion-minimal source side of a minimum cut."""
    res, s, t = _build(net)
    value = _augment(res, s, t)
    inv = {i: n for n, i in res.index.items()}
    side = {inv[i] for i in _source_side(res, s)}
    return value, side


def _sensor_network(g: PhysicalGraph, x: NodeId) -> FlowNetwork:
    net = FlowNetwork(source=x, sinks=set(g.backbone))
    for v in g.sensors:
        if v != x:
            net.add_arc(("in", v), ("out", v), 1)

    def tail_of(v: NodeId):
        return v if v == x else ("out", v)

    for e in g.edges:
        if e.tail.role is not Role.SENSOR:
            continue
        if e.head == x:
            continue
        head = ("in", e.head) if e.head.role is Role.SENSOR else e.head
        net.add_arc(tail_of(e.tail), head, 1)
    return net


def sensor_disjoint_paths(g: PhysicalGraph, x: NodeId, limit: float = INF) -> int:
    """Maximum number of internally node-disjoint paths from sensor ``x`` to the backbone set.

    Non-source sensors and all sensor-subnetwork links have capacity one;
    backbone nodes are unbounded sinks.
    """
    if x.role is not Role.SENSOR:
        raise ObsNetError(f"{x!r} is not a sensor")
    if not g.backbone:
        return 0
    return int(max_flow(_sensor_network(g, x), limit))


def backbone_reaches_fusion(g: PhysicalGraph) -> dict[NodeId, bool]:
    """Whether each backbone node has a directed path to the fusion center over E_B."""
    rev: dict[NodeId, list[NodeId]] = {}
    for e in g.backbone_edges:
        rev.setdefault(e.head, []).append(e.tail)
    seen = {g.fusion}
    stack = [g.fusion]
    while stack:
        u = stack.pop()
        for w in rev.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return {q: q in seen for q in g.backbone}


def unreachable_backbone(g: PhysicalGraph) -> list[NodeId]:
    """Backbone nodes that receive some sensor link but cannot reach the fusion center."""
    reach = backbone_reaches_fusion(g)
    used = dict.fromkeys(e.head for e in g.output_edges)
    return [q for q in used if not reach[q]]


def max_robustness(g: PhysicalGraph, upto: int | None = None) -> int | None:
    """Largest k for which a robust design exists, or None when no design exists.

    This is one less than the smallest sensor-to-backbone disjoint-path count.
    With ``upto`` set, flows stop early and the result is capped at ``upto``.
    """
    if unreachable_backbone(g):
        return None
    limit = INF if upto is None else upto + 1
    best = None
    for x in g.sensors:
        f = sensor_disjoint_paths(g, x, limit)
        if f == 0:
            return None
        best = f if best is None else min(best, f)
    return best - 1


def deficient_sensor(g: PhysicalGraph, k: int) -> NodeId | None:
    """First sensor (in order) with fewer than k+1 disjoint paths to the backbone."""
    for x in g.sensors:
        if sensor_disjoint_paths(g, x, k + 1) < k + 1:
            return x
    return None


def _pairs(graph) -> Iterable[tuple[Hashable, Hashable]]:
    edges = getattr(graph, "edges", graph)
    for e in edges:
        if isinstance(e, Edge):
            yield e.tail, e.head
        else:
            yield e[0], e[1]


def local_node_connectivity(graph, u: Hashable, v: Hashable, limit: float = INF) -> int:
    """Number of internally node-disjoint directed u->v paths (Menger).

    ``graph`` is any object with an ``edges`` attribute, or an iterable of
    ``(tail, head)`` pairs / :class:`Edge` objects. Parallel u->v links each
    count as a separate path.
    """
    if u == v:
        raise ObsNetError("local connectivity needs distinct endpoints")
    pairs = list(_pairs(graph))
    net = FlowNetwork(source=u, sinks={v})
    inner = dict.fromkeys(n for p in pairs for n in p if n != u and n != v)
    for n in inner:
        net.add_arc(("in", n), ("out", n), 1)

    def t_of(n):
        return n if n == u else ("out", n)

    def h_of(n):
        return n if n == v else ("in", n)

    for a, b in pairs:
        if a == v or b == u or a == b:
            continue
        net.add_arc(t_of(a), h_of(b), 1)
    return int(max_flow(net, limit))
