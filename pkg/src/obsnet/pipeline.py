"""End-to-end design of a minimum-cost robust observable structure.

Sensor-to-backbone links become output nodes whose price includes the
cheapest backbone route to the fusion center; the route price is then moved
onto the sensor link so that all positive costs leave sensors, and the
rooted connectivity solver picks the cheapest structure.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .connectivity import min_rooted_connected_subgraph
from .errors import GraphFormatError, InfeasibleError, ObsNetError
from .flows import deficient_sensor, unreachable_backbone
from .graph import (
    DynamicGraph,
    Edge,
    NodeId,
    OutputNode,
    PhysicalGraph,
    Role,
    Variant,
    format_cost,
    from_micro,
)
from .structural import StructuralPair


@dataclass(frozen=True)
class BackboneRoutes:
    """Cheapest backbone route from each reachable backbone node to the fusion center."""

    dist: Mapping[NodeId, int]
    parent: Mapping[NodeId, Edge]
    fusion: NodeId

    def route(self, q: NodeId) -> list[Edge]:
        path = []
        while q != self.fusion:
            e = self.parent[q]
            path.append(e)
            q = e.head
        return path


def backbone_shortest_paths(g: PhysicalGraph) -> BackboneRoutes:
    """Dijkstra toward the fusion center over backbone links; unreachable nodes are absent."""
    into: dict[NodeId, list[Edge]] = {}
    for e in g.backbone_edges:
        into.setdefault(e.head, []).append(e)
    z = g.fusion
    dist: dict[NodeId, int] = {z: 0}
    parent: dict[NodeId, Edge] = {}
    done: set[NodeId] = set()
    heap = [(0, z)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for e in into.get(u, ()):
            w = e.tail
            if w in done:
                continue
            nd = d + e.cost
            best = dist.get(w)
            if best is None or nd < best or (nd == best and e.edge_id < parent[w].edge_id):
                dist[w] = nd
                parent[w] = e
                heapq.heappush(heap, (nd, w))
    del dist[z]
    return BackboneRoutes(dist, parent, z)


def _output_name(g: PhysicalGraph, e: Edge) -> str:
    return f"y_({g.name(e.tail)},{g.name(e.head)})"


def build_dynamic_graph(g: PhysicalGraph, routes: BackboneRoutes) -> DynamicGraph:
    """One output per sensor-to-backbone link, priced by the link and its backbone route."""
    xq = g.output_edges
    for e in xq:
        if e.head not in routes.dist:
            raise InfeasibleError(
                f"backbone node {g.name(e.head)} has no path to the fusion center", node=g.name(e.head)
            )
    outputs = tuple(
        OutputNode(NodeId(Role.OUTPUT, r), e.tail, e.head, e.edge_id, _output_name(g, e)) for r, e in enumerate(xq)
    )
    edges: list[Edge] = []
    for e in g.sensor_edges:
        edges.append(Edge(e.tail, e.head, e.cost, len(edges), e.edge_id))
    for o, e in zip(outputs, xq):
        edges.append(Edge(e.tail, o.node, e.cost, len(edges), e.edge_id))
    for o in outputs:
        edges.append(Edge(o.node, g.fusion, routes.dist[o.via_backbone], len(edges), None))
    return DynamicGraph(g.sensors, outputs, g.fusion, tuple(edges), Variant.BASE, g.sensor_names, g.fusion_name)


def shift_weights(gd: DynamicGraph) -> DynamicGraph:
    """Move each output's route price onto its incoming sensor link."""
    if gd.variant is not Variant.BASE:
        raise ObsNetError("weights are already shifted")
    exit_cost = {e.tail: e.cost for e in gd.edges if e.tail.role is Role.OUTPUT}
    edges = []
    for e in gd.edges:
        if e.head.role is Role.OUTPUT:
            edges.append(Edge(e.tail, e.head, e.cost + exit_cost[e.head], e.edge_id, e.origin))
        elif e.tail.role is Role.OUTPUT:
            edges.append(Edge(e.tail, e.head, 0, e.edge_id, e.origin))
        else:
            edges.append(e)
    return DynamicGraph(gd.sensors, gd.outputs, gd.fusion, tuple(edges), Variant.SHIFTED, gd.sensor_names, gd.fusion_name)


@dataclass(frozen=True)
class CostReport:
    per_output_sum: int
    deduplicated: int
    used_edges: frozenset[int]
    per_output: Mapping[int, int]


def _cheapest_link(g: PhysicalGraph) -> dict[tuple[int, int], Edge]:
    best: dict[tuple[int, int], Edge] = {}
    for e in g.sensor_edges:
        key = (e.tail.index, e.head.index)
        if key not in best or (e.cost, e.edge_id) < (best[key].cost, best[key].edge_id):
            best[key] = e
    return best


def evaluate_cost(
    g: PhysicalGraph,
    s: StructuralPair,
    routes: BackboneRoutes | None = None,
    sensor_links: frozenset[int] | None = None,
) -> CostReport:
    """Both cost readings of a structure.

    ``per_output_sum`` prices every used output by its full backbone route;
    ``deduplicated`` sums the set of used physical links once each. A link
    pattern entry is realised by the cheapest parallel link unless
    ``sensor_links`` pins the exact physical ids.
    """
    routes = routes or backbone_shortest_paths(g)
    n = g.n_sensors
    xq = g.output_edges
    if s.a_pattern.shape != (n, n) or s.c_pattern.shape != (len(xq), n):
        raise InfeasibleError("structure shape does not match the graph")
    cheapest = _cheapest_link(g)
    by_id = {e.edge_id: e for e in g.edges}
    chosen: list[Edge] = []
    if sensor_links is not None:
        chosen = [by_id[i] for i in sorted(sensor_links)]
        pins = {(e.head.index, e.tail.index) for e in chosen}
    for i in range(n):
        for j in range(n):
            if i == j or not s.a_pattern[i, j]:
                continue
            if (j, i) not in cheapest:
                raise InfeasibleError(f"no physical link {g.sensor_names[j]}->{g.sensor_names[i]}")
            if sensor_links is None:
                chosen.append(cheapest[j, i])
            elif (i, j) not in pins:
                raise InfeasibleError("pinned links do not match the pattern")
    used = {e.edge_id for e in chosen}
    total = sum(e.cost for e in chosen)
    per_output: dict[int, int] = {}
    for r, e in enumerate(xq):
        row = s.c_pattern[r]
        if not row.any():
            continue
        if not row[e.tail.index] or row.sum() != 1:
            raise InfeasibleError(f"C row {r} does not observe its own sensor")
        if e.head not in routes.dist:
            raise InfeasibleError(f"backbone node {g.name(e.head)} cannot reach the fusion center")
        per_output[r] = e.cost + routes.dist[e.head]
        used.add(e.edge_id)
        used.update(b.edge_id for b in routes.route(e.head))
    per_sum = total + sum(per_output.values())
    dedup = sum(by_id[i].cost for i in used)
    return CostReport(per_sum, dedup, frozenset(used), per_output)


@dataclass(frozen=True)
class DesignSolution:
    """Designed structure with its used physical links and both cost readings."""

    k: int
    structure: StructuralPair
    used_physical_edges: frozenset[int]
    per_output_route_cost: Mapping[int, int]
    cost_per_output_sum: int
    cost_deduplicated: int
    graph: PhysicalGraph | None = field(default=None, compare=False)

    @property
    def costs_disagree(self) -> bool:
        return self.cost_per_output_sum != self.cost_deduplicated

    @property
    def used_rows(self) -> list[int]:
        return [r for r in range(self.structure.n_outputs) if self.structure.c_pattern[r].any()]

    def to_dict(self) -> dict[str, Any]:
        s = self.structure
        outputs = [
            {"row": r, "sensor": sensor, "backbone": backbone, "used": bool(s.c_pattern[r].any())}
            for r, (sensor, backbone) in enumerate(s.output_index)
        ]
        doc: dict[str, Any] = {
            "k": self.k,
            "sensors": list(s.sensor_names),
            "a_pattern": s.a_pattern.tolist(),
            "c_pattern": s.c_pattern.tolist(),
            "outputs": outputs,
            "cost_per_output_sum": float(from_micro(self.cost_per_output_sum)),
            "cost_deduplicated": float(from_micro(self.cost_deduplicated)),
            "per_output_route_cost": {str(r): float(from_micro(c)) for r, c in sorted(self.per_output_route_cost.items())},
        }
        if self.graph is not None:
            by_id = {e.edge_id: e for e in self.graph.edges}
            doc["used_edges"] = [
                {"id": i, "from": self.graph.name(by_id[i].tail), "to": self.graph.name(by_id[i].head)}
                for i in sorted(self.used_physical_edges)
            ]
        else:
            doc["used_edges"] = [{"id": i} for i in sorted(self.used_physical_edges)]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], graph: PhysicalGraph | None = None) -> "DesignSolution":
        from .graph import to_micro

        try:
            outputs = sorted(doc["outputs"], key=lambda o: o["row"])
            index = tuple((o["sensor"], o["backbone"]) for o in outputs)
            c = np.array(doc["c_pattern"], dtype=np.int64)
            a = np.array(doc["a_pattern"], dtype=np.int64)
            if c.size == 0:
                c = c.reshape(0, len(a))
            structure = StructuralPair(a, c, index, tuple(doc.get("sensors", ())))
            per_out = {int(r): to_micro(v) for r, v in doc.get("per_output_route_cost", {}).items()}
            return cls(
                int(doc["k"]),
                structure,
                frozenset(int(e["id"]) for e in doc.get("used_edges", [])),
                per_out,
                to_micro(doc["cost_per_output_sum"]),
                to_micro(doc["cost_deduplicated"]),
                graph,
            )
        except (KeyError, TypeError, ValueError, ObsNetError) as exc:
            raise GraphFormatError(f"malformed design document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str | bytes, graph: PhysicalGraph | None = None) -> "DesignSolution":
        try:
            doc = json.loads(text)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise GraphFormatError(f"malformed design document: {exc}") from exc
        if not isinstance(doc, Mapping):
            raise GraphFormatError("malformed design document: top level must be an object")
        return cls.from_dict(doc, graph)

    def summary(self) -> str:
        return (
            f"cost_per_output_sum {format_cost(self.cost_per_output_sum)}\n"
            f"cost_deduplicated {format_cost(self.cost_deduplicated)}"
        )


def design(g: PhysicalGraph, k: int, method: str = "auto") -> DesignSolution:
    """Minimum per-output-cost structure observable after any k sensor failures."""
    if k < 0:
        raise ValueError("k must be non-negative")
    stuck = unreachable_backbone(g)
    if stuck:
        q = g.name(stuck[0])
        raise InfeasibleError(f"backbone node {q} has no path to the fusion center", node=q)
    weak = deficient_sensor(g, k)
    if weak is not None:
        name = g.name(weak)
        raise InfeasibleError(f"sensor {name} has fewer than {k + 1} disjoint paths to the backbone", sensor=name)

    routes = backbone_shortest_paths(g)
    base = build_dynamic_graph(g, routes)
    shifted = shift_weights(base)
    # sensor-to-backbone disjoint paths were checked above; they equal the
    # sensor-to-fusion connectivity of the dynamic graph
    chosen = min_rooted_connected_subgraph(shifted, k + 1, method=method, check=False)

    base_cost = sum(e.cost for e in base.edges if e.edge_id in chosen)
    shifted_cost = sum(e.cost for e in shifted.edges if e.edge_id in chosen)
    if base_cost != shifted_cost:
        raise ObsNetError("weight shift changed the cost of the chosen structure")

    n = g.n_sensors
    a = np.eye(n, dtype=np.uint8)
    c = np.zeros((len(base.outputs), n), dtype=np.uint8)
    sensor_links = []
    for e in base.edges:
        if e.edge_id not in chosen:
            continue
        if e.head.role is Role.SENSOR:
            a[e.head.index, e.tail.index] = 1
            sensor_links.append(e.origin)
        elif e.head.role is Role.OUTPUT:
            c[e.head.index, e.tail.index] = 1
    index = tuple((g.name(o.source_sensor), g.name(o.via_backbone)) for o in base.outputs)
    structure = StructuralPair(a, c, index, g.sensor_names)
    report = evaluate_cost(g, structure, routes, frozenset(sensor_links))
    if report.per_output_sum != base_cost:
        raise ObsNetError("cost bookkeeping mismatch")
    return DesignSolution(
        k,
        structure,
        report.used_edges,
        report.per_output,
        report.per_output_sum,
        report.deduplicated,
        g,
    )
