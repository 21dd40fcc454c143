"""JSON and Graphviz DOT renderings of graphs and designs."""

from __future__ import annotations

import enum
import json
import re
from typing import Any

from .errors import ObsNetError
from .graph import DynamicGraph, PhysicalGraph, Role, format_cost, from_micro
from .pipeline import DesignSolution


class Format(str, enum.Enum):
    JSON = "json"
    DOT = "dot"


COLORS = {Role.SENSOR: "black", Role.BACKBONE: "green", Role.FUSION: "red", Role.OUTPUT: "blue"}
ROLE_NAMES = {Role.SENSOR: "sensor", Role.BACKBONE: "backbone", Role.FUSION: "fusion", Role.OUTPUT: "output"}

_BARE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _cost(micro: int) -> float:
    return float(from_micro(micro))


def _id(name: str) -> str:
    if _BARE.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def physical_to_dict(g: PhysicalGraph) -> dict[str, Any]:
    return {
        "sensors": list(g.sensor_names),
        "backbone": list(g.backbone_names),
        "fusion": g.fusion_name,
        "edges": [{"from": g.name(e.tail), "to": g.name(e.head), "cost": _cost(e.cost)} for e in g.edges],
        "meta": dict(g.meta),
    }


def dynamic_to_dict(gd: DynamicGraph) -> dict[str, Any]:
    return {
        "variant": gd.variant.value,
        "sensors": [gd.name(x) for x in gd.sensors],
        "outputs": [
            {"name": o.name, "sensor": gd.name(o.source_sensor), "xq_edge": o.xq_edge_id} for o in gd.outputs
        ],
        "fusion": gd.fusion_name,
        "edges": [
            {"id": e.edge_id, "from": gd.name(e.tail), "to": gd.name(e.head), "cost": _cost(e.cost), "origin": e.origin}
            for e in gd.edges
        ],
    }


def _dot(nodes: list[tuple[str, Role]], edges: list[tuple[str, str, int]], name: str) -> str:
    lines = [f"digraph {name} {{"]
    for n, role in nodes:
        lines.append(f'  {_id(n)} [role={ROLE_NAMES[role]}, color={COLORS[role]}];')
    for u, v, c in edges:
        lines.append(f'  {_id(u)} -> {_id(v)} [label="{format_cost(c)}", style=solid];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _physical_nodes(g: PhysicalGraph) -> list[tuple[str, Role]]:
    return (
        [(n, Role.SENSOR) for n in g.sensor_names]
        + [(n, Role.BACKBONE) for n in g.backbone_names]
        + [(g.fusion_name, Role.FUSION)]
    )


def serialize(obj, format: Format | str = Format.JSON) -> str:
    """Render a PhysicalGraph, DynamicGraph or DesignSolution as JSON or DOT.

    A design renders only its used physical links in DOT, so it needs the
    originating graph attached.
    """
    fmt = Format(format)
    if isinstance(obj, PhysicalGraph):
        if fmt is Format.JSON:
            return json.dumps(physical_to_dict(obj), indent=2) + "\n"
        edges = [(obj.name(e.tail), obj.name(e.head), e.cost) for e in obj.edges]
        return _dot(_physical_nodes(obj), edges, "physical")
    if isinstance(obj, DynamicGraph):
        if fmt is Format.JSON:
            return json.dumps(dynamic_to_dict(obj), indent=2) + "\n"
        nodes = [(obj.name(x), Role.SENSOR) for x in obj.sensors]
        nodes += [(o.name, Role.OUTPUT) for o in obj.outputs]
        nodes.append((obj.fusion_name, Role.FUSION))
        edges = [(obj.name(e.tail), obj.name(e.head), e.cost) for e in obj.edges]
        return _dot(nodes, edges, "dynamic")
    if isinstance(obj, DesignSolution):
        if fmt is Format.JSON:
            return obj.to_json()
        g = obj.graph
        if g is None:
            raise ObsNetError("DOT rendering of a design needs its physical graph")
        edges = [(g.name(e.tail), g.name(e.head), e.cost) for e in g.edges if e.edge_id in obj.used_physical_edges]
        return _dot(_physical_nodes(g), edges, "design")
    raise TypeError(f"cannot serialize {type(obj).__name__}")
