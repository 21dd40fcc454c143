"""Physical and dynamic network graphs, exact costs and document parsing.

Costs are stored as non-negative integers in micro-units (one unit of input
cost is 10**6 micro-units) so that optimizers compare weights exactly.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Any, Iterable, Mapping, NamedTuple

from .errors import GraphFormatError

MICRO = 10**6


class Role(enum.IntEnum):
    SENSOR = 0
    BACKBONE = 1
    FUSION = 2
    OUTPUT = 3


class NodeId(NamedTuple):
    role: Role
    index: int

    def __repr__(self) -> str:
        return f"{self.role.name[0].lower()}{self.index}"


@dataclass(frozen=True)
class Edge:
    tail: NodeId
    head: NodeId
    cost: int
    edge_id: int
    # physical edge this one was derived from (dynamic graphs only)
    origin: int | None = None


# role pairs admitted in the physical graph: XX, XQ, QQ, QZ
ADMISSIBLE = frozenset(
    {
        (Role.SENSOR, Role.SENSOR),
        (Role.SENSOR, Role.BACKBONE),
        (Role.BACKBONE, Role.BACKBONE),
        (Role.BACKBONE, Role.FUSION),
    }
)


def to_micro(value: Any) -> int:
    """Convert an input-unit cost to micro-units, rounding half up at 1e-6."""
    if isinstance(value, bool):
        raise GraphFormatError(f"invalid cost {value!r}")
    try:
        dec = value if isinstance(value, Decimal) else Decimal(str(value))
    except InvalidOperation as exc:
        raise GraphFormatError(f"invalid cost {value!r}") from exc
    if not dec.is_finite():
        raise GraphFormatError(f"invalid cost {value!r}")
    if dec < 0:
        raise GraphFormatError(f"negative cost {value!r}")
    return int((dec * MICRO).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def from_micro(micro: int) -> Decimal:
    return Decimal(micro) / MICRO


def format_cost(micro: int) -> str:
    """Render micro-units in input units, e.g. 2000000 -> '2.0'."""
    whole, frac = divmod(int(micro), MICRO)
    digits = f"{frac:06d}".rstrip("0") or "0"
    return f"{whole}.{digits}"


@dataclass(frozen=True)
class PhysicalGraph:
    """Feasible physical links among sensors, backbone nodes and one fusion center.

    Edge ids are dense (0..m-1) in document order. Sensor self-loops are
    implicit at zero cost and are never stored.
    """

    sensor_names: tuple[str, ...]
    backbone_names: tuple[str, ...]
    fusion_name: str
    edges: tuple[Edge, ...]
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.sensor_names:
            raise GraphFormatError("graph has zero sensors")
        names = [*self.sensor_names, *self.backbone_names, self.fusion_name]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise GraphFormatError(f"duplicate node names: {dup}")
        for i, e in enumerate(self.edges):
            if e.edge_id != i:
                raise GraphFormatError("edge ids must be dense and in order")
            if (e.tail.role, e.head.role) not in ADMISSIBLE:
                raise GraphFormatError(
                    f"disallowed edge role pair: {self.name(e.tail)} -> {self.name(e.head)}"
                )
            if e.tail == e.head:
                raise GraphFormatError(f"explicit self-loop on {self.name(e.tail)}")
            if e.cost < 0:
                raise GraphFormatError("negative cost")
            self._check_node(e.tail)
            self._check_node(e.head)

    def _check_node(self, node: NodeId) -> None:
        limit = {
            Role.SENSOR: len(self.sensor_names),
            Role.BACKBONE: len(self.backbone_names),
            Role.FUSION: 1,
        }.get(node.role, 0)
        if not 0 <= node.index < limit:
            raise GraphFormatError(f"unknown node {node!r}")

    @property
    def sensors(self) -> tuple[NodeId, ...]:
        return tuple(NodeId(Role.SENSOR, i) for i in range(len(self.sensor_names)))

    @property
    def backbone(self) -> tuple[NodeId, ...]:
        return tuple(NodeId(Role.BACKBONE, i) for i in range(len(self.backbone_names)))

    @property
    def fusion(self) -> NodeId:
        return NodeId(Role.FUSION, 0)

    @property
    def n_sensors(self) -> int:
        return len(self.sensor_names)

    def name(self, node: NodeId) -> str:
        if node.role is Role.SENSOR:
            return self.sensor_names[node.index]
        if node.role is Role.BACKBONE:
            return self.backbone_names[node.index]
        if node.role is Role.FUSION:
            return self.fusion_name
        raise KeyError(node)

    def node(self, name: str) -> NodeId:
        lookup = self._lookup()
        try:
            return lookup[name]
        except KeyError:
            raise GraphFormatError(f"unknown node name {name!r}") from None

    def _lookup(self) -> dict[str, NodeId]:
        out = {n: NodeId(Role.SENSOR, i) for i, n in enumerate(self.sensor_names)}
        out.update({n: NodeId(Role.BACKBONE, i) for i, n in enumerate(self.backbone_names)})
        out[self.fusion_name] = self.fusion
        return out

    def edges_between(self, tail_role: Role, head_role: Role) -> list[Edge]:
        return [e for e in self.edges if e.tail.role == tail_role and e.head.role == head_role]

    @property
    def sensor_edges(self) -> list[Edge]:
        """E_XX in edge-id order."""
        return self.edges_between(Role.SENSOR, Role.SENSOR)

    @property
    def output_edges(self) -> list[Edge]:
        """E_XQ in edge-id order; row i of a C pattern refers to entry i."""
        return self.edges_between(Role.SENSOR, Role.BACKBONE)

    @property
    def backbone_edges(self) -> list[Edge]:
        """E_B = E_QQ and E_QZ in edge-id order."""
        return [e for e in self.edges if e.tail.role is Role.BACKBONE]

    def edge_label(self, e: Edge) -> str:
        return f"{self.name(e.tail)}->{self.name(e.head)}"

    @classmethod
    def build(
        cls,
        sensors: Iterable[str],
        backbone: Iterable[str],
        fusion: str,
        edges: Iterable[tuple[str, str, Any]],
        meta: Mapping[str, Any] | None = None,
        *,
        micro: bool = False,
    ) -> "PhysicalGraph":
        """Construct from node names and ``(tail, head, cost)`` triples.

        Costs are in input units unless ``micro`` is set.
        """
        sensors = tuple(sensors)
        backbone = tuple(backbone)
        lookup = {n: NodeId(Role.SENSOR, i) for i, n in enumerate(sensors)}
        lookup.update({n: NodeId(Role.BACKBONE, i) for i, n in enumerate(backbone)})
        lookup[fusion] = NodeId(Role.FUSION, 0)
        built = []
        for i, (u, v, c) in enumerate(edges):
            for end in (u, v):
                if end not in lookup:
                    raise GraphFormatError(f"edge references unknown node {end!r}")
            cost = int(c) if micro else to_micro(c)
            if cost < 0:
                raise GraphFormatError(f"negative cost on {u}->{v}")
            built.append(Edge(lookup[u], lookup[v], cost, i))
        return cls(sensors, backbone, fusion, tuple(built), dict(meta or {}))


@dataclass(frozen=True)
class OutputNode:
    """Output y_(x,q) of a dynamic graph, one per sensor-to-backbone link."""

    node: NodeId
    source_sensor: NodeId
    via_backbone: NodeId
    xq_edge_id: int
    name: str


class Variant(enum.Enum):
    BASE = "base"
    SHIFTED = "shifted"


@dataclass(frozen=True)
class DynamicGraph:
    """State/output/fusion cost graph derived from a physical graph.

    ``edges`` holds sensor-sensor links first (origin = physical edge id),
    then sensor-to-output links (origin = the E_XQ edge id) and finally
    output-to-fusion links (origin None), each block in physical id order.
    """

    sensors: tuple[NodeId, ...]
    outputs: tuple[OutputNode, ...]
    fusion: NodeId
    edges: tuple[Edge, ...]
    variant: Variant
    sensor_names: tuple[str, ...] = ()
    fusion_name: str = "z"

    def name(self, node: NodeId) -> str:
        if node.role is Role.SENSOR:
            return self.sensor_names[node.index] if self.sensor_names else repr(node)
        if node.role is Role.OUTPUT:
            return self.outputs[node.index].name
        if node.role is Role.FUSION:
            return self.fusion_name
        raise KeyError(node)

    @property
    def nodes(self) -> list[NodeId]:
        return [*self.sensors, *(o.node for o in self.outputs), self.fusion]


def parse_physical_graph(text: str | bytes | Mapping[str, Any]) -> PhysicalGraph:
    """Parse and validate a graph document (JSON text or an already-loaded mapping)."""
    if isinstance(text, Mapping):
        doc = text
    else:
        try:
            doc = json.loads(text, parse_float=Decimal)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise GraphFormatError(f"malformed document: {exc}") from exc
    if not isinstance(doc, Mapping):
        raise GraphFormatError("malformed document: top level must be an object")
    for key in ("sensors", "backbone", "edges"):
        if not isinstance(doc.get(key), list):
            raise GraphFormatError(f"malformed document: '{key}' must be a list")
    if "fusion" not in doc:
        raise GraphFormatError("missing fusion node")
    fusion = doc["fusion"]
    if not isinstance(fusion, str) or not fusion:
        raise GraphFormatError("missing fusion node")
    sensors, backbone = doc["sensors"], doc["backbone"]
    if not all(isinstance(n, str) for n in [*sensors, *backbone]):
        raise GraphFormatError("malformed document: node names must be strings")
    edges = []
    for raw in doc["edges"]:
        if not isinstance(raw, Mapping) or not {"from", "to", "cost"} <= raw.keys():
            raise GraphFormatError(f"malformed edge entry {raw!r}")
        edges.append((raw["from"], raw["to"], raw["cost"]))
    meta = doc.get("meta", {})
    if not isinstance(meta, Mapping):
        raise GraphFormatError("malformed document: 'meta' must be an object")
    return PhysicalGraph.build(sensors, backbone, fusion, edges, meta)
