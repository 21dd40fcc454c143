"""Random geometric instances on the unit square."""

from __future__ import annotations

import enum
import math

import numpy as np

from .graph import MICRO, PhysicalGraph


class CostModel(str, enum.Enum):
    DISTANCE_SQUARED = "distance-squared"


def random_geometric(
    n_sensors: int,
    n_backbone: int,
    radius: float,
    cost_model: CostModel | str = CostModel.DISTANCE_SQUARED,
    seed: int = 0,
) -> PhysicalGraph:
    """Place nodes uniformly on the unit square and link role-admissible pairs.

    Every ordered pair (u, v) whose role pairing is admissible (sensor->sensor,
    sensor->backbone, backbone->backbone, backbone->fusion) and whose Euclidean
    distance is at most ``radius`` becomes an edge of cost ``|u - v|**2``.
    The fusion center is placed uniformly as well. Output is a pure function
    of the arguments.
    """
    if n_sensors < 1 or n_backbone < 1:
        raise ValueError("need at least one sensor and one backbone node")
    if not 0 < radius <= math.sqrt(2) + 1e-12:
        raise ValueError("radius must lie in (0, sqrt(2)]")
    cost_model = CostModel(cost_model)

    rng = np.random.default_rng(seed)
    xs = rng.random((n_sensors, 2))
    qs = rng.random((n_backbone, 2))
    zpos = rng.random(2)

    sensors = [f"x{i + 1}" for i in range(n_sensors)]
    backbone = [f"q{i + 1}" for i in range(n_backbone)]
    r2 = radius * radius

    def d2(a, b) -> float:
        dx = float(a[0]) - float(b[0])
        dy = float(a[1]) - float(b[1])
        return dx * dx + dy * dy

    edges: list[tuple[str, str, int]] = []

    def link(u: str, v: str, pu, pv) -> None:
        dist2 = d2(pu, pv)
        if dist2 <= r2:
            edges.append((u, v, int(math.floor(dist2 * MICRO + 0.5))))

    for i in range(n_sensors):
        for j in range(n_sensors):
            if i != j:
                link(sensors[i], sensors[j], xs[i], xs[j])
    for i in range(n_sensors):
        for j in range(n_backbone):
            link(sensors[i], backbone[j], xs[i], qs[j])
    for i in range(n_backbone):
        for j in range(n_backbone):
            if i != j:
                link(backbone[i], backbone[j], qs[i], qs[j])
    for i in range(n_backbone):
        link(backbone[i], "z", qs[i], zpos)

    meta = {
        "generator": "random_geometric",
        "seed": int(seed),
        "radius": float(radius),
        "cost_model": cost_model.value,
        "fusion_placement": "uniform",
        "positions": {
            **{n: [float(p[0]), float(p[1])] for n, p in zip(sensors, xs)},
            **{n: [float(p[0]), float(p[1])] for n, p in zip(backbone, qs)},
            "z": [float(zpos[0]), float(zpos[1])],
        },
    }
    return PhysicalGraph.build(sensors, backbone, "z", edges, meta, micro=True)
