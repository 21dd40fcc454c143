"""Monte Carlo failure curves for designed sensor networks.

A designed network fails under a set of dead sensors when some surviving
sensor can no longer reach a live output over the designed sensor links.
Random streams are derived from the master seed with splitmix64 so every
(graph, failure count, trial) triple has its own reproducible generator.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import InfeasibleError
from .flows import max_robustness
from .generators import CostModel, random_geometric
from .graph import NodeId
from .pipeline import DesignSolution, design

log = logging.getLogger(__name__)

REDRAW_BUDGET = 256
_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed: h = splitmix64(h ^ part), starting from 0."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & _MASK))
    return h


class _FailureModel:
    """Reverse adjacency of the designed sensor links, ready for repeated queries."""

    def __init__(self, sol: DesignSolution):
        s = sol.structure
        n = s.n_states
        self.n = n
        self.pred: list[list[int]] = [[] for _ in range(n)]
        a = s.a_pattern
        for i in range(n):
            for j in range(n):
                if i != j and a[i, j]:
                    self.pred[i].append(j)
        self.observed = sorted({j for j in s.observed_by() if j >= 0})

    def fails(self, dead: Iterable[int]) -> bool:
        dead = set(dead)
        seen = [False] * self.n
        for j in dead:
            seen[j] = True
        stack = [j for j in self.observed if j not in dead]
        for j in stack:
            seen[j] = True
        while stack:
            u = stack.pop()
            for w in self.pred[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return not all(seen)


def _sensor_index(sol: DesignSolution, node) -> int:
    if isinstance(node, NodeId):
        return node.index
    if isinstance(node, str):
        return sol.structure.sensor_names.index(node)
    return int(node)


def network_fails(sol: DesignSolution, failed: Iterable) -> bool:
    """True iff some surviving sensor cannot reach a surviving used output.

    ``failed`` may hold sensor NodeIds, sensor names or state indices.
    """
    return _FailureModel(sol).fails(_sensor_index(sol, f) for f in failed)


@dataclass(frozen=True)
class CurvePoint:
    l: int
    ratio: float
    prob: float
    failures: int
    trials: int
    graphs: int

    @property
    def std_error(self) -> float:
        n = self.trials * self.graphs
        return math.sqrt(self.prob * (1 - self.prob) / n) if n else 0.0


@dataclass(frozen=True)
class RobustnessCurve:
    points: tuple[CurvePoint, ...]
    config: dict[str, Any] = field(default_factory=dict)

    def prob(self, l: int) -> float:
        return next(p.prob for p in self.points if p.l == l)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "ratio", "prob", "trials", "graphs"])
        for p in self.points:
            w.writerow([p.l, f"{p.ratio:.6f}", f"{p.prob:.6f}", p.trials, p.graphs])
        return buf.getvalue()


def _draw_designs(n_sensors, n_backbone, radius, cost_model, ks, n_graphs, seed, method):
    """Designs for every k on each accepted graph, plus the redraw count."""
    need = max(ks)
    designs = []
    redraws = 0
    for gi in range(n_graphs):
        for attempt in range(REDRAW_BUDGET):
            g = random_geometric(n_sensors, n_backbone, radius, cost_model, derive_seed(seed, 0, gi, attempt))
            mk = max_robustness(g, upto=need)
            if mk is not None and mk >= need:
                designs.append({k: design(g, k, method=method) for k in ks})
                break
            redraws += 1
        else:
            raise InfeasibleError(f"no graph supporting k={need} in {REDRAW_BUDGET} draws for graph {gi}")
    return designs, redraws


def failure_curves(
    n_sensors: int,
    n_backbone: int,
    radius: float,
    cost_model: CostModel | str = CostModel.DISTANCE_SQUARED,
    ks: Sequence[int] = (0, 1, 2, 3),
    n_graphs: int = 100,
    n_trials: int = 1000,
    seed: int = 0,
    method: str = "auto",
) -> dict[int, RobustnessCurve]:
    """Failure curves for several k on one shared set of graphs and failure draws.

    Graphs are drawn until they support the largest requested k; the same
    graphs and the same random dead-sensor sets are then scored for every k.
    """
    ks = sorted(set(int(k) for k in ks))
    cost_model = CostModel(cost_model)
    designs, redraws = _draw_designs(n_sensors, n_backbone, radius, cost_model, ks, n_graphs, seed, method)
    models = [{k: _FailureModel(d[k]) for k in ks} for d in designs]
    top = math.ceil(0.5 * n_sensors)
    counts = {k: [0] * (top + 1) for k in ks}
    for gi, per_k in enumerate(models):
        for l in range(top + 1):
            for t in range(n_trials):
                dead = random.Random(derive_seed(seed, 1, gi, l, t)).sample(range(n_sensors), l)
                for k in ks:
                    if per_k[k].fails(dead):
                        counts[k][l] += 1
    out = {}
    total = n_graphs * n_trials
    for k in ks:
        pts = tuple(
            CurvePoint(l, l / n_sensors, counts[k][l] / total if total else 0.0, counts[k][l], n_trials, n_graphs)
            for l in range(top + 1)
        )
        config = {
            "n_sensors": n_sensors,
            "n_backbone": n_backbone,
            "cost_model": cost_model.value,
            "radius": radius,
            "k": k,
            "seed": seed,
            "redraws": redraws,
        }
        out[k] = RobustnessCurve(pts, config)
    log.info("failure curves done; %d graphs redrawn", redraws)
    return out


def failure_curve(
    n_sensors: int,
    n_backbone: int,
    radius: float,
    cost_model: CostModel | str = CostModel.DISTANCE_SQUARED,
    k: int = 0,
    n_graphs: int = 100,
    n_trials: int = 1000,
    seed: int = 0,
    method: str = "auto",
) -> RobustnessCurve:
    """Estimated probability of network failure for each count of dead sensors up to half of them."""
    return failure_curves(n_sensors, n_backbone, radius, cost_model, (k,), n_graphs, n_trials, seed, method)[k]
