"""Shared instances and random small-graph families for the tests."""

from __future__ import annotations

import itertools
import random

from obsnet import PhysicalGraph
from obsnet.flows import max_robustness, unreachable_backbone


def t1() -> PhysicalGraph:
    return PhysicalGraph.build(["x1"], ["q1"], "z", [("x1", "q1", 2), ("q1", "z", 1)])


def t2() -> PhysicalGraph:
    return PhysicalGraph.build(
        ["x1"], ["q1", "q2"], "z", [("x1", "q1", 2), ("x1", "q2", 5), ("q1", "z", 1), ("q2", "z", 1)]
    )


def t3() -> PhysicalGraph:
    return PhysicalGraph.build(["x1", "x2"], ["q1"], "z", [("x2", "x1", 1), ("x1", "q1", 2), ("q1", "z", 1)])


def admissible_pairs(xs, qs, z="z"):
    pairs = [(a, b) for a, b in itertools.permutations(xs, 2)]
    pairs += [(x, q) for x in xs for q in qs]
    pairs += [(a, b) for a, b in itertools.permutations(qs, 2)]
    pairs += [(q, z) for q in qs]
    return pairs


def random_small_graph(rng: random.Random, n_x: int, n_q: int, n_edges: int, max_cost: int = 9) -> PhysicalGraph:
    xs = [f"x{i + 1}" for i in range(n_x)]
    qs = [f"q{i + 1}" for i in range(n_q)]
    pairs = admissible_pairs(xs, qs)
    chosen = rng.sample(pairs, min(n_edges, len(pairs)))
    chosen.sort(key=pairs.index)
    return PhysicalGraph.build(xs, qs, "z", [(u, v, rng.randint(0, max_cost)) for u, v in chosen])


def random_feasible(rng: random.Random, k: int, *, max_x=5, max_q=2, max_edges=12, max_cost=9, tries=10_000):
    """Rejection-sample a graph that admits a k-robust design."""
    for _ in range(tries):
        n_x = rng.randint(1, max_x)
        n_q = rng.randint(1, max_q)
        n_e = rng.randint(n_x + 1, max_edges)
        g = random_small_graph(rng, n_x, n_q, n_e, max_cost)
        if unreachable_backbone(g):
            continue
        mk = max_robustness(g, upto=k)
        if mk is not None and mk >= k:
            return g
    raise RuntimeError("no feasible instance found")


def dense_feasible(rng: random.Random, n_x: int, n_q: int, k: int, p_xx=0.4, p_xq=0.6, max_cost=9):
    """Denser family for larger sensor counts; every backbone node links to the fusion center."""
    xs = [f"x{i + 1}" for i in range(n_x)]
    qs = [f"q{i + 1}" for i in range(n_q)]
    while True:
        edges = [(a, b, rng.randint(0, max_cost)) for a, b in itertools.permutations(xs, 2) if rng.random() < p_xx]
        edges += [(x, q, rng.randint(0, max_cost)) for x in xs for q in qs if rng.random() < p_xq]
        edges += [(q, "z", rng.randint(0, max_cost)) for q in qs]
        g = PhysicalGraph.build(xs, qs, "z", edges)
        mk = max_robustness(g, upto=k)
        if mk is not None and mk >= k:
            return g
