"""Exhaustive reference solvers used to cross-check the fast algorithms.

Nothing here shares code with the optimizers it checks: routes, reachability
and path families are recomputed from scratch by enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import EnumerationBoundError
from .graph import PhysicalGraph, Role
from .structural import StructuralPair, robust_structural_observability

BRUTE_FORCE_EDGE_BOUND = 16


@dataclass(frozen=True)
class BruteForceResult:
    cost: int
    edges: frozenset[int]


def _route_costs(g: PhysicalGraph) -> dict:
    # Bellman-Ford toward the fusion center
    dist = {g.fusion: 0}
    for _ in range(len(g.backbone) + 1):
        for e in g.backbone_edges:
            if e.head in dist and (e.tail not in dist or dist[e.head] + e.cost < dist[e.tail]):
                dist[e.tail] = dist[e.head] + e.cost
    return dist


def _survivors_reach(nodes, arcs, root, removed) -> set:
    back: dict = {}
    for t, h in arcs:
        if t in removed or h in removed:
            continue
        back.setdefault(h, []).append(t)
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for w in back.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def brute_force_min_structure(g: PhysicalGraph, k: int, model: str = "paths") -> BruteForceResult | None:
    """Cheapest sensor-link subset meeting the robustness requirement, or None.

    Candidates are the sensor-to-sensor and sensor-to-backbone links; each
    used sensor-to-backbone link is priced with its cheapest backbone route.
    Subsets are scanned in (cost, sorted ids) order.

    ``model="paths"`` asks that every sensor still reaches the fusion center
    after removing any k other sensors or outputs, and that every deletion of
    at most k sensors leaves the structure observable. ``model="sensor-deletion"``
    keeps only the second requirement.
    """
    if model not in ("paths", "sensor-deletion"):
        raise ValueError(f"unknown model {model!r}")
    dist = _route_costs(g)
    cand = [e for e in g.sensor_edges] + [e for e in g.output_edges if e.head in dist]
    if len(cand) > BRUTE_FORCE_EDGE_BOUND:
        raise EnumerationBoundError(f"{len(cand)} candidate links exceed the bound {BRUTE_FORCE_EDGE_BOUND}")
    price = [e.cost + (dist[e.head] if e.head.role is Role.BACKBONE else 0) for e in cand]
    n = g.n_sensors
    rows = {e.edge_id: r for r, e in enumerate(g.output_edges)}

    subsets = []
    for mask in range(1 << len(cand)):
        picked = [i for i in range(len(cand)) if mask >> i & 1]
        subsets.append((sum(price[i] for i in picked), tuple(cand[i].edge_id for i in picked), picked))
    subsets.sort(key=lambda t: (t[0], t[1]))

    for cost, ids, picked in subsets:
        edges = [cand[i] for i in picked]
        if model == "paths":
            outdeg = [0] * n
            for e in edges:
                outdeg[e.tail.index] += 1
            if min(outdeg) < k + 1:
                continue
            if not _paths_ok(g, edges, k):
                continue
        a = [[int(i == j) for j in range(n)] for i in range(n)]
        c = [[0] * n for _ in rows]
        for e in edges:
            if e.head.role is Role.SENSOR:
                a[e.head.index][e.tail.index] = 1
            else:
                c[rows[e.edge_id]][e.tail.index] = 1
        if robust_structural_observability(StructuralPair(a, c), k) is True:
            return BruteForceResult(cost, frozenset(ids))
    return None


def _paths_ok(g: PhysicalGraph, edges, k: int) -> bool:
    z = ("z",)
    arcs = []
    outs = []
    for e in edges:
        if e.head.role is Role.SENSOR:
            arcs.append((e.tail, e.head))
        else:
            y = ("y", e.edge_id)
            outs.append(y)
            arcs.append((e.tail, y))
            arcs.append((y, z))
    nodes = list(g.sensors) + outs
    for size in range(k + 1):
        for removed in itertools.combinations(nodes, size):
            gone = set(removed)
            reach = _survivors_reach(nodes, arcs, z, gone)
            if any(x not in reach for x in g.sensors if x not in gone):
                return False
    return True


def _successor_families(n: int, succ: Sequence[Sequence[int]]):
    """Yield (stem ends, cover map) for every disjoint stem/cycle cover.

    Each state picks one successor: a state it links to, or ``-1`` meaning it
    ends a stem at an output. No state may be picked twice.
    """
    options = [list(succ[j]) + [-1] for j in range(n)]
    taken = [False] * n
    choice = [0] * n

    def rec(j):
        if j == n:
            yield tuple(choice)
            return
        for t in options[j]:
            if t >= 0:
                if taken[t]:
                    continue
                taken[t] = True
                choice[j] = t
                yield from rec(j + 1)
                taken[t] = False
            else:
                choice[j] = -1
                yield from rec(j + 1)

    yield from rec(0)


def _attached(n: int, succ, cover: Sequence[int]) -> bool:
    """All cycles of the cover hang, link by link, off the stems."""
    in_stem = [False] * n
    for j in range(n):
        # a state lies on a stem iff following the cover reaches an output
        seen = set()
        u = j
        while u >= 0 and u not in seen:
            seen.add(u)
            u = cover[u]
        in_stem[j] = u == -1
    cactus = {j for j in range(n) if in_stem[j]}
    if not cactus and n:
        return False
    cycles = []
    seen = set(cactus)
    for j in range(n):
        if j in seen:
            continue
        cyc = [j]
        seen.add(j)
        while cover[cyc[-1]] != j:
            cyc.append(cover[cyc[-1]])
            seen.add(cyc[-1])
        cycles.append(cyc)
    pending = cycles
    while pending:
        rest = [cyc for cyc in pending if not any(w in cactus for u in cyc for w in succ[u] if w not in cyc)]
        if len(rest) == len(pending):
            return False
        for cyc in pending:
            if cyc not in rest:
                cactus.update(cyc)
        pending = rest
    return True


def cactus_output_sets(n: int, succ: Sequence[Sequence[int]]) -> list[frozenset[int]]:
    """Inclusion-minimal sets of stem-ending states over all spanning cactus patches."""
    found: set[frozenset[int]] = set()
    for cover in _successor_families(n, succ):
        ends = frozenset(j for j in range(n) if cover[j] == -1)
        if any(f <= ends for f in found):
            continue
        if _attached(n, succ, cover):
            found = {f for f in found if not ends <= f}
            found.add(ends)
    return sorted(found, key=lambda f: (len(f), sorted(f)))


def has_spanning_cactus_patch(s: StructuralPair) -> bool:
    """Search all stem/cycle covers for one spanning the states."""
    n = s.n_states
    if n == 0:
        return True
    a = s.a_pattern
    succ = [[i for i in range(n) if a[i, j]] for j in range(n)]
    observed = {j for j in s.observed_by() if j >= 0}
    return any(f <= observed for f in cactus_output_sets(n, succ))


def max_disjoint_path_family(edges: Iterable[tuple[Hashable, Hashable]], u: Hashable, v: Hashable) -> int:
    """Largest family of internally node-disjoint u->v paths, by exhaustive search.

    Parallel direct u->v links each count once.
    """
    arcs = list(edges)
    adj: dict = {}
    direct = 0
    for a, b in arcs:
        if a == b:
            continue
        if a == u and b == v:
            direct += 1
            continue
        adj.setdefault(a, set()).add(b)
    paths: list[frozenset] = []

    def walk(node, inner):
        for w in sorted(adj.get(node, ()), key=repr):
            if w == v:
                paths.append(frozenset(inner))
            elif w != u and w not in inner:
                walk(w, inner + [w])

    walk(u, [])
    paths = sorted(set(paths), key=len)
    best = 0

    def pack(i, used, count):
        nonlocal best
        best = max(best, count)
        if count + len(paths) - i <= best:
            return
        for j in range(i, len(paths)):
            if used.isdisjoint(paths[j]):
                pack(j + 1, used | paths[j], count + 1)

    pack(0, frozenset(), 0)
    return best + direct
