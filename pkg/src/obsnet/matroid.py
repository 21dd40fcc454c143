"""Matroid oracles and weighted matroid intersection.

The intersection routine follows the classical shortest-augmenting-path
scheme: starting from an extreme common independent set it repeatedly
augments along a minimum-length, then minimum-arc, path of the exchange
graph, so every intermediate set is weight-optimal for its size.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Iterable, Mapping, Sequence

from .flows import INF, FlowNetwork, min_cut


class Matroid:
    """Independence oracle over an ordered ground set of hashable elements."""

    def __init__(self, ground_set: Iterable[Hashable]):
        self.ground_set = tuple(ground_set)

    def is_independent(self, subset: Iterable[Hashable]) -> bool:
        raise NotImplementedError

    def can_add(self, independent: frozenset, x: Hashable) -> bool:
        return self.is_independent(independent | {x})

    def circuit(self, independent: frozenset, x: Hashable) -> set:
        """Unique circuit of ``independent + x``; caller guarantees it is dependent."""
        bigger = independent | {x}
        return {x} | {y for y in independent if self.is_independent(bigger - {y})}

    def exchange(self, independent: frozenset, x: Hashable) -> set | None:
        """None if ``independent + x`` stays independent, else its circuit."""
        if self.can_add(independent, x):
            return None
        return self.circuit(independent, x)


class FreeMatroid(Matroid):
    def is_independent(self, subset) -> bool:
        return True


class TrivialMatroid(Matroid):
    """Only the empty set is independent."""

    def is_independent(self, subset) -> bool:
        return not set(subset)


class PartitionMatroid(Matroid):
    """At most ``capacity[b]`` elements from each block ``b``.

    ``block_of`` maps every ground element to its block label.
    """

    def __init__(self, block_of: Mapping[Hashable, Hashable], capacity: Mapping[Hashable, int] | int):
        super().__init__(block_of)
        self.block_of = dict(block_of)
        self.capacity = capacity

    def cap(self, block) -> int:
        if isinstance(self.capacity, int):
            return self.capacity
        return self.capacity.get(block, 0)

    def is_independent(self, subset) -> bool:
        count: dict = defaultdict(int)
        for e in subset:
            count[self.block_of[e]] += 1
        return all(n <= self.cap(b) for b, n in count.items())

    def can_add(self, independent, x) -> bool:
        b = self.block_of[x]
        return sum(1 for e in independent if self.block_of[e] == b) < self.cap(b)

    def circuit(self, independent, x) -> set:
        b = self.block_of[x]
        return {x} | {e for e in independent if self.block_of[e] == b}


class RootedConnectivityMatroid(Matroid):
    """Edge sets extendable to a digraph in which every node has ``c`` openly
    disjoint paths to ``root``.

    A set F of links is independent when, for every pair of node sets
    ``inner <= outer`` (inner non-empty, root excluded), the number of links of
    F leaving ``inner`` and ending in ``outer`` is at most
    ``c * (|inner| - 1) + |outer - inner|``. Links into the root never count,
    so they are coloops. Together with the out-degree partition matroid (at
    most c links leaving each node) the common bases are exactly the edge sets
    of out-degree c that are rooted c-connected.

    The largest violation over these pairs is found as a minimum cut.
    """

    def __init__(self, links: Mapping[Hashable, tuple[Hashable, Hashable]], root: Hashable, c: int):
        super().__init__(links)
        self.links = dict(links)
        self.root = root
        self.c = c

    def _worst(self, subset: Iterable[Hashable], inner: Hashable, outer: Hashable | None = None):
        """Maximise ``count - c*|inner| - |outer - inner|`` with forced members.

        Returns the maximum and the smallest maximising (inner, outer) pair.
        """
        c = self.c
        arcs = [self.links[e] for e in subset if self.links[e][1] != self.root]
        nodes = dict.fromkeys([inner] + ([outer] if outer is not None else []))
        out_deg: dict = defaultdict(int)
        pair: dict = defaultdict(int)
        for t, h in arcs:
            nodes.setdefault(t)
            nodes.setdefault(h)
            out_deg[t] += 1
            if t != h:
                pair[t, h] += 1
        net = FlowNetwork(source="s", sinks={"t"})
        const = 0
        for v in nodes:
            lam = c - 1 - out_deg[v]
            if lam > 0:
                net.add_arc(("b", v), "t", lam)
            elif lam < 0:
                net.add_arc("s", ("b", v), -lam)
                const += lam
            net.add_arc(("a", v), "t", 1)
            net.add_arc(("b", v), ("a", v), INF)
        for (t, h), m in pair.items():
            net.add_arc(("b", t), ("a", h), m)
        net.add_arc("s", ("b", inner), INF)
        if outer is not None:
            net.add_arc("s", ("a", outer), INF)
        cut, side = min_cut(net)
        best = -(const + cut)
        inner_set = {v for v in nodes if ("b", v) in side}
        outer_set = {v for v in nodes if ("a", v) in side}
        return best, inner_set, outer_set

    def is_independent(self, subset) -> bool:
        subset = list(subset)
        if len(set(subset)) != len(subset):
            return False
        tails = dict.fromkeys(self.links[e][0] for e in subset if self.links[e][1] != self.root)
        return all(self._worst(subset, t)[0] <= -self.c for t in tails)

    def can_add(self, independent, x) -> bool:
        t, h = self.links[x]
        if h == self.root:
            return True
        return self._worst(list(independent) + [x], t, h)[0] <= -self.c

    def circuit(self, independent, x) -> set:
        found = self.exchange(independent, x)
        if found is None:
            raise ValueError("element does not create a circuit")
        return found

    def exchange(self, independent, x) -> set | None:
        t, h = self.links[x]
        if h == self.root:
            return None
        members = list(independent) + [x]
        best, inner, outer = self._worst(members, t, h)
        if best <= -self.c:
            return None
        return {
            e
            for e in members
            if self.links[e][1] != self.root and self.links[e][0] in inner and self.links[e][1] in outer
        }


def weighted_matroid_intersection(
    m1: Matroid,
    m2: Matroid,
    weights: Mapping[Hashable, int],
    *,
    maximize: bool = True,
    start: Iterable[Hashable] = (),
) -> frozenset:
    """Maximum-cardinality common independent set of optimal total weight.

    With ``maximize`` the weight is maximised, otherwise minimised, among all
    common independent sets of the largest size. ``start`` must itself be an
    extreme common independent set (optimal for its own size); it defaults to
    the empty set. Ties are broken by ground-set order.
    """
    ground: Sequence = m1.ground_set
    order = {e: i for i, e in enumerate(ground)}
    if set(ground) != set(m2.ground_set):
        raise ValueError("matroids must share a ground set")
    sign = 1 if maximize else -1
    w = {e: sign * weights.get(e, 0) for e in ground}
    current = frozenset(start)

    while True:
        path = _shortest_augmenting_path(m1, m2, current, w, ground, order)
        if path is None:
            return current
        current = current.symmetric_difference(path)


def _shortest_augmenting_path(m1, m2, current, w, ground, order):
    inside = [e for e in ground if e in current]
    outside = [e for e in ground if e not in current]
    succ: dict = defaultdict(list)
    sources, sinks = [], set()
    for x in outside:
        circ = m1.exchange(current, x)
        if circ is None:
            sources.append(x)
            for y in inside:
                succ[y].append(x)
        else:
            for y in sorted(circ - {x}, key=order.__getitem__):
                succ[y].append(x)
        circ = m2.exchange(current, x)
        if circ is None:
            sinks.add(x)
            succ[x].extend(inside)
        else:
            succ[x].extend(sorted(circ - {x}, key=order.__getitem__))
    if not sources or not sinks:
        return None

    # vertex lengths: entering elements gain weight, leaving ones lose it
    length = {e: (w[e] if e in current else -w[e]) for e in ground}
    dist: dict = {}
    pred: dict = {}
    for x in sources:
        dist[x] = (length[x], 0)
        pred[x] = None
    frontier = list(sources)
    for _ in range(len(ground) + 1):
        changed = []
        for u in frontier:
            du, hu = dist[u]
            for v in succ.get(u, ()):
                cand = (du + length[v], hu + 1)
                if v not in dist or cand < dist[v]:
                    dist[v] = cand
                    pred[v] = u
                    changed.append(v)
        if not changed:
            break
        frontier = sorted(set(changed), key=order.__getitem__)
    reached = [t for t in sinks if t in dist]
    if not reached:
        return None
    end = min(reached, key=lambda t: (dist[t], order[t]))
    path = []
    v = end
    while v is not None:
        path.append(v)
        v = pred[v]
    return frozenset(path)
