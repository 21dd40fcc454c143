"""Minimum-cost z-rooted c-node-connected subgraphs of a shifted dynamic graph.

Every output node gets ``c - 1`` extra zero-cost links to the fusion center,
which turns the terminal problem into a spanning one: each sensor and each
output must keep ``c`` openly disjoint paths to z. Two exact routes solve it.

``matroid``
    Weighted intersection of the out-degree partition matroid with the
    rooted-connectivity count matroid.
``lp``
    Cutting planes over the node-capacitated cut inequalities, one max-flow
    separation per sensor, with an integer fallback if a vertex is fractional.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from .errors import InfeasibleError, ObsNetError
from .flows import local_node_connectivity
from .graph import DynamicGraph, Edge, Role, Variant
from .matroid import PartitionMatroid, RootedConnectivityMatroid, weighted_matroid_intersection

log = logging.getLogger(__name__)

MATROID_EDGE_LIMIT = 40
_SCALE = 10**6
_TOL = 1e-6


def check_connectivity(gd: DynamicGraph, c: int) -> None:
    """Raise :class:`InfeasibleError` naming the first sensor with fewer than c routes to z."""
    for x in gd.sensors:
        if local_node_connectivity(gd, x, gd.fusion, limit=c) < c:
            name = gd.name(x)
            raise InfeasibleError(f"sensor {name} has fewer than {c} disjoint paths to the fusion center", sensor=name)


def min_rooted_connected_subgraph(
    gd: DynamicGraph, connectivity: int, method: str = "auto", *, check: bool = True
) -> frozenset[int]:
    """Cheapest edge set of ``gd`` giving every sensor ``connectivity`` disjoint paths to z.

    The returned ids cover the chosen sensor links plus the output-to-fusion
    link of every output that is actually fed. ``method`` is ``"matroid"``,
    ``"lp"`` or ``"auto"`` (matroid route on small graphs). Pass
    ``check=False`` only when the connectivity precondition is already known.
    """
    c = int(connectivity)
    if c < 1:
        raise ValueError("connectivity must be at least 1")
    if gd.variant is not Variant.SHIFTED:
        raise ObsNetError("expected a shifted dynamic graph")
    if check:
        check_connectivity(gd, c)

    choice = [e for e in gd.edges if e.tail.role is Role.SENSOR]
    if method == "auto":
        method = "matroid" if len(choice) <= MATROID_EDGE_LIMIT else "lp"
    if method == "matroid":
        picked = _solve_matroid(gd, choice, c)
    elif method == "lp":
        picked = _solve_lp(gd, choice, c)
    else:
        raise ValueError(f"unknown method {method!r}")

    fed = {e.head for e in choice if e.edge_id in picked and e.head.role is Role.OUTPUT}
    feeders = {e.edge_id for e in gd.edges if e.tail in fed and e.head == gd.fusion}
    return frozenset(picked) | frozenset(feeders)


def _solve_matroid(gd: DynamicGraph, choice: list[Edge], c: int) -> set[int]:
    links: dict = {}
    for e in choice:
        links[e.edge_id] = (e.tail, e.head)
    # c parallel zero-cost links per output; these fill each output's out-degree
    spare = []
    for o in gd.outputs:
        for j in range(c):
            key = ("dup", o.node.index, j)
            links[key] = (o.node, gd.fusion)
            spare.append(key)

    m = len(choice)
    rank = {e.edge_id: r for r, e in enumerate(sorted(choice, key=lambda e: e.edge_id))}
    # cost dominates; the small bonus prefers lower edge ids among ties
    weight = {e.edge_id: e.cost * 2 ** (m + 1) - 2 ** (m - rank[e.edge_id]) for e in choice}
    big = 1 + sum(abs(w) for w in weight.values())
    weight.update({k: -big for k in spare})

    m1 = PartitionMatroid({k: t for k, (t, _) in links.items()}, c)
    m2 = RootedConnectivityMatroid(links, gd.fusion, c)
    best = weighted_matroid_intersection(m1, m2, weight, maximize=False, start=spare)
    n_nodes = len(gd.sensors) + len(gd.outputs)
    if len(best) != c * n_nodes:
        raise InfeasibleError("no rooted connected subgraph exists")
    return {k for k in best if isinstance(k, int)}


class _Separator:
    """Max-flow separation of the node-capacitated cut inequalities."""

    def __init__(self, gd: DynamicGraph, choice: list[Edge], c: int):
        self.c = c
        self.n = len(gd.sensors)
        self.z = 2 * self.n
        # arc j of the network runs out(tail) -> in(head), or out(tail) -> z for outputs
        self.tails = np.array([2 * e.tail.index + 1 for e in choice], dtype=np.int64)
        self.heads = np.array(
            [self.z if e.head.role is Role.OUTPUT else 2 * e.head.index for e in choice], dtype=np.int64
        )
        self.head_sensor = np.array(
            [-1 if e.head.role is Role.OUTPUT else e.head.index for e in choice], dtype=np.int64
        )

    def cuts_for(self, t: int, x: np.ndarray) -> list[tuple[np.ndarray, float]]:
        """Violated inequalities for sensor ``t`` as (coefficients, rhs) pairs.

        Both the smallest and the largest minimum-cut source sides are used.
        """
        size = self.z + 1
        keep = self.head_sensor != t
        cap = np.rint(np.clip(x, 0.0, 1.0) * _SCALE).astype(np.int64)
        sel = keep & (cap > 0)
        others = np.array([v for v in range(self.n) if v != t], dtype=np.int64)
        r = np.concatenate([self.tails[sel], 2 * others])
        cc = np.concatenate([self.heads[sel], 2 * others + 1])
        v = np.concatenate([cap[sel], np.full(len(others), _SCALE, dtype=np.int64)])
        mat = sparse.coo_matrix((v, (r, cc)), shape=(size, size)).tocsr()
        mat.sum_duplicates()
        src = 2 * t + 1
        res = maximum_flow(mat.astype(np.int32), src, self.z)
        if res.flow_value >= (self.c - 1e-3) * _SCALE:
            return []
        resid = (mat - res.flow).tocsr()
        resid.data[resid.data < 0] = 0
        resid.eliminate_zeros()
        small = np.zeros(size, dtype=bool)
        small[breadth_first_order(resid, src, directed=True, return_predecessors=False)] = True
        large = np.ones(size, dtype=bool)
        large[breadth_first_order(resid.T.tocsr(), self.z, directed=True, return_predecessors=False)] = False
        out = [self._inequality(small, keep, others)]
        if not np.array_equal(small, large):
            out.append(self._inequality(large, keep, others))
        return out

    def _inequality(self, side, keep, others):
        coef = np.zeros(len(self.tails))
        coef[keep & side[self.tails] & ~side[self.heads]] = 1.0
        nodes_cut = int(np.count_nonzero(side[2 * others] & ~side[2 * others + 1]))
        return coef, float(self.c - nodes_cut)


def _solve_lp(gd: DynamicGraph, choice: list[Edge], c: int) -> set[int]:
    m = len(choice)
    cost = np.array([e.cost for e in choice], dtype=float)
    # tiny perturbation mirrors the lowest-id preference of the matroid route
    order = np.argsort([e.edge_id for e in choice], kind="stable")
    bonus = np.empty(m)
    bonus[order] = (np.arange(m) + 1) / float((m + 1) ** 2)
    obj = cost + bonus

    sep = _Separator(gd, choice, c)
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    tails = np.array([e.tail.index for e in choice])
    for v in range(sep.n):
        rows.append((tails == v).astype(float))
        rhs.append(float(c))

    def separate(x):
        added = 0
        seen = set()
        for t in range(sep.n):
            for coef, b in sep.cuts_for(t, x):
                key = (coef.tobytes(), b)
                if key in seen:
                    continue
                seen.add(key)
                rows.append(coef)
                rhs.append(b)
                added += 1
        return added

    x = None
    for _ in range(500):
        a = sparse.csr_matrix(np.vstack(rows))
        res = linprog(obj, A_ub=-a, b_ub=-np.array(rhs), bounds=(0, 1), method="highs-ds")
        if res.status != 0:
            raise InfeasibleError("rooted connectivity relaxation is infeasible")
        x = res.x
        if not separate(x):
            break
    else:
        raise ObsNetError("cutting-plane loop did not converge")

    if np.all(np.minimum(np.abs(x), np.abs(1 - x)) < _TOL):
        return {e.edge_id for e, val in zip(choice, x) if val > 0.5}

    log.info("fractional relaxation; switching to integer cutting planes")
    for _ in range(500):
        a = sparse.csr_matrix(np.vstack(rows))
        res = milp(
            obj,
            constraints=LinearConstraint(a, lb=np.array(rhs), ub=np.inf),
            integrality=np.ones(m),
            bounds=Bounds(0, 1),
        )
        if res.status != 0:
            raise InfeasibleError("rooted connectivity program is infeasible")
        x = np.rint(res.x)
        if not separate(x):
            return {e.edge_id for e, val in zip(choice, x) if val > 0.5}
    raise ObsNetError("integer cutting-plane loop did not converge")
