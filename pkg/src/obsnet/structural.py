"""Structural observability of zero/one pattern pairs.

Rows of ``a_pattern`` and columns index states: ``a[i][j] == 1`` is a link
from state j to state i. Row r of ``c_pattern`` is an output observing the
states where it holds a one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EnumerationBoundError, ObsNetError

ENUMERATION_BOUND = 10**6


def _frozen(rows, shape=None) -> np.ndarray:
    arr = np.array(rows, dtype=np.uint8)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim != 2:
        raise ObsNetError("pattern must be a matrix")
    if not np.isin(arr, (0, 1)).all():
        raise ObsNetError("pattern entries must be 0 or 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StructuralPair:
    """Zero/one patterns (A, C) with output provenance.

    ``output_index[r]`` names the (sensor, backbone) link behind row r of C,
    and ``sensor_names`` labels the state columns. Each row of C carries at
    most one nonzero; when provenance is given it must sit in the column of
    the row's own sensor.
    """

    a_pattern: np.ndarray
    c_pattern: np.ndarray
    output_index: tuple[tuple[str, str], ...] = ()
    sensor_names: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        a = _frozen(self.a_pattern)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ObsNetError("A pattern must be square")
        c = _frozen(self.c_pattern, None if np.ndim(self.c_pattern) == 2 else ((-1, n) if n else (0, 0)))
        if c.shape[1] != n:
            raise ObsNetError("C pattern column count must equal the state count")
        if (c.sum(axis=1) > 1).any():
            raise ObsNetError("each C row may observe at most one state")
        names = tuple(self.sensor_names) or tuple(f"x{i + 1}" for i in range(n))
        if len(names) != n:
            raise ObsNetError("sensor_names length must equal the state count")
        index = tuple(tuple(p) for p in self.output_index)
        if index:
            if len(index) != c.shape[0]:
                raise ObsNetError("output_index must label every C row")
            for r, (sensor, _) in enumerate(index):
                cols = np.flatnonzero(c[r])
                if cols.size and names[cols[0]] != sensor:
                    raise ObsNetError(f"C row {r} observes a state other than its sensor {sensor}")
        object.__setattr__(self, "a_pattern", a)
        object.__setattr__(self, "c_pattern", c)
        object.__setattr__(self, "output_index", index)
        object.__setattr__(self, "sensor_names", names)

    @property
    def n_states(self) -> int:
        return self.a_pattern.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.c_pattern.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructuralPair):
            return NotImplemented
        return (
            np.array_equal(self.a_pattern, other.a_pattern)
            and np.array_equal(self.c_pattern, other.c_pattern)
            and self.output_index == other.output_index
            and self.sensor_names == other.sensor_names
        )

    def __hash__(self) -> int:
        return hash((self.a_pattern.tobytes(), self.c_pattern.tobytes(), self.output_index, self.sensor_names))

    def observed_by(self) -> list[int]:
        """Observed state per C row, -1 for an all-zero row."""
        return [int(np.flatnonzero(r)[0]) if r.any() else -1 for r in self.c_pattern]

    def delete(self, removed: Iterable[int]) -> "StructuralPair":
        """Drop the given states; C rows of removed sensors are zeroed, not dropped."""
        removed = set(removed)
        keep = [j for j in range(self.n_states) if j not in removed]
        a = self.a_pattern[np.ix_(keep, keep)]
        c = self.c_pattern[:, keep].reshape(self.n_outputs, len(keep))
        names = tuple(self.sensor_names[j] for j in keep)
        return StructuralPair(a, c, self.output_index, names)

    def to_dict(self) -> dict:
        return {
            "a_pattern": self.a_pattern.tolist(),
            "c_pattern": self.c_pattern.tolist(),
            "sensor_names": list(self.sensor_names),
            "output_index": [list(p) for p in self.output_index],
        }


@dataclass(frozen=True)
class StructuralSystemGraph:
    """Directed graph of a pair: state links and state-to-output links."""

    state_nodes: tuple[int, ...]
    output_nodes: tuple[int, ...]
    state_edges: tuple[tuple[int, int], ...]
    output_edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_pair(cls, s: StructuralPair) -> "StructuralSystemGraph":
        a, c = s.a_pattern, s.c_pattern
        n = s.n_states
        state_edges = tuple((j, i) for j in range(n) for i in range(n) if a[i, j])
        output_edges = tuple((j, r) for r in range(s.n_outputs) for j in range(n) if c[r, j])
        outputs = tuple(r for r in range(s.n_outputs) if c[r].any())
        return cls(tuple(range(n)), outputs, state_edges, output_edges)

    def successors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.state_nodes]
        for j, i in self.state_edges:
            out[j].append(i)
        return out


def _as_pair(s) -> StructuralPair:
    if isinstance(s, StructuralPair):
        return s
    a, c = s
    return StructuralPair(a, c)


def _lists(s: StructuralPair) -> tuple[int, list[list[int]], list[int]]:
    cached = s._cache.get("lists")
    if cached is None:
        n = s.n_states
        a = s.a_pattern
        succ = [[i for i in range(n) if a[i, j]] for j in range(n)]
        cached = (n, succ, s.observed_by())
        s._cache["lists"] = cached
    return cached


def _all_reach_output(n: int, succ: list[list[int]], observed: Iterable[int]) -> bool:
    pred: list[list[int]] = [[] for _ in range(n)]
    for j in range(n):
        for i in succ[j]:
            pred[i].append(j)
    seen = [False] * n
    stack = [j for j in set(observed) if j >= 0]
    for j in stack:
        seen[j] = True
    while stack:
        u = stack.pop()
        for w in pred[u]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return all(seen)


def _matching(n: int, succ: list[list[int]], observed: Sequence[int]) -> list[int]:
    """Kuhn matching of state columns to rows; rows n.. are outputs. -1 if unmatched."""
    adj = [list(succ[j]) for j in range(n)]
    for r, j in enumerate(observed):
        if j >= 0:
            adj[j].append(n + r)
    row_of = {}
    col_to = [-1] * n

    def augment(j, seen):
        for r in adj[j]:
            if r in seen:
                continue
            seen.add(r)
            if r not in row_of or augment(row_of[r], seen):
                row_of[r] = j
                col_to[j] = r
                return True
        return False

    for j in range(n):
        augment(j, set())
    return col_to


def structurally_observable_lists(n: int, succ: list[list[int]], observed: Sequence[int]) -> bool:
    """Core test on adjacency lists: reachability to outputs plus a saturating matching."""
    if n == 0:
        return True
    if not _all_reach_output(n, succ, observed):
        return False
    return all(r >= 0 for r in _matching(n, succ, observed))


def is_structurally_observable(s) -> bool:
    """True iff every state reaches an output and the stacked pattern has full generic column rank.

    Accepts a :class:`StructuralPair` or an ``(a_pattern, c_pattern)`` tuple.
    """
    s = _as_pair(s)
    return structurally_observable_lists(*_lists(s))


def deletion_count(n: int, k: int) -> int:
    return sum(math.comb(n, j) for j in range(min(k, n) + 1))


def robust_structural_observability(s, k: int) -> bool | tuple[int, ...]:
    """Check every deletion of at most k states.

    Returns True, or the lexicographically smallest failing set of deleted
    state indices (as a sorted tuple).
    """
    s = _as_pair(s)
    if k < 0:
        raise ValueError("k must be non-negative")
    n = s.n_states
    total = deletion_count(n, k)
    if total > ENUMERATION_BOUND:
        raise EnumerationBoundError(f"{total} deletion sets exceed the bound {ENUMERATION_BOUND}")
    _, succ, observed = _lists(s)
    failing = None
    for size in range(min(k, n) + 1):
        for removed in itertools.combinations(range(n), size):
            if failing is not None and removed > failing:
                continue
            gone = set(removed)
            keep = [j for j in range(n) if j not in gone]
            pos = {j: i for i, j in enumerate(keep)}
            sub = [[pos[i] for i in succ[j] if i in pos] for j in keep]
            obs = [pos.get(j, -1) for j in observed]
            if not structurally_observable_lists(len(keep), sub, obs):
                failing = removed
    return True if failing is None else failing


@dataclass(frozen=True)
class CactusCertificate:
    """Output cactus patch: stems end at output rows, cycles hang off the growing cactus.

    ``stems`` holds (state path, output row); ``cycles`` holds (cycle states,
    attaching link (from cycle state, into cactus state)).
    """

    stems: tuple[tuple[tuple[int, ...], int], ...]
    cycles: tuple[tuple[tuple[int, ...], tuple[int, int]], ...]
    uncovered: frozenset[int]

    @property
    def spanning(self) -> bool:
        return not self.uncovered

    def to_dict(self, names: Sequence[str] | None = None) -> dict:
        def nm(j):
            return names[j] if names else j

        return {
            "stems": [{"path": [nm(j) for j in p], "output_row": r} for p, r in self.stems],
            "cycles": [{"cycle": [nm(j) for j in cyc], "attach": [nm(u), nm(v)]} for cyc, (u, v) in self.cycles],
            "uncovered": sorted(nm(j) for j in self.uncovered),
        }


def extract_cactus_certificate(s) -> CactusCertificate:
    """Build an output cactus patch from a maximum matching.

    Observed states are matched to an output first, the rest prefer a link
    to another state over their own loop. On branching-with-loops structures
    the stems therefore run along tree paths and every off-stem state's loop
    hangs off the stem through its tree link.
    """
    s = _as_pair(s)
    n, succ, observed = _lists(s)
    rows_of = {}
    for r, j in enumerate(observed):
        if j >= 0:
            rows_of.setdefault(j, r)
    # preferred order: own output, links to other states, own loop
    adj = []
    for j in range(n):
        options = []
        if j in rows_of:
            options.append(n + rows_of[j])
        options += [i for i in succ[j] if i != j]
        if j in succ[j]:
            options.append(j)
        options += [n + r for r, jj in enumerate(observed) if jj == j and n + r not in options]
        adj.append(options)
    col_to = _preferred_matching(adj)

    nxt = {j: col_to[j] for j in range(n) if col_to[j] >= 0}
    stems, cycles_raw = [], []
    done: set[int] = set()
    has_pred = {v for v in nxt.values() if v < n}
    # stems: chains that end in an output row
    for j in range(n):
        if j in has_pred or j in done:
            continue
        path = [j]
        while path[-1] in nxt and nxt[path[-1]] < n:
            path.append(nxt[path[-1]])
        last = path[-1]
        done.update(path)
        if last in nxt:
            stems.append((tuple(path), nxt[last] - n))
    for j in range(n):
        if j in done or j not in nxt:
            continue
        cyc = [j]
        while nxt[cyc[-1]] != j:
            cyc.append(nxt[cyc[-1]])
        done.update(cyc)
        cycles_raw.append(tuple(cyc))
    stem_nodes = {v for p, _ in stems for v in p}

    attached: set[int] = set(stem_nodes)
    order: list = []
    pending = list(cycles_raw)
    progress = True
    while pending and progress:
        progress = False
        for cyc in list(pending):
            link = next(((u, w) for u in cyc for w in succ[u] if w in attached), None)
            if link is not None:
                order.append((cyc, link))
                attached.update(cyc)
                pending.remove(cyc)
                progress = True
    # chains that never reach an output stay uncovered
    uncovered = set(range(n)) - attached
    return CactusCertificate(tuple(stems), tuple(order), frozenset(uncovered))


def _preferred_matching(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    col_to = [-1] * n
    row_of: dict[int, int] = {}
    for j in range(n):
        for r in adj[j]:
            if r not in row_of:
                row_of[r] = j
                col_to[j] = r
                break

    def augment(j, seen):
        for r in adj[j]:
            if r in seen:
                continue
            seen.add(r)
            if r not in row_of or augment(row_of[r], seen):
                row_of[r] = j
                col_to[j] = r
                return True
        return False

    for j in range(n):
        if col_to[j] < 0:
            augment(j, set())
    return col_to


def validate_certificate(s, cert: CactusCertificate) -> bool:
    """Check a certificate against the recursive cactus definition."""
    s = _as_pair(s)
    n, succ, observed = _lists(s)
    used: set[int] = set()
    rows: set[int] = set()
    cactus: set[int] = set()
    for path, r in cert.stems:
        if not path or any(v in used for v in path) or len(set(path)) != len(path):
            return False
        if any(path[i + 1] not in succ[path[i]] for i in range(len(path) - 1)):
            return False
        if r in rows or not 0 <= r < len(observed) or observed[r] != path[-1]:
            return False
        rows.add(r)
        used.update(path)
        cactus.update(path)
    for cyc, (u, w) in cert.cycles:
        if not cyc or any(v in used for v in cyc) or len(set(cyc)) != len(cyc):
            return False
        if any(cyc[(i + 1) % len(cyc)] not in succ[cyc[i]] for i in range(len(cyc))):
            return False
        if u not in cyc or w not in cactus or w not in succ[u]:
            return False
        used.update(cyc)
        cactus.update(cyc)
    return used.isdisjoint(cert.uncovered) and used | set(cert.uncovered) == set(range(n))
