"""Numeric realizations of structural pairs over a prime field GF(p).

Matrices are plain lists of Python ints reduced mod p after every product,
which keeps arithmetic exact for any p below 2**31.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .errors import GraphFormatError, InconsistentTraceError, ObsNetError, RetriesExhaustedError, UnobservableError
from .structural import StructuralPair, is_structurally_observable

DEFAULT_PRIME = 2147483647
DEFAULT_RETRIES = 16

Matrix = list[list[int]]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        if not 2 <= self.p < 2**31:
            raise ObsNetError("field order must satisfy 2 <= p < 2**31")
        if not is_prime(self.p):
            raise ObsNetError(f"{self.p} is not prime")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.p - 2, self.p)


def matmul(x: Matrix, y: Matrix, p: int) -> Matrix:
    cols = list(zip(*y)) if y else []
    return [[sum(a * b for a, b in zip(row, col)) % p for col in cols] for row in x]


def rank_mod(m: Sequence[Sequence[int]], p: int) -> int:
    """Rank over GF(p) by Gaussian elimination."""
    rows = [[v % p for v in r] for r in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        prow = [v * inv % p for v in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(v - f * w) % p for v, w in zip(rows[i], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def solve_mod(m: Sequence[Sequence[int]], y: Sequence[int], p: int) -> list[int]:
    """Unique solution of m x = y over GF(p).

    Raises :class:`UnobservableError` when m lacks full column rank and
    :class:`InconsistentTraceError` when the system has no solution.
    """
    ncols = len(m[0]) if m else 0
    rows = [[v % p for v in r] + [b % p] for r, b in zip(m, y)]
    rank = 0
    pivots = []
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        prow = [v * inv % p for v in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(v - f * w) % p for v, w in zip(rows[i], prow)]
        pivots.append(col)
        rank += 1
    if rank < ncols:
        raise UnobservableError(f"observability rank {rank} < {ncols}")
    if any(r[-1] for r in rows[rank:]):
        raise InconsistentTraceError("inconsistent trace: no initial state explains it")
    x = [0] * ncols
    for i, col in enumerate(pivots):
        x[col] = rows[i][-1]
    return x


@dataclass(frozen=True)
class FieldSystem:
    """Numeric (A, C) over GF(p) whose nonzeros sit inside a structural pair."""

    field: PrimeField
    a: tuple[tuple[int, ...], ...]
    c: tuple[tuple[int, ...], ...]
    structure: StructuralPair | None = None

    def __post_init__(self) -> None:
        p = self.field.p
        a = tuple(tuple(int(v) % p for v in r) for r in self.a)
        n = len(a)
        if any(len(r) != n for r in a):
            raise ObsNetError("A must be square")
        c = tuple(tuple(int(v) % p for v in r) for r in self.c)
        if any(len(r) != n for r in c):
            raise ObsNetError("C column count must equal the state count")
        s = self.structure
        if s is not None:
            if s.a_pattern.shape != (n, n) or s.c_pattern.shape != (len(c), n):
                raise ObsNetError("system shape does not match its structure")
            for mat, pat in ((a, s.a_pattern), (c, s.c_pattern)):
                for i, row in enumerate(mat):
                    for j, v in enumerate(row):
                        if v and not pat[i, j]:
                            raise ObsNetError(f"nonzero at ({i}, {j}) outside the structure")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def m(self) -> int:
        return len(self.c)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"p": self.field.p, "a": [list(r) for r in self.a], "c": [list(r) for r in self.c]}
        if self.structure is not None:
            doc["structure_ref"] = self.structure.to_dict()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "FieldSystem":
        try:
            ref = doc.get("structure_ref")
            structure = None
            if ref:
                structure = StructuralPair(
                    ref["a_pattern"], ref["c_pattern"], tuple(map(tuple, ref.get("output_index", []))),
                    tuple(ref.get("sensor_names", ())),
                )
            return cls(PrimeField(int(doc["p"])), doc["a"], doc["c"], structure)
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed system document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str | bytes) -> "FieldSystem":
        try:
            doc = json.loads(text)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise GraphFormatError(f"malformed system document: {exc}") from exc
        if not isinstance(doc, Mapping):
            raise GraphFormatError("malformed system document")
        return cls.from_dict(doc)


@dataclass(frozen=True)
class ObservabilityMatrix:
    """Blocks C, CA, ..., CA^(T-1) over GF(p)."""

    blocks: tuple[tuple[tuple[int, ...], ...], ...]
    horizon: int

    @property
    def rows(self) -> list[list[int]]:
        return [list(r) for b in self.blocks for r in b]


def observability_matrix(sys: FieldSystem, horizon: int | None = None) -> ObservabilityMatrix:
    t = sys.n if horizon is None else horizon
    if t < 1:
        raise ValueError("horizon must be at least 1")
    p = sys.field.p
    a = [list(r) for r in sys.a]
    block = [list(r) for r in sys.c]
    blocks = []
    for _ in range(t):
        blocks.append(tuple(tuple(r) for r in block))
        block = matmul(block, a, p) if block else []
    return ObservabilityMatrix(tuple(blocks), t)


def observability_rank(sys: FieldSystem, horizon: int | None = None) -> int:
    """Exact rank of the observability matrix; full rank N means observable."""
    if sys.n == 0:
        return 0
    return rank_mod(observability_matrix(sys, horizon).rows, sys.field.p)


def is_branching_with_loops(s: StructuralPair) -> bool:
    """Every state carries a loop and exactly one further link toward an output, without cycles."""
    n = s.n_states
    a, c = s.a_pattern, s.c_pattern
    if any(not a[i, i] for i in range(n)):
        return False
    nxt = {}
    for j in range(n):
        heads = [i for i in range(n) if i != j and a[i, j]]
        outs = [r for r in range(s.n_outputs) if c[r, j]]
        if len(heads) + len(outs) != 1:
            return False
        nxt[j] = heads[0] if heads else None
    for j in range(n):
        seen = set()
        while j is not None:
            if j in seen:
                return False
            seen.add(j)
            j = nxt[j]
    return True


def instantiate_deterministic(s: StructuralPair, field: PrimeField) -> FieldSystem:
    """Loops get 1, 2, ..., N (mod p) in state order; every other nonzero gets 1."""
    n = s.n_states
    if field.p < n:
        raise ObsNetError(f"field order {field.p} is smaller than the state count {n}")
    if not is_branching_with_loops(s):
        raise ObsNetError("deterministic instantiation needs a branching with self-loops")
    p = field.p
    a = [[int(s.a_pattern[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        a[i][i] = (i + 1) % p
    c = [[int(v) for v in row] for row in s.c_pattern]
    return FieldSystem(field, a, c, s)


def random_realization(s: StructuralPair, field: PrimeField, rng: random.Random) -> FieldSystem:
    """One draw: every structural nonzero uniform on 1..p-1, A row-major then C."""
    p = field.p
    a = [[rng.randint(1, p - 1) if v else 0 for v in row] for row in s.a_pattern.tolist()]
    c = [[rng.randint(1, p - 1) if v else 0 for v in row] for row in s.c_pattern.tolist()]
    return FieldSystem(field, a, c, s)


def instantiate_random(
    s: StructuralPair,
    field: PrimeField,
    seed: int,
    max_retries: int = DEFAULT_RETRIES,
) -> tuple[FieldSystem, int]:
    """Redraw until observable; returns the system and the number of draws used."""
    if not is_structurally_observable(s):
        raise UnobservableError("structure is not structurally observable")
    rng = random.Random(seed)
    for trial in range(1, max_retries + 1):
        sys = random_realization(s, field, rng)
        if observability_rank(sys) == s.n_states:
            return sys, trial
    raise RetriesExhaustedError(f"no observable draw in {max_retries} trials", trials=max_retries)


def simulate(sys: FieldSystem, x0: Sequence[int], steps: int) -> list[list[int]]:
    """Outputs y(n) = C A^n x0 for n = 0..steps-1."""
    if len(x0) != sys.n:
        raise ObsNetError(f"initial state has length {len(x0)}, expected {sys.n}")
    p = sys.field.p
    x = [int(v) % p for v in x0]
    trace = []
    for _ in range(steps):
        trace.append([sum(a * b for a, b in zip(row, x)) % p for row in sys.c])
        x = [sum(a * b for a, b in zip(row, x)) % p for row in sys.a]
    return trace


def recover_initial_state(sys: FieldSystem, trace: Sequence[Sequence[int]]) -> list[int]:
    """Solve the stacked output equations for x(0) exactly."""
    steps = len(trace)
    if steps == 0:
        raise UnobservableError("empty trace")
    if any(len(y) != sys.m for y in trace):
        raise ObsNetError(f"every trace row needs {sys.m} outputs")
    o = observability_matrix(sys, steps).rows
    y = [v for row in trace for v in row]
    return solve_mod(o, y, sys.field.p)


def trace_to_csv(trace: Sequence[Sequence[int]], m: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", *[f"y_{i + 1}" for i in range(m)]])
    for n, row in enumerate(trace):
        w.writerow([n, *row])
    return buf.getvalue()


def trace_from_csv(text: str) -> list[list[int]]:
    try:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][0] != "n":
            raise ValueError("missing header")
        out = []
        for n, row in enumerate(rows[1:]):
            if not row:
                continue
            if int(row[0]) != n:
                raise ValueError("steps must be consecutive from 0")
            out.append([int(v) for v in row[1:]])
        return out
    except (ValueError, IndexError) as exc:
        raise GraphFormatError(f"malformed trace: {exc}") from exc
