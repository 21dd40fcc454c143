import itertools
import random

from obsnet.matroid import (
    FreeMatroid,
    PartitionMatroid,
    RootedConnectivityMatroid,
    TrivialMatroid,
    weighted_matroid_intersection,
)


def subsets(ground):
    for r in range(len(ground) + 1):
        yield from (frozenset(c) for c in itertools.combinations(ground, r))


def check_axioms(m):
    ground = m.ground_set
    indep = {s for s in subsets(ground) if m.is_independent(s)}
    assert frozenset() in indep
    for s in indep:
        for x in s:
            assert s - {x} in indep
    for a in indep:
        for b in indep:
            if len(a) < len(b):
                assert any(a | {x} in indep for x in b - a)
    for s in indep:
        for x in set(ground) - s:
            assert m.can_add(s, x) == (s | {x} in indep)
            if s | {x} not in indep:
                circ = frozenset(m.circuit(s, x))
                assert circ not in indep and all(circ - {y} in indep for y in circ)


def test_partition_axioms():
    rng = random.Random(2)
    for _ in range(10):
        ground = list(range(rng.randint(1, 7)))
        blocks = {e: rng.randrange(3) for e in ground}
        check_axioms(PartitionMatroid(blocks, {b: rng.randint(0, 2) for b in range(3)}))


def test_free_and_trivial_axioms():
    check_axioms(FreeMatroid(range(4)))
    check_axioms(TrivialMatroid(range(4)))


def test_rooted_connectivity_axioms():
    rng = random.Random(4)
    nodes = ["a", "b", "c", "r"]
    for c in (1, 2):
        for _ in range(6):
            pairs = [(u, v) for u, v in itertools.permutations(nodes, 2) if u != "r"]
            links = {i: p for i, p in enumerate(rng.sample(pairs, rng.randint(3, 8)))}
            check_axioms(RootedConnectivityMatroid(links, "r", c))


def test_example_pair():
    m1 = PartitionMatroid({"e1": 0, "e2": 0, "e3": 1}, 1)
    m2 = PartitionMatroid({"e1": 0, "e2": 1, "e3": 1}, 1)
    got = weighted_matroid_intersection(m1, m2, {"e1": 5, "e2": 1, "e3": 1})
    assert got == {"e1", "e3"}


def test_free_matroids_take_everything():
    ground = list(range(5))
    assert weighted_matroid_intersection(FreeMatroid(ground), FreeMatroid(ground), {e: e for e in ground}) == set(
        ground
    )


def test_trivial_matroid_gives_empty():
    ground = list(range(5))
    assert weighted_matroid_intersection(FreeMatroid(ground), TrivialMatroid(ground), {}) == frozenset()


def test_against_enumeration():
    rng = random.Random(9)
    for _ in range(100):
        ground = list(range(rng.randint(1, 10)))
        m1 = PartitionMatroid({e: rng.randrange(4) for e in ground}, {b: rng.randint(0, 2) for b in range(4)})
        m2 = PartitionMatroid({e: rng.randrange(4) for e in ground}, {b: rng.randint(0, 2) for b in range(4)})
        w = {e: rng.randint(-5, 9) for e in ground}
        maximize = rng.random() < 0.5
        common = [s for s in subsets(ground) if m1.is_independent(s) and m2.is_independent(s)]
        size = max(len(s) for s in common)
        pick = max if maximize else min
        want = pick(sum(w[e] for e in s) for s in common if len(s) == size)
        got = weighted_matroid_intersection(m1, m2, w, maximize=maximize)
        assert m1.is_independent(got) and m2.is_independent(got)
        assert len(got) == size and sum(w[e] for e in got) == want
