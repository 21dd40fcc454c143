import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obsnet import (
    FieldSystem,
    InconsistentTraceError,
    ObsNetError,
    PrimeField,
    RetriesExhaustedError,
    StructuralPair,
    UnobservableError,
    design,
    instantiate_deterministic,
    instantiate_random,
    observability_rank,
    recover_initial_state,
    simulate,
)
from obsnet.field import (
    is_prime,
    next_prime,
    observability_matrix,
    random_realization,
    rank_mod,
    trace_from_csv,
    trace_to_csv,
)

from _instances import dense_feasible, t1

P = 2147483647


def pair(a, c):
    return StructuralPair(np.array(a, dtype=np.uint8), np.array(c, dtype=np.uint8))


# stem x2 -> x1 -> y with loops; A[i][j] = 1 encodes x_j -> x_i
STEM = pair([[1, 1], [0, 1]], [[1, 0]])


def test_primes():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(P) and not is_prime(P - 2)
    assert next_prime(8) == 11 and next_prime(7) == 7
    with pytest.raises(ObsNetError):
        PrimeField(4)


def test_deterministic_stem():
    sys = instantiate_deterministic(STEM, PrimeField(5))
    assert [list(r) for r in sys.a] == [[1, 1], [0, 2]]
    assert [list(r) for r in sys.c] == [[1, 0]]
    assert observability_rank(sys) == 2


def test_deterministic_single_state_and_small_field():
    sys = instantiate_deterministic(pair([[1]], [[1]]), PrimeField(2))
    assert sys.a == ((1,),) and observability_rank(sys) == 1
    three = pair(np.eye(3, dtype=np.uint8) + np.eye(3, k=-1, dtype=np.uint8), [[0, 0, 1]])
    with pytest.raises(ObsNetError):
        instantiate_deterministic(three, PrimeField(2))


def test_deterministic_needs_branching():
    with pytest.raises(ObsNetError):
        instantiate_deterministic(pair([[1, 1], [1, 1]], [[1, 0]]), PrimeField(5))


def test_rank_examples():
    f = PrimeField(7)
    assert observability_rank(FieldSystem(f, [[1, 0], [0, 1]], [[0, 0]])) == 0
    assert observability_rank(FieldSystem(f, [[1, 0], [0, 1]], [[1, 0], [0, 1]]), 1) == 2


def test_random_t1_first_trial():
    s = design(t1(), 0).structure
    sys, trials = instantiate_random(s, PrimeField(P), seed=1)
    assert trials == 1 and observability_rank(sys) == 1


def test_random_rejects_unobservable():
    with pytest.raises(UnobservableError):
        instantiate_random(pair([[1, 0], [1, 0]], [[1, 0]]), PrimeField(P), seed=0)


def test_small_field_exhausts_retries():
    # three leaves feed x1; over GF(2) every nonzero is 1, so the leaves are indistinguishable
    star = pair([[1, 1, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], [[1, 0, 0, 0]])
    with pytest.raises(RetriesExhaustedError) as err:
        instantiate_random(star, PrimeField(2), seed=0, max_retries=5)
    assert err.value.trials == 5


def test_structure_respected():
    rng = random.Random(1)
    for _ in range(30):
        s = design(dense_feasible(rng, rng.randint(1, 6), 2, 1), 1).structure
        sys = random_realization(s, PrimeField(P), rng)
        for mat, pat in ((sys.a, s.a_pattern), (sys.c, s.c_pattern)):
            for i, row in enumerate(mat):
                for j, v in enumerate(row):
                    assert (v != 0) == bool(pat[i, j])
    with pytest.raises(ObsNetError):
        FieldSystem(PrimeField(5), [[1, 1], [1, 1]], [[1, 0]], STEM)


def test_simulate_examples():
    sys = FieldSystem(PrimeField(5), [[2]], [[1]])
    assert simulate(sys, [3], 2) == [[3], [1]]
    assert simulate(sys, [0], 3) == [[0], [0], [0]]
    ident = FieldSystem(PrimeField(7), [[1, 0], [0, 1]], [[3, 0]])
    assert simulate(ident, [2, 5], 3) == [[6]] * 3
    with pytest.raises(ObsNetError):
        simulate(sys, [1, 2], 2)


def test_recover_round_trip_and_failures():
    sys = instantiate_deterministic(STEM, PrimeField(5))
    assert recover_initial_state(sys, simulate(sys, [3, 4], 2)) == [3, 4]
    with pytest.raises(UnobservableError):
        recover_initial_state(FieldSystem(PrimeField(5), [[1, 0], [0, 1]], [[1, 0]]), [[1], [1]])
    trace = simulate(sys, [3, 4], 4)
    trace[2][0] = (trace[2][0] + 1) % 5
    with pytest.raises(InconsistentTraceError):
        recover_initial_state(sys, trace)


def test_observability_blocks():
    sys = instantiate_deterministic(STEM, PrimeField(5))
    o = observability_matrix(sys, 3)
    assert o.rows == [[1, 0], [1, 1], [1, 3]]


def test_trace_csv():
    text = trace_to_csv([[3, 4], [1, 0]], 2)
    assert text == "n,y_1,y_2\n0,3,4\n1,1,0\n"
    assert trace_from_csv(text) == [[3, 4], [1, 0]]


def test_system_json_round_trip():
    sys = instantiate_deterministic(STEM, PrimeField(5))
    back = FieldSystem.from_json(sys.to_json())
    assert back.a == sys.a and back.c == sys.c and back.field.p == 5


def test_deterministic_guarantee_at_smallest_prime():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 10)
        s = design(dense_feasible(rng, n, 2, 0, p_xx=0.3), 0).structure
        sys = instantiate_deterministic(s, PrimeField(next_prime(max(n, 2))))
        assert observability_rank(sys) == n


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32))
def test_rank_stable_past_n(n, seed):
    rng = random.Random(seed)
    p = 101
    a = [[rng.randrange(p) if rng.random() < 0.4 else 0 for _ in range(n)] for _ in range(n)]
    c = [[rng.randrange(p) if rng.random() < 0.4 else 0 for _ in range(n)] for _ in range(rng.randint(1, 3))]
    sys = FieldSystem(PrimeField(p), a, c)
    assert observability_rank(sys, n + 3) == observability_rank(sys, n)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 12), min_size=3, max_size=3), min_size=1, max_size=5))
def test_rank_matches_float_rank_over_large_prime(rows):
    # small entries keep every minor far below p, so ranks agree with the rationals
    assert rank_mod(rows, P) == np.linalg.matrix_rank(np.array(rows, dtype=float))
