import itertools
import random

import numpy as np
import pytest

from obsnet import (
    EnumerationBoundError,
    ObsNetError,
    StructuralPair,
    StructuralSystemGraph,
    design,
    extract_cactus_certificate,
    is_structurally_observable,
    robust_structural_observability,
)
from obsnet.oracles import has_spanning_cactus_patch
from obsnet.structural import validate_certificate

from _instances import dense_feasible, t1, t2, t3


def pair(a, c):
    return StructuralPair(np.array(a, dtype=np.uint8), np.array(c, dtype=np.uint8).reshape(-1, len(a)))


def test_examples():
    assert is_structurally_observable(pair([[1]], [[1]]))
    # A[i][j] = 1 encodes the link x_j -> x_i
    assert is_structurally_observable(pair([[0, 0], [1, 0]], [[0, 1]]))
    assert not is_structurally_observable(pair([[0, 0], [1, 0]], [[1, 0]]))


def test_rank_deficient_but_reachable():
    # x1 -> x2 -> y and x1 -> x3 -> y with no loops: two states compete for one row
    a = [[0, 0, 0], [1, 0, 0], [1, 0, 0]]
    assert not is_structurally_observable(pair(a, [[0, 1, 0]]))
    assert not has_spanning_cactus_patch(pair(a, [[0, 1, 0]]))


def test_validation():
    with pytest.raises(ObsNetError):
        pair([[1, 0]], [[1, 0]])
    with pytest.raises(ObsNetError):
        pair([[1, 0], [0, 1]], [[1, 1]])
    with pytest.raises(ObsNetError):
        StructuralPair(np.eye(2, dtype=np.uint8), np.array([[0, 1]], dtype=np.uint8), output_index=[("x1", "q1")])


def test_system_graph_is_pure():
    s = design(t3(), 0).structure
    g1, g2 = StructuralSystemGraph.from_pair(s), StructuralSystemGraph.from_pair(s)
    assert g1 == g2
    assert [sorted(x) for x in g1.successors()] == [[0], [0, 1]]


def test_robustness_examples():
    assert robust_structural_observability(design(t2(), 1).structure, 1) is True
    assert robust_structural_observability(design(t3(), 0).structure, 1) == (0,)
    assert robust_structural_observability(design(t1(), 0).structure, 0) is True


def test_counterexample_is_lexicographically_smallest():
    # each of x1, x2 relays x3; deleting x3 alone is harmless, both relays matter
    s = pair([[1, 0, 1], [0, 1, 1], [0, 0, 1]], [[1, 0, 0], [0, 1, 0]])
    assert robust_structural_observability(s, 1) is True
    assert robust_structural_observability(s, 2) == (0, 1)


def test_deletion_zeroes_rows():
    s = design(t2(), 1).structure
    d = s.delete([0])
    assert d.n_states == 0 and d.n_outputs == s.n_outputs


def test_enumeration_bound():
    s = StructuralPair(np.eye(40, dtype=np.uint8), np.eye(40, dtype=np.uint8))
    with pytest.raises(EnumerationBoundError):
        robust_structural_observability(s, 10)


def test_certificate_examples():
    s1 = design(t1(), 0).structure
    c1 = extract_cactus_certificate(s1)
    assert c1.stems == (((0,), 0),) and c1.spanning
    s3 = design(t3(), 0).structure
    c3 = extract_cactus_certificate(s3)
    assert c3.to_dict(s3.sensor_names)["stems"] == [{"path": ["x2", "x1"], "output_row": 0}]
    iso = pair([[1, 0], [0, 1]], [[1, 0]])
    assert extract_cactus_certificate(iso).uncovered == {1}


def test_branching_certificates_hang_loops_off_stems():
    rng = random.Random(4)
    for _ in range(20):
        g = dense_feasible(rng, rng.randint(2, 8), 2, 0, p_xx=0.5, p_xq=0.2)
        s = design(g, 0).structure
        cert = extract_cactus_certificate(s)
        assert cert.spanning and validate_certificate(s, cert)
        for cyc, _ in cert.cycles:
            assert len(cyc) == 1


def random_pair(rng, n, m, density):
    a = (rng.random((n, n)) < density).astype(np.uint8)
    c = np.zeros((m, n), dtype=np.uint8)
    for r in range(m):
        j = int(rng.integers(-1, n))
        if j >= 0:
            c[r, j] = 1
    return StructuralPair(a, c)


def test_certificates_validate_exactly_when_observable():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        s = random_pair(rng, int(rng.integers(1, 6)), int(rng.integers(0, 4)), rng.uniform(0.1, 0.6))
        cert = extract_cactus_certificate(s)
        assert validate_certificate(s, cert)
        assert cert.spanning == is_structurally_observable(s)


def test_certificate_validator_rejects_tampering():
    s = design(t3(), 0).structure
    cert = extract_cactus_certificate(s)
    from obsnet.structural import CactusCertificate

    assert not validate_certificate(s, CactusCertificate(((cert.stems[0][0][::-1], 0),), (), frozenset()))


def test_matching_agrees_with_cactus_search_small():
    for n in (1, 2, 3):
        cells = list(itertools.product(range(n), repeat=2))
        rows = [None] + list(range(n))
        for mask in range(1 << (n * n)):
            a = np.zeros((n, n), dtype=np.uint8)
            for b, (i, j) in enumerate(cells):
                a[i, j] = mask >> b & 1
            for obs in itertools.product(rows, repeat=min(n, 2)):
                c = np.zeros((len(obs), n), dtype=np.uint8)
                for r, j in enumerate(obs):
                    if j is not None:
                        c[r, j] = 1
                s = StructuralPair(a, c)
                assert is_structurally_observable(s) == has_spanning_cactus_patch(s)
