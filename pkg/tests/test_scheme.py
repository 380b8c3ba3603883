from fractions import Fraction

import numpy as np
import pytest

from polarscheme.gf import field
from polarscheme.hermitian import hermitian
from polarscheme.scheme import (LineScheme, PointScheme, Quotient,
                                dual_degree_set, imprimitive_partition,
                                imprimitivity_witness, inner_distribution,
                                intersection_tensor, is_clique, is_design,
                                macwilliams, multiplicities, p_matrix,
                                q_matrix, scaled_q_int, valencies,
                                verify_bose_mesner, verify_intertwining,
                                verify_tensor_exhaustive,
                                verify_tensor_sampled)


@pytest.fixture(scope="module")
def ps3():
    return PointScheme(3)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_tensor_internal_consistency(q):
    T = intersection_tensor(q)
    e = (1,) + valencies(q)
    for k in range(6):
        # row sums give the valencies, and the scheme is symmetric
        for i in range(6):
            assert T[k, i, :].sum() == e[i]
        assert (T[k] == T[k].T).all()
        # double counting of triangles
        for i in range(6):
            for j in range(6):
                assert e[k] * T[k, i, j] == e[i] * T[i, k, j]


@pytest.mark.parametrize("q", [3, 5, 7])
def test_eigenmatrices(q):
    P, Q = p_matrix(q), q_matrix(q)
    n = q**5
    for i in range(6):
        for j in range(6):
            v = sum(P[i][a] * Q[a][j] for a in range(6))
            assert v == (n if i == j else 0)
    assert sum(P[0]) == n and all(sum(P[i]) == 0 for i in range(1, 6))
    assert sum(Q[0]) == n and all(sum(Q[j]) == 0 for j in range(1, 6))
    m = multiplicities(q)
    assert sum(m) == n
    # the chosen scale clears every denominator
    S = scaled_q_int(q)
    for j in range(6):
        for i in range(6):
            assert Fraction(int(S[j, i]), 2 * (q + 1)) == Q[j][i]


def test_classifier_examples():
    f = field(3)
    h = hermitian(3)
    base = h.pt_id((0, 0, 0, f.one))
    ps = PointScheme(3, base=base)
    u = ps.vid_of_pid[h.pt_id((f.one, 0, 0, 0))]
    v = ps.vid_of_pid[h.pt_id((f.one, 0, 0, f.theta))]
    w = ps.vid_of_pid[h.pt_id((f.one, f.one, f.one, f.one))]
    assert ps.rel[u, v] == 2
    assert ps.rel[u, w] == 5


def test_relation_matrix_shape(ps3):
    assert ps3.rel.shape == (243, 243)
    assert (ps3.rel == ps3.rel.T).all()
    assert (np.diagonal(ps3.rel) == 0).all()
    assert ps3.valency_counts() == valencies(3)


def test_tensor_exhaustive_q3(ps3):
    assert verify_tensor_exhaustive(ps3)


def test_tensor_exhaustive_other_base():
    f = field(3)
    h = hermitian(3)
    ps = PointScheme(3, base=h.pt_id((0, 0, 0, f.one)))
    assert ps.valency_counts() == valencies(3)
    assert verify_tensor_exhaustive(ps)


def test_tensor_sampled_q5():
    ps = PointScheme(5)
    checked, bad = verify_tensor_sampled(ps, per_class=50, seed=1)
    assert checked == 250 and bad == 0


def test_bose_mesner_q3(ps3):
    out = verify_bose_mesner(ps3, rank_mod=1009)
    assert all(out.values()), out


def test_delsarte_whole_set(ps3):
    Y = list(range(ps3.n))
    a = inner_distribution(ps3, Y)
    assert a == (1,) + tuple(valencies(3))
    aq = macwilliams(3, a)
    assert aq[0] == 3**5 and all(x == 0 for x in aq[1:])
    assert is_design(3, a, {1, 2, 3, 4, 5})
    assert dual_degree_set(ps3, np.ones(ps3.n, dtype=np.int64)) == set()


def test_delsarte_small_sets(ps3):
    # a single R1 pair
    u = 0
    v = int(np.nonzero(ps3.rel[u] == 1)[0][0])
    a = inner_distribution(ps3, [u, v])
    assert a[0] == 1 and a[1] == 1 and sum(a) == 2
    assert is_clique(a, {1})
    assert not is_clique(a, {4, 5})
    w = np.zeros(ps3.n, dtype=np.int64)
    w[u] = 1
    w[v] = -1
    assert dual_degree_set(ps3, w) <= {1, 2, 3, 4, 5}


def test_quotient(ps3):
    assert imprimitive_partition(3) == [[0, 2], [1, 3], [4, 5]]
    assert imprimitivity_witness(3)
    assert imprimitive_partition(5) == [[0, 2], [1, 3], [4, 5]]
    qt = Quotient(ps3)
    assert qt.srg_params() == (81, 32, 13, 12)
    assert qt.srg_params_from_tensor() == qt.srg_params()
    assert qt.verify_srg()
    assert qt.verify_consistency()
    assert qt.verify_dickson_model()


def test_line_scheme_intertwines(ps3):
    ls = LineScheme(3)
    assert int(ls.kl.gen_to_hpoint[ls.base]) == ps3.base
    assert verify_intertwining(ls, ps3)
    counts = np.bincount(ls.rel[0], minlength=6)
    assert tuple(counts[1:]) == valencies(3)
