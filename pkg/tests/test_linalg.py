import numpy as np
import pytest

from polarscheme.linalg import (
    exact_int_matmul,
    nullspace,
    nullspace_batch,
    rank,
    rank_batch,
    rref,
    row_space_key,
)


def brute_nullity(A, p):
    # count solutions of A x = 0 by walking the whole space
    c = A.shape[1]
    count = 0
    for n in range(p**c):
        x = np.array([(n // p**i) % p for i in range(c)])
        if ((A @ x) % p == 0).all():
            count += 1
    k = 0
    while p**k < count:
        k += 1
    assert p**k == count
    return k


@pytest.mark.parametrize("p", (3, 5))
def test_rank_against_brute_nullity(p):
    rng = np.random.default_rng(p)
    for _ in range(30):
        r, c = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        A = rng.integers(0, p, (r, c))
        assert rank(A, p) == c - brute_nullity(A, p)


@pytest.mark.parametrize("p", (3, 5, 1009))
def test_rref_properties(p):
    rng = np.random.default_rng(p)
    for _ in range(20):
        A = rng.integers(0, min(p, 50), (4, 6))
        R, k = rref(A, p)
        # zero rows at the bottom, leading ones, canonical under row ops
        assert (R[k:] == 0).all()
        for i in range(k):
            lead = np.argmax(R[i] != 0)
            assert R[i, lead] == 1
            assert (R[:i, lead] == 0).all() and (R[i + 1:, lead] == 0).all()
        perm = rng.permutation(4)
        scale = rng.integers(1, p, 4)
        B = A[perm] * scale[:, None] % p
        assert row_space_key(A, p) == row_space_key(B, p)


@pytest.mark.parametrize("p", (3, 5))
def test_nullspace(p):
    rng = np.random.default_rng(7 * p)
    for _ in range(25):
        A = rng.integers(0, p, (3, 6))
        ns = nullspace(A, p)
        assert ns.shape == (6 - rank(A, p), 6)
        assert (A @ ns.T % p == 0).all()
        assert rank(ns, p) == ns.shape[0]


def test_batch_matches_single():
    rng = np.random.default_rng(11)
    mats = rng.integers(0, 3, (40, 5, 6))
    ranks = rank_batch(mats, 3)
    for i in range(40):
        assert ranks[i] == rank(mats[i], 3)
    # nullspace_batch requires equal ranks; group by rank
    for k in np.unique(ranks):
        sub = mats[ranks == k]
        ns = nullspace_batch(sub, 3)
        assert ns.shape[1] == 6 - k
        for i in range(len(sub)):
            assert (sub[i] @ ns[i].T % 3 == 0).all()
            assert (ns[i] == nullspace(sub[i], 3)).all()


def test_nullspace_batch_rejects_mixed_ranks():
    a = np.zeros((2, 2, 3), dtype=np.int64)
    a[0, 0, 0] = 1
    with pytest.raises(ValueError):
        nullspace_batch(a, 3)


def test_exact_int_matmul():
    rng = np.random.default_rng(0)
    A = rng.integers(-500, 500, (37, 53))
    B = rng.integers(-500, 500, (53, 29))
    C = exact_int_matmul(A, B)
    expect = A.astype(object) @ B.astype(object)
    assert (C == expect.astype(np.int64)).all()


def test_exact_int_matmul_bound_guard():
    big = np.full((2, 2), 2**27, dtype=np.int64)
    with pytest.raises(OverflowError):
        exact_int_matmul(big, big)
