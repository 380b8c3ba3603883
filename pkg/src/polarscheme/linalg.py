"""Exact linear-algebra kernels.

Two families live here: Gaussian elimination modulo a prime, single and
batched over a stack of small matrices, and integer matrix products routed
through float64 BLAS under a proven no-rounding bound.  Everything is
exact; any floating point is an implementation detail with the exactness
argument stated and asserted where it is used.
"""

import functools

import numpy as np


@functools.lru_cache(maxsize=None)
def _inv_table(p):
    return np.array([0] + [pow(c, p - 2, p) for c in range(1, p)], dtype=np.int64)


def rref_batch(mats, p):
    """Reduced row echelon form mod p for a stack of matrices.

    mats: (N, r, c) integer array.  Returns (R, ranks) where R is the RREF
    stack (int64) and ranks is (N,).  Pivot rows are moved to the top in
    pivot-column order, so equal row spaces give equal R (canonical form).
    """
    A = (np.asarray(mats, dtype=np.int64) % p).copy()
    if A.ndim != 3:
        raise ValueError("expected a stack of matrices")
    N, r, c = A.shape
    inv = _inv_table(p)
    piv = np.zeros(N, dtype=np.int64)
    rows = np.arange(r)
    for col in range(c):
        colvals = A[:, :, col]
        cand = (colvals != 0) & (rows[None, :] >= piv[:, None])
        has = cand.any(axis=1)
        idx = np.nonzero(has)[0]
        if not idx.size:
            continue
        first = np.argmax(cand[idx], axis=1)
        pv = piv[idx]
        tmp = A[idx, first, :].copy()
        A[idx, first, :] = A[idx, pv, :]
        A[idx, pv, :] = tmp
        lead = A[idx, pv, col]
        A[idx, pv, :] = A[idx, pv, :] * inv[lead][:, None] % p
        other = A[idx, :, col].copy()
        other[np.arange(idx.size), pv] = 0
        A[idx] = (A[idx] - other[:, :, None] * A[idx, pv, None, :]) % p
        piv[idx] += 1
    return A, piv


def rank_batch(mats, p):
    return rref_batch(mats, p)[1]


def nullspace_batch(mats, p):
    """Right nullspaces {x : A x = 0 mod p} for a stack of equal-rank matrices.

    Returns (N, c - k, c) whose rows span each nullspace (canonical basis).
    Raises if the ranks differ across the stack; callers partition by rank
    first when that can happen.
    """
    A = np.asarray(mats, dtype=np.int64) % p
    N, r, c = A.shape
    eye = np.broadcast_to(np.eye(c, dtype=np.int64), (N, c, c))
    M = np.concatenate([A.transpose(0, 2, 1), eye], axis=2)
    R, _ = rref_batch(M, p)
    lead = np.argmax(R != 0, axis=2)
    ks = (lead < r).sum(axis=1)
    k = int(ks[0])
    if not (ks == k).all():
        raise ValueError("mixed ranks in nullspace_batch stack")
    return R[:, k:, r:]


def rref(mat, p):
    R, ranks = rref_batch(np.asarray(mat)[None, :, :], p)
    return R[0], int(ranks[0])


def rank(mat, p):
    return rref(mat, p)[1]


def nullspace(mat, p):
    return nullspace_batch(np.asarray(mat)[None, :, :], p)[0]


def row_space_key(mat, p):
    """Canonical bytes key of the row space (RREF with zero rows dropped)."""
    R, k = rref(mat, p)
    return R[:k].astype(np.int8).tobytes()


def exact_int_matmul(A, B, spot_checks=3, seed=0):
    """Exact product of two integer matrices via float64 BLAS.

    Exact because each inner product is an integer of magnitude at most
    k * max|A| * max|B| (k the inner dimension) and float64 represents all
    integers below 2^53 exactly; partial sums along the way obey the same
    bound.  The bound is asserted before multiplying, integrality after,
    and a few entries are recomputed with Python bigints.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    k = A.shape[-1]
    amax = int(np.abs(A).max(initial=0))
    bmax = int(np.abs(B).max(initial=0))
    bound = k * max(amax, 1) * max(bmax, 1)
    if bound >= 2**53:
        raise OverflowError("magnitude bound %d not exactly representable" % bound)
    C = A.astype(np.float64) @ B.astype(np.float64)
    Ci = np.rint(C).astype(np.int64)
    if not (C == Ci).all():
        raise AssertionError("non-integer entries in integer matmul")
    if spot_checks and A.ndim == 2 and B.ndim == 2 and A.shape[0] and B.shape[1]:
        rng = np.random.default_rng(seed)
        for _ in range(spot_checks):
            i = int(rng.integers(0, A.shape[0]))
            j = int(rng.integers(0, B.shape[1]))
            exact = sum(int(a) * int(b) for a, b in zip(A[i, :], B[:, j]))
            if exact != int(Ci[i, j]):
                raise AssertionError("bigint spot check failed at (%d, %d)" % (i, j))
    return Ci
