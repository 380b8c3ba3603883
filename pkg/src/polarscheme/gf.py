"""Exact arithmetic for GF(q) and GF(q^2), q an odd prime.

An element a0 + a1*theta of GF(q^2) is stored as the integer a0*q + a1,
where theta^2 = xi and xi is the smallest non-square of GF(q).  Ascending
index equals lexicographic (a0, a1) order, and every deterministic
"smallest element" choice (w, mu, ...) scans in that order.  GF(q) itself
is handled as plain integers mod q.

q-polynomials x -> a*x + b*x^q are coefficient pairs (a, b).  They form a
ring under composition; (a, b) is invertible iff N(a) != N(b).
"""

import functools

import numpy as np


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def find_nonsquare(q):
    """Smallest non-square in GF(q)*."""
    squares = {(i * i) % q for i in range(1, q)}
    for c in range(1, q):
        if c not in squares:
            return c
    raise ValueError("GF(%d) has no non-square; q must be an odd prime" % q)


class Field:
    """Lookup-table arithmetic for GF(q^2) = GF(q)(theta).

    The 2d tables (ADD, MUL) and 1d tables (NEG, INV, FROB, TRACE, NORM,
    LOG) accept numpy index arrays directly, so bulk arithmetic is a
    fancy-indexing expression.  TRACE and NORM return GF(q) values as
    integers in [0, q).
    """

    def __init__(self, q):
        if q % 2 == 0 or not _is_prime(q):
            raise ValueError("q must be an odd prime, got %r" % (q,))
        self.q = q
        self.q2 = q * q
        self.xi = find_nonsquare(q)
        self.zero = 0
        self.one = q  # (a0, a1) = (1, 0)
        self.theta = 1  # (a0, a1) = (0, 1)
        self._build_tables()
        self.w = self._smallest_primitive()
        self.mu = self._smallest_norm_minus_one()
        self.I = (self.one, 0)
        self.K = (0, self.one)

    # ---- construction ----

    def _build_tables(self):
        q, xi = self.q, self.xi
        idx = np.arange(self.q2)
        a0, a1 = idx // q, idx % q
        self.A0, self.A1 = a0, a1
        s0 = (a0[:, None] + a0[None, :]) % q
        s1 = (a1[:, None] + a1[None, :]) % q
        self.ADD = s0 * q + s1
        m0 = (a0[:, None] * a0[None, :] + xi * a1[:, None] * a1[None, :]) % q
        m1 = (a0[:, None] * a1[None, :] + a1[:, None] * a0[None, :]) % q
        self.MUL = m0 * q + m1
        self.NEG = ((-a0) % q) * q + (-a1) % q
        self.FROB = a0 * q + (-a1) % q
        self.TRACE = (2 * a0) % q
        self.NORM = (a0 * a0 - xi * a1 * a1) % q
        inv = np.zeros(self.q2, dtype=np.int64)
        hits = np.argwhere(self.MUL == self.one)
        inv[hits[:, 0]] = hits[:, 1]
        self.INV = inv
        self.INVQ = np.array([0] + [pow(c, q - 2, q) for c in range(1, q)])

    def _mult_order(self, x):
        o, y = 1, x
        while y != self.one:
            y = int(self.MUL[y, x])
            o += 1
        return o

    def _smallest_primitive(self):
        target = self.q2 - 1
        for x in range(1, self.q2):
            if self._mult_order(x) == target:
                exp = np.zeros(target, dtype=np.int64)
                log = np.full(self.q2, -1, dtype=np.int64)
                y = self.one
                for k in range(target):
                    exp[k] = y
                    log[y] = k
                    y = int(self.MUL[y, x])
                self.EXP, self.LOG = exp, log
                return x
        raise AssertionError("GF(q^2)* is cyclic, unreachable")

    def _smallest_norm_minus_one(self):
        for x in range(1, self.q2):
            if int(self.NORM[x]) == self.q - 1:
                return x
        raise AssertionError("norm maps onto GF(q)*, unreachable")

    # ---- element helpers ----

    def elem(self, a0, a1):
        return (a0 % self.q) * self.q + (a1 % self.q)

    def pair(self, x):
        return divmod(int(x), self.q)

    def embed(self, c):
        """GF(q) integer -> GF(q^2) element."""
        return (c % self.q) * self.q

    def in_subfield(self, x):
        return int(x) % self.q == 0

    def add(self, a, b):
        return int(self.ADD[a, b])

    def sub(self, a, b):
        return int(self.ADD[a, self.NEG[b]])

    def mul(self, a, b):
        return int(self.MUL[a, b])

    def neg(self, a):
        return int(self.NEG[a])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(q^2)")
        return int(self.INV[a])

    def frob(self, a):
        return int(self.FROB[a])

    def trace(self, a):
        return int(self.TRACE[a])

    def norm(self, a):
        return int(self.NORM[a])

    def coset_label(self, x):
        """Index of x GF(q)* in GF(q^2)*/GF(q)* = Z_{q+1}; 0 is the identity coset."""
        if x == 0:
            raise ZeroDivisionError("zero has no coset label")
        return int(self.LOG[x]) % (self.q + 1)

    # ---- q-polynomials ----

    def qp_eval(self, F, x):
        a, b = F
        return int(self.ADD[self.MUL[a, x], self.MUL[b, self.FROB[x]]])

    def qp_eval_arr(self, F, x):
        """qp_eval over a numpy array of elements."""
        a, b = F
        return self.ADD[self.MUL[a, x], self.MUL[b, self.FROB[x]]]

    def compose(self, F, G):
        """Coefficients of F(G(x)), i.e. F applied after G."""
        a, b = F
        c, d = G
        M, A, FR = self.MUL, self.ADD, self.FROB
        return (int(A[M[a, c], M[b, FR[d]]]), int(A[M[a, d], M[b, FR[c]]]))

    def adjoint(self, F):
        a, b = F
        return (a, int(self.FROB[b]))

    def qp_add(self, F, G):
        return (int(self.ADD[F[0], G[0]]), int(self.ADD[F[1], G[1]]))

    def qp_neg(self, F):
        return (int(self.NEG[F[0]]), int(self.NEG[F[1]]))

    def qp_scale(self, c, F):
        return (int(self.MUL[c, F[0]]), int(self.MUL[c, F[1]]))

    def qp_det(self, F):
        """Dickson determinant N(a) - N(b) as a GF(q) integer."""
        a, b = F
        return (int(self.NORM[a]) - int(self.NORM[b])) % self.q

    def is_invertible(self, F):
        return self.qp_det(F) != 0

    def invert(self, F):
        a, b = F
        det = self.qp_det(F)
        if det == 0:
            raise ZeroDivisionError("singular q-polynomial: N(a) = N(b)")
        s = self.embed(int(self.INVQ[det]))
        return (int(self.MUL[self.FROB[a], s]), int(self.MUL[self.NEG[b], s]))

    def interpolate(self, v1, vtheta):
        """The unique q-polynomial with F(1) = v1 and F(theta) = vtheta."""
        half = self.embed(int(self.INVQ[2 % self.q]))
        u = self.mul(vtheta, self.inv(self.theta))
        a = self.mul(self.add(v1, u), half)
        b = self.mul(self.sub(v1, u), half)
        return (a, b)

    def dickson_matrix(self, F):
        a, b = F
        return ((a, b), (self.frob(b), self.frob(a)))

    def __repr__(self):
        return "Field(q=%d, xi=%d)" % (self.q, self.xi)


@functools.lru_cache(maxsize=None)
def field(q):
    return Field(q)
