"""The elliptic quadric Q^-(5,q) in its hat-model coordinates.

Vectors of V-hat are triples (x, y, z) over GF(q^2), laid out as the six
GF(q) coordinates (x0, x1, y0, y1, z0, z1) with x = x0 + theta*x1 and so
on.  The quadratic form is

    qhat(x, y, z) = N(y) - Tr(x z^q)

whose polarization is bhat(u, v) = Tr(yu yv^q) - Tr(xu zv^q) - Tr(zu xv^q).
Singular points are the points of the quadric; totally singular lines are
its generators; a non-degenerate hyperplane is stored by its non-singular
pole.  Points are canonical projective representatives (first non-zero
coordinate scaled to 1), listed in lexicographic order of the 6-tuple.
"""

import functools
import json

import numpy as np

from . import linalg
from .gf import field


def qhat(f, xyz):
    x, y, z = xyz
    return (f.norm(y) - f.trace(f.mul(x, f.frob(z)))) % f.q


def bhat(f, u, v):
    t = f.trace
    m, fr = f.mul, f.frob
    val = t(m(u[1], fr(v[1]))) - t(m(u[0], fr(v[2]))) - t(m(u[2], fr(v[0])))
    return val % f.q


def triple_to_vec6(f, xyz):
    out = []
    for c in xyz:
        a0, a1 = f.pair(c)
        out.extend((a0, a1))
    return np.array(out, dtype=np.int64)


def vec6_to_triple(f, v):
    return tuple(f.elem(int(v[2 * i]), int(v[2 * i + 1])) for i in range(3))


def gram_matrix(q, xi):
    """bhat as a symmetric 6x6 matrix over GF(q) in the flat coordinates."""
    g = np.zeros((6, 6), dtype=np.int64)
    g[2, 2] = 2
    g[3, 3] = -2 * xi
    g[0, 4] = g[4, 0] = -2
    g[1, 5] = g[5, 1] = 2 * xi
    return g % q


def _projective_reps(q):
    """All points of PG(5,q) as canonical reps in lexicographic order."""
    blocks = []
    for lead in range(5, -1, -1):
        free = 5 - lead
        tail = np.indices((q,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((tail.shape[0], 6), dtype=np.int64)
        block[:, lead] = 1
        if free:
            block[:, lead + 1:] = tail
        blocks.append(block)
    return np.concatenate(blocks)


def eval_qhat_flat(q, xi, pts):
    """qhat over an (N, 6) array of flat coordinates."""
    x0, x1, y0, y1, z0, z1 = (pts[:, i] for i in range(6))
    return (y0 * y0 - xi * y1 * y1 - 2 * (x0 * z0 - xi * x1 * z1)) % q


class Geometry:
    """Materialized Q^-(5,q): points, generators, hyperplanes, incidences."""

    def __init__(self, q, _from_cache=None):
        self.f = field(q)
        self.q = q
        self.xi = self.f.xi
        self.G6 = gram_matrix(q, self.xi)
        if _from_cache is not None:
            self._load_arrays(_from_cache)
        else:
            self._build()
        self._check_counts()
        self.point_index = {p.tobytes(): i for i, p in enumerate(self.points)}
        self.pole_index = {p.tobytes(): i for i, p in enumerate(self.poles)}
        self.gen_index = {}
        for gid, basis in enumerate(self.gen_basis):
            self.gen_index[basis.tobytes()] = gid

    # ---- construction ----

    def _build(self):
        q = self.q
        reps = _projective_reps(q)
        vals = eval_qhat_flat(q, self.xi, reps)
        self.points = reps[vals == 0].astype(np.int64)
        self.poles = reps[vals != 0].astype(np.int64)
        self._build_generators()

    def _build_generators(self):
        q = self.q
        pts = self.points
        n = len(pts)
        # orthogonality among singular points: u perp v iff v lies on a
        # generator through u, so the mates of u split into the q^2+1
        # generators through u
        B = pts @ self.G6 @ pts.T % q
        seen = {}
        gen_points = []
        gen_basis = []
        inv = linalg._inv_table(q)
        for u in range(n):
            mates = np.nonzero((B[u] == 0) & (np.arange(n) > u))[0]
            for v in mates:
                basis, k = linalg.rref(np.stack([pts[u], pts[v]]), q)
                key = basis[:2].tobytes()
                if key in seen:
                    continue
                assert k == 2
                seen[key] = len(gen_points)
                ids = [u, int(v)]
                for c in range(1, q):
                    w = (pts[u] + c * pts[v]) % q
                    lead = int(np.argmax(w != 0))
                    w = w * int(inv[w[lead]]) % q
                    ids.append(self._pt_id_build(w))
                gen_points.append(sorted(ids))
                gen_basis.append(basis[:2])
        self.gen_points = np.array(gen_points, dtype=np.int64)
        self.gen_basis = np.array(gen_basis, dtype=np.int64)

    def _pt_id_build(self, w):
        if not hasattr(self, "_tmp_index"):
            self._tmp_index = {p.tobytes(): i for i, p in enumerate(self.points)}
        return self._tmp_index[w.tobytes()]

    def _check_counts(self):
        q = self.q
        assert len(self.points) == (q + 1) * (q**3 + 1)
        assert len(self.poles) == q * q * (q**3 + 1)
        assert len(self.gen_points) == (q * q + 1) * (q**3 + 1)
        assert self.gen_points.shape[1] == q + 1

    # ---- incidence tables (built on first use) ----

    @functools.cached_property
    def point_gen_inc(self):
        """(n_points, n_gens) bool, point on generator."""
        inc = np.zeros((len(self.points), len(self.gen_points)), dtype=bool)
        for gid, ids in enumerate(self.gen_points):
            inc[ids, gid] = True
        return inc

    @functools.cached_property
    def gen_meet(self):
        """(n_gens, n_gens) bool, generators sharing at least one point."""
        inc = self.point_gen_inc
        common = linalg.exact_int_matmul(inc.T.astype(np.int64), inc.astype(np.int64))
        return common > 0

    @functools.cached_property
    def hyp_gen_inc(self):
        """(n_poles, n_gens) bool, generator inside the pole's perp."""
        flat = self.gen_basis.reshape(-1, 6)
        m = self.poles @ self.G6 % self.q @ flat.T % self.q
        m = m.reshape(len(self.poles), -1, 2)
        return (m == 0).all(axis=2)

    @functools.cached_property
    def hyp_point_inc(self):
        """(n_poles, n_points) bool, singular point inside the hyperplane."""
        return self.poles @ self.G6 @ self.points.T % self.q == 0

    # ---- subspace operations (row spaces over GF(q)) ----

    def span(self, *bases):
        stacked = np.concatenate([np.atleast_2d(b) for b in bases])
        R, k = linalg.rref(stacked, self.q)
        return R[:k]

    def meet(self, A, B):
        na = linalg.nullspace(np.atleast_2d(A), self.q)
        nb = linalg.nullspace(np.atleast_2d(B), self.q)
        return linalg.nullspace(np.concatenate([na, nb]), self.q)

    def perp(self, basis):
        return linalg.nullspace(np.atleast_2d(basis) @ self.G6 % self.q, self.q)

    def dim(self, basis):
        return linalg.rank(np.atleast_2d(basis), self.q)

    # ---- id helpers ----

    def pt_id(self, vec6):
        v = np.asarray(vec6, dtype=np.int64) % self.q
        lead = int(np.argmax(v != 0))
        v = v * int(linalg._inv_table(self.q)[v[lead]]) % self.q
        return self.point_index[v.tobytes()]

    def pt_id_triple(self, xyz):
        return self.pt_id(triple_to_vec6(self.f, xyz))

    def gen_id(self, basis):
        R, k = linalg.rref(np.atleast_2d(basis), self.q)
        if k != 2:
            raise ValueError("not a line")
        return self.gen_index[R[:2].tobytes()]

    def gen_id_from_points(self, p1, p2):
        return self.gen_id(np.stack([self.points[p1], self.points[p2]]))

    def hyp_id(self, pole_vec6):
        v = np.asarray(pole_vec6, dtype=np.int64) % self.q
        lead = int(np.argmax(v != 0))
        v = v * int(linalg._inv_table(self.q)[v[lead]]) % self.q
        return self.pole_index[v.tobytes()]

    # ---- JSON cache ----

    def to_json_dict(self):
        return {
            "format": 1,
            "q": self.q,
            "xi": self.xi,
            "w": self.f.w,
            "points": self.points.tolist(),
            "poles": self.poles.tolist(),
            "gen_points": self.gen_points.tolist(),
            "gen_basis": self.gen_basis.tolist(),
        }

    def _load_arrays(self, d):
        if d["format"] != 1 or d["q"] != self.q or d["xi"] != self.xi or d["w"] != self.f.w:
            raise ValueError("cache header mismatch for q=%d" % self.q)
        self.points = np.array(d["points"], dtype=np.int64)
        self.poles = np.array(d["poles"], dtype=np.int64)
        self.gen_points = np.array(d["gen_points"], dtype=np.int64)
        self.gen_basis = np.array(d["gen_basis"], dtype=np.int64)


def save_cache(geom, path):
    with open(path, "w") as fh:
        json.dump(geom.to_json_dict(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_cache(path):
    with open(path) as fh:
        d = json.load(fh)
    return Geometry(d["q"], _from_cache=d)


@functools.lru_cache(maxsize=None)
def geometry(q):
    return Geometry(q)
