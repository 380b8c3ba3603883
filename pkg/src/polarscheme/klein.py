"""Correspondence between the Hermitian surface and the elliptic quadric.

Lines of PG(3,q^2) go to points of a hyperbolic quadric in PG(5,q^2) by the
Plucker map; after a diagonal change of coordinates the totally isotropic
lines of the surface land, up to scalars, on the GF(q)-rational points of
the elliptic quadric hosted in the conjugate-pair space

    V = {(x, x^q, y, y^q, z, z^q) : x, y, z in GF(q^2)},

read in the flat coordinates (x0, x1, y0, y1, z0, z1).  Surface points then
go to generators.  Generators are also handled in parametric form
L(F0, F1, F2) = {(F0(s), F1(s), F2(s))} with the F_i q-polynomials, and
4-dimensional subspaces in the dual form pi(H0, H1, H2) = {(x, y, z) :
H0(x) + H1(y) + H2(z) = 0}.
"""

import functools

import numpy as np

from . import linalg
from .gf import field
from .geometry import geometry, triple_to_vec6, vec6_to_triple
from .hermitian import hermitian

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def plucker(f, p, r):
    """Line coordinates (p01, p02, p03, p12, p13, p23) of the span of p, r."""
    return [int(f.sub(f.mul(p[i], r[j]), f.mul(p[j], r[i]))) for i, j in PAIRS]


def tau(f, w):
    """Diagonal rescaling taking the surface's line set onto V, using the
    smallest mu with N(mu) = -1."""
    c = f.neg(f.frob(f.mu))
    return [int(w[0]), int(f.mul(c, w[1])), int(w[2]),
            int(f.mul(c, w[3])), int(w[4]), int(f.mul(f.frob(f.mu), w[5]))]


def normalize_to_vhat(f, w):
    """Scale w into the conjugate-pair shape and return flat coordinates.

    Scans scalars in ascending index order; exactly the images of totally
    isotropic lines admit such a scaling, so anything else raises.
    """
    w = [int(x) for x in w]
    if not any(w):
        raise ValueError("zero vector")
    for lam in range(1, f.q2):
        v = [int(f.MUL[lam, x]) for x in w]
        if (v[1] == f.FROB[v[0]] and v[3] == f.FROB[v[2]]
                and v[5] == f.FROB[v[4]]):
            out = []
            for i in (0, 2, 4):
                out.extend(f.pair(v[i]))
            return np.array(out, dtype=np.int64)
    raise ValueError("no scalar multiple has the conjugate-pair shape")


def _rank_gf2(f, rows):
    """Rank of a small matrix over GF(q^2) given as element-index rows."""
    m = [[int(x) for x in r] for r in rows]
    rank = 0
    for col in range(len(m[0])):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = f.inv(m[rank][col])
        m[rank] = [int(f.mul(inv, x)) for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                c = m[r][col]
                m[r] = [int(f.sub(x, f.mul(c, y))) for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


class Klein:
    """Materialized correspondence for one q: line and point image tables."""

    def __init__(self, q):
        self.q = q
        self.f = field(q)
        self.geom = geometry(q)
        self.herm = hermitian(q)
        self._build_maps()

    def rho_line(self, p, r):
        """Quadric point id of the image of the t.i. line through p, r
        (coordinate 4-vectors over GF(q^2))."""
        flat = normalize_to_vhat(self.f, tau(self.f, plucker(self.f, p, r)))
        return self.geom.pt_id(flat)

    def _build_maps(self):
        h, g = self.herm, self.geom
        nl = len(h.lines)
        li = np.empty(nl, dtype=np.int64)
        for lid in range(nl):
            ids = h.lines[lid]
            li[lid] = self.rho_line(h.points[ids[0]], h.points[ids[1]])
        assert len(set(li.tolist())) == nl == len(g.points)
        self.line_image = li
        npts = len(h.points)
        pi = np.empty(npts, dtype=np.int64)
        for pid in range(npts):
            l1, l2 = h.point_lines[pid][:2]
            pi[pid] = g.gen_id_from_points(int(li[l1]), int(li[l2]))
        assert len(set(pi.tolist())) == npts == len(g.gen_points)
        self.point_image = pi
        inv_l = np.empty(nl, dtype=np.int64)
        inv_l[li] = np.arange(nl)
        inv_p = np.empty(npts, dtype=np.int64)
        inv_p[pi] = np.arange(npts)
        self.quadpt_to_hline = inv_l
        self.gen_to_hpoint = inv_p

    def verify_incidence(self):
        """Every surface flag (P, l) maps to a quadric flag; flag counts on
        both sides agree, so this pins the full incidence isomorphism."""
        h, g = self.herm, self.geom
        for j in range(h.lines.shape[1]):
            rows = g.gen_points[self.point_image[h.lines[:, j]]]
            if not (rows == self.line_image[:, None]).any(axis=1).all():
                return False
        return True

    # ---- parametric form of generators ----

    def line_triple(self, gid):
        """Canonical (F0, F1, F2) with the reduced basis rows of the
        generator as parameter values at 1 and theta."""
        f = self.f
        r1, r2 = self.geom.gen_basis[gid]
        v1 = vec6_to_triple(f, r1)
        vt = vec6_to_triple(f, r2)
        return tuple(f.interpolate(v1[i], vt[i]) for i in range(3))

    def gen_of_triple(self, fs):
        f = self.f
        row1 = triple_to_vec6(f, tuple(f.qp_eval(F, f.one) for F in fs))
        rowt = triple_to_vec6(f, tuple(f.qp_eval(F, f.theta) for F in fs))
        return self.geom.gen_id(np.stack([row1, rowt]))

    # ---- perspective oracles ----

    def perspective_classify(self, gl, gm, gn):
        """Geometric route for a pairwise disjoint triple of generators."""
        g, q = self.geom, self.q
        bl, bm, bn = (g.gen_basis[i] for i in (gl, gm, gn))
        for a, b in ((bl, bm), (bl, bn), (bm, bn)):
            if linalg.rank(np.concatenate([a, b]), q) < 4:
                raise ValueError("generators must be pairwise disjoint")
        if linalg.rank(np.concatenate([bl, bm, bn]), q) < 6:
            return "NotSpanning"
        s1 = g.span(g.perp(np.concatenate([bm, bn])), bl)
        s2 = g.span(g.perp(np.concatenate([bl, bn])), bm)
        s3 = g.span(g.perp(np.concatenate([bl, bm])), bn)
        stack = np.concatenate([linalg.nullspace(s, q) for s in (s1, s2, s3)])
        d = 6 - linalg.rank(stack, q)
        assert d in (0, 1, 2)
        return ("Neither", "Semi", "Perspective")[d]

    def perspective_fast(self, gl, gm, gn):
        """Same question answered back on the surface via the z-invariant."""
        h = self.herm
        i, j, k = (int(self.gen_to_hpoint[x]) for x in (gl, gm, gn))
        if (len({i, j, k}) < 3 or h.collinear[i, j] or h.collinear[j, k]
                or h.collinear[k, i]):
            return "Concurrent"
        if _rank_gf2(h.f, [h.points[i], h.points[j], h.points[k]]) < 3:
            return "NotSpanning"
        tag = h.ztag(i, j, k)
        return {"t": "NotSpanning", "e": "Perspective",
                "gamma": "SpanningNotPerspective"}[tag]


def perspective_standard(f, fs):
    """Criterion for the triple (L(I,0,0), L(0,0,I), L(F0,F1,F2)): the three
    are perspective exactly when f0^q f2 + g0 g2^q lies in the subfield."""
    comp = f.compose(f.adjoint(fs[2]), f.compose(f.K, fs[0]))
    return f.in_subfield(comp[1])


# ---- parametric subspace algebra ----

def totally_singular(f, fs):
    """Whether L(F0,F1,F2) lies on the quadric."""
    t = f.compose(f.adjoint(fs[2]), f.compose(f.K, fs[0]))
    t = f.qp_add(t, f.qp_neg(f.compose(f.adjoint(fs[1]), f.compose(f.K, fs[1]))))
    t = f.qp_add(t, f.compose(f.adjoint(fs[0]), f.compose(f.K, fs[2])))
    return t == (0, 0)


def solid_matrix(f, hs):
    """2x6 matrix over GF(q) of (x,y,z) -> H0(x)+H1(y)+H2(z)."""
    basis = ((f.one, 0, 0), (f.theta, 0, 0), (0, f.one, 0),
             (0, f.theta, 0), (0, 0, f.one), (0, 0, f.theta))
    cols = []
    for x, y, z in basis:
        s = f.add(f.add(f.qp_eval(hs[0], x), f.qp_eval(hs[1], y)),
                  f.qp_eval(hs[2], z))
        cols.append(f.pair(int(s)))
    return np.array(cols, dtype=np.int64).T % f.q


def solid_basis(geom, hs):
    m = solid_matrix(geom.f, hs)
    if linalg.rank(m, geom.q) != 2:
        raise ValueError("the three maps do not cut out a solid")
    return linalg.nullspace(m, geom.q)


def solid_contains(f, hs, fs):
    """Containment of L(F0,F1,F2) in pi(H0,H1,H2), by composition."""
    acc = (0, 0)
    for h_, f_ in zip(hs, fs):
        acc = f.qp_add(acc, f.compose(h_, f_))
    return acc == (0, 0)


def line_perp_solid(f, fs):
    """The polar solid of L(F0,F1,F2) in dual form."""
    return (f.compose(f.adjoint(fs[2]), f.K),
            f.qp_neg(f.compose(f.adjoint(fs[1]), f.K)),
            f.compose(f.adjoint(fs[0]), f.K))


@functools.lru_cache(maxsize=None)
def klein(q):
    return Klein(q)
