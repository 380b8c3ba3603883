"""The Hermitian surface H(3,q^2) as a generalized quadrangle of order (q^2, q).

Points are projective 4-vectors over GF(q^2), isotropic for

    h(x, y) = x0 y3^q - x1 y1^q - x2 y2^q + x3 y0^q.

Lines here are the totally isotropic lines (q^2+1 points each, q+1 through
every point).  For a triple of pairwise non-collinear points the product
h(p,q) h(q,r) h(r,p) is well defined modulo GF(q)*; its coset in
GF(q^2)*/GF(q)* = Z_{q+1} is the z-invariant.  Label 0 is the subfield
coset e, label (q+1)/2 is the coset of theta (written t), anything else
falls in the gamma range.
"""

import functools
import json

import numpy as np

from .gf import field, find_nonsquare


def herm(f, x, y):
    m, fr, a = f.mul, f.frob, f.add
    v = a(m(x[0], fr(y[3])), f.neg(m(x[1], fr(y[1]))))
    v = a(v, f.neg(m(x[2], fr(y[2]))))
    return int(a(v, m(x[3], fr(y[0]))))


def _herm_arrays(f, X, Y):
    """h for (..., 4) element-index arrays, broadcasting like numpy does."""
    M, FR = f.MUL, f.FROB
    t = M[X[..., 0], FR[Y[..., 3]]]
    t = f.ADD[t, f.NEG[M[X[..., 1], FR[Y[..., 1]]]]]
    t = f.ADD[t, f.NEG[M[X[..., 2], FR[Y[..., 2]]]]]
    return f.ADD[t, M[X[..., 3], FR[Y[..., 0]]]]


class Hermitian:
    """Materialized H(3,q^2): points, t.i. lines, incidence, z-invariant."""

    def __init__(self, q):
        self.f = field(q)
        self.q = q
        self._build_points()
        self._build_lines()

    def _build_points(self):
        f = self.f
        q2 = f.q2
        blocks = []
        # leading coordinate normalized to 1, scanned so the result is in
        # ascending lex order on the element indices
        for lead in range(3, -1, -1):
            free = 3 - lead
            if free:
                tail = np.indices((q2,) * free).reshape(free, -1).T
            else:
                tail = np.zeros((1, 0), dtype=np.int64)
            block = np.zeros((tail.shape[0], 4), dtype=np.int64)
            block[:, lead] = f.one
            if free:
                block[:, lead + 1:] = tail
            blocks.append(block)
        reps = np.concatenate(blocks)
        hv = _herm_arrays(f, reps, reps)
        self.points = reps[hv == 0]
        n = len(self.points)
        assert n == (self.q**2 + 1) * (self.q**3 + 1)
        self.point_index = {p.tobytes(): i for i, p in enumerate(self.points)}

    def _build_lines(self):
        f, q = self.f, self.q
        n = len(self.points)
        C = self.collinear
        lines = []
        for u in range(n):
            rest = set(int(x) for x in np.nonzero(C[u])[0] if x != u)
            while rest:
                ids = self._line_ids(u, min(rest))
                rest.difference_update(ids)
                if ids[0] == u:
                    lines.append(ids)
        lines.sort()
        self.lines = np.array(lines, dtype=np.int64)
        assert len(self.lines) == (q + 1) * (q**3 + 1)
        pl = [[] for _ in range(n)]
        for lid, ids in enumerate(self.lines):
            for i in ids:
                pl[int(i)].append(lid)
        assert all(len(x) == q + 1 for x in pl)
        self.point_lines = np.array(pl, dtype=np.int64)
        self.line_index = {l.tobytes(): i for i, l in enumerate(self.lines)}

    def _line_ids(self, u, v):
        """Sorted point ids of the t.i. line through two collinear points."""
        f = self.f
        pu, pv = self.points[u], self.points[v]
        cs = np.arange(1, f.q2)
        pts = f.ADD[pu[None, :], f.MUL[cs[:, None], pv[None, :]]]
        lead = np.argmax(pts != 0, axis=1)
        scale = f.INV[pts[np.arange(len(pts)), lead]]
        pts = f.MUL[scale[:, None], pts]
        ids = [u, v] + [self.point_index[row.tobytes()] for row in pts]
        return sorted(ids)

    @functools.cached_property
    def collinear(self):
        """(n, n) bool matrix of h(x, y) = 0; diagonal is True."""
        f = self.f
        n = len(self.points)
        out = np.zeros((n, n), dtype=bool)
        step = max(1, 10**7 // max(n, 1))
        for s in range(0, n, step):
            blk = self.points[s:s + step][:, None, :]
            out[s:s + step] = _herm_arrays(f, blk, self.points[None, :, :]) == 0
        return out

    def pt_id(self, coords):
        f = self.f
        v = np.asarray(coords, dtype=np.int64)
        lead = int(np.argmax(v != 0))
        v = f.MUL[f.INV[v[lead]], v]
        return self.point_index[v.tobytes()]

    def line_id(self, ids):
        key = np.array(sorted(int(i) for i in ids), dtype=np.int64).tobytes()
        return self.line_index[key]

    def line_through(self, u, v):
        return self.line_id(self._line_ids(int(u), int(v)))

    def herm_pt(self, i, j):
        return herm(self.f, self.points[i], self.points[j])

    # ---- z-invariant ----

    def zclass(self, i, j, k):
        """Coset label in Z_{q+1} of h(p,q) h(q,r) h(r,p)."""
        f = self.f
        a = self.herm_pt(i, j)
        b = self.herm_pt(j, k)
        c = self.herm_pt(k, i)
        if 0 in (a, b, c):
            raise ValueError("z-invariant needs a pairwise non-collinear triple")
        return int(f.coset_label(f.mul(f.mul(a, b), c)))

    def ztag(self, i, j, k):
        """'e', 't' or 'gamma'; 'zero' when some pair is collinear."""
        try:
            label = self.zclass(i, j, k)
        except ValueError:
            return "zero"
        if label == 0:
            return "e"
        if label == (self.q + 1) // 2:
            return "t"
        return "gamma"

    def degenerate_span_test(self, i, j, k):
        """True when the plane of a non-collinear triple cuts the surface in
        a degenerate curve, i.e. the 3x3 Gram matrix of the triple drops rank."""
        f = self.f
        ids = (i, j, k)
        m = [[self.herm_pt(a, b) for b in ids] for a in ids]
        rank = 0
        for col in range(3):
            piv = next((r for r in range(rank, 3) if m[r][col] != 0), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            inv = f.inv(m[rank][col])
            m[rank] = [int(f.mul(inv, x)) for x in m[rank]]
            for r in range(3):
                if r != rank and m[r][col] != 0:
                    c = m[r][col]
                    m[r] = [int(f.sub(x, f.mul(c, y))) for x, y in zip(m[r], m[rank])]
            rank += 1
        return rank < 3

    # ---- special sets ----

    def build_special_set(self):
        """q^2+1 pairwise non-collinear points whose triples all have tag e.

        Takes the surface points of the form (x0, x1, delta x2, x3) with the
        x_i in the subfield, where N(delta) = nu and nu is 1 when q = 3 mod 4
        and the smallest non-square otherwise.  On these the isotropy
        condition collapses to 2 x0 x3 = x1^2 + nu x2^2, an elliptic quadric
        over GF(q), so exactly q^2+1 points survive.
        """
        f, q = self.f, self.q
        nu = 1 if q % 4 == 3 else find_nonsquare(q)
        delta = next(x for x in range(1, f.q2) if f.norm(x) == nu)
        ids = set()
        for x0 in range(q):
            for x1 in range(q):
                for x2 in range(q):
                    for x3 in range(q):
                        if (x0, x1, x2, x3) == (0, 0, 0, 0):
                            continue
                        if (2 * x0 * x3 - x1 * x1 - nu * x2 * x2) % q:
                            continue
                        coords = (f.embed(x0), f.embed(x1),
                                  f.mul(delta, f.embed(x2)), f.embed(x3))
                        ids.add(self.pt_id(coords))
        out = sorted(ids)
        assert len(out) == q * q + 1
        return out

    def validate_special_set(self, ids):
        """Check the defining properties; returns a report dict."""
        ids = [int(i) for i in ids]
        ok_size = len(ids) == self.q**2 + 1
        C = self.collinear
        sel = np.zeros(len(self.points), dtype=bool)
        sel[ids] = True
        pairwise_ok = not C[np.ix_(ids, ids)][~np.eye(len(ids), dtype=bool)].any()
        counts = C[:, ids].sum(axis=1)
        out_counts = counts[~sel]
        n_zero = int((out_counts == 0).sum())
        n_two = int((out_counts == 2).sum())
        n_bad = int(len(out_counts) - n_zero - n_two)
        tags = {self.ztag(a, b, c)
                for ai, a in enumerate(ids)
                for bi, b in enumerate(ids[ai + 1:], ai + 1)
                for c in ids[bi + 1:]}
        return {
            "size_ok": ok_size,
            "pairwise_noncollinear": bool(pairwise_ok),
            "outside_orthogonal_0": n_zero,
            "outside_orthogonal_2": n_two,
            "outside_orthogonal_other": n_bad,
            "triple_tags": sorted(tags),
            "cp_type": tags == {"e"},
            "valid": bool(ok_size and pairwise_ok and n_bad == 0 and tags == {"e"}),
        }

    def special_set_to_json(self, ids):
        f = self.f
        return [[list(f.pair(int(c))) for c in self.points[i]] for i in ids]

    def special_set_from_json(self, data):
        f = self.f
        return [self.pt_id(tuple(f.elem(a0, a1) for a0, a1 in pt)) for pt in data]


def save_special_set(h, ids, path):
    with open(path, "w") as fh:
        json.dump({"q": h.q, "points": h.special_set_to_json(ids)}, fh,
                  sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_special_set(h, path):
    with open(path) as fh:
        d = json.load(fh)
    if d["q"] != h.q:
        raise ValueError("special set file is for q=%d" % d["q"])
    return h.special_set_from_json(d["points"])


@functools.lru_cache(maxsize=None)
def hermitian(q):
    return Hermitian(q)
