"""Pair sets of generators attached to a flag of the quadric.

Fix a generator l and a singular point B on it.  Every nonsingular
hyperplane through B that misses l cuts a parabolic section in which
the quadric lines through B form a cone of q+1 generators.  The line
joining l to the pole of the section meets the section in an axis
through B, and pairing each cone generator with the second singular
line of its plane with the axis gives a fixed point free involution.
A matched pair (p1, p2) produces a set U = O1 u O2 of 2q^2 generators
disjoint from l, where Oi collects the section's generators meeting
pi.  The signed vector chi_O1 - chi_O2 has dual degree {1, 5} in the
five class scheme on the q^5 generators disjoint from l.

For the standard flag (l the line of subfield multiples of (1, 0, 0),
B spanned by (1, 0, 0)) everything has a closed form in a parameter
pair (alpha, beta): the pole is (alpha, beta, theta), the cone
generators come from the roots y of

    N(y) - Tr(beta^q y) + theta (alpha^q - alpha) = 0

and the involution sends the root y to 2 beta - y.
"""

import json

import numpy as np

from . import linalg
from .geometry import triple_to_vec6
from .klein import klein
from .scheme import scaled_q_int

PART_LABELS = ("O1", "O2", "V", "J1", "J2", "W", "Z")


class USet:
    """One matched pair set, stored as generator ids."""

    def __init__(self, q, flag_point, hyp, p1, p2, O1, O2):
        self.q = q
        self.flag_point = int(flag_point)
        self.hyp = int(hyp)
        self.p1 = int(p1)
        self.p2 = int(p2)
        self.O1 = np.asarray(O1, dtype=np.int64)
        self.O2 = np.asarray(O2, dtype=np.int64)

    def members(self):
        return np.concatenate([self.O1, self.O2])

    def signed_key(self):
        return (tuple(self.O1.tolist()), tuple(self.O2.tolist()))

    def key(self):
        return frozenset(self.signed_key())

    def swapped(self):
        return USet(self.q, self.flag_point, self.hyp,
                    self.p2, self.p1, self.O2, self.O1)

    def to_json_dict(self):
        return {
            "q": self.q,
            "flag_point": self.flag_point,
            "hyp": self.hyp,
            "p1": self.p1,
            "p2": self.p2,
            "O1": self.O1.tolist(),
            "O2": self.O2.tolist(),
        }


def uset_from_json_dict(d):
    return USet(d["q"], d["flag_point"], d["hyp"], d["p1"], d["p2"],
                d["O1"], d["O2"])


def save_usets(path, usets):
    with open(path, "w") as fh:
        json.dump([u.to_json_dict() for u in usets], fh, sort_keys=True)


def load_usets(path, q=None):
    with open(path) as fh:
        data = json.load(fh)
    out = [uset_from_json_dict(d) for d in data]
    if q is not None and any(u.q != q for u in out):
        raise ValueError("stored pair sets belong to a different field")
    return out


class USets:
    """Builder for all pair sets hanging off one fixed generator."""

    def __init__(self, q, base_gid=None, kl=None):
        self.kl = kl if kl is not None else klein(q)
        self.q = q
        self.f = self.kl.f
        g = self.kl.geom
        if base_gid is None:
            f = self.f
            base_gid = self.kl.gen_of_triple(((f.one, 0), (0, 0), (0, 0)))
        self.l = int(base_gid)
        self.vertex_gids = np.nonzero(~g.gen_meet[self.l])[0]
        self.vid_of_gid = np.full(len(g.gen_basis), -1, dtype=np.int64)
        self.vid_of_gid[self.vertex_gids] = np.arange(len(self.vertex_gids))
        self.flag_points = [int(p) for p in g.gen_points[self.l]]

    def poles_for_flag(self, B):
        """Hyperplane ids through the flag point that miss the line."""
        g = self.kl.geom
        return np.nonzero(g.hyp_point_inc[:, B] & ~g.hyp_gen_inc[:, self.l])[0]

    def section_basis(self, hyp):
        g = self.kl.geom
        return linalg.nullspace(g.poles[hyp:hyp + 1] @ g.G6 % self.q, self.q)

    def cone_gens(self, B, hyp):
        """The q+1 generators through B inside the section."""
        g = self.kl.geom
        ids = np.nonzero(g.point_gen_inc[B] & g.hyp_gen_inc[hyp])[0]
        assert len(ids) == self.q + 1
        return ids

    def axis(self, B, hyp):
        """Basis of <l, pole> cut down to the section, a line through B."""
        g = self.kl.geom
        sp = g.span(g.gen_basis[self.l], g.poles[hyp])
        sig = g.meet(sp, self.section_basis(hyp))
        assert len(sig) == 2
        return sig

    def pairing(self, B, hyp):
        """Match each cone generator with the other singular line of
        its plane with the axis.  Returns (q+1)/2 sorted pairs."""
        g = self.kl.geom
        cone = [int(c) for c in self.cone_gens(B, hyp)]
        sig = self.axis(B, hyp)
        partner = {}
        for gid in cone:
            W = g.span(g.gen_basis[gid], sig)
            assert len(W) == 3
            hits = [h for h in cone if h != gid and linalg.rank(
                np.concatenate([W, g.gen_basis[h]]), self.q) == 3]
            assert len(hits) == 1
            partner[gid] = hits[0]
        assert all(partner[partner[c]] == c and partner[c] != c
                   for c in cone)
        return sorted({(min(c, partner[c]), max(c, partner[c]))
                       for c in cone})

    def build_pair_usets(self, B, hyp):
        """The pair sets of one flag point and one section."""
        g, q = self.kl.geom, self.q
        in_sec = g.hyp_gen_inc[hyp]
        free = ~g.gen_meet[self.l]
        out = []
        for p1, p2 in self.pairing(B, hyp):
            O1 = np.nonzero(in_sec & free & g.gen_meet[p1])[0]
            O2 = np.nonzero(in_sec & free & g.gen_meet[p2])[0]
            assert len(O1) == q * q and len(O2) == q * q
            assert not np.intersect1d(O1, O2).size
            out.append(USet(q, B, hyp, p1, p2, O1, O2))
        return out

    def enumerate_flag(self, B):
        out = []
        for hyp in self.poles_for_flag(B):
            out.extend(self.build_pair_usets(B, int(hyp)))
        return out

    def enumerate_all(self):
        out = []
        for B in self.flag_points:
            out.extend(self.enumerate_flag(B))
        return out

    def classify_partition(self, us):
        """Label every generator disjoint from l by its position
        relative to the section and the matched pair.

        0..6 index PART_LABELS: inside the section meeting p1 or p2
        or neither, then outside the section with trace point on p1,
        on p2, orthogonal to the flag point, or generic."""
        g, q = self.kl.geom, self.q
        verts = self.vertex_gids
        lab = np.empty(len(verts), dtype=np.int8)
        in_sec = g.hyp_gen_inc[us.hyp][verts]
        m1 = g.gen_meet[us.p1][verts]
        m2 = g.gen_meet[us.p2][verts]
        assert not (in_sec & m1 & m2).any()
        lab[in_sec] = 2
        lab[in_sec & m1] = 0
        lab[in_sec & m2] = 1
        outside = np.nonzero(~in_sec)[0]
        bases = g.gen_basis[verts[outside]]
        w = g.poles[us.hyp] @ g.G6 % q
        c = bases @ w % q
        # trace point of each outside generator on the section
        R = (c[:, 1:2] * bases[:, 0] - c[:, 0:1] * bases[:, 1]) % q
        lead = (R != 0).argmax(axis=1)
        inv = linalg._inv_table(q)
        R = R * inv[R[np.arange(len(R)), lead]][:, None] % q
        pts = np.array([g.point_index[row.tobytes()] for row in R],
                       dtype=np.int64)
        j1 = g.point_gen_inc[pts, us.p1]
        j2 = g.point_gen_inc[pts, us.p2]
        assert not (j1 & j2).any()
        wb = g.G6 @ g.points[us.flag_point] % q
        orth = g.points[pts] @ wb % q == 0
        sub = np.full(len(pts), 6, dtype=np.int8)
        sub[orth] = 5
        sub[j2] = 4
        sub[j1] = 3
        lab[outside] = sub
        return lab


# ---- closed forms for the standard flag ----

def std_flag(uss):
    """(flag point id, line gid) with B spanned by (1, 0, 0)."""
    f = uss.f
    return uss.kl.geom.pt_id_triple((f.one, 0, 0)), uss.l


def std_pole(f, alpha, beta):
    """Coordinate vector of the pole (alpha, beta, theta)."""
    return triple_to_vec6(f, (alpha, beta, f.theta))


def pole_discriminant(f, alpha, beta):
    """N(beta) - theta (alpha^q - alpha), nonzero iff nondegenerate."""
    d = f.mul(f.theta, f.sub(f.frob(alpha), alpha))
    assert f.in_subfield(d)
    return (int(f.NORM[beta]) - d // f.q) % f.q


def cone_roots(f, alpha, beta):
    """All y with N(y) - Tr(beta^q y) + theta (alpha^q - alpha) = 0."""
    d = f.mul(f.theta, f.sub(f.frob(alpha), alpha)) // f.q
    bq = f.frob(beta)
    return [y for y in range(f.q2)
            if (int(f.NORM[y]) - int(f.TRACE[f.mul(bq, y)]) + d) % f.q == 0]


def paired_root(f, beta, y):
    """The involution on roots, y to 2 beta - y."""
    return f.sub(f.mul(f.embed(2), beta), y)


def cone_triple(f, y):
    """Parametric triple of the cone generator attached to a root y."""
    txi = f.embed(2 * f.xi % f.q)
    n = f.embed(int(f.NORM[y]))
    ty = f.mul(f.embed(2), f.mul(f.theta, y))
    return ((f.sub(txi, n), f.add(txi, n)),
            (ty, f.neg(ty)),
            (txi, f.neg(txi)))


def axis_triple(f, alpha, beta):
    """Parametric triple of the pairing axis for the standard flag.

    The relative sign of the y and z parts matters: with t = Tr(x)
    the swept points are (F0(x), -t beta, -t theta), which lie on the
    span of the flag point and the marked axis point."""
    t = f.mul(f.inv(f.theta), f.embed(2 * int(f.NORM[beta]) % f.q))
    a0 = f.add(t, f.sub(alpha, f.mul(f.embed(2), f.frob(alpha))))
    nt = f.neg(f.theta)
    return ((a0, f.neg(alpha)),
            (f.neg(beta), f.neg(beta)),
            (nt, nt))


def axis_trace_point(f, alpha, beta):
    """Where the perp of the pole meets the axis, off the flag point."""
    x = f.sub(f.frob(alpha), f.mul(f.inv(f.theta), f.embed(int(f.NORM[beta]))))
    return (x, beta, f.theta)


def cone_point(f, y):
    """A point of the root-y cone generator away from the flag point."""
    txi = f.embed(2 * f.xi % f.q)
    return (f.neg(f.mul(f.theta, f.embed(int(f.NORM[y])))),
            f.mul(txi, y),
            f.mul(txi, f.theta))


def triple_rows(f, fs):
    """2 x 6 basis of the subspace a parametric triple sweeps out."""
    rows = [triple_to_vec6(f, tuple(f.qp_eval(F, s) for F in fs))
            for s in (f.one, f.theta)]
    return np.array(rows, dtype=np.int64)


# ---- vector identities in the line scheme ----

def partition_matrix(uss, usets):
    return np.stack([uss.classify_partition(u) for u in usets])


def signed_matrix(uss, usets):
    """Rows chi_O1 - chi_O2 for both orderings of every pair set."""
    rows = np.zeros((2 * len(usets), len(uss.vertex_gids)), dtype=np.int64)
    for k, u in enumerate(usets):
        rows[2 * k, uss.vid_of_gid[u.O1]] = 1
        rows[2 * k, uss.vid_of_gid[u.O2]] = -1
        rows[2 * k + 1] = -rows[2 * k]
    return rows


def verify_identities(ls, labels):
    """Adjacency images of chi_O1, chi_O2 and their difference, for
    every labelling row at once.  Returns a dict of named booleans."""
    q = ls.q
    labels = np.atleast_2d(labels)
    chi = [(labels == k).astype(np.int64) for k in range(7)]
    jv = np.ones_like(chi[0])
    prod = {}
    for side in (1, 2):
        for i in range(1, 6):
            prod[side, i] = linalg.exact_int_matmul(chi[side - 1],
                                                    ls.adjacency(i))
    out = {"partition_complete": bool((sum(chi) == jv).all())}
    for side in (1, 2):
        O, Oo = chi[side - 1], chi[2 - side]
        J, Jo = chi[2 + side], chi[5 - side]
        V, W, Z = chi[2], chi[5], chi[6]
        t = f"o{side}_a"
        out[t + "1"] = bool((prod[side, 1] == jv + (q - 2) * O
                             + (q - 1) * (Oo + V + J) - (Jo + W)).all())
        out[t + "2"] = bool((prod[side, 2] == J).all())
        out[t + "3"] = bool((prod[side, 3] == jv + (q * q - q - 1) * O
                             - (Oo + V) + (q * q - q - 2) * J
                             + (q - 1) * (Jo + W) + (q - 2) * Z).all())
        out[t + "4"] = bool((prod[side, 4] == (q * q - 1) * (jv - O - Oo - J)
                             - (q - 1) * (Jo + V + 2 * Z)
                             - (2 * q - 1) * W).all())
        out[t + "5"] = bool((prod[side, 5] == (q * q - q) * Oo
                             + q * W + (q - 1) * Z).all())
    v = chi[0] - chi[1]
    d = chi[3] - chi[4]
    dif = {i: prod[1, i] - prod[2, i] for i in range(1, 6)}
    out["diff_a1"] = bool((dif[1] == -v + q * d).all())
    out["diff_a2"] = bool((dif[2] == d).all())
    out["diff_a3"] = bool((dif[3] == q * (q - 1) * v
                           + (q * q - 2 * q - 1) * d).all())
    out["diff_a4"] = bool((dif[4] == -(q * q - q) * d).all())
    out["diff_a5"] = bool((dif[5] == -(q * q - q) * v).all())
    return out


def verify_dual_degree(ls, labels):
    """Signed vectors land in the first and fifth eigenspaces only."""
    q = ls.q
    labels = np.atleast_2d(labels)
    chi = [(labels == k).astype(np.int64) for k in range(7)]
    v = chi[0] - chi[1]
    d = chi[3] - chi[4]
    Q2 = scaled_q_int(q)
    parts = [linalg.exact_int_matmul(v, ls.adjacency(c)) for c in range(6)]
    imgs = [sum(int(Q2[c, i]) * parts[c] for c in range(6)) for i in range(6)]
    s = 2 * (q + 1)
    # the two nonzero images add up to s q^5 v, as they must
    return {
        "e1_image": bool((imgs[1] == s * q**4 * (v + d)).all()),
        "e5_image": bool((imgs[5] == s * q**4 * ((q - 1) * v - d)).all()),
        "e234_zero": bool(all(not imgs[i].any() for i in (2, 3, 4))),
        "e1_nonzero": bool((imgs[1] != 0).any(axis=1).all()),
        "e5_nonzero": bool((imgs[5] != 0).any(axis=1).all()),
    }


def verify_gram(ls, signed):
    """The Gram matrix of the stacked signed vectors, three ways."""
    q = ls.q
    M = linalg.exact_int_matmul(signed.T, signed)
    n = len(M)
    eye = np.eye(n, dtype=np.int64)
    comb = 2 * ((q - 1) * (q + 1)**2 * eye - ls.adjacency(1)
                + q * ls.adjacency(3) - (q + 1) * ls.adjacency(5))
    Q2 = scaled_q_int(q)
    Et1 = Q2[:, 1][ls.rel].astype(np.int64)
    Et5 = Q2[:, 5][ls.rel].astype(np.int64)
    spectral = q**2 * (q**2 * Et1 + 2 * (q + 1) * Et5)
    class_vals = {k: sorted(set(M[ls.rel == k].tolist())) for k in range(6)}
    return {
        "gram_matches_classes": bool((M == comb).all()),
        "gram_matches_spectral": bool(((q + 1) * q**5 * M == spectral).all()),
        "class_values": class_vals,
    }


def rank_chain(ls, signed, p=1009):
    """Rank of the signed stack.  The Gram identity pins the row space
    inside the sum of two eigenspaces, so the rational rank equals the
    modular rank as soon as the latter reaches the eigenspace bound."""
    from .scheme import multiplicities
    m = multiplicities(ls.q)
    bound = m[1] + m[5]
    M = linalg.exact_int_matmul(signed.T, signed)
    return {
        "bound": bound,
        "rank_signed_mod_p": int(linalg.rank(signed % p, p)),
        "rank_gram_mod_p": int(linalg.rank(M % p, p)),
    }


def membership_counts(uss, usets):
    cnt = np.zeros(len(uss.vertex_gids), dtype=np.int64)
    for u in usets:
        cnt[uss.vid_of_gid[u.O1]] += 1
        cnt[uss.vid_of_gid[u.O2]] += 1
    return cnt


def distinct_counts(uss, usets):
    """Distinct pair sets per flag point, overall, and signed."""
    per_flag = {}
    for u in usets:
        per_flag.setdefault(u.flag_point, set()).add(u.key())
    signed = {k for u in usets for k in (u.signed_key(),
                                         u.swapped().signed_key())}
    return {
        "per_flag": {b: len(s) for b, s in sorted(per_flag.items())},
        "unsigned": len({u.key() for u in usets}),
        "signed": len(signed),
    }
