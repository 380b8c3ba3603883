import json

import numpy as np
import pytest

from polarscheme import linalg
from polarscheme import usets as U
from polarscheme.geometry import qhat, triple_to_vec6
from polarscheme.klein import klein
from polarscheme.scheme import LineScheme


@pytest.fixture(scope="module")
def kl3():
    return klein(3)


@pytest.fixture(scope="module")
def uss3(kl3):
    return U.USets(3, kl=kl3)


@pytest.fixture(scope="module")
def ls3(kl3):
    return LineScheme(3, kl=kl3)


@pytest.fixture(scope="module")
def all3(uss3):
    return uss3.enumerate_all()


@pytest.fixture(scope="module")
def labels3(uss3, all3):
    return U.partition_matrix(uss3, all3)


def pole_table(uss):
    """hyp id -> (alpha, beta) over the standard flag point."""
    f, g = uss.f, uss.kl.geom
    out = {}
    for alpha in range(f.q2):
        for beta in range(f.q2):
            if U.pole_discriminant(f, alpha, beta):
                out[g.hyp_id(U.std_pole(f, alpha, beta))] = (alpha, beta)
    return out


def test_flag_and_pole_counts(uss3):
    q = uss3.q
    assert len(uss3.flag_points) == q + 1
    for B in uss3.flag_points:
        assert len(uss3.poles_for_flag(B)) == q**3 * (q - 1)


@pytest.mark.parametrize("q", [3, 5])
def test_pole_parametrization(q):
    uss = U.USets(q)
    f, g = uss.f, uss.kl.geom
    B0, _ = U.std_flag(uss)
    tab = {}
    for alpha in range(f.q2):
        for beta in range(f.q2):
            disc = U.pole_discriminant(f, alpha, beta)
            # the discriminant vanishes exactly on singular poles
            assert (disc == 0) == (qhat(f, (alpha, beta, f.theta)) == 0)
            if disc:
                tab[g.hyp_id(U.std_pole(f, alpha, beta))] = (alpha, beta)
    assert len(tab) == q**3 * (q - 1)
    assert set(tab) == set(int(h) for h in uss.poles_for_flag(B0))


@pytest.mark.parametrize("q", [3, 5])
def test_closed_forms_match_geometry(q):
    uss = U.USets(q)
    kl, f, g = uss.kl, uss.f, uss.kl.geom
    B0, _ = U.std_flag(uss)
    tab = pole_table(uss)
    hyps = sorted(tab)
    rng = np.random.default_rng(7)
    for hyp in [hyps[i] for i in rng.choice(len(hyps), 6, replace=False)]:
        alpha, beta = tab[hyp]
        roots = U.cone_roots(f, alpha, beta)
        assert len(roots) == q + 1
        gids = {y: kl.gen_of_triple(U.cone_triple(f, y)) for y in roots}
        assert set(gids.values()) == set(
            int(c) for c in uss.cone_gens(B0, hyp))
        pairs = {(min(a, b), max(a, b)) for y in roots
                 for a, b in [(gids[y], gids[U.paired_root(f, beta, y)])]}
        assert pairs == set(uss.pairing(B0, hyp))
        ax = uss.axis(B0, hyp)
        rows = U.triple_rows(f, U.axis_triple(f, alpha, beta))
        assert linalg.row_space_key(ax, q) == linalg.row_space_key(rows, q)
        tp = triple_to_vec6(f, U.axis_trace_point(f, alpha, beta))
        assert linalg.rank(np.concatenate([ax, tp[None]]), q) == 2
        y0 = roots[0]
        cp = g.pt_id_triple(U.cone_point(f, y0))
        assert g.point_gen_inc[cp, gids[y0]]


@pytest.mark.parametrize("q", [3, 5])
def test_pencil_shares_cone_and_pairing(q):
    uss = U.USets(q)
    f, g = uss.f, uss.kl.geom
    B0, _ = U.std_flag(uss)
    tab = pole_table(uss)
    hyp0 = sorted(tab)[1]
    alpha, beta = tab[hyp0]
    cone = set(int(c) for c in uss.cone_gens(B0, hyp0))
    pairs = set(uss.pairing(B0, hyp0))
    bperp = linalg.nullspace(g.points[B0][None] @ g.G6 % q, q)
    meet_key = linalg.row_space_key(
        g.meet(bperp, uss.section_basis(hyp0)), q)
    for lam in range(1, q):
        h2 = g.hyp_id(U.std_pole(f, f.add(alpha, f.embed(lam)), beta))
        assert h2 != hyp0
        assert set(int(c) for c in uss.cone_gens(B0, h2)) == cone
        assert set(uss.pairing(B0, h2)) == pairs
        assert linalg.row_space_key(
            g.meet(bperp, uss.section_basis(h2)), q) == meet_key


def test_uset_structure(uss3, all3):
    q = uss3.q
    g = uss3.kl.geom
    free = ~g.gen_meet[uss3.l]
    assert len(all3) == (q + 1) * q**3 * (q - 1) * (q + 1) // 2
    for u in all3[::37]:
        assert len(u.O1) == len(u.O2) == q * q
        assert not np.intersect1d(u.O1, u.O2).size
        assert free[u.members()].all()
        assert g.hyp_gen_inc[u.hyp][u.members()].all()
        # O_i meets its own cone line and avoids the partner's
        assert g.gen_meet[u.p1][u.O1].all()
        assert not g.gen_meet[u.p2][u.O1].any()


def test_distinct_and_membership(uss3, all3):
    q = uss3.q
    d = U.distinct_counts(uss3, all3)
    assert all(v == 108 for v in d["per_flag"].values())
    assert d["unsigned"] == 432
    assert d["signed"] == 864
    cnt = U.membership_counts(uss3, all3)
    assert (cnt == (q + 1) * (q * q - 1)).all()


def test_partition_sizes(uss3, labels3):
    q = uss3.q
    counts = np.stack([np.bincount(row, minlength=7) for row in labels3])
    # the same profile for every instance
    assert (counts == counts[0]).all()
    assert counts[0][0] == counts[0][1] == q * q
    assert counts[0][2] == q**3 - q * q
    assert counts[0].sum() == q**5


def test_identities_all_instances(ls3, labels3):
    out = U.verify_identities(ls3, labels3)
    bad = {k: v for k, v in out.items() if not v}
    assert not bad


def test_dual_degree_all_instances(ls3, labels3):
    out = U.verify_dual_degree(ls3, labels3)
    bad = {k: v for k, v in out.items() if not v}
    assert not bad


def test_gram_and_rank(uss3, ls3, all3):
    q = uss3.q
    signed = U.signed_matrix(uss3, all3)
    gr = U.verify_gram(ls3, signed)
    assert gr["gram_matches_classes"]
    assert gr["gram_matches_spectral"]
    assert gr["class_values"] == {0: [2 * (q - 1) * (q + 1)**2], 1: [-2],
                                  2: [0], 3: [2 * q], 4: [0],
                                  5: [-2 * (q + 1)]}
    rc = U.rank_chain(ls3, signed)
    assert rc["rank_signed_mod_p"] == rc["bound"] == 104
    assert rc["rank_gram_mod_p"] == 104


def test_json_round_trip(tmp_path, uss3, all3):
    path = tmp_path / "usets.json"
    U.save_usets(path, all3[:5])
    back = U.load_usets(path, q=3)
    assert len(back) == 5
    for a, b in zip(all3[:5], back):
        assert a.signed_key() == b.signed_key()
        assert (a.flag_point, a.hyp, a.p1, a.p2) == \
            (b.flag_point, b.hyp, b.p1, b.p2)
    with pytest.raises(ValueError):
        U.load_usets(path, q=5)
    # stored file is plain data
    with open(path) as fh:
        data = json.load(fh)
    assert data[0]["q"] == 3


def test_q5_single_instance():
    q = 5
    uss = U.USets(q)
    B0, _ = U.std_flag(uss)
    hyp = int(uss.poles_for_flag(B0)[3])
    built = uss.build_pair_usets(B0, hyp)
    assert len(built) == (q + 1) // 2
    for u in built:
        assert len(u.O1) == len(u.O2) == q * q
    lab = uss.classify_partition(built[0])
    counts = np.bincount(lab, minlength=7)
    assert counts[0] == counts[1] == q * q
    assert counts[2] == q**3 - q * q
    assert counts.sum() == q**5
