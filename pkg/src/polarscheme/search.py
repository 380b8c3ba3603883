"""Pseudo-oval feasibility search through a fixed generator.

Pick a base generator l.  A selection of q^2 further generators, all
disjoint from l, extends to a pseudo-oval through l exactly when every
nondegenerate hyperplane meets the full set in 0 or 2 members.  Over
the hyperplanes avoiding l this is the binary system x M = 2y with
sum(x) = q^2, which a backtracking solver settles directly; side
constraints of the form "exactly c chosen rows inside a given id set"
express the pair-set conditions whose infeasibility forces every
pseudo-oval here to be a pseudo-conic.

Two engine cores run the identical traversal: a compiled one when the
extension built, and a pure python fallback.
"""

import json

import numpy as np

from . import _solver_py
from .geometry import geometry, triple_to_vec6
from .gf import field
from .klein import klein

try:
    from . import _solver_core
except ImportError:
    _solver_core = None


def default_base(q, geom=None):
    """Generator id of the line through (1,0,0) and (theta,0,0)."""
    f = field(q)
    g = geom if geom is not None else geometry(q)
    rows = np.stack([triple_to_vec6(f, (f.one, 0, 0)),
                     triple_to_vec6(f, (f.theta, 0, 0))])
    return g.gen_id(rows)


class IncidenceMatrix:
    """Bit matrix of generator-in-hyperplane, both sides avoiding l.

    Rows are the q^5 generators disjoint from l, columns the q^5 - q^3
    nondegenerate hyperplanes not containing l, in canonical id order.
    """

    def __init__(self, q, l=None, geom=None):
        g = geom if geom is not None else geometry(q)
        self.q = q
        self.geom = g
        self.l = default_base(q, g) if l is None else int(l)
        self.row_gids = np.nonzero(~g.gen_meet[self.l])[0]
        self.col_hids = np.nonzero(~g.hyp_gen_inc[:, self.l])[0]
        self.M = g.hyp_gen_inc[np.ix_(self.col_hids, self.row_gids)].T.copy()
        assert self.M.shape == (q**5, q**5 - q**3)
        self._row_index = {int(gd): i for i, gd in enumerate(self.row_gids)}

    def row_index(self, gid):
        return self._row_index[int(gid)]

    def row_weights(self):
        return self.M.sum(axis=1)

    def col_weights(self):
        return self.M.sum(axis=0)

    def pair_share(self, i, j):
        return int((self.M[i] & self.M[j]).sum())


def uset_side(inc, us, c=1):
    """Side constraint (row ids, c) for a pair set on the same l."""
    ids = sorted(inc.row_index(gd) for gd in us.members())
    return (tuple(ids), int(c))


class FeasibilityProblem:
    """x M = 2y over binaries with sum(x) = target and side constraints."""

    def __init__(self, matrix, target, sides=(), mode="first", inc=None):
        self.matrix = np.asarray(matrix, dtype=bool)
        self.target = int(target)
        self.sides = [(tuple(int(i) for i in ids), int(c))
                      for ids, c in sides]
        self.mode = mode
        self.inc = inc


def build_problem(q, l=None, side_constraints=(), mode="first", geom=None):
    inc = IncidenceMatrix(q, l=l, geom=geom)
    return FeasibilityProblem(inc.M, q * q, sides=side_constraints,
                              mode=mode, inc=inc)


class SearchReport:
    """Outcome of one solver run."""

    def __init__(self, status, solutions, nodes, deadends, elapsed,
                 completed_top, side_stats, engine, target, mode, q=None,
                 l=None):
        self.status = status
        self.solutions = [tuple(s) for s in solutions]
        self.nodes = nodes
        self.deadends = deadends
        self.elapsed = elapsed
        self.completed_top = list(completed_top)
        self.side_stats = side_stats
        self.engine = engine
        self.target = target
        self.mode = mode
        self.q = q
        self.l = l

    def to_json_dict(self):
        return {
            "status": self.status,
            "solutions": [list(s) for s in self.solutions],
            "nodes": self.nodes,
            "deadends": self.deadends,
            "elapsed": self.elapsed,
            "completed_top": list(self.completed_top),
            "side_stats": self.side_stats,
            "engine": self.engine,
            "target": self.target,
            "mode": self.mode,
            "q": self.q,
            "l": self.l,
        }


def save_report(rep, path):
    with open(path, "w") as fh:
        json.dump(rep.to_json_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")


def engine_name():
    return "compiled" if _solver_core is not None else "python"


def _pick_core(core):
    if core == "auto":
        return _solver_core if _solver_core is not None else _solver_py
    if core == "python":
        return _solver_py
    if core == "compiled":
        if _solver_core is None:
            raise RuntimeError("compiled solver core is not available")
        return _solver_core
    raise ValueError("unknown core: %r" % (core,))


def pair_compat(q, l, geom=None):
    """Row compatibility for the pairwise prune: rows r and s may share
    a selection only when l, r, s together span the whole space, which
    is the relation-4-or-5 condition of the line scheme.  Computed by
    batched rank so it stays quadratic with a small constant."""
    from . import linalg
    g = geom if geom is not None else geometry(q)
    verts = np.nonzero(~g.gen_meet[l])[0]
    n = len(verts)
    bases = g.gen_basis[verts]
    bl = g.gen_basis[int(l)]
    good = np.zeros((n, n), dtype=bool)
    step = max(1, 4 * 10**6 // (n * 36))
    for s in range(0, n, step):
        b = min(step, n - s)
        trip = np.empty((b, n, 6, 6), dtype=np.int64)
        trip[:, :, 0:2] = bl
        trip[:, :, 2:4] = bases[s:s + b, None]
        trip[:, :, 4:6] = bases[None, :]
        good[s:s + b] = (linalg.rank_batch(trip.reshape(-1, 6, 6), q)
                         .reshape(b, n) == 6)
    return [np.nonzero(good[r])[0] for r in range(n)]


def solve(problem, timeout=None, skip_top=(), pair_prune=False,
          fix_first=False, core="auto", node_cap=None):
    """Run the search and wrap the outcome in a SearchReport.

    pair_prune may be True (derive compatibility from the line scheme,
    needs problem.inc) or a precomputed per-row id list.  fix_first
    forces row 0 into the selection; sound for plain runs by line
    transitivity, not with side constraints, so off by default.
    """
    eng = _pick_core(core)
    compat = None
    if pair_prune is True:
        if problem.inc is None:
            raise ValueError("pair_prune=True needs a geometric problem")
        compat = pair_compat(problem.inc.q, problem.inc.l,
                             geom=problem.inc.geom)
    elif pair_prune:
        compat = pair_prune
    res = eng.solve(problem.matrix, problem.target, sides=problem.sides,
                    mode=problem.mode, timeout=timeout, skip_top=skip_top,
                    compat=compat, fix_first=fix_first, node_cap=node_cap)
    inc = problem.inc
    return SearchReport(
        res["status"], res["solutions"], res["nodes"], res["deadends"],
        res["elapsed"], res["completed_top"], res["side_stats"],
        "compiled" if eng is _solver_core else "python",
        problem.target, problem.mode,
        q=None if inc is None else inc.q,
        l=None if inc is None else inc.l)


# ---- independent verification ----

def _support(inc, x):
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("selection must be one dimensional")
    if x.shape[0] == len(inc.row_gids):
        return np.nonzero(x)[0]
    return x.astype(np.int64)


def verify_solution(inc, x, kl=None):
    """Check a selection against the geometry it came from.

    x is a 0/1 vector over the rows or a list of row indices.  Returns
    a dict with the spanning test over all triples of S = {l} + rows,
    the 0-or-2 count over every nondegenerate hyperplane (those
    through l included), agreement of the two (they are equivalent
    characterisations), and the pseudo-conic flag computed by two
    perspective oracles that must concur.
    """
    from itertools import combinations
    from . import linalg
    q, g = inc.q, inc.geom
    support = _support(inc, x)
    if len(support) != q * q or len(set(support.tolist())) != q * q:
        raise ValueError("support must hold exactly q^2 distinct rows")
    S = np.concatenate([[inc.l], inc.row_gids[support]])
    conc = g.gen_meet[np.ix_(S, S)].copy()
    np.fill_diagonal(conc, False)
    disjoint = not conc.any()
    trips = list(combinations(range(len(S)), 3))
    stacks = np.stack([np.concatenate([g.gen_basis[S[a]], g.gen_basis[S[b]],
                                       g.gen_basis[S[c]]])
                       for a, b, c in trips])
    spans = bool((linalg.rank_batch(stacks, q) == 6).all())
    cnt = g.hyp_gen_inc[:, S].sum(axis=1)
    zero_or_two = bool(((cnt == 0) | (cnt == 2)).all())
    agree = spans == zero_or_two
    conic = None
    routes_agree = None
    if spans:
        kl = kl if kl is not None else klein(q)
        conic = True
        routes_agree = True
        for a, b, c in trips:
            fast = kl.perspective_fast(int(S[a]), int(S[b]), int(S[c]))
            geo = kl.perspective_classify(int(S[a]), int(S[b]), int(S[c]))
            if (fast == "Perspective") != (geo == "Perspective"):
                routes_agree = False
            if fast != "Perspective":
                conic = False
    return {
        "q": q,
        "l": int(inc.l),
        "cardinality": int(len(support)),
        "pairwise_disjoint": bool(disjoint),
        "triples_span": spans,
        "hyperplanes_0_or_2": zero_or_two,
        "criteria_agree": agree,
        "pseudo_conic": conic,
        "perspective_routes_agree": routes_agree,
        "pass": bool(spans and zero_or_two and agree),
    }


def member_relations(inc, support, kl=None):
    """Pairwise scheme classes of the selected rows, as a dict keyed by
    ordered index pairs.  Classes follow the line scheme on l: 1 for
    concurrent, 2 and 3 by the dimension spanned together with l, then
    5 or 4 by the perspective property of the triple with l."""
    from . import linalg
    q, g = inc.q, inc.geom
    kl = kl if kl is not None else klein(q)
    support = [int(i) for i in support]
    gids = inc.row_gids[support]
    out = {}
    for a in range(len(gids)):
        for b in range(a + 1, len(gids)):
            m, n = int(gids[a]), int(gids[b])
            if g.gen_meet[m, n]:
                out[a, b] = 1
                continue
            stack = np.concatenate([g.gen_basis[inc.l], g.gen_basis[m],
                                    g.gen_basis[n]])
            r = linalg.rank(stack, q)
            if r < 6:
                out[a, b] = r - 2
            else:
                persp = kl.perspective_fast(inc.l, m, n) == "Perspective"
                out[a, b] = 5 if persp else 4
    return out


def inner_distribution_of(inc, support, kl=None):
    """Inner distribution of the selection inside the scheme on l."""
    from fractions import Fraction
    rels = member_relations(inc, support, kl=kl)
    n = len(support)
    counts = [0] * 6
    counts[0] = n
    for v in rels.values():
        counts[v] += 2
    return tuple(Fraction(c, n) for c in counts)


def special_image_report(q, point_ids, kl=None):
    """Run the full quadric-side suite on the image of a surface special
    set: 0-or-2 hyperplane law, spanning triples, perspective oracles,
    inner distribution and its dual transform against the closed form.
    """
    from fractions import Fraction
    from . import scheme
    kl = kl if kl is not None else klein(q)
    gids = [int(kl.point_image[int(p)]) for p in point_ids]
    if len(set(gids)) != q * q + 1:
        raise ValueError("expected q^2+1 distinct generators")
    inc = IncidenceMatrix(q, l=gids[0], geom=kl.geom)
    support = [inc.row_index(gd) for gd in gids[1:]]
    out = verify_solution(inc, support, kl=kl)
    a = inner_distribution_of(inc, support, kl=kl)
    out["inner_distribution"] = a
    out["inner_distribution_ok"] = a == tuple(
        Fraction(v) for v in (1, 0, 0, 0, 0, q * q - 1))
    mw = scheme.macwilliams(q, a)
    want = tuple(Fraction(v) for v in (
        q * q, 0, q**3 * (q - 1), q * q * (q * q - 1),
        q**3 * (q - 1)**2, 0))
    out["macwilliams"] = mw
    out["macwilliams_ok"] = mw == want
    out["pass"] = bool(out["pass"] and out["inner_distribution_ok"]
                       and out["macwilliams_ok"]
                       and out["pseudo_conic"] is True
                       and out["perspective_routes_agree"] is True)
    return out


# ---- LP text model ----

def _emit_terms(fh, head, terms, tail):
    line = head
    for t in terms:
        if len(line) + len(t) + 1 > 200:
            fh.write(line + "\n")
            line = "   "
        line += " " + t
    fh.write(line + tail + "\n")


def export_lp(problem, destination):
    """Write the model in LP text format, deterministically named.

    Variables are x0..x{rows-1} and y0..y{cols-1}; one constraint per
    column ties the chosen rows to 2 y_j, then the cardinality row and
    any side constraints.  The objective is the constant 0.
    """
    M = problem.matrix
    n_rows, n_cols = M.shape
    close = False
    if hasattr(destination, "write"):
        fh = destination
    else:
        fh = open(destination, "w")
        close = True
    try:
        fh.write("\\ Maximise: 0\n")
        fh.write("\\ feasibility model: x M = 2 y, sum(x) = %d\n"
                 % problem.target)
        fh.write("Maximize\n")
        if n_rows:
            fh.write(" obj: 0 x0\n")
        else:
            fh.write(" obj:\n")
        fh.write("Subject To\n")
        for j in range(n_cols):
            terms = ["+ x%d" % i for i in np.nonzero(M[:, j])[0]]
            _emit_terms(fh, " c%d:" % j, terms + ["- 2 y%d" % j], " = 0")
        _emit_terms(fh, " card:", ["+ x%d" % i for i in range(n_rows)],
                    " = %d" % problem.target)
        for k, (ids, c) in enumerate(problem.sides):
            _emit_terms(fh, " s%d:" % k, ["+ x%d" % i for i in ids],
                        " = %d" % c)
        fh.write("Binary\n")
        for i in range(n_rows):
            fh.write(" x%d\n" % i)
        for j in range(n_cols):
            fh.write(" y%d\n" % j)
        fh.write("End\n")
    finally:
        if close:
            fh.close()


def parse_lp(path):
    """Read back a model written by export_lp into a FeasibilityProblem."""
    with open(path) as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if not ln.startswith("\\")]
    body = " ".join(lines)
    sub = body.split("Subject To", 1)[1].split("Binary", 1)[0]
    binary = body.split("Binary", 1)[1].split("End", 1)[0].split()
    n_rows = sum(1 for v in binary if v.startswith("x"))
    n_cols = sum(1 for v in binary if v.startswith("y"))
    import re
    chunks = re.split(r"\s(?=\w+:)", sub.strip())
    M = np.zeros((n_rows, n_cols), dtype=bool)
    target = None
    sides = []
    for ch in chunks:
        if ":" not in ch:
            continue
        name, rest = ch.split(":", 1)
        name = name.strip()
        lhs, rhs = rest.rsplit("=", 1)
        xs = [int(m) for m in re.findall(r"\+ x(\d+)", lhs)]
        if name == "card":
            target = int(rhs)
        elif name.startswith("c"):
            M[xs, int(name[1:])] = True
        elif name.startswith("s"):
            sides.append((tuple(xs), int(rhs)))
    if target is None:
        raise ValueError("missing cardinality row")
    return FeasibilityProblem(M, target, sides=sides, mode="first")
