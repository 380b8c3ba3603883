"""Command line driver for the verification and search pipelines.

Every subcommand emits a JSON report.  Each check record carries an id,
a plain statement of what was tested, the expected and observed values,
and a pass flag, so reports can be diffed across runs; apart from the
elapsed_s field a report is byte-identical for a fixed configuration.
Exit codes: 0 all checks passed, 1 verification failure, 2 usage error.
"""

import argparse
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import scheme, search
from . import usets as usetmod
from .geometry import geometry, load_cache, save_cache
from .gf import field
from .hermitian import hermitian, load_special_set, save_special_set
from .klein import klein


def _safe(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_safe(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_safe(x) for x in v]
    if isinstance(v, set):
        return sorted(_safe(x) for x in v)
    if isinstance(v, dict):
        return {str(k): _safe(x) for k, x in v.items()}
    return v


def check(cid, statement, expected, got):
    e, g = _safe(expected), _safe(got)
    return {"id": cid, "statement": statement, "expected": e, "got": g,
            "pass": e == g}


def make_report(command, q, checks, **extra):
    rep = {"command": command, "q": q, "checks": checks,
           "pass": all(c["pass"] for c in checks)}
    for k, v in extra.items():
        rep[k] = _safe(v)
    return rep


def emit(rep, out, t0):
    rep["elapsed_s"] = round(time.time() - t0, 3)
    text = json.dumps(rep, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep["pass"] else 1


def _geometry(q, cache_dir):
    if not cache_dir:
        return geometry(q)
    os.makedirs(cache_dir, exist_ok=True)
    f = field(q)
    path = os.path.join(cache_dir, "geometry_q%d_xi%d.json" % (q, f.xi))
    if os.path.exists(path):
        return load_cache(path)
    g = geometry(q)
    save_cache(g, path)
    return g


def _compat_cached(q, l, geom, cache_dir):
    if not cache_dir:
        return search.pair_compat(q, l, geom=geom)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, "compat_q%d_l%d.npz" % (q, l))
    if os.path.exists(path):
        with np.load(path) as d:
            flat, offs = d["flat"], d["offs"]
        return [flat[offs[i]:offs[i + 1]] for i in range(len(offs) - 1)]
    compat = search.pair_compat(q, l, geom=geom)
    offs = np.cumsum([0] + [len(c) for c in compat])
    np.savez_compressed(path, flat=np.concatenate(compat), offs=offs)
    return compat


# ---- scheme ----

def cmd_scheme_verify(args):
    t0 = time.time()
    q = args.q
    ps = scheme.PointScheme(q)
    checks = [check("valencies", "per-class neighbour counts",
                    list(scheme.valencies(q)), list(ps.valency_counts()))]
    if args.exhaustive:
        checks.append(check(
            "intersection-tensor-exhaustive",
            "all 36 adjacency products match the closed forms on every "
            "ordered pair", True, scheme.verify_tensor_exhaustive(ps)))
    else:
        n, bad = scheme.verify_tensor_sampled(ps, per_class=args.samples,
                                              seed=args.seed)
        checks.append(check(
            "intersection-tensor-sampled",
            "closed-form walk counts on %d sampled base pairs" % n,
            0, bad))
    bm = scheme.verify_bose_mesner(ps, rank_mod=1009 if q == 3 else None)
    for k, v in sorted(bm.items()):
        checks.append(check("bose-mesner-" + k.replace("_", "-"),
                            "spectral identity " + k, True, v))
    return emit(make_report("scheme verify", q, checks), args.out, t0)


def cmd_scheme_eigen(args):
    t0 = time.time()
    q = args.q
    P = scheme.p_matrix(q)
    Q = scheme.q_matrix(q)
    m = scheme.multiplicities(q)
    n = q**5
    PQ = [[sum(P[i][k] * Q[k][j] for k in range(6)) for j in range(6)]
          for i in range(6)]
    QP = [[sum(Q[i][k] * P[k][j] for k in range(6)) for j in range(6)]
          for i in range(6)]
    eye = [[Fraction(n) if i == j else Fraction(0) for j in range(6)]
           for i in range(6)]
    checks = [
        check("pq-identity", "P Q equals q^5 I", eye, PQ),
        check("qp-identity", "Q P equals q^5 I", eye, QP),
        check("multiplicity-sum", "multiplicities add up to q^5",
              n, sum(m)),
        check("valencies-row", "first row of P lists the valencies",
              [Fraction(v) for v in (1,) + scheme.valencies(q)], P[0]),
    ]
    return emit(make_report("scheme eigen", q, checks,
                            p_matrix=P, q_matrix=Q, multiplicities=list(m)),
                args.out, t0)


# ---- pseudoconic ----

def cmd_pseudoconic_build(args):
    t0 = time.time()
    q = args.q
    h = hermitian(q)
    ids = h.build_special_set()
    save_special_set(h, ids, args.out_file)
    v = h.validate_special_set(ids)
    checks = [
        check("size", "q^2+1 points", True, v["size_ok"]),
        check("pairwise", "pairwise non-collinear", True,
              v["pairwise_noncollinear"]),
        check("outside", "no outside point orthogonal to other than 0 or 2",
              0, v["outside_orthogonal_other"]),
        check("tags", "every triple carries the identity coset tag",
              True, v["cp_type"]),
    ]
    return emit(make_report("pseudoconic build", q, checks,
                            file=args.out_file, points=len(ids)), None, t0)


def cmd_pseudoconic_verify(args):
    t0 = time.time()
    q = args.q
    if not os.path.exists(args.in_file):
        print("polarscheme: no such file: %s" % args.in_file,
              file=sys.stderr)
        return 2
    h = hermitian(q)
    try:
        ids = load_special_set(h, args.in_file)
        v = h.validate_special_set(ids)
        img = search.special_image_report(q, ids, kl=klein(q))
        failure = None
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        failure = "%s: %s" % (type(exc).__name__, exc)
    if failure is not None:
        rep = make_report("pseudoconic verify", q,
                          [check("load", "file decodes to q^2+1 surface "
                                 "points", True, failure)],
                          file=args.in_file)
        return emit(rep, args.out, t0)
    checks = [
        check("surface-size", "q^2+1 points", True, v["size_ok"]),
        check("surface-pairwise", "pairwise non-collinear", True,
              v["pairwise_noncollinear"]),
        check("surface-outside",
              "outside points orthogonal to 0 or 2 members", 0,
              v["outside_orthogonal_other"]),
        check("surface-tags", "all triples tagged with the identity coset",
              True, v["cp_type"]),
        check("image-disjoint", "image generators pairwise disjoint",
              True, img["pairwise_disjoint"]),
        check("image-span", "any three image generators span", True,
              img["triples_span"]),
        check("image-0or2", "every nondegenerate hyperplane meets the "
              "image in 0 or 2", True, img["hyperplanes_0_or_2"]),
        check("image-agree", "span test and hyperplane test agree", True,
              img["criteria_agree"]),
        check("image-perspective", "all image triples in perspective "
              "by both oracles", True,
              img["pseudo_conic"] and img["perspective_routes_agree"]),
        check("image-inner", "inner distribution (1,0,0,0,0,q^2-1)",
              True, img["inner_distribution_ok"]),
        check("image-dual", "dual transform matches the closed form",
              True, img["macwilliams_ok"]),
    ]
    return emit(make_report("pseudoconic verify", q, checks,
                            file=args.in_file,
                            inner_distribution=img["inner_distribution"],
                            macwilliams=img["macwilliams"]),
                args.out, t0)


# ---- usets ----

def cmd_usets_enumerate(args):
    t0 = time.time()
    q = args.q
    uss = usetmod.USets(q)
    if args.flag is not None:
        if not 0 <= args.flag < len(uss.flag_points):
            print("polarscheme: flag index out of range 0..%d"
                  % (len(uss.flag_points) - 1), file=sys.stderr)
            return 2
        sets = uss.enumerate_flag(uss.flag_points[args.flag])
    else:
        sets = uss.enumerate_all()
    dc = usetmod.distinct_counts(uss, sets)
    per_flag = sorted(dc["per_flag"].values())
    checks = [
        check("sizes", "every pair set has two halves of q^2 lines",
              True, all(len(u.O1) == q * q and len(u.O2) == q * q
                        and not set(u.O1) & set(u.O2) for u in sets)),
        check("per-flag-uniform", "distinct pair sets per flag point "
              "all equal", 1, len(set(per_flag))),
        check("signed-doubles", "signed vectors double the distinct sets",
              2 * dc["unsigned"], dc["signed"]),
    ]
    if args.out_sets:
        usetmod.save_usets(args.out_sets, sets)
    return emit(make_report("usets enumerate", q, checks,
                            enumerated=len(sets),
                            distinct=dc["unsigned"],
                            per_flag=dc["per_flag"],
                            signed=dc["signed"],
                            flag=args.flag),
                args.out, t0)


def cmd_usets_verify(args):
    t0 = time.time()
    q = args.q
    kl = klein(q)
    uss = usetmod.USets(q, kl=kl)
    ls = scheme.LineScheme(q, kl=kl)
    sets = uss.enumerate_all()
    # the per-vector identities survive sampling; default to a subset
    # beyond q=3 where the full family is large
    samples = args.samples if args.samples is not None else (
        None if q == 3 else 300)
    sampled = samples is not None and samples < len(sets)
    if sampled:
        rng = np.random.default_rng(args.seed)
        pick = sorted(rng.choice(len(sets), size=samples,
                                 replace=False).tolist())
        sets = [sets[i] for i in pick]
    labels = usetmod.partition_matrix(uss, sets)
    idents = usetmod.verify_identities(ls, labels)
    dual = usetmod.verify_dual_degree(ls, labels)
    checks = []
    for k, v in sorted(idents.items()):
        checks.append(check("identity-" + k.replace("_", "-"),
                            "adjacency image identity " + k, True, v))
    for k, v in sorted(dual.items()):
        checks.append(check("dual-" + k.replace("_", "-"),
                            "idempotent image " + k, True, v))
    extra = {"pair_sets_checked": len(sets), "sampled": sampled}
    if not sampled:
        # the frame identity sums over the whole signed family, so it
        # only makes sense unsampled
        signed = usetmod.signed_matrix(uss, sets)
        gram = usetmod.verify_gram(ls, signed)
        checks.append(check("gram-classes", "summed outer products match "
                            "the class combination", True,
                            gram["gram_matches_classes"]))
        checks.append(check("gram-spectral", "summed outer products match "
                            "the two-idempotent form", True,
                            gram["gram_matches_spectral"]))
        extra["gram_class_values"] = gram["class_values"]
    return emit(make_report("usets verify", q, checks, **extra),
                args.out, t0)


# ---- search ----

def cmd_search_classify(args):
    t0 = time.time()
    q = args.q
    g = _geometry(q, args.cache_dir)
    kl = klein(q)
    inc = search.IncidenceMatrix(q, geom=g)
    problem = search.FeasibilityProblem(inc.M, q * q, mode="all", inc=inc)
    compat = (_compat_cached(q, inc.l, g, args.cache_dir)
              if args.prune else False)
    rep = search.solve(problem, timeout=args.timeout, pair_prune=compat,
                       core=args.core)
    checks = [check("complete", "enumeration ran to completion",
                    "feasible", rep.status)]
    verified = conic = 0
    if rep.status == "feasible":
        for x in rep.solutions:
            out = search.verify_solution(inc, x, kl=kl)
            verified += bool(out["pass"])
            conic += bool(out["pseudo_conic"])
        checks.append(check("all-verify", "every selection passes the "
                            "pseudo-oval tests", len(rep.solutions),
                            verified))
        checks.append(check("all-conic", "every selection is a "
                            "pseudo-conic", len(rep.solutions), conic))
    return emit(make_report("search classify", q, checks,
                            l=int(inc.l), status=rep.status,
                            solutions=len(rep.solutions),
                            nodes=rep.nodes, engine=rep.engine,
                            solution_rows=[list(s) for s in rep.solutions]),
                args.out, t0)


def _load_checkpoint(path):
    if path and os.path.exists(path):
        with open(path) as fh:
            return json.load(fh)
    return {"done": {}, "partial": None}


def _save_checkpoint(path, state):
    if not path:
        return
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(state, fh, sort_keys=True, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def cmd_search_uset(args):
    t0 = time.time()
    q = args.q
    if args.uset is None and not args.all:
        print("polarscheme: pass --uset ID or --all", file=sys.stderr)
        return 2
    if args.uset is not None and args.all:
        print("polarscheme: --uset and --all exclude each other",
              file=sys.stderr)
        return 2
    g = _geometry(q, args.cache_dir)
    kl = klein(q)
    uss = usetmod.USets(q, kl=kl)
    inc = search.IncidenceMatrix(q, geom=g)
    sets = uss.enumerate_all()
    wanted = list(range(len(sets))) if args.all else [args.uset]
    if args.uset is not None and not 0 <= args.uset < len(sets):
        print("polarscheme: uset index out of range 0..%d"
              % (len(sets) - 1), file=sys.stderr)
        return 2
    compat = False
    if args.prune:
        compat = _compat_cached(q, inc.l, g, args.cache_dir)
    state = _load_checkpoint(args.checkpoint)
    results = []
    for uid in wanted:
        key = str(uid)
        if key in state["done"]:
            results.append(dict(state["done"][key], id=uid, cached=True))
            continue
        skip = ()
        if state["partial"] and state["partial"]["id"] == uid:
            skip = tuple(state["partial"]["completed_top"])
        side = (search.uset_side(inc, sets[uid]),)
        problem = search.FeasibilityProblem(
            inc.M, q * q, sides=side, mode="prove-infeasible", inc=inc)
        rep = search.solve(problem, timeout=args.timeout, skip_top=skip,
                           pair_prune=compat, core=args.core)
        # no timing in the record, so reruns produce identical reports
        rec = {"status": rep.status, "nodes": rep.nodes}
        if rep.status == "timeout":
            state["partial"] = {"id": uid, "completed_top":
                                sorted(set(skip) | set(rep.completed_top))}
        else:
            state["done"][key] = rec
            if state["partial"] and state["partial"]["id"] == uid:
                state["partial"] = None
        _save_checkpoint(args.checkpoint, state)
        results.append(dict(rec, id=uid, cached=False))
    n_inf = sum(1 for r in results if r["status"] == "infeasible")
    n_time = sum(1 for r in results if r["status"] == "timeout")
    n_feas = len(results) - n_inf - n_time
    checks = [
        check("no-solutions", "no pair-set constrained selection exists",
              0, n_feas),
        check("all-confirmed", "every examined instance proved infeasible",
              len(results), n_inf),
    ]
    return emit(make_report("search uset-feasibility", q, checks,
                            l=int(inc.l), examined=len(results),
                            infeasible=n_inf, timeouts=n_time,
                            prune=bool(args.prune),
                            results=results),
                args.out, t0)


def cmd_export_lp(args):
    t0 = time.time()
    q = args.q
    g = _geometry(q, args.cache_dir)
    inc = search.IncidenceMatrix(q, geom=g)
    sides = ()
    if args.uset is not None:
        uss = usetmod.USets(q, kl=klein(q))
        sets = uss.enumerate_all()
        if not 0 <= args.uset < len(sets):
            print("polarscheme: uset index out of range 0..%d"
                  % (len(sets) - 1), file=sys.stderr)
            return 2
        sides = (search.uset_side(inc, sets[args.uset]),)
    problem = search.FeasibilityProblem(inc.M, q * q, sides=sides,
                                        mode="first", inc=inc)
    search.export_lp(problem, args.out_file)
    checks = [check("written", "model file exists", True,
                    os.path.exists(args.out_file))]
    return emit(make_report("export lp", q, checks, file=args.out_file,
                            rows=int(inc.M.shape[0]),
                            cols=int(inc.M.shape[1]),
                            side_constraints=len(sides)),
                None, t0)


# ---- wiring ----

def _add_common(sp, out=True):
    sp.add_argument("--q", type=int, required=True, choices=(3, 5, 7))
    if out:
        sp.add_argument("--out", default=None,
                        help="write the JSON report here instead of stdout")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="polarscheme",
        description="verification and search pipelines for the five-class "
                    "scheme and the pseudo-oval feasibility system")
    top = ap.add_subparsers(dest="group", required=True)

    g = top.add_parser("scheme", help="association scheme checks")
    gs = g.add_subparsers(dest="command", required=True)
    p = gs.add_parser("verify", help="intersection numbers and spectral "
                      "identities")
    _add_common(p)
    p.add_argument("--exhaustive", action="store_true",
                   help="check every ordered pair instead of sampling")
    p.add_argument("--samples", type=int, default=200,
                   help="sampled base pairs per class (default 200)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_scheme_verify)
    p = gs.add_parser("eigen", help="eigenmatrices as exact rationals")
    _add_common(p)
    p.set_defaults(func=cmd_scheme_eigen)

    g = top.add_parser("pseudoconic", help="the classical example")
    gs = g.add_subparsers(dest="command", required=True)
    p = gs.add_parser("build", help="construct and save the special set")
    p.add_argument("--q", type=int, required=True, choices=(3, 5, 7))
    p.add_argument("--out", dest="out_file", required=True)
    p.set_defaults(func=cmd_pseudoconic_build)
    p = gs.add_parser("verify", help="run the full predicate suite on a "
                      "saved set")
    _add_common(p)
    p.add_argument("--in", dest="in_file", required=True)
    p.set_defaults(func=cmd_pseudoconic_verify)

    g = top.add_parser("usets", help="pair-set configurations")
    gs = g.add_subparsers(dest="command", required=True)
    p = gs.add_parser("enumerate", help="count and save the pair sets")
    _add_common(p)
    p.add_argument("--flag", type=int, default=None,
                   help="restrict to one flag point by index")
    p.add_argument("--out-sets", default=None,
                   help="write the enumerated sets to this file")
    p.set_defaults(func=cmd_usets_enumerate)
    p = gs.add_parser("verify", help="vector identities and spectra")
    _add_common(p)
    p.add_argument("--samples", type=int, default=None,
                   help="verify a random subset of this size")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_usets_verify)

    g = top.add_parser("search", help="feasibility system on a fixed line")
    gs = g.add_subparsers(dest="command", required=True)
    p = gs.add_parser("classify", help="enumerate and verify every "
                      "solution")
    _add_common(p)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--prune", action="store_true",
                   help="drop row pairs that cannot extend to a "
                   "pseudo-oval")
    p.add_argument("--core", default="auto",
                   choices=("auto", "python", "compiled"))
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_search_classify)
    p = gs.add_parser("uset-feasibility", help="prove pair-set side "
                      "constraints infeasible")
    _add_common(p)
    p.add_argument("--uset", type=int, default=None,
                   help="index into the full enumeration on the base line")
    p.add_argument("--all", action="store_true")
    p.add_argument("--timeout", type=float, default=None,
                   help="per-instance budget in seconds")
    p.add_argument("--no-prune", dest="prune", action="store_false",
                   help="run the bare system without the pair prune")
    p.add_argument("--core", default="auto",
                   choices=("auto", "python", "compiled"))
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--checkpoint", default=None,
                   help="JSON file recording finished instances and the "
                   "exhausted top branches of an interrupted one")
    p.set_defaults(func=cmd_search_uset)

    g = top.add_parser("export", help="write solver-independent models")
    gs = g.add_subparsers(dest="command", required=True)
    p = gs.add_parser("lp", help="LP text format")
    p.add_argument("--q", type=int, required=True, choices=(3, 5, 7))
    p.add_argument("--uset", type=int, default=None)
    p.add_argument("--out", dest="out_file", required=True)
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_export_lp)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
