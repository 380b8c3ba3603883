"""Timing comparison of the two solver cores on shared instances.

Both engines walk the identical tree, so node counts must agree; the
only degree of freedom is wall time.  Run from the repository root:

    python3 benchmarks/bench_solver.py [--q 3] [--usets 4]
"""

import argparse
import time

import numpy as np

from polarscheme import _solver_py
from polarscheme import search as S
from polarscheme.usets import USets

try:
    from polarscheme import _solver_core
except ImportError:
    _solver_core = None


def run(engine, M, target, **kw):
    t0 = time.time()
    res = engine.solve(M, target, **kw)
    return time.time() - t0, res


def bench(name, M, target, **kw):
    tp, rp = run(_solver_py, M, target, **kw)
    if _solver_core is None:
        print("%-28s python %8.3fs  nodes=%d" % (name, tp, rp["nodes"]))
        return
    tc, rc = run(_solver_core, M, target, **kw)
    for k in ("status", "solutions", "nodes", "deadends"):
        assert rp[k] == rc[k], "engines disagree on %s" % k
    print("%-28s python %8.3fs  compiled %7.3fs  x%-5.1f nodes=%d"
          % (name, tp, tc, tp / tc if tc else float("inf"), rp["nodes"]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--usets", type=int, default=4,
                    help="pair-set side instances to time")
    args = ap.parse_args()
    q = args.q

    if _solver_core is None:
        print("compiled core not built; timing the python engine only")

    rng = np.random.default_rng(1)
    M = rng.random((60, 48)) < 0.25
    bench("random 60x48 all", M, 6, mode="all")

    t0 = time.time()
    uss = USets(q)
    inc = S.IncidenceMatrix(q, geom=uss.kl.geom)
    compat = S.pair_compat(q, inc.l, geom=inc.geom)
    print("geometry setup %.1fs" % (time.time() - t0))

    t = q * q
    bench("q=%d enumerate all" % q, inc.M, t, mode="all")
    bench("q=%d enumerate, pair prune" % q, inc.M, t, mode="all",
          compat=compat)
    done = 0
    for B in uss.flag_points:
        for u in uss.enumerate_flag(B):
            if done >= args.usets:
                break
            side = (S.uset_side(inc, u),)
            bench("q=%d pair-set side #%d" % (q, done), inc.M, t,
                  sides=side, mode="prove-infeasible", compat=compat)
            done += 1
        if done >= args.usets:
            break


if __name__ == "__main__":
    main()
