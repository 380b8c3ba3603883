"""Backtracking core for the 0-or-2 covering search, pure python.

States are tuples of arbitrary precision ints used as bitsets, so a
branch copy is a handful of integer copies.  The compiled core in
_solver_core.pyx mirrors this traversal word for word; any change to
the branching or propagation order here must be ported there, and the
tests compare the two node by node.
"""

import time

import numpy as np


class _Stop(Exception):
    pass


class _Timeout(Exception):
    pass


def _bit_ids(x):
    out = []
    while x:
        b = x & -x
        out.append(b.bit_length() - 1)
        x ^= b
    return out


def solve(matrix, target, sides=(), mode="first", timeout=None,
          skip_top=(), compat=None, fix_first=False, node_cap=None):
    """Search for 0/1 row selections x with x M = 2y, |x| = target.

    matrix holds bits M[i, j] = row i covers column j.  A selection is
    accepted when every column meets it in 0 or 2 rows and each side
    constraint (ids, c) has exactly c selected rows among ids.

    mode: "first" and "prove-infeasible" stop at the first solution,
    "all" enumerates every one.  skip_top lists top level branch
    labels to leave unexplored (resume support).  compat, if given,
    maps each row id to the iterable of row ids it may share a
    solution with; selecting a row then drops the incompatible ones.
    fix_first forces the lowest row id into the selection before
    branching, which is only safe when a transitive symmetry argument
    applies and there are no side constraints.  node_cap aborts like a
    timeout after that many nodes.

    Returns a dict with status, solutions, nodes, deadends, elapsed,
    completed_top and side_stats.
    """
    if mode not in ("first", "prove-infeasible", "all"):
        raise ValueError("unknown mode: %r" % (mode,))
    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + float(timeout)
    stop_after = None if mode == "all" else 1

    M = np.asarray(matrix, dtype=bool)
    n_rows, n_cols = M.shape
    row_cols = [0] * n_rows
    col_rows = [0] * n_cols
    for i, j in zip(*np.nonzero(M)):
        row_cols[int(i)] |= 1 << int(j)
        col_rows[int(j)] |= 1 << int(i)
    w_max = max((m.bit_count() for m in row_cols), default=0)

    side_masks = []
    for ids, c in sides:
        um = 0
        for i in ids:
            um |= 1 << int(i)
        side_masks.append((um, int(c)))
    compat_masks = None
    if compat is not None:
        compat_masks = [0] * n_rows
        for r in range(n_rows):
            cm = 0
            for s in compat[r]:
                cm |= 1 << int(s)
            compat_masks[r] = cm

    solutions = []
    completed_top = []
    skip = set(int(r) for r in skip_top)
    stats = {"nodes": 0, "deadends": 0}
    side_stats = [{"pruned": 0, "forced": 0} for _ in side_masks]

    def include(chosen, allowed, c1, c2, nch, r):
        rm = row_cols[r]
        if rm & c2:
            return None
        up2 = rm & c1
        c1n = (c1 & ~up2) | (rm & ~c1 & ~c2)
        c2n = c2 | up2
        ch = chosen | (1 << r)
        al = allowed & ~(1 << r)
        x = up2
        while x:
            b = x & -x
            al &= ~col_rows[b.bit_length() - 1]
            x ^= b
        if compat_masks is not None:
            al &= compat_masks[r]
        return ch, al, c1n, c2n, nch + 1

    def propagate(chosen, allowed, c1, c2, nch):
        while True:
            restart = False
            for si in range(len(side_masks)):
                um, c = side_masks[si]
                sc = (chosen & um).bit_count()
                sa = (allowed & um).bit_count()
                if sc > c or sc + sa < c:
                    side_stats[si]["pruned"] += 1
                    return None
                if sa and sc == c:
                    allowed &= ~um
                    restart = True
                elif sa and sc + sa == c:
                    fr = allowed & um
                    r = (fr & -fr).bit_length() - 1
                    side_stats[si]["forced"] += 1
                    st = include(chosen, allowed, c1, c2, nch, r)
                    if st is None:
                        side_stats[si]["pruned"] += 1
                        return None
                    chosen, allowed, c1, c2, nch = st
                    restart = True
                if restart:
                    break
            if restart:
                continue
            r_need = target - nch
            if r_need < 0:
                return None
            if allowed.bit_count() < r_need:
                return None
            t_open = c1.bit_count()
            if t_open > r_need * w_max:
                return None
            if r_need == 0:
                if t_open == 0:
                    return ("sol", chosen)
                return None
            best_j = -1
            best_k = 0
            best_cand = 0
            forced_r = -1
            x = c1
            while x:
                b = x & -x
                j = b.bit_length() - 1
                x ^= b
                cand = col_rows[j] & allowed
                k = cand.bit_count()
                if k == 0:
                    return None
                if k == 1:
                    forced_r = cand.bit_length() - 1
                    break
                if best_j < 0 or k < best_k:
                    best_j, best_k, best_cand = j, k, cand
            if forced_r >= 0:
                st = include(chosen, allowed, c1, c2, nch, forced_r)
                if st is None:
                    return None
                chosen, allowed, c1, c2, nch = st
                continue
            st = (chosen, allowed, c1, c2, nch)
            if best_j >= 0:
                return ("col", st, best_cand)
            # no open column: branch into an unmet side constraint if
            # any, smallest remaining support first, else over all rows
            bs = -1
            bk = 0
            bm = 0
            for si in range(len(side_masks)):
                um, c = side_masks[si]
                if (chosen & um).bit_count() < c:
                    m = allowed & um
                    k = m.bit_count()
                    if bs < 0 or k < bk:
                        bs, bk, bm = si, k, m
            if bs >= 0:
                return ("rows", st, bm)
            return ("rows", st, allowed)

    def dfs(chosen, allowed, c1, c2, nch, depth):
        stats["nodes"] += 1
        if stats["nodes"] % 256 == 0:
            if deadline is not None and time.monotonic() > deadline:
                raise _Timeout
            if node_cap is not None and stats["nodes"] >= node_cap:
                raise _Timeout
        res = propagate(chosen, allowed, c1, c2, nch)
        if res is None:
            stats["deadends"] += 1
            return
        if res[0] == "sol":
            solutions.append(tuple(_bit_ids(res[1])))
            if stop_after is not None and len(solutions) >= stop_after:
                raise _Stop
            return
        if res[0] == "col":
            _, st, cand = res
            chosen, allowed, c1, c2, nch = st
            # most constrained column first, then the candidate that
            # tightens the most other open columns
            order = sorted(_bit_ids(cand),
                           key=lambda r: (-(row_cols[r] & c1).bit_count(), r))
        else:
            _, st, pool = res
            chosen, allowed, c1, c2, nch = st
            order = _bit_ids(pool)
        acc = 0
        for r in order:
            if depth == 0 and r in skip:
                acc |= 1 << r
                continue
            st2 = include(chosen, allowed & ~acc, c1, c2, nch, r)
            if st2 is not None:
                dfs(*st2, depth + 1)
            else:
                stats["deadends"] += 1
            acc |= 1 << r
            if depth == 0:
                completed_top.append(r)

    status = None
    root = (0, (1 << n_rows) - 1, 0, 0, 0)
    try:
        if fix_first and n_rows:
            root = include(*root, 0)
        if root is not None:
            dfs(*root, 0)
    except _Stop:
        status = "feasible"
    except _Timeout:
        status = "timeout"
    if status is None:
        status = "feasible" if solutions else "infeasible"
    solutions.sort()
    return {
        "status": status,
        "solutions": solutions,
        "nodes": stats["nodes"],
        "deadends": stats["deadends"],
        "elapsed": time.monotonic() - t0,
        "completed_top": completed_top,
        "side_stats": side_stats,
    }
