# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False
"""Compiled twin of _solver_py.

Same traversal, same branch order, same statistics; bitsets live in
fixed-width uint64 word arrays with per-depth stacks instead of big
ints.  Keep the two files in lockstep: the tests assert node-for-node
agreement.
"""

import time

import numpy as np

from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memcpy

cdef extern from *:
    """
    static inline int pc64(unsigned long long x){ return __builtin_popcountll(x); }
    static inline int ctz64(unsigned long long x){ return __builtin_ctzll(x); }
    """
    int pc64(uint64_t x) nogil
    int ctz64(uint64_t x) nogil

cdef enum:
    CODE_OK = 0
    CODE_STOP = 1
    CODE_TIME = 2

cdef enum:
    P_DEAD = 0
    P_SOL = 1
    P_COL = 2
    P_ROWS = 3


cdef inline int64_t _pc(uint64_t* v, Py_ssize_t W) nogil:
    cdef Py_ssize_t i
    cdef int64_t s = 0
    for i in range(W):
        s += pc64(v[i])
    return s


cdef inline int64_t _pc_and(uint64_t* a, uint64_t* b, Py_ssize_t W) nogil:
    cdef Py_ssize_t i
    cdef int64_t s = 0
    for i in range(W):
        s += pc64(a[i] & b[i])
    return s


cdef inline int64_t _pc_and_capped(uint64_t* a, uint64_t* b, Py_ssize_t W,
                                   int64_t cap) nogil:
    # partial popcount of a & b, stopping once the count reaches both
    # cap and 2; a lower bound that still decides dead, unit and
    # strictly-better-than-cap exactly
    cdef Py_ssize_t i
    cdef int64_t s = 0
    for i in range(W):
        s += pc64(a[i] & b[i])
        if s >= cap and s >= 2:
            return s
    return s


cdef inline Py_ssize_t _first_and(uint64_t* a, uint64_t* b,
                                  Py_ssize_t W) nogil:
    cdef Py_ssize_t w
    cdef uint64_t x
    for w in range(W):
        x = a[w] & b[w]
        if x:
            return (w << 6) + ctz64(x)
    return -1


cdef class _Engine:
    cdef:
        Py_ssize_t n_rows, n_cols, WR, WC, n_sides, maxd
        int64_t target, w_max
        uint64_t[:, ::1] row_cols, col_rows, compat, side_um
        bint has_compat
        int64_t[::1] side_c, side_pruned, side_forced
        uint64_t[:, ::1] sk_ch, sk_al, sk_acc, sk_cand
        uint64_t[:, ::1] sk_c1, sk_c2
        int64_t[:, ::1] sk_order
        int64_t[::1] sk_nch
        uint64_t[::1] up2_buf
        int64_t[::1] tight
        int64_t nodes, deadends
        list solutions, completed_top
        int stop_after
        double deadline
        bint has_deadline, has_cap
        int64_t node_cap
        object skip

    def __init__(self, row_cols, col_rows, target, w_max, side_um, side_c,
                 compat, stop_after, deadline, node_cap, skip):
        self.row_cols = row_cols
        self.col_rows = col_rows
        self.n_rows = row_cols.shape[0]
        self.n_cols = col_rows.shape[0]
        self.WC = row_cols.shape[1]
        self.WR = col_rows.shape[1]
        self.target = target
        self.w_max = w_max
        self.side_um = side_um
        self.side_c = side_c
        self.n_sides = side_um.shape[0]
        self.has_compat = compat is not None
        self.compat = compat if compat is not None \
            else np.zeros((1, self.WR), dtype=np.uint64)
        self.maxd = target + 2
        self.sk_ch = np.zeros((self.maxd, self.WR), dtype=np.uint64)
        self.sk_al = np.zeros((self.maxd, self.WR), dtype=np.uint64)
        self.sk_acc = np.zeros((self.maxd, self.WR), dtype=np.uint64)
        self.sk_cand = np.zeros((self.maxd, self.WR), dtype=np.uint64)
        self.sk_c1 = np.zeros((self.maxd, self.WC), dtype=np.uint64)
        self.sk_c2 = np.zeros((self.maxd, self.WC), dtype=np.uint64)
        self.sk_order = np.zeros((self.maxd, max(1, self.n_rows)),
                                 dtype=np.int64)
        self.sk_nch = np.zeros(self.maxd, dtype=np.int64)
        self.up2_buf = np.zeros(self.WC, dtype=np.uint64)
        self.tight = np.zeros(max(1, self.n_rows), dtype=np.int64)
        self.side_pruned = np.zeros(max(1, self.n_sides), dtype=np.int64)
        self.side_forced = np.zeros(max(1, self.n_sides), dtype=np.int64)
        self.nodes = 0
        self.deadends = 0
        self.solutions = []
        self.completed_top = []
        self.stop_after = stop_after
        self.has_deadline = deadline is not None
        self.deadline = deadline if deadline is not None else 0.0
        self.has_cap = node_cap is not None
        self.node_cap = node_cap if node_cap is not None else 0
        self.skip = skip

    cdef bint _include(self, Py_ssize_t d, Py_ssize_t r):
        cdef uint64_t* rc = &self.row_cols[r, 0]
        cdef uint64_t* c1 = &self.sk_c1[d, 0]
        cdef uint64_t* c2 = &self.sk_c2[d, 0]
        cdef uint64_t* al = &self.sk_al[d, 0]
        cdef uint64_t* up2 = &self.up2_buf[0]
        cdef uint64_t* cm
        cdef uint64_t orig, t, x
        cdef Py_ssize_t w, w2, j
        for w in range(self.WC):
            if rc[w] & c2[w]:
                return 0
        for w in range(self.WC):
            orig = c1[w]
            t = rc[w] & orig
            up2[w] = t
            c1[w] = (orig & ~t) | (rc[w] & ~orig & ~c2[w])
            c2[w] |= t
        self.sk_ch[d, r >> 6] |= (<uint64_t>1) << (r & 63)
        self.sk_al[d, r >> 6] &= ~((<uint64_t>1) << (r & 63))
        for w in range(self.WC):
            x = up2[w]
            while x:
                j = (w << 6) + ctz64(x)
                x &= x - 1
                cm = &self.col_rows[j, 0]
                for w2 in range(self.WR):
                    al[w2] &= ~cm[w2]
        if self.has_compat:
            cm = &self.compat[r, 0]
            for w in range(self.WR):
                al[w] &= cm[w]
        self.sk_nch[d] += 1
        return 1

    cdef int _propagate(self, Py_ssize_t d):
        cdef uint64_t* ch = &self.sk_ch[d, 0]
        cdef uint64_t* al = &self.sk_al[d, 0]
        cdef uint64_t* c1 = &self.sk_c1[d, 0]
        cdef uint64_t* c2 = &self.sk_c2[d, 0]
        cdef uint64_t* um
        cdef uint64_t* cr
        cdef bint restart
        cdef Py_ssize_t si, w, j, r, best_j, bs, forced_r
        cdef int64_t sc, sa, c, r_need, t_open, k, best_k, bk
        cdef uint64_t x
        while True:
            restart = False
            for si in range(self.n_sides):
                um = &self.side_um[si, 0]
                c = self.side_c[si]
                sc = _pc_and(ch, um, self.WR)
                sa = _pc_and(al, um, self.WR)
                if sc > c or sc + sa < c:
                    self.side_pruned[si] += 1
                    return P_DEAD
                if sa and sc == c:
                    for w in range(self.WR):
                        al[w] &= ~um[w]
                    restart = True
                elif sa and sc + sa == c:
                    r = _first_and(al, um, self.WR)
                    self.side_forced[si] += 1
                    if not self._include(d, r):
                        self.side_pruned[si] += 1
                        return P_DEAD
                    restart = True
                if restart:
                    break
            if restart:
                continue
            r_need = self.target - self.sk_nch[d]
            if r_need < 0:
                return P_DEAD
            if _pc(al, self.WR) < r_need:
                return P_DEAD
            t_open = _pc(c1, self.WC)
            if t_open > r_need * self.w_max:
                return P_DEAD
            if r_need == 0:
                if t_open == 0:
                    return P_SOL
                return P_DEAD
            best_j = -1
            best_k = 0
            forced_r = -1
            for w in range(self.WC):
                x = c1[w]
                while x:
                    j = (w << 6) + ctz64(x)
                    x &= x - 1
                    cr = &self.col_rows[j, 0]
                    if best_j < 0:
                        k = _pc_and(cr, al, self.WR)
                    else:
                        k = _pc_and_capped(cr, al, self.WR, best_k)
                    if k == 0:
                        return P_DEAD
                    if k == 1:
                        forced_r = _first_and(cr, al, self.WR)
                        break
                    if best_j < 0 or k < best_k:
                        best_j = j
                        best_k = k
                if forced_r >= 0:
                    break
            if forced_r >= 0:
                if not self._include(d, forced_r):
                    return P_DEAD
                continue
            if best_j >= 0:
                cr = &self.col_rows[best_j, 0]
                for w in range(self.WR):
                    self.sk_cand[d, w] = cr[w] & al[w]
                return P_COL
            bs = -1
            bk = 0
            for si in range(self.n_sides):
                um = &self.side_um[si, 0]
                if _pc_and(ch, um, self.WR) < self.side_c[si]:
                    k = _pc_and(al, um, self.WR)
                    if bs < 0 or k < bk:
                        bs = si
                        bk = k
            if bs >= 0:
                um = &self.side_um[bs, 0]
                for w in range(self.WR):
                    self.sk_cand[d, w] = al[w] & um[w]
            else:
                for w in range(self.WR):
                    self.sk_cand[d, w] = al[w]
            return P_ROWS

    cdef int _dfs(self, Py_ssize_t d):
        cdef Py_ssize_t w, j, r, n_ord, idx, pos
        cdef uint64_t x
        cdef int pr, code
        cdef int64_t key, kj
        cdef list bits
        self.nodes += 1
        if self.nodes % 256 == 0:
            if self.has_deadline and time.monotonic() > self.deadline:
                return CODE_TIME
            if self.has_cap and self.nodes >= self.node_cap:
                return CODE_TIME
        pr = self._propagate(d)
        if pr == P_DEAD:
            self.deadends += 1
            return CODE_OK
        if pr == P_SOL:
            bits = []
            for w in range(self.WR):
                x = self.sk_ch[d, w]
                while x:
                    bits.append((w << 6) + ctz64(x))
                    x &= x - 1
            self.solutions.append(tuple(bits))
            if self.stop_after > 0 and len(self.solutions) >= self.stop_after:
                return CODE_STOP
            return CODE_OK
        n_ord = 0
        for w in range(self.WR):
            x = self.sk_cand[d, w]
            while x:
                r = (w << 6) + ctz64(x)
                x &= x - 1
                self.sk_order[d, n_ord] = r
                n_ord += 1
        if pr == P_COL:
            # sort by descending count of open columns hit, ties by id;
            # insertion sort on a short candidate list
            for idx in range(n_ord):
                r = self.sk_order[d, idx]
                self.tight[r] = _pc_and(&self.row_cols[r, 0],
                                        &self.sk_c1[d, 0], self.WC)
            for idx in range(1, n_ord):
                r = self.sk_order[d, idx]
                key = self.tight[r]
                pos = idx
                while pos > 0:
                    j = self.sk_order[d, pos - 1]
                    kj = self.tight[j]
                    if kj > key or (kj == key and j < r):
                        break
                    self.sk_order[d, pos] = j
                    pos -= 1
                self.sk_order[d, pos] = r
        for w in range(self.WR):
            self.sk_acc[d, w] = 0
        for idx in range(n_ord):
            r = self.sk_order[d, idx]
            if d == 0 and self.skip is not None and r in self.skip:
                self.sk_acc[d, r >> 6] |= (<uint64_t>1) << (r & 63)
                continue
            memcpy(&self.sk_ch[d + 1, 0], &self.sk_ch[d, 0],
                   self.WR * sizeof(uint64_t))
            for w in range(self.WR):
                self.sk_al[d + 1, w] = self.sk_al[d, w] & ~self.sk_acc[d, w]
            memcpy(&self.sk_c1[d + 1, 0], &self.sk_c1[d, 0],
                   self.WC * sizeof(uint64_t))
            memcpy(&self.sk_c2[d + 1, 0], &self.sk_c2[d, 0],
                   self.WC * sizeof(uint64_t))
            self.sk_nch[d + 1] = self.sk_nch[d]
            if not self._include(d + 1, r):
                self.deadends += 1
            else:
                code = self._dfs(d + 1)
                if code != CODE_OK:
                    return code
            self.sk_acc[d, r >> 6] |= (<uint64_t>1) << (r & 63)
            if d == 0:
                self.completed_top.append(r)
        return CODE_OK

    def run(self, bint fix_first):
        cdef Py_ssize_t w
        cdef int code = CODE_OK
        for w in range(self.WR):
            self.sk_al[0, w] = ~(<uint64_t>0)
        if self.n_rows % 64:
            self.sk_al[0, self.WR - 1] = \
                ((<uint64_t>1) << (self.n_rows % 64)) - 1
        if self.n_rows == 0:
            self.sk_al[0, 0] = 0
        if fix_first and self.n_rows:
            if not self._include(0, 0):
                return CODE_OK
        code = self._dfs(0)
        return code


def _pack_bits(bits, W):
    out = np.zeros((bits.shape[0], W), dtype=np.uint64)
    if bits.shape[1]:
        pb = np.packbits(bits, axis=1, bitorder="little")
        out.view(np.uint8)[:, :pb.shape[1]] = pb
    return out


def solve(matrix, target, sides=(), mode="first", timeout=None,
          skip_top=(), compat=None, fix_first=False, node_cap=None):
    """Drop-in replacement for _solver_py.solve, compiled."""
    if mode not in ("first", "prove-infeasible", "all"):
        raise ValueError("unknown mode: %r" % (mode,))
    t0 = time.monotonic()
    M = np.ascontiguousarray(np.asarray(matrix, dtype=bool))
    if M.ndim != 2:
        M = M.reshape(M.shape[0] if M.ndim else 0, -1)
    n_rows, n_cols = M.shape
    WR = max(1, (n_rows + 63) // 64)
    WC = max(1, (n_cols + 63) // 64)
    row_cols = _pack_bits(M, WC)
    col_rows = _pack_bits(np.ascontiguousarray(M.T), WR)
    w_max = int(M.sum(axis=1).max()) if n_rows else 0

    side_list = list(sides)
    side_um = np.zeros((len(side_list), WR), dtype=np.uint64)
    side_c = np.zeros(len(side_list), dtype=np.int64)
    for si, (ids, c) in enumerate(side_list):
        for i in ids:
            i = int(i)
            side_um[si, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        side_c[si] = int(c)

    compat_arr = None
    if compat is not None:
        cb = np.zeros((n_rows, n_rows), dtype=bool)
        for r in range(n_rows):
            cb[r, np.asarray(compat[r], dtype=np.int64)] = True
        compat_arr = _pack_bits(cb, WR)

    deadline = None if timeout is None else t0 + float(timeout)
    stop_after = 0 if mode == "all" else 1
    skip = set(int(r) for r in skip_top)
    eng = _Engine(row_cols, col_rows, int(target), w_max, side_um, side_c,
                  compat_arr, stop_after, deadline,
                  None if node_cap is None else int(node_cap),
                  skip if skip else None)
    code = eng.run(bool(fix_first))
    if code == CODE_STOP:
        status = "feasible"
    elif code == CODE_TIME:
        status = "timeout"
    else:
        status = "feasible" if eng.solutions else "infeasible"
    sols = sorted(eng.solutions)
    return {
        "status": status,
        "solutions": sols,
        "nodes": int(eng.nodes),
        "deadends": int(eng.deadends),
        "elapsed": time.monotonic() - t0,
        "completed_top": list(eng.completed_top),
        "side_stats": [{"pruned": int(eng.side_pruned[i]),
                        "forced": int(eng.side_forced[i])}
                       for i in range(len(side_list))],
    }
