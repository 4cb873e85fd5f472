# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel; semantics identical to flc._kernel_py."""

import time

from cpython cimport array
import array

SAT = 1
UNSAT = 0
LIMIT = 2

DEF F_EATOM = 0
DEF F_RAWEQ = 1
DEF F_NOT = 2
DEF F_IMPLIES = 3
DEF F_FORALL_ALL = 4
DEF F_FORALL_E = 5

DEF T_VAR = -1
DEF T_ELEM = -2

DEF R_FALSE = 0
DEF R_TRUE = 1
DEF R_UNKNOWN = 2


cdef struct Prob:
    int n
    int total
    int ninst
    int* fkind
    int* fa
    int* fb
    int* tkind
    int* ta
    int* targs
    int* farity
    int* fbase
    int* roots


cdef int _eval_term(Prob* p, int* cells, int* env, int* wslot, int j) noexcept:
    cdef int kind = p.tkind[j]
    cdef int idx, start, k, val, cell
    if kind == T_VAR:
        return env[p.ta[j]]
    if kind == T_ELEM:
        return p.ta[j]
    idx = 0
    start = p.ta[j]
    for k in range(p.farity[kind]):
        val = _eval_term(p, cells, env, wslot, p.targs[start + k])
        if val < 0:
            return -1
        idx = idx * p.n + val
    cell = p.fbase[kind] + idx
    val = cells[cell]
    if val < 0 and wslot[0] < 0:
        wslot[0] = cell
    return val


cdef int _eval_formula(Prob* p, int* cells, int* env, int* wslot, int i) noexcept:
    cdef int kind = p.fkind[i]
    cdef int e, flag, lhs, rhs, inner, result, level, body, first, k
    if kind == F_EATOM:
        e = _eval_term(p, cells, env, wslot, p.fa[i])
        if e < 0:
            # The term's value is open, but if every element carries the
            # same assigned flag the atom is decided anyway.
            first = cells[0]
            if first < 0:
                return R_UNKNOWN
            for k in range(1, p.n):
                if cells[k] != first:
                    return R_UNKNOWN
            return first
        flag = cells[e]
        if flag < 0:
            if wslot[0] < 0:
                wslot[0] = e
            return R_UNKNOWN
        return flag
    if kind == F_RAWEQ:
        lhs = _eval_term(p, cells, env, wslot, p.fa[i])
        if lhs < 0:
            return R_UNKNOWN
        rhs = _eval_term(p, cells, env, wslot, p.fb[i])
        if rhs < 0:
            return R_UNKNOWN
        if lhs == rhs:
            return R_TRUE
        return R_FALSE
    if kind == F_NOT:
        inner = _eval_formula(p, cells, env, wslot, p.fa[i])
        if inner == R_UNKNOWN:
            return R_UNKNOWN
        if inner == R_TRUE:
            return R_FALSE
        return R_TRUE
    if kind == F_IMPLIES:
        lhs = _eval_formula(p, cells, env, wslot, p.fa[i])
        if lhs == R_FALSE:
            return R_TRUE
        rhs = _eval_formula(p, cells, env, wslot, p.fb[i])
        if rhs == R_TRUE:
            return R_TRUE
        if lhs == R_TRUE and rhs == R_FALSE:
            return R_FALSE
        return R_UNKNOWN
    # quantifiers
    level = p.fa[i]
    body = p.fb[i]
    result = R_TRUE
    for e in range(p.n):
        if kind == F_FORALL_E:
            flag = cells[e]
            if flag == 0:
                continue
            env[level] = e
            inner = _eval_formula(p, cells, env, wslot, body)
            if flag < 0:
                if wslot[0] < 0:
                    wslot[0] = e
                if inner != R_TRUE:
                    result = R_UNKNOWN
                continue
        else:
            env[level] = e
            inner = _eval_formula(p, cells, env, wslot, body)
        if inner == R_FALSE:
            return R_FALSE
        if inner == R_UNKNOWN:
            result = R_UNKNOWN
    return result


cdef class _State:
    cdef Prob prob
    cdef array.array fkind_a, fa_a, fb_a, tkind_a, ta_a, targs_a
    cdef array.array farity_a, fbase_a, roots_a
    cdef array.array cells_a, env_a, status_a, watch_a, undecided_a
    cdef int* cells
    cdef int* env
    cdef int* status
    cdef int* watch
    cdef int* undecided
    cdef int n_undecided
    cdef int wslot

    def __init__(self, p, pinned):
        def arr(values):
            return array.array('i', values or [0])

        self.fkind_a = arr(p.fkind)
        self.fa_a = arr(p.fa)
        self.fb_a = arr(p.fb)
        self.tkind_a = arr(p.tkind)
        self.ta_a = arr(p.ta)
        self.targs_a = arr(p.targs)
        self.farity_a = arr(p.farity)
        self.fbase_a = arr(p.fbase)
        self.roots_a = arr(p.roots)
        self.prob.n = p.n
        self.prob.total = p.total_cells
        self.prob.ninst = len(p.roots)
        self.prob.fkind = self.fkind_a.data.as_ints
        self.prob.fa = self.fa_a.data.as_ints
        self.prob.fb = self.fb_a.data.as_ints
        self.prob.tkind = self.tkind_a.data.as_ints
        self.prob.ta = self.ta_a.data.as_ints
        self.prob.targs = self.targs_a.data.as_ints
        self.prob.farity = self.farity_a.data.as_ints
        self.prob.fbase = self.fbase_a.data.as_ints
        self.prob.roots = self.roots_a.data.as_ints

        self.cells_a = array.array('i', [-1] * p.total_cells)
        self.cells = self.cells_a.data.as_ints
        if pinned:
            for idx, val in pinned:
                self.cells[<int> idx] = <int> val
        self.env_a = array.array('i', [0] * max(p.max_depth, 1))
        self.env = self.env_a.data.as_ints
        ninst = max(self.prob.ninst, 1)
        self.status_a = array.array('i', [0] * ninst)
        self.status = self.status_a.data.as_ints
        self.watch_a = array.array('i', [-1] * ninst)
        self.watch = self.watch_a.data.as_ints
        self.undecided_a = array.array('i', [0] * ninst)
        self.undecided = self.undecided_a.data.as_ints
        self.n_undecided = 0
        self.wslot = -1

    cdef int eval_instance(self, int i) noexcept:
        cdef int r
        self.wslot = -1
        r = _eval_formula(&self.prob, self.cells, self.env, &self.wslot,
                          self.prob.roots[i])
        if r == R_UNKNOWN:
            self.watch[i] = self.wslot
        return r

    cdef bint initial_propagation(self):
        cdef int i, r
        for i in range(self.prob.ninst):
            r = self.eval_instance(i)
            if r == R_FALSE:
                return False
            if r == R_UNKNOWN:
                self.undecided[self.n_undecided] = i
                self.n_undecided += 1
            else:
                self.status[i] = 1
        return True

    cdef void rebuild_undecided(self) noexcept:
        cdef int i
        self.n_undecided = 0
        for i in range(self.prob.ninst):
            if self.status[i] == 0:
                self.undecided[self.n_undecided] = i
                self.n_undecided += 1

    cdef list snapshot(self, bint fill):
        cdef int c, v
        out = []
        for c in range(self.prob.total):
            v = self.cells[c]
            if fill and v < 0:
                v = 0
            out.append(v)
        return out


def solve(p, pinned=None, enumerate_all=False, model_limit=0,
          node_limit=0, time_limit=0.0):
    """Mirror of flc._kernel_py.solve (see there for the contract)."""
    cdef _State state = _State(p, pinned)
    if not state.initial_propagation():
        return UNSAT, [], 0
    cdef double deadline = 0.0
    if time_limit > 0:
        deadline = time.monotonic() + time_limit
    if enumerate_all:
        return _enumerate(state, model_limit, node_limit, deadline)
    return _find(state, node_limit, deadline)


cdef _find(_State state, long long node_limit, double deadline):
    cdef Prob* p = &state.prob
    cdef int* cells = state.cells
    cdef int n = p.n
    if state.n_undecided == 0:
        return SAT, [state.snapshot(True)], 0

    cdef int max_depth = 0
    cdef int c
    for c in range(p.total):
        if cells[c] < 0:
            max_depth += 1
    cdef array.array dcell_a = array.array('i', [0] * max_depth)
    cdef array.array dval_a = array.array('i', [0] * max_depth)
    cdef array.array dretired_a = array.array(
        'i', [0] * (max_depth * max(p.ninst, 1)))
    cdef array.array dretired_len_a = array.array('i', [0] * max_depth)
    cdef int* dcell = dcell_a.data.as_ints
    cdef int* dval = dval_a.data.as_ints
    cdef int* dretired = dretired_a.data.as_ints
    cdef int* dretired_len = dretired_len_a.data.as_ints

    cdef int depth = 0
    cdef bint fresh = True
    cdef long long nodes = 0
    cdef int cell, limit, value, i, j, r, k, nretired, best, w
    cdef bint failed

    while depth >= 0:
        if fresh:
            if state.n_undecided == 0:
                return SAT, [state.snapshot(True)], nodes
            best = state.watch[state.undecided[0]]
            for j in range(1, state.n_undecided):
                w = state.watch[state.undecided[j]]
                if w < best:
                    best = w
            dcell[depth] = best
            dval[depth] = 0
            fresh = False
        cell = dcell[depth]
        limit = 2 if cell < n else n
        if dval[depth] == limit:
            depth -= 1
            if depth >= 0:
                cells[dcell[depth]] = -1
                nretired = dretired_len[depth]
                if nretired > 0:
                    for k in range(nretired):
                        state.status[dretired[depth * p.ninst + k]] = 0
                    state.rebuild_undecided()
                    dretired_len[depth] = 0
            continue
        value = dval[depth]
        dval[depth] += 1
        cells[cell] = value
        nodes += 1
        if node_limit and nodes > node_limit:
            return LIMIT, [], nodes
        if deadline != 0.0 and nodes % 1024 == 0 and time.monotonic() > deadline:
            return LIMIT, [], nodes

        failed = False
        nretired = 0
        for j in range(state.n_undecided):
            i = state.undecided[j]
            r = state.eval_instance(i)
            if r == R_FALSE:
                failed = True
                break
            if r == R_TRUE:
                dretired[depth * p.ninst + nretired] = i
                nretired += 1
        if failed:
            cells[cell] = -1
            continue
        if nretired > 0:
            for k in range(nretired):
                state.status[dretired[depth * p.ninst + k]] = 1
            state.rebuild_undecided()
        dretired_len[depth] = nretired
        depth += 1
        fresh = True

    return UNSAT, [], nodes


cdef _enumerate(_State state, long long model_limit, long long node_limit,
                double deadline):
    cdef Prob* p = &state.prob
    cdef int* cells = state.cells
    cdef int n = p.n
    cdef list order_list = []
    cdef int c
    for c in range(p.total):
        if cells[c] < 0:
            order_list.append(c)
    cdef int depth_limit = len(order_list)
    models = []
    if depth_limit == 0:
        return SAT, [state.snapshot(False)], 0

    cdef array.array order_a = array.array('i', order_list)
    cdef int* order = order_a.data.as_ints
    cdef array.array nvals_a = array.array(
        'i', [2 if c < n else n for c in order_list])
    cdef int* nvals = nvals_a.data.as_ints
    cdef array.array nextval_a = array.array('i', [0] * depth_limit)
    cdef int* nextval = nextval_a.data.as_ints
    cdef array.array trail_a = array.array(
        'i', [0] * (depth_limit * max(p.ninst, 1)))
    cdef int* trail = trail_a.data.as_ints
    cdef array.array trail_len_a = array.array('i', [0] * depth_limit)
    cdef int* trail_len = trail_len_a.data.as_ints

    cdef int ptr = 0
    cdef long long nodes = 0
    cdef int cell, value, i, j, r, k, nretired
    cdef bint failed

    while ptr >= 0:
        if nextval[ptr] == nvals[ptr]:
            nextval[ptr] = 0
            ptr -= 1
            if ptr >= 0:
                cells[order[ptr]] = -1
                nretired = trail_len[ptr]
                if nretired > 0:
                    for k in range(nretired):
                        state.status[trail[ptr * p.ninst + k]] = 0
                    state.rebuild_undecided()
                    trail_len[ptr] = 0
            continue
        value = nextval[ptr]
        nextval[ptr] += 1
        cell = order[ptr]
        cells[cell] = value
        nodes += 1
        if node_limit and nodes > node_limit:
            return LIMIT, models, nodes
        if deadline != 0.0 and nodes % 1024 == 0 and time.monotonic() > deadline:
            return LIMIT, models, nodes

        failed = False
        nretired = 0
        for j in range(state.n_undecided):
            i = state.undecided[j]
            r = state.eval_instance(i)
            if r == R_FALSE:
                failed = True
                break
            if r == R_TRUE:
                trail[ptr * p.ninst + nretired] = i
                nretired += 1
        if failed:
            cells[cell] = -1
            continue
        if nretired > 0:
            for k in range(nretired):
                state.status[trail[ptr * p.ninst + k]] = 1
            state.rebuild_undecided()
        trail_len[ptr] = nretired

        if ptr == depth_limit - 1:
            models.append(state.snapshot(False))
            if model_limit and len(models) >= model_limit:
                return SAT, models, nodes
            nretired = trail_len[ptr]
            if nretired > 0:
                for k in range(nretired):
                    state.status[trail[ptr * p.ninst + k]] = 0
                state.rebuild_undecided()
                trail_len[ptr] = 0
            cells[cell] = -1
            continue
        ptr += 1

    if models:
        return SAT, models, nodes
    return UNSAT, [], nodes
