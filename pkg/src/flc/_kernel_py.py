"""Pure-Python search kernel (fallback twin of the compiled extension).

Backtracking assignment of existence flags and table cells with a
three-valued consistency check after every assignment: an instance that
evaluates definitely-false cuts the branch, a definitely-true instance is
retired for the rest of the subtree.

Satisfiability runs pick decision cells by relevance: every Unknown
evaluation records the last unassigned cell it read, and the next decision
assigns the watch cell of the first still-undecided instance.  Cells no
pending instance looks at are never branched on; they are filled with least
values once every instance is decided true.  Enumeration runs instead walk
the full static cell order (flags, then each table row-major), which makes
the model order canonical.
"""

from __future__ import annotations

import time

from ._compile import (CompiledProblem, F_EATOM, F_FORALL_ALL, F_FORALL_E,
                       F_IMPLIES, F_NOT, F_RAWEQ, T_ELEM, T_VAR)

SAT = 1
UNSAT = 0
LIMIT = 2

_FALSE, _TRUE, _UNKNOWN = 0, 1, 2


def _eval_term(p: CompiledProblem, cells, env, wslot, j: int) -> int:
    kind = p.tkind[j]
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


def _eval_formula(p: CompiledProblem, cells, env, wslot, i: int) -> int:
    kind = p.fkind[i]
    if kind == F_EATOM:
        e = _eval_term(p, cells, env, wslot, p.fa[i])
        if e < 0:
            # The term's value is open, but if every element carries the
            # same assigned flag the atom is decided anyway.
            first = cells[0]
            if first < 0:
                return _UNKNOWN
            for k in range(1, p.n):
                if cells[k] != first:
                    return _UNKNOWN
            return first
        flag = cells[e]
        if flag < 0:
            if wslot[0] < 0:
                wslot[0] = e
            return _UNKNOWN
        return flag
    if kind == F_RAWEQ:
        lhs = _eval_term(p, cells, env, wslot, p.fa[i])
        if lhs < 0:
            return _UNKNOWN
        rhs = _eval_term(p, cells, env, wslot, p.fb[i])
        if rhs < 0:
            return _UNKNOWN
        return _TRUE if lhs == rhs else _FALSE
    if kind == F_NOT:
        inner = _eval_formula(p, cells, env, wslot, p.fa[i])
        if inner == _UNKNOWN:
            return _UNKNOWN
        return _FALSE if inner == _TRUE else _TRUE
    if kind == F_IMPLIES:
        lhs = _eval_formula(p, cells, env, wslot, p.fa[i])
        if lhs == _FALSE:
            return _TRUE
        rhs = _eval_formula(p, cells, env, wslot, p.fb[i])
        if rhs == _TRUE:
            return _TRUE
        if lhs == _TRUE and rhs == _FALSE:
            return _FALSE
        return _UNKNOWN
    # quantifiers
    level = p.fa[i]
    body = p.fb[i]
    result = _TRUE
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
                if inner != _TRUE:
                    result = _UNKNOWN
                continue
        else:
            env[level] = e
            inner = _eval_formula(p, cells, env, wslot, body)
        if inner == _FALSE:
            return _FALSE
        if inner == _UNKNOWN:
            result = _UNKNOWN
    return result


class _State:
    def __init__(self, p: CompiledProblem, pinned):
        self.p = p
        self.cells = [-1] * p.total_cells
        if pinned:
            for idx, val in pinned:
                self.cells[idx] = val
        self.env = [0] * max(p.max_depth, 1)
        self.ninst = len(p.roots)
        self.status = [0] * self.ninst
        self.watch = [-1] * self.ninst
        self.undecided: list[int] = []
        self.wslot = [-1]

    def eval_instance(self, i: int) -> int:
        self.wslot[0] = -1
        r = _eval_formula(self.p, self.cells, self.env, self.wslot,
                          self.p.roots[i])
        if r == _UNKNOWN:
            self.watch[i] = self.wslot[0]
        return r

    def initial_propagation(self) -> bool:
        """False when some instance is already definitely violated."""
        for i in range(self.ninst):
            r = self.eval_instance(i)
            if r == _FALSE:
                return False
            if r == _UNKNOWN:
                self.undecided.append(i)
            else:
                self.status[i] = 1
        return True

    def rebuild_undecided(self) -> None:
        self.undecided = [i for i in range(self.ninst) if self.status[i] == 0]


def solve(p: CompiledProblem, pinned=None, enumerate_all: bool = False,
          model_limit: int = 0, node_limit: int = 0, time_limit: float = 0.0):
    """Run the search.

    Returns ``(status, models, nodes)`` where models is a list of cell
    arrays: at most one for a satisfiability run, up to model_limit (0 =
    no cap) when enumerating.
    """
    state = _State(p, pinned)
    if not state.initial_propagation():
        return UNSAT, [], 0
    deadline = time.monotonic() + time_limit if time_limit > 0 else 0.0
    if enumerate_all:
        return _enumerate(state, model_limit, node_limit, deadline)
    return _find(state, node_limit, deadline)


def _find(state: _State, node_limit: int, deadline: float):
    p, cells = state.p, state.cells
    n = p.n
    if not state.undecided:
        return SAT, [[v if v >= 0 else 0 for v in cells]], 0

    max_depth = sum(1 for v in cells if v < 0)
    dcell = [0] * max_depth
    dval = [0] * max_depth
    dretired: list[list[int]] = [[] for _ in range(max_depth)]
    depth = 0
    fresh = True
    nodes = 0

    while depth >= 0:
        if fresh:
            if not state.undecided:
                return SAT, [[v if v >= 0 else 0 for v in cells]], nodes
            best = state.watch[state.undecided[0]]
            for i in state.undecided[1:]:
                w = state.watch[i]
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
                if dretired[depth]:
                    for i in dretired[depth]:
                        state.status[i] = 0
                    state.rebuild_undecided()
                    dretired[depth] = []
            continue
        value = dval[depth]
        dval[depth] += 1
        cells[cell] = value
        nodes += 1
        if node_limit and nodes > node_limit:
            return LIMIT, [], nodes
        if deadline and nodes % 1024 == 0 and time.monotonic() > deadline:
            return LIMIT, [], nodes

        failed = False
        retired = []
        for i in state.undecided:
            r = state.eval_instance(i)
            if r == _FALSE:
                failed = True
                break
            if r == _TRUE:
                retired.append(i)
        if failed:
            cells[cell] = -1
            continue
        if retired:
            for i in retired:
                state.status[i] = 1
            state.rebuild_undecided()
        dretired[depth] = retired
        depth += 1
        fresh = True

    return UNSAT, [], nodes


def _enumerate(state: _State, model_limit: int, node_limit: int,
               deadline: float):
    p, cells = state.p, state.cells
    n = p.n
    order = [c for c in range(p.total_cells) if cells[c] < 0]
    depth_limit = len(order)
    models: list[list[int]] = []
    if depth_limit == 0:
        return SAT, [list(cells)], 0

    nvals = [2 if c < n else n for c in order]
    nextval = [0] * depth_limit
    trail: list[list[int]] = [[] for _ in range(depth_limit)]
    ptr = 0
    nodes = 0

    while ptr >= 0:
        if nextval[ptr] == nvals[ptr]:
            nextval[ptr] = 0
            ptr -= 1
            if ptr >= 0:
                cells[order[ptr]] = -1
                if trail[ptr]:
                    for i in trail[ptr]:
                        state.status[i] = 0
                    state.rebuild_undecided()
                    trail[ptr] = []
            continue
        value = nextval[ptr]
        nextval[ptr] += 1
        cell = order[ptr]
        cells[cell] = value
        nodes += 1
        if node_limit and nodes > node_limit:
            return LIMIT, models, nodes
        if deadline and nodes % 1024 == 0 and time.monotonic() > deadline:
            return LIMIT, models, nodes

        failed = False
        retired = []
        for i in state.undecided:
            r = state.eval_instance(i)
            if r == _FALSE:
                failed = True
                break
            if r == _TRUE:
                retired.append(i)
        if failed:
            cells[cell] = -1
            continue
        if retired:
            for i in retired:
                state.status[i] = 1
            state.rebuild_undecided()
        trail[ptr] = retired

        if ptr == depth_limit - 1:
            models.append(list(cells))
            if model_limit and len(models) >= model_limit:
                return SAT, models, nodes
            if retired:
                for i in retired:
                    state.status[i] = 0
                state.rebuild_undecided()
                trail[ptr] = []
            cells[cell] = -1
            continue
        ptr += 1

    return (SAT if models else UNSAT), models, nodes
