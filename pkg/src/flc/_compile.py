"""Lower closed core formulas to the flat form both search kernels consume.

Each constraint's leading universal quantifiers are instantiated over the
domain, producing one instance per element tuple (guarded quantifiers wrap
the instance in an existence-flag test).  Instance bodies keep any inner
quantifiers; the kernels evaluate those by looping over elements.

Cell layout: existence flags occupy cells [0, n); each function's table
follows row-major, built-ins first (dom, cod, comp), then user symbols in
declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import ast
from .ast import (ExistsAtom, ForallAll, ForallE, Formula, Implies, Not,
                  RawEq, Signature, Term, Var)

F_EATOM = 0
F_RAWEQ = 1
F_NOT = 2
F_IMPLIES = 3
F_FORALL_ALL = 4
F_FORALL_E = 5

T_VAR = -1
T_ELEM = -2


@dataclass
class CompiledProblem:
    """Flat, picklable search problem for one scope."""

    n: int
    func_names: tuple[str, ...]
    farity: list[int]
    fbase: list[int]
    total_cells: int
    fkind: list[int] = field(default_factory=list)
    fa: list[int] = field(default_factory=list)
    fb: list[int] = field(default_factory=list)
    tkind: list[int] = field(default_factory=list)
    ta: list[int] = field(default_factory=list)
    targs: list[int] = field(default_factory=list)
    roots: list[int] = field(default_factory=list)
    max_depth: int = 0

    def cells_to_model(self, cells: Sequence[int], signature: Signature):
        from .semantics import Interpretation

        tables = {}
        for fid, name in enumerate(self.func_names):
            base = self.fbase[fid]
            size = self.n ** self.farity[fid]
            tables[name] = tuple(cells[base:base + size])
        existence = frozenset(i for i in range(self.n) if cells[i] == 1)
        return Interpretation(self.n, existence, tables, signature)


class _Builder:
    def __init__(self, signature: Signature, n: int):
        self.n = n
        names = []
        arities = []
        for name, arity in signature.functions:
            names.append(name)
            arities.append(arity)
        bases = []
        offset = n
        for arity in arities:
            bases.append(offset)
            offset += n ** arity
        self.problem = CompiledProblem(
            n=n, func_names=tuple(names), farity=arities, fbase=bases,
            total_cells=offset)
        self.func_id = {name: i for i, name in enumerate(names)}

    # -- node emission -------------------------------------------------------

    def formula_node(self, kind: int, a: int, b: int = -1) -> int:
        p = self.problem
        p.fkind.append(kind)
        p.fa.append(a)
        p.fb.append(b)
        return len(p.fkind) - 1

    def term_node(self, kind: int, a: int) -> int:
        p = self.problem
        p.tkind.append(kind)
        p.ta.append(a)
        return len(p.tkind) - 1

    def emit_term(self, t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            binding = env.get(t.name)
            if binding is None:
                raise ast.SignatureError(f"open variable {t.name} in constraint")
            kind, value = binding
            return self.term_node(kind, value)
        arg_nodes = [self.emit_term(a, env) for a in t.args]
        start = len(self.problem.targs)
        self.problem.targs.extend(arg_nodes)
        return self.term_node(self.func_id[t.func], start)

    def emit_elem(self, value: int) -> int:
        return self.term_node(T_ELEM, value)

    def emit_formula(self, f: Formula, env: dict[str, int], depth: int) -> int:
        self.problem.max_depth = max(self.problem.max_depth, depth)
        if isinstance(f, ExistsAtom):
            return self.formula_node(F_EATOM, self.emit_term(f.term, env))
        if isinstance(f, RawEq):
            return self.formula_node(F_RAWEQ, self.emit_term(f.lhs, env),
                                     self.emit_term(f.rhs, env))
        if isinstance(f, Not):
            return self.formula_node(F_NOT, self.emit_formula(f.body, env, depth))
        if isinstance(f, Implies):
            a = self.emit_formula(f.lhs, env, depth)
            b = self.emit_formula(f.rhs, env, depth)
            return self.formula_node(F_IMPLIES, a, b)
        if isinstance(f, (ForallAll, ForallE)):
            inner = {**env, f.var: (T_VAR, depth)}
            body = self.emit_formula(f.body, inner, depth + 1)
            kind = F_FORALL_ALL if isinstance(f, ForallAll) else F_FORALL_E
            return self.formula_node(kind, depth, body)
        raise ast.SignatureError(f"constraint not in core form: {type(f).__name__}")

    # -- instances -------------------------------------------------------------

    def add_constraint(self, f: Formula) -> None:
        prefix: list[tuple[str, bool]] = []
        while isinstance(f, (ForallAll, ForallE)):
            prefix.append((f.var, isinstance(f, ForallE)))
            f = f.body
        self._instances(f, prefix, 0, {}, [])

    def _instances(self, body: Formula, prefix, i: int, env: dict[str, int],
                   guards: list[int]) -> None:
        if i == len(prefix):
            node = self.emit_formula(body, env, 0)
            for e in reversed(guards):
                node = self.formula_node(
                    F_IMPLIES, self.formula_node(F_EATOM, self.emit_elem(e)),
                    node)
            self.problem.roots.append(node)
            return
        var, guarded = prefix[i]
        for e in range(self.n):
            inner = {**env, var: (T_ELEM, e)}
            self._instances(body, prefix, i + 1, inner,
                            guards + [e] if guarded else guards)


def compile_problem(signature: Signature, n: int,
                    constraints: Sequence[Formula],
                    symmetry: bool) -> CompiledProblem:
    builder = _Builder(signature, n)
    if symmetry:
        for i in range(1, n):
            builder.problem.roots.append(builder.formula_node(
                F_IMPLIES,
                builder.formula_node(F_EATOM, builder.emit_elem(i)),
                builder.formula_node(F_EATOM, builder.emit_elem(i - 1))))
    for f in constraints:
        builder.add_constraint(f)
    return builder.problem
