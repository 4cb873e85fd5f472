"""Finite interpretations and evaluators.

An interpretation totalizes every function symbol over a raw domain
{0..n-1}; partiality is expressed solely through the existence subset E.
``eval_formula`` is the trusted two-valued evaluator used to verify search
witnesses; ``eval_partial`` is a conservative three-valued evaluator over
partially filled tables, used to prune search branches.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from . import ast
from .ast import (
    ExistsAtom, ForallAll, ForallE, Formula, Implies, Not, RawEq,
    Signature, Term, Theory, Var,
)


class EvalContractError(Exception):
    """Internal error: evaluator precondition violated (e.g. unbound var)."""


class TruthValue3(enum.Enum):
    FALSE = 0
    TRUE = 1
    UNKNOWN = 2


F3, T3, U3 = TruthValue3.FALSE, TruthValue3.TRUE, TruthValue3.UNKNOWN


def table_size(n: int, arity: int) -> int:
    return n ** arity


def table_index(n: int, args: Sequence[int]) -> int:
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


@dataclass(frozen=True)
class Interpretation:
    """Total tables over a raw domain of the given size."""

    size: int
    existence: frozenset[int]
    tables: Mapping[str, tuple[int, ...]]
    signature: Signature = field(default_factory=Signature)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("domain size must be >= 1")
        if not all(0 <= e < self.size for e in self.existence):
            raise ValueError("existence flag outside the domain")
        for name, arity in self.signature.functions:
            table = self.tables.get(name)
            if table is None:
                raise ValueError(f"missing table for {name}")
            if len(table) != table_size(self.size, arity):
                raise ValueError(f"table for {name} has wrong shape")
            if not all(0 <= v < self.size for v in table):
                raise ValueError(f"table entry for {name} outside the domain")

    def lookup(self, func: str, args: Sequence[int]) -> int:
        return self.tables[func][table_index(self.size, args)]


def identity_interpretation(n: int, existence: Sequence[int],
                            signature: Optional[Signature] = None) -> Interpretation:
    """All tables map to element 0 except dom/cod, which are the identity."""
    sig = signature or Signature()
    tables = {}
    for name, arity in sig.functions:
        if name in (ast.DOM, ast.COD):
            tables[name] = tuple(range(n))
        else:
            tables[name] = (0,) * table_size(n, arity)
    return Interpretation(n, frozenset(existence), tables, sig)


class PartialInterpretation:
    """Single-owner mutable search state: cells may be unassigned (-1)."""

    def __init__(self, size: int, signature: Optional[Signature] = None):
        self.size = size
        self.signature = signature or Signature()
        self.existence: list[int] = [-1] * size  # -1 unknown, 0 no, 1 yes
        self.tables: dict[str, list[int]] = {
            name: [-1] * table_size(size, arity)
            for name, arity in self.signature.functions
        }

    def set_existence(self, element: int, flag: bool) -> None:
        self.existence[element] = int(flag)

    def set_cell(self, func: str, args: Sequence[int], value: int) -> None:
        if not 0 <= value < self.size:
            raise ValueError("cell value outside the domain")
        self.tables[func][table_index(self.size, args)] = value

    def is_total(self) -> bool:
        return all(v >= 0 for v in self.existence) and all(
            v >= 0 for t in self.tables.values() for v in t)

    def freeze(self) -> Interpretation:
        if not self.is_total():
            raise ValueError("partial interpretation is not total")
        return Interpretation(
            self.size,
            frozenset(i for i, v in enumerate(self.existence) if v == 1),
            {name: tuple(t) for name, t in self.tables.items()},
            self.signature,
        )

    def completions(self):
        """Iterate all total completions (exhaustive; test-sized domains only)."""
        n = self.size
        ex_choices = [[v] if v >= 0 else [0, 1] for v in self.existence]
        names = [name for name, _ in self.signature.functions]
        cell_choices = []
        for name in names:
            for v in self.tables[name]:
                cell_choices.append([v] if v >= 0 else list(range(n)))
        sizes = [len(self.tables[name]) for name in names]
        for ex in itertools.product(*ex_choices):
            for flat in itertools.product(*cell_choices):
                tables = {}
                pos = 0
                for name, k in zip(names, sizes):
                    tables[name] = tuple(flat[pos:pos + k])
                    pos += k
                yield Interpretation(n, frozenset(
                    i for i, v in enumerate(ex) if v), tables, self.signature)


# ---------------------------------------------------------------------------
# Two-valued evaluation (total interpretations)
# ---------------------------------------------------------------------------

def eval_term(m: Interpretation, v: Mapping[str, int], t: Term) -> int:
    if isinstance(t, Var):
        try:
            return v[t.name]
        except KeyError:
            raise EvalContractError(f"unbound variable {t.name}") from None
    return m.lookup(t.func, [eval_term(m, v, a) for a in t.args])


def eval_formula(m: Interpretation, v: Mapping[str, int], f: Formula) -> bool:
    """Classical evaluation of a core formula.

    Guarded universals iterate only over existence-flagged elements (vacuously
    true when E is empty); raw universals iterate over the whole raw domain.
    """
    if isinstance(f, ExistsAtom):
        return eval_term(m, v, f.term) in m.existence
    if isinstance(f, RawEq):
        return eval_term(m, v, f.lhs) == eval_term(m, v, f.rhs)
    if isinstance(f, Not):
        return not eval_formula(m, v, f.body)
    if isinstance(f, Implies):
        return (not eval_formula(m, v, f.lhs)) or eval_formula(m, v, f.rhs)
    if isinstance(f, ForallE):
        return all(eval_formula(m, {**v, f.var: e}, f.body)
                   for e in sorted(m.existence))
    if isinstance(f, ForallAll):
        return all(eval_formula(m, {**v, f.var: e}, f.body)
                   for e in range(m.size))
    raise EvalContractError(f"formula not in core form: {type(f).__name__}")


def holds(m: Interpretation, f: Formula) -> bool:
    """Evaluate an arbitrary formula: close, expand, then evaluate."""
    return eval_formula(m, {}, ast.expand(ast.universal_closure(f)))


def satisfies(m: Interpretation, theory: Theory) -> bool:
    return all(holds(m, formula) for _, formula in theory.axioms)


# ---------------------------------------------------------------------------
# Three-valued evaluation (partial interpretations)
# ---------------------------------------------------------------------------

_UNASSIGNED = -1


def eval_term_partial(p: PartialInterpretation, v: Mapping[str, int],
                      t: Term) -> int:
    """Element value, or -1 when any needed cell is unassigned."""
    if isinstance(t, Var):
        try:
            return v[t.name]
        except KeyError:
            raise EvalContractError(f"unbound variable {t.name}") from None
    args = []
    for a in t.args:
        val = eval_term_partial(p, v, a)
        if val == _UNASSIGNED:
            return _UNASSIGNED
        args.append(val)
    return p.tables[t.func][table_index(p.size, args)]


def eval_partial(p: PartialInterpretation, v: Mapping[str, int],
                 f: Formula) -> TruthValue3:
    """Strong-Kleene evaluation; definite answers hold in every completion."""
    if isinstance(f, ExistsAtom):
        e = eval_term_partial(p, v, f.term)
        if e == _UNASSIGNED:
            return U3
        flag = p.existence[e]
        return U3 if flag == _UNASSIGNED else TruthValue3(flag)
    if isinstance(f, RawEq):
        lhs = eval_term_partial(p, v, f.lhs)
        if lhs == _UNASSIGNED:
            return U3
        rhs = eval_term_partial(p, v, f.rhs)
        if rhs == _UNASSIGNED:
            return U3
        return T3 if lhs == rhs else F3
    if isinstance(f, Not):
        inner = eval_partial(p, v, f.body)
        if inner is U3:
            return U3
        return F3 if inner is T3 else T3
    if isinstance(f, Implies):
        lhs = eval_partial(p, v, f.lhs)
        if lhs is F3:
            return T3
        rhs = eval_partial(p, v, f.rhs)
        if rhs is T3:
            return T3
        if lhs is T3 and rhs is F3:
            return F3
        return U3
    if isinstance(f, (ForallE, ForallAll)):
        result = T3
        for e in range(p.size):
            if isinstance(f, ForallE):
                flag = p.existence[e]
                if flag == 0:
                    continue
                inner = eval_partial(p, {**v, f.var: e}, f.body)
                if flag == _UNASSIGNED:
                    # The guard may or may not apply; only a definite False
                    # body would still leave the conjunct undecided.
                    if inner is not T3:
                        result = U3
                    continue
            else:
                inner = eval_partial(p, {**v, f.var: e}, f.body)
            if inner is F3:
                return F3
            if inner is U3:
                result = U3
        return result
    raise EvalContractError(f"formula not in core form: {type(f).__name__}")


# ---------------------------------------------------------------------------
# Model text format
# ---------------------------------------------------------------------------

def format_interpretation(m: Interpretation) -> str:
    """Render a model in the report text format, e.g.::

        size=2 E={1}
        dom: 0->0 1->1
        cod: 0->1 1->1
        comp: (0,0)->0 (0,1)->0 (1,0)->0 (1,1)->1
    """
    ex = ",".join(str(e) for e in sorted(m.existence))
    lines = [f"size={m.size} E={{{ex}}}"]
    for name, arity in m.signature.functions:
        entries = []
        for args in itertools.product(range(m.size), repeat=arity):
            value = m.lookup(name, args)
            if arity == 0:
                entries.append(f"->{value}")
            elif arity == 1:
                entries.append(f"{args[0]}->{value}")
            else:
                key = ",".join(str(a) for a in args)
                entries.append(f"({key})->{value}")
        lines.append(f"{name}: " + " ".join(entries))
    return "\n".join(lines)
