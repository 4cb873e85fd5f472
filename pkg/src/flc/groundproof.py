"""Ground refutation by exhaustive congruence-valuation enumeration.

Given finitely many ground, quantifier-free formula instances, enumerate
every partition of their subterm universe that respects function congruence,
crossed with every per-class existence assignment, and test the instances
against each.  Unsat here is a genuine semantic refutation: any
interpretation of any size restricts to such a valuation on the universe, so
if no valuation satisfies the instances, no model does.  Sat only means "no
ground refutation", not model existence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

from . import ast
from .ast import App, ExistsAtom, Formula, Implies, Not, RawEq, Term, Theory

SOUNDNESS_NOTE = (
    "unsat: no interpretation of any cardinality satisfies the instances; "
    "sat: the instances admit a congruence valuation (not a model claim)")


class GroundProblemError(ValueError):
    """Instances are not ground or not quantifier-free after expansion."""


@dataclass(frozen=True)
class GroundProblem:
    instances: tuple[Formula, ...]

    def __post_init__(self) -> None:
        for f in self.instances:
            if ast.free_vars(f):
                raise GroundProblemError(f"instance has free variables: {f}")
            core = ast.expand(f)
            if _has_quantifier(core):
                raise GroundProblemError(
                    "quantified instance cannot be ground-refuted")

    def universe(self) -> tuple[Term, ...]:
        return tuple(subterm_universe(self.instances))


def _has_quantifier(f: Formula) -> bool:
    if isinstance(f, ast.QUANTIFIERS):
        return True
    if isinstance(f, Not):
        return _has_quantifier(f.body)
    if isinstance(f, ast.BINARY_CONNECTIVES):
        return _has_quantifier(f.lhs) or _has_quantifier(f.rhs)
    return False


def subterm_universe(instances: Sequence[Formula]) -> list[Term]:
    """All subterms of all instance terms, innermost first, deduplicated in
    first-occurrence order."""
    universe: list[Term] = []
    seen: set[Term] = set()

    def visit(t: Term) -> None:
        if isinstance(t, App):
            for arg in t.args:
                visit(arg)
        if t not in seen:
            seen.add(t)
            universe.append(t)

    for f in instances:
        for t in ast._terms_of(f):
            visit(t)
    return universe


@dataclass(frozen=True)
class CongruenceValuation:
    """A partition of the universe (class ids in first-appearance order)
    plus an existence flag per class."""

    universe: tuple[Term, ...]
    class_of: tuple[int, ...]
    exists: tuple[bool, ...]

    def n_classes(self) -> int:
        return len(self.exists)

    def class_of_term(self, t: Term) -> int:
        return self.class_of[self.universe.index(t)]

    def classes(self) -> tuple[tuple[Term, ...], ...]:
        out: list[list[Term]] = [[] for _ in range(self.n_classes())]
        for t, c in zip(self.universe, self.class_of):
            out[c].append(t)
        return tuple(tuple(group) for group in out)


def is_congruent(universe: Sequence[Term], class_of: Sequence[int]) -> bool:
    """Equal-function applications with classwise-equal arguments must land
    in the same class."""
    index = {t: i for i, t in enumerate(universe)}
    apps = [t for t in universe if isinstance(t, App) and t.args]
    for s, t in itertools.combinations(apps, 2):
        if s.func != t.func:
            continue
        if all(class_of[index[a]] == class_of[index[b]]
               for a, b in zip(s.args, t.args)):
            if class_of[index[s]] != class_of[index[t]]:
                return False
    return True


def _partitions(k: int) -> Iterator[tuple[int, ...]]:
    """Restricted-growth strings over k items, lexicographic."""
    def rec(prefix: list[int], top: int):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for c in range(top + 2):
            prefix.append(c)
            yield from rec(prefix, max(top, c))
            prefix.pop()

    if k == 0:
        yield ()
        return
    yield from rec([0], 0)


def enumerate_congruence_valuations(
        universe: Sequence[Term]) -> Iterator[CongruenceValuation]:
    universe = tuple(universe)
    index = {t: i for i, t in enumerate(universe)}
    for t in universe:
        if isinstance(t, App):
            for arg in t.args:
                if arg not in index:
                    raise GroundProblemError("universe is not subterm-closed")
    for class_of in _partitions(len(universe)):
        if not is_congruent(universe, class_of):
            continue
        k = max(class_of) + 1 if class_of else 0
        for flags in itertools.product((False, True), repeat=k):
            valuation = CongruenceValuation(universe, class_of, flags)
            assert is_congruent(valuation.universe, valuation.class_of)
            yield valuation


def _eval_ground(f: Formula, index: Mapping[Term, int],
                 valuation: CongruenceValuation) -> bool:
    if isinstance(f, ExistsAtom):
        return valuation.exists[valuation.class_of[index[f.term]]]
    if isinstance(f, RawEq):
        return (valuation.class_of[index[f.lhs]]
                == valuation.class_of[index[f.rhs]])
    if isinstance(f, Not):
        return not _eval_ground(f.body, index, valuation)
    if isinstance(f, Implies):
        return (not _eval_ground(f.lhs, index, valuation)
                or _eval_ground(f.rhs, index, valuation))
    raise GroundProblemError(f"unexpected node {type(f).__name__}")


@dataclass(frozen=True)
class GroundResult:
    status: str  # "unsat" | "sat"
    witness: Optional[CongruenceValuation]
    note: str = SOUNDNESS_NOTE


def ground_refute(problem: GroundProblem) -> GroundResult:
    """Unsat iff no congruence valuation satisfies all instances."""
    universe = problem.universe()
    index = {t: i for i, t in enumerate(universe)}
    cores = [ast.expand(f) for f in problem.instances]
    for valuation in enumerate_congruence_valuations(universe):
        if all(_eval_ground(f, index, valuation) for f in cores):
            return GroundResult("sat", valuation)
    return GroundResult("unsat", None)


def instantiate(theory: Theory, label: str,
                substitution: Mapping[str, Term]) -> Formula:
    """Substitute ground terms for an axiom's free variables."""
    axiom = theory.axiom(label)
    missing = ast.free_vars(axiom) - set(substitution)
    if missing:
        raise GroundProblemError(f"unsubstituted variables: {sorted(missing)}")
    for t in substitution.values():
        if ast.term_vars(t):
            raise GroundProblemError(f"substitution term is not ground: {t}")
        ast.check_term(t, theory.signature)
    return ast.subst(axiom, substitution)
