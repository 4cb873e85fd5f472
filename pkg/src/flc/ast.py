"""Abstract syntax for free-logic terms, formulas, signatures and theories.

Terms denote elements of a raw domain; whether a term's value "exists" is a
separate question answered by the existence predicate E.  Formulas come in a
small core (existence atoms, raw equality, negation, implication, and the two
universal quantifiers: guarded and raw) plus definitional sugar that
``expand`` removes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

DOM = "dom"
COD = "cod"
COMP = "comp"
BUILTIN_ARITIES = {DOM: 1, COD: 1, COMP: 2}


class SignatureError(ValueError):
    """Raised for ill-formed signatures or terms that violate one."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    func: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.func
        return f"{self.func}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


def dom(t: Term) -> App:
    return App(DOM, (t,))


def cod(t: Term) -> App:
    return App(COD, (t,))


def comp(s: Term, t: Term) -> App:
    return App(COMP, (s, t))


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExistsAtom:
    term: Term


@dataclass(frozen=True)
class RawEq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Implied:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class KleeneEq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class ExEq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class IdentityMorphism:
    term: Term


@dataclass(frozen=True)
class ForallE:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsE:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsAll:
    var: str
    body: "Formula"


Formula = Union[
    ExistsAtom, RawEq, Not, Implies, Or, And, Iff, Implied,
    KleeneEq, ExEq, IdentityMorphism, ForallE, ExistsE, ForallAll, ExistsAll,
]

CORE_NODES = (ExistsAtom, RawEq, Not, Implies, ForallE, ForallAll)
QUANTIFIERS = (ForallE, ExistsE, ForallAll, ExistsAll)
BINARY_CONNECTIVES = (Implies, Or, And, Iff, Implied)


# ---------------------------------------------------------------------------
# Signature and theory
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Function symbols with fixed arities; dom/cod/comp are always present."""

    extras: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        seen = dict(BUILTIN_ARITIES)
        for name, arity in self.extras:
            if not name or not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"bad function declaration {name}/{arity}")
            if name in ("E", "I"):
                raise SignatureError(f"{name} is a reserved predicate name")
            if name in seen:
                if seen[name] != arity:
                    raise SignatureError(
                        f"{name} redeclared with arity {arity} (was {seen[name]})")
                raise SignatureError(f"duplicate declaration of {name}")
            seen[name] = arity

    @property
    def functions(self) -> tuple[tuple[str, int], ...]:
        """All function symbols in canonical order: built-ins, then extras."""
        return ((DOM, 1), (COD, 1), (COMP, 2)) + self.extras

    def arity(self, name: str) -> Optional[int]:
        if name in BUILTIN_ARITIES:
            return BUILTIN_ARITIES[name]
        for fname, farity in self.extras:
            if fname == name:
                return farity
        return None

    def extend(self, *decls: tuple[str, int]) -> "Signature":
        return Signature(self.extras + tuple(decls))


@dataclass(frozen=True)
class Theory:
    """A named signature plus labelled axioms.

    Free variables of each axiom are implicitly closed with raw universal
    quantifiers (they range over the whole raw domain, existing or not).
    """

    name: str
    signature: Signature = field(default_factory=Signature)
    axioms: tuple[tuple[str, Formula], ...] = ()

    def __post_init__(self) -> None:
        labels = set()
        for label, formula in self.axioms:
            if label in labels:
                raise SignatureError(f"duplicate axiom label {label}")
            labels.add(label)
            check_formula(formula, self.signature)

    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.axioms)

    def axiom(self, label: str) -> Formula:
        for lab, formula in self.axioms:
            if lab == label:
                return formula
        raise KeyError(label)

    def without(self, *labels: str) -> "Theory":
        missing = set(labels) - set(self.labels())
        if missing:
            raise KeyError(f"no such axiom: {sorted(missing)}")
        kept = tuple((l, f) for l, f in self.axioms if l not in labels)
        return Theory(self.name, self.signature, kept)


# ---------------------------------------------------------------------------
# Well-formedness
# ---------------------------------------------------------------------------

def check_term(t: Term, sig: Signature) -> None:
    if isinstance(t, Var):
        return
    arity = sig.arity(t.func)
    if arity is None:
        raise SignatureError(f"unknown function symbol {t.func}")
    if arity != len(t.args):
        raise SignatureError(
            f"{t.func} applied to {len(t.args)} arguments, expects {arity}")
    for arg in t.args:
        check_term(arg, sig)


def check_formula(f: Formula, sig: Signature) -> None:
    for t in _terms_of(f):
        check_term(t, sig)


def _terms_of(f: Formula) -> Iterator[Term]:
    if isinstance(f, (ExistsAtom, IdentityMorphism)):
        yield f.term
    elif isinstance(f, (RawEq, KleeneEq, ExEq)):
        yield f.lhs
        yield f.rhs
    elif isinstance(f, Not):
        yield from _terms_of(f.body)
    elif isinstance(f, BINARY_CONNECTIVES):
        yield from _terms_of(f.lhs)
        yield from _terms_of(f.rhs)
    elif isinstance(f, QUANTIFIERS):
        yield from _terms_of(f.body)
    else:
        raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Macro expansion
# ---------------------------------------------------------------------------

def expand(f: Formula) -> Formula:
    """Rewrite a formula into the minimal core.

    Core nodes are existence atoms, raw equality, negation, implication and
    the two universal quantifiers.  Every other connective is replaced by its
    definitional body:

    * ``a | b``    becomes ``~a -> b``
    * ``a & b``    becomes ``~(~a | ~b)``
    * ``a <-> b``  becomes ``(a -> b) & (b -> a)``
    * ``a <- b``   becomes ``b -> a``
    * ``ex x. p`` / ``rex x. p`` become negated universals
    * ``s == t``   becomes ``E(s) | E(t) -> s = t``
    * ``s === t``  becomes ``E(s) & (E(t) & s = t)``
    * ``I(i)``     says composing with i, where defined, changes nothing
    """
    if isinstance(f, (ExistsAtom, RawEq)):
        return f
    if isinstance(f, Not):
        return Not(expand(f.body))
    if isinstance(f, Implies):
        return Implies(expand(f.lhs), expand(f.rhs))
    if isinstance(f, Or):
        return Implies(Not(expand(f.lhs)), expand(f.rhs))
    if isinstance(f, And):
        return expand(Not(Or(Not(f.lhs), Not(f.rhs))))
    if isinstance(f, Iff):
        return expand(And(Implies(f.lhs, f.rhs), Implies(f.rhs, f.lhs)))
    if isinstance(f, Implied):
        return expand(Implies(f.rhs, f.lhs))
    if isinstance(f, KleeneEq):
        return expand(Implies(Or(ExistsAtom(f.lhs), ExistsAtom(f.rhs)),
                              RawEq(f.lhs, f.rhs)))
    if isinstance(f, ExEq):
        return expand(And(ExistsAtom(f.lhs),
                          And(ExistsAtom(f.rhs), RawEq(f.lhs, f.rhs))))
    if isinstance(f, IdentityMorphism):
        w = _fresh_var(f.term)
        left = ForallE(w, Implies(ExistsAtom(comp(f.term, Var(w))),
                                  KleeneEq(comp(f.term, Var(w)), Var(w))))
        right = ForallE(w, Implies(ExistsAtom(comp(Var(w), f.term)),
                                   KleeneEq(comp(Var(w), f.term), Var(w))))
        return expand(And(left, right))
    if isinstance(f, ForallE):
        return ForallE(f.var, expand(f.body))
    if isinstance(f, ForallAll):
        return ForallAll(f.var, expand(f.body))
    if isinstance(f, ExistsE):
        return Not(ForallE(f.var, Not(expand(f.body))))
    if isinstance(f, ExistsAll):
        return Not(ForallAll(f.var, Not(expand(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def is_core(f: Formula) -> bool:
    if isinstance(f, (ExistsAtom, RawEq)):
        return True
    if isinstance(f, Not):
        return is_core(f.body)
    if isinstance(f, Implies):
        return is_core(f.lhs) and is_core(f.rhs)
    if isinstance(f, (ForallE, ForallAll)):
        return is_core(f.body)
    return False


def _fresh_var(t: Term) -> str:
    used = term_vars(t)
    for name in itertools.chain(("x",), (f"x{i}" for i in itertools.count())):
        if name not in used:
            return name
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Variables and closure
# ---------------------------------------------------------------------------

def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for arg in t.args:
        out |= term_vars(arg)
    return out


def free_vars(f: Formula) -> set[str]:
    """Variables occurring outside any binder for them."""
    if isinstance(f, (ExistsAtom, IdentityMorphism)):
        return term_vars(f.term)
    if isinstance(f, (RawEq, KleeneEq, ExEq)):
        return term_vars(f.lhs) | term_vars(f.rhs)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BINARY_CONNECTIVES):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def universal_closure(f: Formula) -> Formula:
    """Close f under raw universal quantifiers, lexicographic variable order."""
    for name in sorted(free_vars(f), reverse=True):
        f = ForallAll(name, f)
    return f


def subst_term(t: Term, env: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    return App(t.func, tuple(subst_term(a, env) for a in t.args))


def subst(f: Formula, env: Mapping[str, Term]) -> Formula:
    """Capture-avoiding is not attempted: binders shadow substituted names."""
    if isinstance(f, ExistsAtom):
        return ExistsAtom(subst_term(f.term, env))
    if isinstance(f, IdentityMorphism):
        return IdentityMorphism(subst_term(f.term, env))
    if isinstance(f, (RawEq, KleeneEq, ExEq)):
        return type(f)(subst_term(f.lhs, env), subst_term(f.rhs, env))
    if isinstance(f, Not):
        return Not(subst(f.body, env))
    if isinstance(f, BINARY_CONNECTIVES):
        return type(f)(subst(f.lhs, env), subst(f.rhs, env))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in env.items() if k != f.var}
        return type(f)(f.var, subst(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")
