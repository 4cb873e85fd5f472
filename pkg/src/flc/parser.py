"""Theory DSL: concrete syntax, parser and pretty-printer.

File format (one declaration per line, ``#`` comments to end of line)::

    theory NAME
    sig f/1 c/0            # extra function symbols; dom/cod/comp built in
    axiom LABEL: FORMULA

Operators, loosest first: ``<->``, ``->`` / ``<-``, ``|``, ``&``, ``~``.
Equalities: ``=`` (raw), ``==`` (Kleene), ``===`` (existing).  Quantifiers
``all x.`` / ``ex x.`` range over existing objects, ``rall x.`` / ``rex x.``
over the whole raw domain; their body extends as far right as possible.
Composition is ``s * t`` (right associative) or ``comp(s, t)``; ``E(t)`` is
the existence atom and ``I(t)`` the identity-morphism predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import ast
from .ast import (
    And, App, ExEq, ExistsAll, ExistsAtom, ExistsE, ForallAll, ForallE,
    Formula, IdentityMorphism, Iff, Implied, Implies, KleeneEq, Not, Or,
    RawEq, Signature, Term, Theory, Var,
)

KEYWORDS = {"theory", "sig", "axiom", "all", "ex", "rall", "rex"}
RESERVED_PREDICATES = {"E", "I"}

_PUNCT = ["<->", "===", "==", "->", "<-", "=", "~", "&", "|", "(", ")",
          ",", ".", "*", ":", "/", "-"]


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __post_init__(self) -> None:
        assert self.start <= self.end

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: Optional[str] = None):
        assert message
        self.span = span
        self.message = message
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{span}: {message}{hint}")


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, punctuation literal, or EOF
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        for punct in _PUNCT:
            if text.startswith(punct, i):
                span = SourceSpan(line, col, i, i + len(punct))
                tokens.append(Token(punct, punct, span))
                i += len(punct)
                col += len(punct)
                break
        else:
            if c.isalpha() or c == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                span = SourceSpan(line, col, i, j)
                tokens.append(Token("NAME", text[i:j], span))
                col += j - i
                i = j
            elif c.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                span = SourceSpan(line, col, i, j)
                tokens.append(Token("INT", text[i:j], span))
                col += j - i
                i = j
            else:
                span = SourceSpan(line, col, i, i + 1)
                raise ParseError(span, f"unexpected character {c!r}")
    tokens.append(Token("EOF", "", SourceSpan(line, col, n, n)))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: Signature):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = signature

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.span, f"found {tok.text!r}", expected=kind)
        return self.next()

    def at_name(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "NAME" and tok.text == text

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        lhs = self.implication()
        if self.peek().kind == "<->":
            self.next()
            return Iff(lhs, self.formula())
        return lhs

    def implication(self) -> Formula:
        lhs = self.disjunction()
        tok = self.peek()
        if tok.kind == "->":
            self.next()
            return Implies(lhs, self.implication())
        if tok.kind == "<-":
            self.next()
            return Implied(lhs, self.implication())
        return lhs

    def disjunction(self) -> Formula:
        lhs = self.conjunction()
        if self.peek().kind == "|":
            self.next()
            return Or(lhs, self.disjunction())
        return lhs

    def conjunction(self) -> Formula:
        lhs = self.unary()
        if self.peek().kind == "&":
            self.next()
            return And(lhs, self.conjunction())
        return lhs

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.next()
            return Not(self.unary())
        if tok.kind == "NAME" and tok.text in ("all", "ex", "rall", "rex"):
            return self.quantifier()
        return self.atom()

    def quantifier(self) -> Formula:
        kw = self.next()
        var = self.expect("NAME")
        if var.text in KEYWORDS or var.text in RESERVED_PREDICATES:
            raise ParseError(var.span, f"{var.text!r} cannot be a variable")
        self.expect(".")
        body = self.formula()
        node = {"all": ForallE, "ex": ExistsE,
                "rall": ForallAll, "rex": ExistsAll}[kw.text]
        return node(var.text, body)

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "NAME" and tok.text in RESERVED_PREDICATES:
            name = self.next()
            self.expect("(")
            term = self.term()
            self.expect(")")
            if name.text == "E":
                return ExistsAtom(term)
            return IdentityMorphism(term)
        if tok.kind == "(":
            # Either a parenthesized formula or a parenthesized term on the
            # left of an equality; try the term reading first and back off.
            mark = self.pos
            try:
                return self.equality()
            except ParseError:
                self.pos = mark
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "NAME":
            return self.equality()
        raise ParseError(tok.span, f"found {tok.text!r}", expected="a formula")

    def equality(self) -> Formula:
        lhs = self.term()
        tok = self.peek()
        if tok.kind not in ("=", "==", "==="):
            raise ParseError(tok.span, f"found {tok.text!r}",
                             expected="'=', '==' or '==='")
        self.next()
        rhs = self.term()
        node = {"=": RawEq, "==": KleeneEq, "===": ExEq}[tok.kind]
        return node(lhs, rhs)

    # -- terms ---------------------------------------------------------------

    def term(self) -> Term:
        lhs = self.primary_term()
        if self.peek().kind == "*":
            self.next()
            return App(ast.COMP, (lhs, self.term()))
        return lhs

    def primary_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind != "NAME":
            raise ParseError(tok.span, f"found {tok.text!r}", expected="a term")
        if tok.text in KEYWORDS or tok.text in RESERVED_PREDICATES:
            raise ParseError(tok.span, f"{tok.text!r} cannot start a term")
        self.next()
        if self.peek().kind == "(":
            self.next()
            args = [self.term()]
            while self.peek().kind == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            arity = self.sig.arity(tok.text)
            if arity is None:
                raise ParseError(tok.span, f"unknown function symbol {tok.text!r}")
            if arity != len(args):
                raise ParseError(
                    tok.span,
                    f"{tok.text} applied to {len(args)} arguments, expects {arity}")
            return App(tok.text, tuple(args))
        if self.sig.arity(tok.text) == 0:
            return App(tok.text, ())
        if self.sig.arity(tok.text) is not None:
            raise ParseError(tok.span,
                             f"function symbol {tok.text!r} needs arguments")
        return Var(tok.text)

    # -- theories ------------------------------------------------------------

    def theory(self) -> Theory:
        self._expect_keyword("theory")
        name_tok = self.peek()
        if name_tok.kind != "NAME":
            raise ParseError(name_tok.span, f"found {name_tok.text!r}",
                             expected="theory name")
        self.next()
        name = name_tok.text
        while self.peek().kind == "-":  # hyphenated names like VIII-nostrict
            self.next()
            part = self.expect("NAME")
            name += "-" + part.text
        axioms: list[tuple[str, Formula]] = []
        labels: set[str] = set()
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if self.at_name("sig"):
                self.next()
                decls = []
                while self.peek().kind == "NAME":
                    fname = self.next()
                    self.expect("/")
                    arity = self.expect("INT")
                    decls.append((fname.text, int(arity.text)))
                if not decls:
                    raise ParseError(self.peek().span, "empty sig declaration")
                try:
                    self.sig = self.sig.extend(*decls)
                except ast.SignatureError as exc:
                    raise ParseError(tok.span, str(exc)) from exc
            elif self.at_name("axiom"):
                self.next()
                label = self.expect("NAME")
                self.expect(":")
                if label.text in labels:
                    raise ParseError(label.span,
                                     f"duplicate axiom label {label.text!r}")
                labels.add(label.text)
                axioms.append((label.text, self.formula()))
            else:
                raise ParseError(tok.span, f"found {tok.text!r}",
                                 expected="'sig', 'axiom' or end of file")
        try:
            return Theory(name, self.sig, tuple(axioms))
        except ast.SignatureError as exc:
            raise ParseError(self.peek().span, str(exc)) from exc

    def _expect_keyword(self, kw: str) -> None:
        tok = self.peek()
        if not self.at_name(kw):
            raise ParseError(tok.span, f"found {tok.text!r}", expected=f"'{kw}'")
        self.next()


def parse_theory(text: str) -> Theory:
    """Parse a theory source; raises ParseError with a source span."""
    return _Parser(text, Signature()).theory()


def parse_formula(text: str, signature: Optional[Signature] = None) -> Formula:
    """Parse a single formula (used for goals and side constraints)."""
    parser = _Parser(text, signature or Signature())
    formula = parser.formula()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(tok.span, f"found {tok.text!r}", expected="end of input")
    return formula


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

_LOOSEST, _IFF, _IMPL, _OR, _AND, _UNARY = range(6)


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.func == ast.COMP:
        lhs, rhs = t.args
        left = format_term(lhs)
        if isinstance(lhs, App) and lhs.func == ast.COMP:
            left = f"({left})"
        right = format_term(rhs)
        if isinstance(rhs, App) and rhs.func == ast.COMP:
            right = f"({right})"
        return f"{left}*{right}"
    if not t.args:
        return t.func
    return f"{t.func}({', '.join(format_term(a) for a in t.args)})"


def format_formula(f: Formula) -> str:
    return _fmt(f, _LOOSEST)


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, ExistsAtom):
        return f"E({format_term(f.term)})"
    if isinstance(f, IdentityMorphism):
        return f"I({format_term(f.term)})"
    if isinstance(f, RawEq):
        return f"{format_term(f.lhs)} = {format_term(f.rhs)}"
    if isinstance(f, KleeneEq):
        return f"{format_term(f.lhs)} == {format_term(f.rhs)}"
    if isinstance(f, ExEq):
        return f"{format_term(f.lhs)} === {format_term(f.rhs)}"
    if isinstance(f, Not):
        return f"~{_fmt(f.body, _UNARY)}"
    if isinstance(f, ast.QUANTIFIERS):
        kw = {ForallE: "all", ExistsE: "ex",
              ForallAll: "rall", ExistsAll: "rex"}[type(f)]
        body = f"{kw} {f.var}. {_fmt(f.body, _LOOSEST)}"
        return f"({body})" if ctx > _LOOSEST else body
    op, level = {
        Iff: ("<->", _IFF), Implies: ("->", _IMPL), Implied: ("<-", _IMPL),
        Or: ("|", _OR), And: ("&", _AND),
    }[type(f)]
    text = f"{_fmt(f.lhs, level + 1)} {op} {_fmt(f.rhs, level)}"
    return f"({text})" if ctx > level else text


def pretty_print(theory: Theory) -> str:
    """Canonical text for a theory; parses back to a structurally equal value."""
    lines = [f"theory {theory.name}"]
    if theory.signature.extras:
        decls = " ".join(f"{n}/{a}" for n, a in theory.signature.extras)
        lines.append(f"sig {decls}")
    for label, formula in theory.axioms:
        lines.append(f"axiom {label}: {format_formula(formula)}")
    return "\n".join(lines) + "\n"
