"""Finite model search over a range of domain sizes.

``find_model`` backtracks over existence flags and table cells with
three-valued pruning; every witness is re-verified by the independent
two-valued evaluator before being returned.  ``brute_force_verdict`` is a
deliberately naive enumeration oracle kept free of kernel code.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import ast, kernel, semantics
from ._compile import CompiledProblem, compile_problem
from .ast import Formula, Theory
from .semantics import Interpretation


class WitnessError(Exception):
    """A kernel witness failed independent re-verification (kernel bug)."""


DEFAULT_SCOPES = (1, 2, 3, 4)


def scopes_from_env(default: Sequence[int] = DEFAULT_SCOPES) -> tuple[int, ...]:
    """Honor FLC_SCOPE_DEFAULT ("N" or "A..B") for the default scope range."""
    raw = os.environ.get("FLC_SCOPE_DEFAULT", "").strip()
    if not raw:
        return tuple(default)
    if ".." in raw:
        lo, hi = raw.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return (int(raw),)


@dataclass(frozen=True)
class SearchConfig:
    scopes: tuple[int, ...] = DEFAULT_SCOPES
    symmetry: bool = True
    node_limit: int = 0
    time_limit: float = 0.0
    jobs: int = 1
    backend: str = "auto"

    def __post_init__(self) -> None:
        if not self.scopes or any(s < 1 for s in self.scopes):
            raise ValueError("scopes must be positive")
        if self.node_limit < 0 or self.time_limit < 0:
            raise ValueError("limits must be >= 0")
        if list(self.scopes) != sorted(self.scopes):
            raise ValueError("scopes must be ascending")


@dataclass(frozen=True)
class SearchOutcome:
    kind: str  # "sat" | "unsat" | "limit"
    model: Optional[Interpretation] = None
    scope: Optional[int] = None
    scopes_refuted: tuple[int, ...] = ()
    nodes: int = 0

    @property
    def is_sat(self) -> bool:
        return self.kind == "sat"


def _prepared_constraints(theory: Theory,
                          constraints: Sequence[Formula]) -> list[Formula]:
    out = []
    for f in [formula for _, formula in theory.axioms] + list(constraints):
        ast.check_formula(f, theory.signature)
        out.append(ast.expand(ast.universal_closure(f)))
    return out


def _verify_witness(model: Interpretation, theory: Theory,
                    constraints: Sequence[Formula]) -> None:
    if not semantics.satisfies(model, theory):
        raise WitnessError("witness does not satisfy the theory")
    for f in constraints:
        if not semantics.holds(model, f):
            raise WitnessError("witness does not satisfy a side constraint")


def find_model(theory: Theory, constraints: Sequence[Formula] = (),
               cfg: SearchConfig = SearchConfig()) -> SearchOutcome:
    """Search the configured scopes in ascending order for a model."""
    core = _prepared_constraints(theory, constraints)
    backend = kernel.get_backend(cfg.backend)
    refuted: list[int] = []
    total_nodes = 0
    for n in cfg.scopes:
        problem = compile_problem(theory.signature, n, core, cfg.symmetry)
        if cfg.jobs > 1:
            status, models, nodes = _solve_parallel(problem, cfg)
        else:
            status, models, nodes = backend.solve(
                problem, node_limit=cfg.node_limit, time_limit=cfg.time_limit)
        total_nodes += nodes
        if status == kernel.SAT:
            model = problem.cells_to_model(models[0], theory.signature)
            _verify_witness(model, theory, constraints)
            return SearchOutcome("sat", model=model, scope=n,
                                 scopes_refuted=tuple(refuted),
                                 nodes=total_nodes)
        if status == kernel.LIMIT:
            return SearchOutcome("limit", scopes_refuted=tuple(refuted),
                                 nodes=total_nodes)
        refuted.append(n)
    return SearchOutcome("unsat", scopes_refuted=tuple(refuted),
                         nodes=total_nodes)


def enumerate_models(theory: Theory, scope: int, limit: int = 0,
                     constraints: Sequence[Formula] = (),
                     backend: str = "auto") -> list[Interpretation]:
    """All models at exactly the given scope, canonical order, no symmetry
    breaking."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    core = _prepared_constraints(theory, constraints)
    problem = compile_problem(theory.signature, scope, core, symmetry=False)
    _, cell_models, _ = kernel.get_backend(backend).solve(
        problem, enumerate_all=True, model_limit=limit)
    models = []
    for cells in cell_models:
        model = problem.cells_to_model(cells, theory.signature)
        _verify_witness(model, theory, constraints)
        models.append(model)
    return models


# ---------------------------------------------------------------------------
# Parallel mode: split on the existence-prefix length
# ---------------------------------------------------------------------------

def _solve_pinned(args):
    problem, pinned, node_limit, time_limit = args
    from . import kernel as _kernel

    backend = _kernel.get_backend("auto")
    return backend.solve(problem, pinned=pinned, node_limit=node_limit,
                         time_limit=time_limit)


def _solve_parallel(problem: CompiledProblem, cfg: SearchConfig):
    """Workers take disjoint existence prefixes; the SAT/UNSAT verdict is
    deterministic (the least SAT prefix wins), witnesses may differ from
    canonical mode only in which prefix produced them."""
    n = problem.n
    tasks = []
    for k in range(n + 1):
        pinned = [(i, 1 if i < k else 0) for i in range(n)]
        tasks.append((problem, pinned, cfg.node_limit, cfg.time_limit))
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        results = list(pool.map(_solve_pinned, tasks))
    total_nodes = sum(r[2] for r in results)
    for status, models, _ in results:
        if status == kernel.SAT:
            return kernel.SAT, models, total_nodes
    if any(r[0] == kernel.LIMIT for r in results):
        return kernel.LIMIT, [], total_nodes
    return kernel.UNSAT, [], total_nodes


# ---------------------------------------------------------------------------
# Naive oracle (independent code path; no kernel, no pruning)
# ---------------------------------------------------------------------------

def all_interpretations(signature: ast.Signature, n: int):
    """Every interpretation at scope n, in canonical enumeration order."""
    funcs = signature.functions
    flag_choices = [(0, 1)] * n
    cell_choices = []
    for _, arity in funcs:
        cell_choices.extend([tuple(range(n))] * semantics.table_size(n, arity))
    for assignment in itertools.product(*(flag_choices + cell_choices)):
        flags = assignment[:n]
        tables = {}
        pos = n
        for name, arity in funcs:
            size = semantics.table_size(n, arity)
            tables[name] = tuple(assignment[pos:pos + size])
            pos += size
        yield Interpretation(n, frozenset(i for i in range(n) if flags[i]),
                             tables, signature)


def brute_force_verdict(theory: Theory, constraints: Sequence[Formula],
                        n: int) -> Optional[Interpretation]:
    """First satisfying interpretation at scope n by plain enumeration."""
    for m in all_interpretations(theory.signature, n):
        if semantics.satisfies(m, theory) and all(
                semantics.holds(m, f) for f in constraints):
            return m
    return None
