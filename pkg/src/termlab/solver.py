"""Complete decision procedure for the height-1 condition schemas.

The key observation: for a symbol with declared patterns w_1..w_p, the tuple
of its pattern evaluations (each a k-ary operation) ranges exactly over the
subpower of TermOpSpace(k)^p generated by the p-tuples of projections coming
from the argument positions.  Applying a basic operation to r-ary terms acts
coordinatewise on those tuples, and the argument positions themselves give
the generators, so `generate_closure` over the term-operation space computes
the achievable profiles exactly.  Cross-symbol identities then become
equalities between profile coordinates, solved by backtracking.

UNSAT is only reported after that backtracking exhausts the full profile
space; hitting a budget yields the distinct EXHAUSTED outcome.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .algebra import BudgetExceeded, FiniteAlgebra, InputError, Term, Var, is_idempotent
from .closure import (
    DEFAULT_TUPLE_BUDGET,
    ClosureState,
    generate_closure,
    reconstruct_term,
    term_op_space,
)
from .conditions import ConditionSchema, build_condition, verify_solution

SAT = "sat"
UNSAT = "unsat"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Budget:
    """Hard caps; exceeding one is an outcome, never an UNSAT claim."""

    max_tuples: int = DEFAULT_TUPLE_BUDGET
    max_summands: int = 10_000
    wall_clock_s: float | None = None


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class SolveOutcome:
    status: str
    witness: dict[str, Term] | None = None
    detail: str | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    @property
    def is_unsat(self) -> bool:
        return self.status == UNSAT


@dataclass
class _SymbolSearch:
    name: str
    patterns: list[tuple[int, ...]]
    candidates: list[tuple[int, ...]]
    fixed_witness: Term | None = None
    state: ClosureState | None = None

    def witness_for(self, candidate_index: int) -> Term:
        if self.fixed_witness is not None:
            return self.fixed_witness
        assert self.state is not None
        return reconstruct_term(self.state, self.candidates[candidate_index])


def _deadline_check(deadline: float | None):
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("wall clock budget exceeded")


def _symbol_patterns(schema: ConditionSchema) -> dict[str, dict[tuple[int, ...], int]]:
    """Each symbol's distinct patterns, numbered in order of first appearance."""
    index: dict[str, dict[tuple[int, ...], int]] = {s: {} for s, _ in schema.symbols}
    for ident in schema.identities:
        for sym, pat in (
            (ident.left_symbol, ident.left_pattern),
            (ident.right_symbol, ident.right_pattern),
        ):
            index[sym].setdefault(pat, len(index[sym]))
    return index


def _build_searches(
    algebra: FiniteAlgebra,
    schema: ConditionSchema,
    budget: Budget,
    deadline: float | None,
) -> list[_SymbolSearch]:
    k = len(schema.variables)
    space = term_op_space(algebra, k, max_tuples=budget.max_tuples)
    profile_algebra = space.as_algebra(max_table=budget.max_tuples)
    proj = [space.projection_id(v) for v in range(k)]
    pattern_index = _symbol_patterns(schema)
    pins = dict(schema.pins)

    searches = []
    for sym, arity in schema.symbols:
        patterns = list(pattern_index[sym])
        generators = [tuple(proj[pat[pos]] for pat in patterns) for pos in range(arity)]
        if sym in pins:
            # A pinned symbol is the projection itself; its profile is forced.
            forced = generators[pins[sym]] if patterns else ()
            searches.append(_SymbolSearch(sym, patterns, [forced], Var(pins[sym])))
        elif not patterns:
            searches.append(_SymbolSearch(sym, [], [()], Var(0)))
        else:
            _deadline_check(deadline)
            state = generate_closure(
                profile_algebra, len(patterns), generators, max_tuples=budget.max_tuples
            )
            searches.append(_SymbolSearch(sym, patterns, list(state.members), None, state))
    return searches


def solve_condition(
    algebra: FiniteAlgebra, schema: ConditionSchema, budget: Budget = DEFAULT_BUDGET
) -> SolveOutcome:
    """Decide a schema on an idempotent algebra, with deterministic witnesses.

    The witness returned for SAT is the lexicographically least profile
    assignment under the closure insertion order (symbols in declaration
    order), so repeated runs print identical terms.
    """
    if not is_idempotent(algebra):
        raise InputError("solve_condition requires an idempotent algebra")
    deadline = None
    if budget.wall_clock_s is not None:
        deadline = time.monotonic() + budget.wall_clock_s
    try:
        return _solve(algebra, schema, budget, deadline)
    except BudgetExceeded as exc:
        return SolveOutcome(EXHAUSTED, detail=str(exc))


def _solve(
    algebra: FiniteAlgebra,
    schema: ConditionSchema,
    budget: Budget,
    deadline: float | None,
) -> SolveOutcome:
    searches = _build_searches(algebra, schema, budget, deadline)
    pattern_index = _symbol_patterns(schema)
    order = {s.name: i for i, s in enumerate(searches)}

    # Identity coordinates, grouped so each is checked as early as possible:
    # within one symbol's profile, or against an already-assigned symbol.
    intra: dict[str, list[tuple[int, int]]] = {s.name: [] for s in searches}
    inter: dict[str, list[tuple[int, str, int]]] = {s.name: [] for s in searches}
    for ident in schema.identities:
        ls, rs = ident.left_symbol, ident.right_symbol
        li = pattern_index[ls][ident.left_pattern]
        ri = pattern_index[rs][ident.right_pattern]
        if ls == rs:
            intra[ls].append((li, ri))
        elif order[ls] > order[rs]:
            inter[ls].append((li, rs, ri))
        else:
            inter[rs].append((ri, ls, li))

    assignment: dict[str, tuple[int, ...]] = {}
    chosen: dict[str, int] = {}

    def admissible(search: _SymbolSearch, profile: tuple[int, ...]) -> bool:
        for a, b in intra[search.name]:
            if profile[a] != profile[b]:
                return False
        for here, other, there in inter[search.name]:
            if profile[here] != assignment[other][there]:
                return False
        return True

    def backtrack(index: int) -> bool:
        if index == len(searches):
            return True
        _deadline_check(deadline)
        search = searches[index]
        for ci, profile in enumerate(search.candidates):
            if not admissible(search, profile):
                continue
            assignment[search.name] = profile
            chosen[search.name] = ci
            if backtrack(index + 1):
                return True
            del assignment[search.name]
            del chosen[search.name]
        return False

    if not backtrack(0):
        return SolveOutcome(UNSAT)

    witness = {s.name: s.witness_for(chosen[s.name]) for s in searches}
    if not verify_solution(algebra, schema, witness):
        raise AssertionError("internal error: SAT witness failed verification")
    return SolveOutcome(SAT, witness=witness)


def solve_by_enumeration(
    algebra: FiniteAlgebra, schema: ConditionSchema, budget: Budget = DEFAULT_BUDGET
) -> SolveOutcome:
    """Product enumeration over per-symbol profile closures, no backtracking.

    Exponential in the symbol count; used for degenerate grid parameters and
    as the reference the main solver is cross-checked against.
    """
    if not is_idempotent(algebra):
        raise InputError("solve requires an idempotent algebra")
    try:
        searches = _build_searches(algebra, schema, budget, None)
    except BudgetExceeded as exc:
        return SolveOutcome(EXHAUSTED, detail=str(exc))
    pattern_index = _symbol_patterns(schema)

    coords = []
    for ident in schema.identities:
        coords.append(
            (
                ident.left_symbol,
                pattern_index[ident.left_symbol][ident.left_pattern],
                ident.right_symbol,
                pattern_index[ident.right_symbol][ident.right_pattern],
            )
        )

    for combo in itertools.product(*(range(len(s.candidates)) for s in searches)):
        profiles = {s.name: s.candidates[ci] for s, ci in zip(searches, combo)}
        if all(profiles[ls][li] == profiles[rs][ri] for ls, li, rs, ri in coords):
            witness = {s.name: s.witness_for(ci) for s, ci in zip(searches, combo)}
            if not verify_solution(algebra, schema, witness):
                raise AssertionError("internal error: enumerated witness failed verification")
            return SolveOutcome(SAT, witness=witness)
    return SolveOutcome(UNSAT)


def find_grid_terms(
    algebra: FiniteAlgebra, n: int, m: int, budget: Budget = DEFAULT_BUDGET
) -> SolveOutcome:
    """Decide the n x (n+1) x m grid schema.

    Degenerate parameters (n*m == 1, where every g is unary) skip the
    backtracking search and enumerate candidate profiles directly.
    """
    schema = build_condition("grid", (n, m))
    if n * m == 1:
        return solve_by_enumeration(algebra, schema, budget)
    return solve_condition(algebra, schema, budget)
