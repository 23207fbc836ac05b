"""Generated subpowers with provenance, and term-operation spaces.

`generate_closure` computes the least subuniverse of A^N containing a list of
generator tuples.  Insertion order is deterministic: breadth-first by
derivation depth, ties within a level broken by lexicographic tuple order.
Every derived tuple remembers one derivation (operation plus child ids), the
lexicographically least among those found at its depth, so witness terms can
be reconstructed and are stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebra import (
    App,
    BudgetExceeded,
    FiniteAlgebra,
    InputError,
    Operation,
    Term,
    Var,
    is_idempotent,
)

DEFAULT_TUPLE_BUDGET = 10_000_000


@dataclass(frozen=True)
class Generator:
    index: int


@dataclass(frozen=True)
class Derived:
    op: str
    children: tuple[int, ...]


class ClosureState:
    """An operation-closed set of N-tuples with per-tuple provenance."""

    def __init__(
        self,
        arity: int,
        members: Sequence[tuple[int, ...]],
        provenance: Sequence[Generator | Derived],
    ):
        self.arity = arity
        self.members = tuple(members)
        self.provenance = tuple(provenance)
        self._ids = {t: i for i, t in enumerate(self.members)}

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def contains(self, tup: tuple[int, ...]) -> bool:
        if len(tup) != self.arity:
            raise InputError(f"tuple length {len(tup)} != closure arity {self.arity}")
        return tuple(tup) in self._ids

    def id_of(self, tup: tuple[int, ...]) -> int:
        if not self.contains(tup):
            raise InputError(f"tuple {tup} is not a member of the closure")
        return self._ids[tuple(tup)]


def generate_closure(
    algebra: FiniteAlgebra,
    arity: int,
    generators: Sequence[Sequence[int]],
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> ClosureState:
    """Close the generators of A^arity under coordinatewise operations."""
    gens: list[tuple[int, ...]] = []
    for g in generators:
        t = tuple(g)
        if len(t) != arity:
            raise InputError(f"generator {t} has length {len(t)}, expected {arity}")
        for v in t:
            if not (0 <= v < algebra.size):
                raise InputError(f"generator {t}: element {v} out of range")
        gens.append(t)

    members: list[tuple[int, ...]] = []
    provenance: list[Generator | Derived] = []
    ids: dict[tuple[int, ...], int] = {}
    for i, t in enumerate(gens):
        if t not in ids:
            ids[t] = len(members)
            members.append(t)
            provenance.append(Generator(i))

    if len(members) > max_tuples:
        raise BudgetExceeded(f"tuple budget {max_tuples} exceeded by generators")

    size = algebra.size
    frontier_start = 0
    while frontier_start < len(members):
        frontier_end = len(members)
        found: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
        for op_index, op in enumerate(algebra.ops):
            for args in _combos_with_frontier(frontier_end, frontier_start, op.arity):
                derived = _apply_rows(op, size, [members[i] for i in args], arity)
                if derived in ids:
                    continue
                key = (op_index, args)
                prev = found.get(derived)
                if prev is None or key < prev:
                    found[derived] = key
        if not found:
            break
        for derived in sorted(found):
            op_index, args = found[derived]
            ids[derived] = len(members)
            members.append(derived)
            provenance.append(Derived(algebra.ops[op_index].name, args))
            if len(members) > max_tuples:
                raise BudgetExceeded(
                    f"tuple budget {max_tuples} exceeded while closing {arity}-tuples"
                )
        frontier_start = frontier_end

    return ClosureState(arity, members, provenance)


def _apply_rows(
    op: Operation, size: int, rows: list[tuple[int, ...]], width: int
) -> tuple[int, ...]:
    table = op.table
    out = []
    for c in range(width):
        index = 0
        for row in rows:
            index = index * size + row[c]
        out.append(table[index])
    return tuple(out)


def _combos_with_frontier(total: int, frontier_start: int, arity: int):
    """All arity-tuples over range(total) containing an id >= frontier_start.

    On the first pass (frontier_start == 0) this is every combination.  Each
    qualifying tuple is produced exactly once: position p is the first slot
    holding a frontier id.
    """
    if frontier_start == 0:
        yield from itertools.product(range(total), repeat=arity)
        return
    for p in range(arity):
        choices = (
            [range(frontier_start)] * p
            + [range(frontier_start, total)]
            + [range(total)] * (arity - p - 1)
        )
        yield from itertools.product(*choices)


def reconstruct_term(state: ClosureState, tup: Sequence[int]) -> Term:
    """A term over generator-indexed variables that re-evaluates to the tuple."""
    root = state.id_of(tuple(tup))
    cache: dict[int, Term] = {}

    def build(i: int) -> Term:
        if i in cache:
            return cache[i]
        prov = state.provenance[i]
        if isinstance(prov, Generator):
            term: Term = Var(prov.index)
        else:
            term = App(prov.op, tuple(build(c) for c in prov.children))
        cache[i] = term
        return term

    return build(root)


def projection_tables(size: int, k: int) -> list[tuple[int, ...]]:
    """Tables of the k projections A^k -> A, inputs in row-major order."""
    tables = []
    for i in range(k):
        stride = size ** (k - 1 - i)
        tables.append(tuple((idx // stride) % size for idx in range(size**k)))
    return tables


class TermOpSpace:
    """All k-ary term operations of an idempotent algebra, k in {2, 3}.

    Realized as the closure of the k projection tables inside A^(A^k) under
    coordinatewise basic operations; member i is the full table of one k-ary
    term operation, and provenance yields a term over variables x0..x(k-1).
    """

    def __init__(self, algebra: FiniteAlgebra, k: int, state: ClosureState):
        self.algebra = algebra
        self.k = k
        self.state = state
        self.members = state.members

    def __len__(self) -> int:
        return len(self.members)

    def id_of(self, table: Sequence[int]) -> int:
        return self.state.id_of(tuple(table))

    def projection_id(self, var: int) -> int:
        return self.state.id_of(projection_tables(self.algebra.size, self.k)[var])

    def member_term(self, member_id: int) -> Term:
        return reconstruct_term(self.state, self.members[member_id])

    def as_algebra(self, max_table: int = DEFAULT_TUPLE_BUDGET) -> FiniteAlgebra:
        """The space as a finite algebra: elements are member ids, and each
        basic operation acts coordinatewise on member tables."""
        n = len(self.members)
        ops = []
        for op in self.algebra.ops:
            if n**op.arity > max_table:
                raise BudgetExceeded(
                    f"profile algebra for {op.name!r} needs {n**op.arity} entries"
                )
            table = []
            width = len(self.members[0])
            for args in itertools.product(range(n), repeat=op.arity):
                rows = [self.members[i] for i in args]
                table.append(self.state.id_of(_apply_rows(op, self.algebra.size, rows, width)))
            ops.append(Operation(op.name, op.arity, tuple(table)))
        return FiniteAlgebra(n, ops)


def term_op_space(
    algebra: FiniteAlgebra, k: int, max_tuples: int = DEFAULT_TUPLE_BUDGET
) -> TermOpSpace:
    if k not in (2, 3):
        raise InputError(f"term_op_space supports k in {{2, 3}}, got {k}")
    if not is_idempotent(algebra):
        raise InputError("term_op_space requires an idempotent algebra")
    width = algebra.size**k
    state = generate_closure(
        algebra, width, projection_tables(algebra.size, k), max_tuples=max_tuples
    )
    return TermOpSpace(algebra, k, state)
