"""Finite algebras with tabulated operations, and terms evaluated over them.

Elements of an algebra are the integers 0..size-1.  An operation is a flat
table in row-major order: the leftmost argument varies slowest, so the value
at arguments (a1, ..., ar) sits at index ((a1*size + a2)*size + ...) + ar.
This layout is also the on-disk JSON contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class InputError(ValueError):
    """Malformed input: bad tables, unknown symbols, arity mismatches."""


class BudgetExceeded(RuntimeError):
    """A configured search or memory budget was hit before an answer."""


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple[int, ...]


class FiniteAlgebra:
    """A finite set {0..size-1} with named tabulated operations."""

    def __init__(self, size: int, ops: Iterable[Operation]):
        if size < 1:
            raise InputError(f"size must be positive, got {size}")
        self.size = size
        self.ops = tuple(ops)
        self._by_name: dict[str, Operation] = {}
        for op in self.ops:
            if op.arity < 1:
                raise InputError(f"operation {op.name!r}: arity must be positive")
            if op.name in self._by_name:
                raise InputError(f"duplicate operation name {op.name!r}")
            if len(op.table) != size**op.arity:
                raise InputError(
                    f"operation {op.name!r}: table has {len(op.table)} entries, "
                    f"expected {size**op.arity}"
                )
            for value in op.table:
                if not (0 <= value < size):
                    raise InputError(f"operation {op.name!r}: table entry {value} out of range")
            self._by_name[op.name] = op

    def operation(self, name: str) -> Operation:
        try:
            return self._by_name[name]
        except KeyError:
            raise InputError(f"unknown operation name {name!r}") from None

    def apply(self, name: str, args: Sequence[int]) -> int:
        op = self.operation(name)
        if len(args) != op.arity:
            raise InputError(
                f"operation {name!r} has arity {op.arity}, got {len(args)} arguments"
            )
        index = 0
        for a in args:
            index = index * self.size + a
        return op.table[index]

    def elements(self) -> range:
        return range(self.size)

    def __repr__(self) -> str:
        names = ", ".join(f"{op.name}/{op.arity}" for op in self.ops)
        return f"FiniteAlgebra(size={self.size}, ops=[{names}])"


class Term:
    """A term tree: either a variable leaf or an operation applied to terms."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple[Term, ...]


def eval_term(algebra: FiniteAlgebra, term: Term, valuation: Sequence[int]) -> int:
    """Evaluate a term bottom-up by table lookup."""
    if isinstance(term, Var):
        if term.index >= len(valuation):
            raise InputError(
                f"valuation of length {len(valuation)} too short for variable x{term.index}"
            )
        return valuation[term.index]
    assert isinstance(term, App)
    op = algebra.operation(term.op)
    if len(term.args) != op.arity:
        raise InputError(
            f"operation {term.op!r} has arity {op.arity}, term applies it to {len(term.args)}"
        )
    index = 0
    for child in term.args:
        index = index * algebra.size + eval_term(algebra, child, valuation)
    return op.table[index]


def term_variables(term: Term) -> set[int]:
    if isinstance(term, Var):
        return {term.index}
    out: set[int] = set()
    for child in term.args:  # type: ignore[union-attr]
        out |= term_variables(child)
    return out


def substitute(term: Term, mapping: Mapping[int, int]) -> Term:
    """Rename variables; indices missing from the mapping stay as they are."""
    if isinstance(term, Var):
        return Var(mapping.get(term.index, term.index))
    assert isinstance(term, App)
    return App(term.op, tuple(substitute(child, mapping) for child in term.args))


def is_idempotent(algebra: FiniteAlgebra) -> bool:
    """True iff h(a,...,a) = a for every operation h and element a."""
    for op in algebra.ops:
        for a in algebra.elements():
            if algebra.apply(op.name, (a,) * op.arity) != a:
                return False
    return True


def power_tuple_apply(
    algebra: FiniteAlgebra, name: str, tuples: Sequence[tuple[int, ...]]
) -> tuple[int, ...]:
    """Apply an operation coordinatewise to same-length tuples."""
    if not tuples:
        raise InputError("power_tuple_apply needs at least one tuple")
    width = len(tuples[0])
    for t in tuples:
        if len(t) != width:
            raise InputError(f"tuple length mismatch: {len(t)} != {width}")
    return tuple(
        algebra.apply(name, tuple(t[c] for t in tuples)) for c in range(width)
    )


# --- s-expression term syntax: "x3" is a variable, "(op t1 t2 ...)" an application.

def term_to_sexpr(term: Term) -> str:
    if isinstance(term, Var):
        return f"x{term.index}"
    assert isinstance(term, App)
    inner = " ".join(term_to_sexpr(child) for child in term.args)
    return f"({term.op} {inner})" if inner else f"({term.op})"


def term_from_sexpr(text: str) -> Term:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> Term:
        nonlocal pos
        if pos >= len(tokens):
            raise InputError("unexpected end of term expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise InputError("unclosed '(' in term expression")
            op = tokens[pos]
            pos += 1
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse())
            if pos >= len(tokens):
                raise InputError("unclosed '(' in term expression")
            pos += 1  # consume ')'
            return App(op, tuple(args))
        if tok == ")":
            raise InputError("unexpected ')' in term expression")
        if not (tok.startswith("x") and tok[1:].isdigit()):
            raise InputError(f"bad variable token {tok!r}, expected e.g. x0")
        return Var(int(tok[1:]))

    term = parse()
    if pos != len(tokens):
        raise InputError(f"trailing tokens in term expression: {' '.join(tokens[pos:])}")
    return term


# --- JSON algebra files.

def algebra_from_dict(data: dict) -> FiniteAlgebra:
    try:
        size = data["size"]
        ops_data = data["ops"]
    except (KeyError, TypeError):
        raise InputError("algebra document must have fields 'size' and 'ops'") from None
    if not isinstance(size, int):
        raise InputError("field 'size' must be an integer")
    ops = []
    for entry in ops_data:
        try:
            ops.append(Operation(entry["name"], entry["arity"], tuple(entry["table"])))
        except (KeyError, TypeError):
            raise InputError("each op needs fields 'name', 'arity', 'table'") from None
    return FiniteAlgebra(size, ops)


def algebra_to_dict(algebra: FiniteAlgebra) -> dict:
    return {
        "size": algebra.size,
        "ops": [
            {"name": op.name, "arity": op.arity, "table": list(op.table)}
            for op in algebra.ops
        ],
    }


def load_algebra(path: str) -> FiniteAlgebra:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON ({exc})") from None
    return algebra_from_dict(data)


def save_algebra(algebra: FiniteAlgebra, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(algebra_to_dict(algebra), fh, indent=1)
        fh.write("\n")
