"""Linear idempotent term-condition schemas and their exhaustive verifier.

A schema couples a handful of term symbols through height-1 identities: each
side is one symbol applied to a fixed word over the schema variables.  A pin
additionally forces a symbol to be a projection.  Every built-in condition
fits this fragment, which is what makes the profile-closure solver in
`solver.py` a complete decision procedure.

Built-in schema names (with their integer parameters):

    wnu(k)                weak near-unanimity, one k-ary symbol
    nu(k)                 near-unanimity; the "equals x" sides are encoded
                          through an auxiliary unary symbol pinned to x
    siggers()             one 4-ary symbol over three variables r, a, e
    glued_wnu()           3-ary and 4-ary symbols with all seven one-y
                          evaluations glued into a single chain
    weakest_idempotent()  one 6-ary symbol, two identities
    m1_plus_m2(m1, m2)    f of arity m1+m2 matching g1 and g2 blockwise
    grid(n, m)            f_1..f_n of arity (n+1)m and g_1..g_{n+1} of arity
                          nm with all pointwise one-y matches
    bracket(phi...)       2n ternary symbols along a bracketing bijection
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import App, FiniteAlgebra, InputError, Term, Var, eval_term


@dataclass(frozen=True)
class Identity:
    """symbol(left_pattern) = symbol(right_pattern), patterns over variables."""

    left_symbol: str
    left_pattern: tuple[int, ...]
    right_symbol: str
    right_pattern: tuple[int, ...]


@dataclass(frozen=True)
class ConditionSchema:
    name: str
    variables: tuple[str, ...]
    symbols: tuple[tuple[str, int], ...]
    identities: tuple[Identity, ...]
    pins: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        arities = dict(self.symbols)
        if len(arities) != len(self.symbols):
            raise InputError(f"schema {self.name!r}: duplicate symbol names")
        k = len(self.variables)
        for ident in self.identities:
            for sym, pattern in (
                (ident.left_symbol, ident.left_pattern),
                (ident.right_symbol, ident.right_pattern),
            ):
                if sym not in arities:
                    raise InputError(f"schema {self.name!r}: undeclared symbol {sym!r}")
                if len(pattern) != arities[sym]:
                    raise InputError(
                        f"schema {self.name!r}: pattern {pattern} does not match "
                        f"arity {arities[sym]} of {sym!r}"
                    )
                if any(not (0 <= v < k) for v in pattern):
                    raise InputError(f"schema {self.name!r}: pattern uses unknown variable")
        for sym, index in self.pins:
            if sym not in arities:
                raise InputError(f"schema {self.name!r}: pin on undeclared symbol {sym!r}")
            if not (0 <= index < arities[sym]):
                raise InputError(f"schema {self.name!r}: pin index {index} out of range")

    def arity(self, symbol: str) -> int:
        for name, arity in self.symbols:
            if name == symbol:
                return arity
        raise InputError(f"schema {self.name!r}: unknown symbol {symbol!r}")


@dataclass(frozen=True)
class BracketShape:
    """A fixed-point-free self-inverse bijection on 1..2n, properly nested."""

    n: int
    phi: tuple[int, ...]

    @staticmethod
    def from_array(phi: Sequence[int]) -> "BracketShape":
        ok, why = validate_bracket(phi)
        if not ok:
            raise InputError(f"invalid bracket bijection: {why}")
        return BracketShape(len(phi) // 2, tuple(phi))

    def psi(self, i: int) -> int:
        return self.phi[2 * i - 2] // 2

    def psi_prime(self, i: int) -> int:
        return (self.phi[2 * i - 1] + 1) // 2


def validate_bracket(phi: Sequence[int]) -> tuple[bool, str | None]:
    """Check a candidate bracketing bijection, naming the first violated clause."""
    phi = tuple(phi)
    size = len(phi)
    if size == 0 or size % 2 != 0:
        return False, f"length {size} is not a positive even number"
    if sorted(phi) != list(range(1, size + 1)):
        return False, f"not a bijection on 1..{size}"

    def f(i: int) -> int:
        return phi[i - 1]

    for i in range(1, size + 1):
        if f(i) == i:
            return False, f"fixed point at {i}"
    for i in range(1, size + 1):
        if f(f(i)) != i:
            return False, f"not self-inverse at {i}"
    for i in range(1, size + 1):
        for j in range(i + 1, f(i)):
            if not (i < f(j) < f(i)):
                return False, (
                    f"nesting violated: {i} < {j} < {f(i)} but phi({j}) = {f(j)}"
                )
    for i in range(1, size + 1):
        if (f(i) - i) % 2 == 0:
            return False, f"phi({i}) = {f(i)} has the same parity as {i}"
    return True, None


def _unit_pattern(arity: int, position: int, x: int = 0, y: int = 1) -> tuple[int, ...]:
    """Word with variable y at one position and x everywhere else."""
    return tuple(y if i == position else x for i in range(arity))


def _chain(symbol_patterns: list[tuple[str, tuple[int, ...]]]) -> tuple[Identity, ...]:
    """Adjacent equalities gluing a list of pattern evaluations together."""
    return tuple(
        Identity(a_sym, a_pat, b_sym, b_pat)
        for (a_sym, a_pat), (b_sym, b_pat) in zip(symbol_patterns, symbol_patterns[1:])
    )


def grid_f_position(j: int, k: int, m: int) -> int:
    """Argument slot of variable (j, k) in an f symbol; j, k are 1-based."""
    return (j - 1) * m + (k - 1)


def grid_g_position(i: int, k: int, m: int) -> int:
    """Argument slot of variable (i, k) in a g symbol; i, k are 1-based."""
    return (i - 1) * m + (k - 1)


def _build_wnu(k: int) -> ConditionSchema:
    if k < 3:
        raise InputError(f"wnu needs arity >= 3, got {k}")
    pats = [("t", _unit_pattern(k, i)) for i in range(k)]
    return ConditionSchema("wnu", ("x", "y"), (("t", k),), _chain(pats))


def _build_nu(k: int) -> ConditionSchema:
    if k < 3:
        raise InputError(f"nu needs arity >= 3, got {k}")
    idents = tuple(
        Identity("t", _unit_pattern(k, i), "d", (0,)) for i in range(k)
    )
    return ConditionSchema("nu", ("x", "y"), (("t", k), ("d", 1)), idents, (("d", 0),))


def _build_siggers() -> ConditionSchema:
    # variables r, a, e; s(r,a,r,e) = s(a,r,e,a)
    return ConditionSchema(
        "siggers",
        ("r", "a", "e"),
        (("s", 4),),
        (Identity("s", (0, 1, 0, 2), "s", (1, 0, 2, 1)),),
    )


def _build_glued_wnu() -> ConditionSchema:
    pats = [("w3", _unit_pattern(3, i)) for i in range(3)]
    pats += [("w4", _unit_pattern(4, i)) for i in range(4)]
    return ConditionSchema("glued_wnu", ("x", "y"), (("w3", 3), ("w4", 4)), _chain(pats))


def _build_weakest_idempotent() -> ConditionSchema:
    x, y = 0, 1
    pats = [
        ("t", (y, x, x, x, y, y)),
        ("t", (x, y, x, y, x, y)),
        ("t", (x, x, y, y, y, x)),
    ]
    return ConditionSchema("weakest_idempotent", ("x", "y"), (("t", 6),), _chain(pats))


def _build_m1_plus_m2(m1: int, m2: int) -> ConditionSchema:
    if m1 < 1 or m2 < 1:
        raise InputError(f"m1_plus_m2 needs m1, m2 >= 1, got ({m1}, {m2})")
    idents = [
        Identity("f", _unit_pattern(m1 + m2, i), "g1", _unit_pattern(m1, i))
        for i in range(m1)
    ]
    idents += [
        Identity("f", _unit_pattern(m1 + m2, m1 + i), "g2", _unit_pattern(m2, i))
        for i in range(m2)
    ]
    return ConditionSchema(
        "m1_plus_m2",
        ("x", "y"),
        (("f", m1 + m2), ("g1", m1), ("g2", m2)),
        tuple(idents),
    )


def _build_grid(n: int, m: int) -> ConditionSchema:
    if n < 1 or m < 1:
        raise InputError(f"grid needs n, m >= 1, got ({n}, {m})")
    symbols = [(f"f{i}", (n + 1) * m) for i in range(1, n + 1)]
    symbols += [(f"g{j}", n * m) for j in range(1, n + 2)]
    idents = []
    for i in range(1, n + 1):
        for j in range(1, n + 2):
            for k in range(1, m + 1):
                idents.append(
                    Identity(
                        f"f{i}",
                        _unit_pattern((n + 1) * m, grid_f_position(j, k, m)),
                        f"g{j}",
                        _unit_pattern(n * m, grid_g_position(i, k, m)),
                    )
                )
    return ConditionSchema("grid", ("x", "y"), tuple(symbols), tuple(idents))


def _build_bracket(shape: BracketShape) -> ConditionSchema:
    n = shape.n
    x, y, z = 0, 1, 2
    symbols = [(f"b{i}", 3) for i in range(1, 2 * n + 1)]
    idents = []
    for i in range(1, n + 1):
        idents.append(Identity(f"b{2 * i}", (y, x, x), f"b{2 * i - 1}", (y, x, x)))
    for i in range(1, n):
        idents.append(Identity(f"b{2 * i}", (x, x, y), f"b{2 * i + 1}", (x, x, y)))
    seen = set()
    for i in range(1, 2 * n + 1):
        pair = (min(i, shape.phi[i - 1]), max(i, shape.phi[i - 1]))
        if pair in seen:
            continue
        seen.add(pair)
        idents.append(Identity(f"b{pair[0]}", (x, y, x), f"b{pair[1]}", (x, y, x)))
    pins = (("b1", 0), (f"b{2 * n}", 2))
    return ConditionSchema("bracket", ("x", "y", "z"), tuple(symbols), tuple(idents), pins)


_BUILDERS = {
    "wnu": (1, _build_wnu),
    "nu": (1, _build_nu),
    "siggers": (0, _build_siggers),
    "glued_wnu": (0, _build_glued_wnu),
    "weakest_idempotent": (0, _build_weakest_idempotent),
    "m1_plus_m2": (2, _build_m1_plus_m2),
    "grid": (2, _build_grid),
}

SCHEMA_NAMES = tuple(_BUILDERS) + ("bracket",)


def build_condition(name: str, params: Sequence[int] = ()) -> ConditionSchema:
    """Construct a built-in schema; `bracket` takes the full phi array."""
    params = tuple(params)
    if name == "bracket":
        return _build_bracket(BracketShape.from_array(params))
    if name not in _BUILDERS:
        raise InputError(f"unknown schema {name!r}; known: {', '.join(SCHEMA_NAMES)}")
    argc, builder = _BUILDERS[name]
    if len(params) != argc:
        raise InputError(f"schema {name!r} takes {argc} parameter(s), got {len(params)}")
    return builder(*params)


def verify_solution(
    algebra: FiniteAlgebra, schema: ConditionSchema, witness: Mapping[str, Term]
) -> bool:
    """Exhaustively check every identity and pin under all substitutions."""
    for sym, _arity in schema.symbols:
        if sym not in witness:
            raise InputError(f"witness missing symbol {sym!r}")
    k = len(schema.variables)
    for ident in schema.identities:
        lt = witness[ident.left_symbol]
        rt = witness[ident.right_symbol]
        for assignment in itertools.product(algebra.elements(), repeat=k):
            lv = eval_term(algebra, lt, [assignment[v] for v in ident.left_pattern])
            rv = eval_term(algebra, rt, [assignment[v] for v in ident.right_pattern])
            if lv != rv:
                return False
    for sym, index in schema.pins:
        term = witness[sym]
        arity = schema.arity(sym)
        for args in itertools.product(algebra.elements(), repeat=arity):
            if eval_term(algebra, term, args) != args[index]:
                return False
    return True
