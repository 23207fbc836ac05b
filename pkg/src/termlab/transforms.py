"""Constructive term transformations and finite-instance relation checks.

`construct_grid_from_bracket` turns a verified bracket witness into grid
terms by composing the bracket terms over grid-indexed variables.  The
remaining functions check, exhaustively over element pairs of a concrete
algebra, the identity and subpower-membership facts that drive the reduction
from paired term systems to a binary absorption term: the two matrix
displays behind the absorption lemma, the butterfly expansion, and the chain
of triples that transfers membership down to (h(0,1), 0, h(1,0)).
"""

from __future__ import annotations

import itertools
from typing import Mapping

from .algebra import (
    FiniteAlgebra,
    InputError,
    Term,
    Var,
    eval_term,
    substitute,
)
from .closure import DEFAULT_TUPLE_BUDGET, generate_closure
from .conditions import (
    BracketShape,
    build_condition,
    grid_f_position,
    grid_g_position,
    verify_solution,
)


def construct_grid_from_bracket(
    algebra: FiniteAlgebra,
    bracket_witness: Mapping[str, Term],
    shape: BracketShape,
) -> dict[str, Term]:
    """Assemble an n x (n+1) x 3 grid witness from bracket terms.

    g_1 and g_{n+1} are the pinned variable occurrences x_{1,1} and x_{n,3};
    every other g_i composes b_{2i-1} over (x_{i,1}, x_{psi(i),2}, x_{i-1,3})
    and f_i composes b_{2i} over (x_{i,1}, x_{psi'(i),2}, x_{i+1,3}).  The
    output is checked against the grid schema rather than trusted.
    """
    n = shape.n
    bracket_schema = build_condition("bracket", shape.phi)
    if not verify_solution(algebra, bracket_schema, bracket_witness):
        raise InputError("bracket witness does not verify against the bracket schema")

    m = 3
    witness: dict[str, Term] = {}
    witness["g1"] = Var(grid_g_position(1, 1, m))
    witness[f"g{n + 1}"] = Var(grid_g_position(n, 3, m))
    for i in range(2, n + 1):
        mapping = {
            0: grid_g_position(i, 1, m),
            1: grid_g_position(shape.psi(i), 2, m),
            2: grid_g_position(i - 1, 3, m),
        }
        witness[f"g{i}"] = substitute(bracket_witness[f"b{2 * i - 1}"], mapping)
    for i in range(1, n + 1):
        mapping = {
            0: grid_f_position(i, 1, m),
            1: grid_f_position(shape.psi_prime(i), 2, m),
            2: grid_f_position(i + 1, 3, m),
        }
        witness[f"f{i}"] = substitute(bracket_witness[f"b{2 * i}"], mapping)

    grid_schema = build_condition("grid", (n, m))
    if not verify_solution(algebra, grid_schema, witness):
        raise AssertionError("constructed grid terms failed verification")
    return witness


def derive_h_term(f: Term, arity: int) -> Term:
    """The binary term f(x,...,x, y,...,y) with each block of length arity/2."""
    if arity % 2 != 0:
        raise InputError(f"h-term needs an even arity, got {arity}")
    m = arity // 2
    return substitute(f, {i: (0 if i < m else 1) for i in range(arity)})


def _require_pair_witness(
    algebra: FiniteAlgebra, f: Term, g1: Term, g2: Term, m: int
) -> None:
    schema = build_condition("m1_plus_m2", (m, m))
    if not verify_solution(algebra, schema, {"f": f, "g1": g1, "g2": g2}):
        raise InputError("witness does not verify against the (m+m) schema")


def check_h_absorption(
    algebra: FiniteAlgebra,
    f: Term,
    g1: Term,
    g2: Term,
    m: int,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> bool:
    """Check both absorption displays and the butterfly expansion, all pairs.

    For each pair (x, y), with 0-role x and 1-role y, the f-image of the 2m
    displayed columns of width N = 2m+1 must equal the g2-image (and, with
    blocks swapped, the g1-image) column for column, the resulting vector
    must lie in the pendant-style closure generated by (x, x..x) and the
    (y, ..y@i..) columns, and its tail must lie in the unit-generated
    closure, which is what puts h(x,y) and h(y,x) in the membership slice.
    """
    _require_pair_witness(algebra, f, g1, g2, m)
    h = derive_h_term(f, 2 * m)
    width = 2 * m + 1

    def unit_tail(x, y, c):
        tail = [x] * (2 * m)
        tail[c] = y
        return tuple(tail)

    for x, y in itertools.product(algebra.elements(), repeat=2):
        hxy = eval_term(algebra, h, [x, y])
        hyx = eval_term(algebra, h, [y, x])

        flat = (x,) * (2 * m)
        # First display: x-columns (x, 0..0), then y-columns (y, e_c).
        cols1 = [(x, *flat)] * m + [(y, *unit_tail(x, y, c)) for c in range(m)]
        rhs1_cols = [(hxy, *unit_tail(x, y, c)) for c in range(m)]
        lhs1 = _image(algebra, f, cols1)
        if lhs1 != _image(algebra, g2, rhs1_cols):
            return False

        # Second display: y-columns (y, e_c) first, matched by g1 under h(y,x).
        cols2 = [(y, *unit_tail(x, y, c)) for c in range(m)] + [(x, *flat)] * m
        rhs2_cols = [(hyx, *unit_tail(x, y, c)) for c in range(m)]
        lhs2 = _image(algebra, f, cols2)
        if lhs2 != _image(algebra, g1, rhs2_cols):
            return False

        pendant_gens = [(x, *flat)]
        pendant_gens += [(y, *unit_tail(x, y, c)) for c in range(2 * m)]
        pendant = generate_closure(algebra, width, pendant_gens, max_tuples=max_tuples)
        units = generate_closure(
            algebra, 2 * m, [unit_tail(x, y, c) for c in range(2 * m)], max_tuples=max_tuples
        )
        for image in (lhs1, lhs2):
            if not pendant.contains(image) or not units.contains(image[1:]):
                return False

    # Butterfly: h(x,y) = h(h(x,x), h(y,y)) and h(v,u) = h(h(v,u), h(v,u)).
    for a, b in itertools.product(algebra.elements(), repeat=2):
        hab = eval_term(algebra, h, [a, b])
        haa = eval_term(algebra, h, [a, a])
        hbb = eval_term(algebra, h, [b, b])
        if eval_term(algebra, h, [haa, hbb]) != hab:
            return False
        if eval_term(algebra, h, [hab, hab]) != hab:
            return False
    return True


def _image(algebra: FiniteAlgebra, term: Term, columns) -> tuple[int, ...]:
    width = len(columns[0])
    return tuple(
        eval_term(algebra, term, [col[c] for col in columns]) for c in range(width)
    )


def check_transfer_chain(
    algebra: FiniteAlgebra,
    f: Term,
    g1: Term,
    g2: Term,
    m: int,
    max_tuples: int = DEFAULT_TUPLE_BUDGET,
) -> bool:
    """Check that every triple of the transfer chain lies in the unit closure.

    With roles 0 -> a and 1 -> b, the chain walks from g1(10..0) alongside
    f(10..0) to the final triple (h(0,1), 0, h(1,0)); each displayed triple
    evaluates the terms over a partition of argument positions, so it must be
    a member of the closure of A^3 generated by (b,a,a), (a,b,a), (a,a,b).
    """
    _require_pair_witness(algebra, f, g1, g2, m)
    h = derive_h_term(f, 2 * m)

    def val(term, positions, width, a, b):
        return eval_term(algebra, term, [b if i in positions else a for i in range(width)])

    for a, b in itertools.product(algebra.elements(), repeat=2):
        closure = generate_closure(
            algebra, 3, [(b, a, a), (a, b, a), (a, a, b)], max_tuples=max_tuples
        )

        # Chain start: g1(10..0) and f(10..0) agree by the first identity.
        if val(g1, {0}, m, a, b) != val(f, {0}, 2 * m, a, b):
            return False

        triples = []
        for j in range(1, m):
            # step 2j-1: ({1..j}, {j+1}, {j+2..}) for both terms
            g_parts = (set(range(j)), {j}, set(range(j + 1, m)))
            f_parts = (set(range(j)), {j}, set(range(j + 1, 2 * m)))
            triples.append((g1, m, g_parts))
            triples.append((f, 2 * m, f_parts))
            # step 2j: ({j+2..}, {}, {1..j+1})
            g_parts = (set(range(j + 1, m)), set(), set(range(j + 1)))
            f_parts = (set(range(j + 1, 2 * m)), set(), set(range(j + 1)))
            triples.append((g1, m, g_parts))
            triples.append((f, 2 * m, f_parts))

        for term, width, parts in triples:
            triple = tuple(val(term, part, width, a, b) for part in parts)
            if not closure.contains(triple):
                return False

        # Final displayed triple: (h(0,1), 0, h(1,0)).
        final = (
            eval_term(algebra, h, [a, b]),
            a,
            eval_term(algebra, h, [b, a]),
        )
        if not closure.contains(final):
            return False
    return True
