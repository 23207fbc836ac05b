import itertools

import pytest

from termlab.algebra import App, InputError, Var, eval_term
from termlab.conditions import build_condition, verify_solution
from termlab.solver import (
    Budget,
    EXHAUSTED,
    SAT,
    UNSAT,
    find_grid_terms,
    solve_by_enumeration,
    solve_condition,
)

from conftest import CORPUS
from oracles import naive_schema_decision


def test_semilattice_wnu3_sat(semilattice):
    out = solve_condition(semilattice, build_condition("wnu", (3,)))
    assert out.is_sat
    assert verify_solution(semilattice, build_condition("wnu", (3,)), out.witness)


def test_affine_wnu3_sat(affine):
    schema = build_condition("wnu", (3,))
    out = solve_condition(affine, schema)
    assert out.is_sat
    assert verify_solution(affine, schema, out.witness)


def test_semilattice_3_plus_3_sat(semilattice):
    schema = build_condition("m1_plus_m2", (3, 3))
    out = solve_condition(semilattice, schema)
    assert out.is_sat
    assert verify_solution(semilattice, schema, out.witness)
    # the all-meet witness is itself valid, whatever the solver picked
    def meet(indices):
        term = Var(indices[0])
        for i in indices[1:]:
            term = App("meet", (term, Var(i)))
        return term

    hand = {"f": meet(range(6)), "g1": meet(range(3)), "g2": meet(range(3))}
    assert verify_solution(semilattice, schema, hand)


@pytest.mark.parametrize("m1,m2", list(itertools.product((1, 2, 3), repeat=2)))
def test_affine_m1_plus_m2_unsat(affine, m1, m2):
    out = solve_condition(affine, build_condition("m1_plus_m2", (m1, m2)))
    assert out.status == UNSAT


def test_projection_algebra_2_plus_2_unsat(projections_only):
    out = solve_condition(projections_only, build_condition("m1_plus_m2", (2, 2)))
    assert out.status == UNSAT


def test_semilattice_siggers_sat(semilattice):
    schema = build_condition("siggers")
    out = solve_condition(semilattice, schema)
    assert out.is_sat
    assert verify_solution(semilattice, schema, out.witness)


def test_majority_nu3_sat(majority):
    schema = build_condition("nu", (3,))
    out = solve_condition(majority, schema)
    assert out.is_sat
    assert verify_solution(majority, schema, out.witness)


def test_semilattice_nu3_unsat(semilattice):
    out = solve_condition(semilattice, build_condition("nu", (3,)))
    assert out.status == UNSAT


def test_affine_siggers_sat(affine):
    # m(x, m(x,y,z), z) style searches: the affine algebra does satisfy Siggers
    schema = build_condition("siggers")
    out = solve_condition(affine, schema)
    assert out.is_sat
    assert verify_solution(affine, schema, out.witness)


def test_bracket_on_majority_sat(majority):
    schema = build_condition("bracket", (2, 1, 4, 3))
    out = solve_condition(majority, schema)
    assert out.is_sat
    assert verify_solution(majority, schema, out.witness)
    assert out.witness["b1"] == Var(0)
    assert out.witness["b4"] == Var(2)


def test_bracket_hand_witness_on_majority(majority):
    schema = build_condition("bracket", (2, 1, 4, 3))
    maj = App("maj", (Var(0), Var(1), Var(2)))
    witness = {"b1": Var(0), "b2": Var(0), "b3": maj, "b4": Var(2)}
    assert verify_solution(majority, schema, witness)


def test_non_idempotent_rejected():
    from termlab.algebra import FiniteAlgebra, Operation

    constant = FiniteAlgebra(2, [Operation("c", 2, (0, 0, 0, 0))])
    with pytest.raises(InputError):
        solve_condition(constant, build_condition("wnu", (3,)))


def test_witness_deterministic(semilattice):
    schema = build_condition("m1_plus_m2", (2, 2))
    a = solve_condition(semilattice, schema)
    b = solve_condition(semilattice, schema)
    assert a.witness == b.witness


def test_exhausted_is_distinct_from_unsat(semilattice):
    schema = build_condition("m1_plus_m2", (3, 3))
    out = solve_condition(semilattice, schema, Budget(max_tuples=2))
    assert out.status == EXHAUSTED
    assert out.witness is None


def test_wall_clock_budget(semilattice):
    schema = build_condition("m1_plus_m2", (3, 3))
    out = solve_condition(semilattice, schema, Budget(wall_clock_s=0.0))
    assert out.status == EXHAUSTED


def test_grid_1_2_semilattice_sat(semilattice):
    out = find_grid_terms(semilattice, 1, 2)
    assert out.is_sat
    schema = build_condition("grid", (1, 2))
    assert verify_solution(semilattice, schema, out.witness)


def test_grid_1_2_affine_unsat(affine):
    assert find_grid_terms(affine, 1, 2).status == UNSAT


def test_grid_degenerate_matches_enumeration():
    for name in ("semilattice2", "z2_affine", "majority2"):
        algebra = CORPUS[name]()
        schema = build_condition("grid", (1, 1))
        direct = find_grid_terms(algebra, 1, 1)
        brute = solve_by_enumeration(algebra, schema)
        assert direct.status == brute.status


def test_grid_2_3_majority_sat(majority):
    out = find_grid_terms(majority, 2, 3)
    assert out.is_sat
    assert verify_solution(majority, build_condition("grid", (2, 3)), out.witness)


SMALL_SCHEMAS = [
    ("wnu", (3,)),
    ("wnu", (4,)),
    ("nu", (3,)),
    ("siggers", ()),
    ("glued_wnu", ()),
    ("weakest_idempotent", ()),
    ("m1_plus_m2", (1, 1)),
    ("m1_plus_m2", (2, 2)),
    ("m1_plus_m2", (1, 2)),
    ("grid", (1, 1)),
    ("bracket", (2, 1, 4, 3)),
    ("bracket", (4, 3, 2, 1)),
]


@pytest.mark.parametrize("name", ["semilattice2", "z2_affine", "projection2", "majority2"])
@pytest.mark.parametrize("schema_name,params", SMALL_SCHEMAS)
def test_solver_agrees_with_oracle(name, schema_name, params):
    algebra = CORPUS[name]()
    schema = build_condition(schema_name, params)
    out = solve_condition(algebra, schema)
    assert out.status in (SAT, UNSAT)
    assert out.is_sat == naive_schema_decision(algebra, schema)
    if out.is_sat:
        assert verify_solution(algebra, schema, out.witness)


def test_monotonicity_by_padding(semilattice, majority):
    # any (m1+m2) witness pads to (m1'+m2') by ignoring the extra arguments
    from termlab.algebra import substitute

    for algebra in (semilattice, majority):
        base = solve_condition(algebra, build_condition("m1_plus_m2", (2, 2)))
        if not base.is_sat:
            continue
        m1, m2, m1p, m2p = 2, 2, 3, 4
        shift = {m1 + i: m1p + i for i in range(m2)}
        padded = {
            "f": substitute(base.witness["f"], shift),
            "g1": base.witness["g1"],
            "g2": base.witness["g2"],
        }
        schema = build_condition("m1_plus_m2", (m1p, m2p))
        assert verify_solution(algebra, schema, padded)
