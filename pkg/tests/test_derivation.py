import itertools
import time

import pytest

from termlab.algebra import App, InputError, Var
from termlab.conditions import build_condition, verify_solution
from termlab.derivation import (
    GridWitnessContext,
    assemble_halved_witness,
    column_equation,
    derive_decrease_certificate,
    derive_increment_certificate,
    extract_sums,
    grid_alphabet,
    grid_equations,
    letter_name,
    replay_witness,
    row_equation,
    split_replay,
    witness_transform,
)
from termlab.semiring import (
    Certificate,
    ExpansionStep,
    Polynomial,
    apply_actions,
    compose_certificates,
    polynomial_to_text,
    replay,
    verify_certificate,
)

from conftest import semilattice2


def test_grid_alphabet_size():
    for n, m in ((1, 1), (2, 1), (2, 2), (3, 2)):
        assert len(grid_alphabet(n, m)) == n * (n + 1) * m


def test_grid_equations_2_1():
    eqs = grid_equations(2, 1)
    ab = eqs.alphabet
    assert len(eqs.equations) == 5
    # three column equations b1j + b2j, then two row equations bi1+bi2+bi3
    for j in range(1, 4):
        expected = Polynomial.of(
            [(ab.id(letter_name(1, j, 1)),), (ab.id(letter_name(2, j, 1)),)]
        )
        assert eqs.equations[column_equation(j, 2, 1)] == expected
    for i in range(1, 3):
        expected = Polynomial.of(
            [(ab.id(letter_name(i, j, 1)),) for j in range(1, 4)]
        )
        assert eqs.equations[row_equation(i, 2, 1)] == expected


def test_grid_equations_degenerate_flagged():
    eqs = grid_equations(1, 1)
    assert not eqs.all_growing()
    assert any(len(e) == 1 for e in eqs.equations)


def test_replay_of_worked_example_first_step():
    eqs = grid_equations(2, 1)
    out = replay(Polynomial.one(), [ExpansionStep(0, 0, row_equation(1, 2, 1))], eqs)
    ab = eqs.alphabet
    assert out == Polynomial.of(
        [(ab.id("b1_1_1"),), (ab.id("b1_2_1"),), (ab.id("b1_3_1"),)]
    )


def test_increment_certificate_2_1():
    eqs = grid_equations(2, 1)
    cert = derive_increment_certificate(2, 1)
    assert cert.left == Polynomial.integer(2)
    assert cert.right == Polynomial.integer(3)
    assert verify_certificate(cert, eqs)
    # the common expansion is one copy of every generator letter
    assert cert.common == Polynomial.of([(s,) for s in range(6)])


def test_decrease_certificate_2_1():
    eqs = grid_equations(2, 1)
    cert = derive_decrease_certificate(2, 1)
    assert cert.left == Polynomial.one()
    assert cert.right == Polynomial.integer(2)
    assert verify_certificate(cert, eqs)


def test_decrease_compose_with_increment_gives_1_3():
    eqs = grid_equations(2, 1)
    one_two = derive_decrease_certificate(2, 1)
    two_three = derive_increment_certificate(2, 1)
    one_three = compose_certificates(one_two, two_three, eqs)
    assert one_three.left == Polynomial.one()
    assert one_three.right == Polynomial.integer(3)
    assert verify_certificate(one_three, eqs)


@pytest.mark.parametrize("n,m", list(itertools.product((2, 3, 4), (1, 2))))
def test_decrease_certificates_verify(n, m):
    started = time.monotonic()
    eqs = grid_equations(n, m)
    cert = derive_decrease_certificate(n, m)
    assert cert.left == Polynomial.integer(n - 1)
    assert cert.right == Polynomial.integer(n)
    assert verify_certificate(cert, eqs)
    assert time.monotonic() - started < 60.0


def test_decrease_rejects_bad_parameters():
    with pytest.raises(InputError):
        derive_decrease_certificate(1, 1)
    with pytest.raises(InputError):
        derive_decrease_certificate(2, 0)


def test_split_replay_tags():
    eqs = grid_equations(2, 1)
    start = Polynomial.integer(2)
    steps = (
        ExpansionStep(0, 0, row_equation(1, 2, 1)),
        ExpansionStep(0, 0, row_equation(2, 2, 1)),
    )
    parts, actions = split_replay(start, steps, eqs)
    assert len(parts) == 2
    total = Polynomial.zero()
    for part, acts in zip(parts, actions):
        assert apply_actions(Polynomial.one(), acts, eqs) == part
        total = total + part
    assert total == replay(start, steps, eqs)


def test_extract_sums_2_1():
    eqs = grid_equations(2, 1)
    cert = derive_decrease_certificate(2, 1)
    xs, ys = extract_sums(cert, eqs)
    assert len(xs) == 1 and len(ys) == 2
    assert xs[0] == cert.common
    union = Polynomial.zero()
    for part in ys:
        union = union + part
    assert union == cert.common


def test_extract_sums_requires_unit_endpoints():
    eqs = grid_equations(2, 1)
    p = Polynomial.of([(0,)])
    bad = Certificate(p, p, (), (), p)
    with pytest.raises(InputError):
        extract_sums(bad, eqs)


def test_extract_sums_rejects_unverified():
    eqs = grid_equations(2, 1)
    bad = Certificate(
        Polynomial.one(), Polynomial.integer(2), (), (), Polynomial.integer(9)
    )
    with pytest.raises(InputError):
        extract_sums(bad, eqs)


# --- witness transform over the semilattice with all-meet grid terms.

def meet(indices):
    term = Var(indices[0])
    for i in indices[1:]:
        term = App("meet", (term, Var(i)))
    return term


@pytest.fixture
def meet_context():
    algebra = semilattice2()
    witness = {
        "f1": meet(range(3)),
        "f2": meet(range(3)),
        "g1": meet(range(2)),
        "g2": meet(range(2)),
        "g3": meet(range(2)),
    }
    return GridWitnessContext(algebra, 2, 1, witness, zero=0, one=1)


def test_context_rejects_unverified_witness():
    algebra = semilattice2()
    witness = {
        "f1": Var(0),
        "f2": Var(0),
        "g1": Var(0),
        "g2": Var(0),
        "g3": Var(0),
    }
    with pytest.raises(InputError):
        GridWitnessContext(algebra, 2, 1, witness, zero=0, one=1)


def test_coordinate_words_of_variable(meet_context):
    assert meet_context.coordinate_word(Var(0), 0) == ()
    assert meet_context.coordinate_word(Var(0), 3) is None
    assert meet_context.summary(Var(0), 1) == Polynomial.one()


def test_witness_transform_root_expansion(meet_context):
    eqs = meet_context.eqs
    step = ExpansionStep(0, 0, row_equation(1, 2, 1))
    term, width = witness_transform(meet_context, Var(0), 1, step)
    assert width == 3
    assert isinstance(term, App) and term.op == "f1"
    assert meet_context.summary(term, width) == replay(Polynomial.one(), [step], eqs)


def test_witness_transform_depth_two(meet_context):
    eqs = meet_context.eqs
    steps = [
        ExpansionStep(0, 0, row_equation(1, 2, 1)),
        ExpansionStep(0, 1, column_equation(1, 2, 1)),
    ]
    term, width = Var(0), 1
    current = Polynomial.one()
    for step in steps:
        term, width = witness_transform(meet_context, term, width, step)
        current = replay(current, [step], eqs)
    assert meet_context.summary(term, width) == current
    # coordinatewise evaluation agrees with the word elements
    for coord in range(width):
        word = meet_context.coordinate_word(term, coord)
        value = meet_context.evaluate(term, width, coord)
        expected = meet_context.word_element(word) if word is not None else 0
        assert value == expected


def test_witness_transform_identity_no_steps(meet_context):
    assert meet_context.summary(Var(0), 1) == Polynomial.one()


def test_replay_witness_matches_summary(meet_context):
    eqs = meet_context.eqs
    actions = [
        ((), 0, row_equation(1, 2, 1)),
        ((meet_context.alphabet.id("b1_2_1"),), 0, column_equation(2, 2, 1)),
    ]
    term, width = replay_witness(meet_context, actions)
    assert meet_context.summary(term, width) == apply_actions(
        Polynomial.one(), actions, eqs
    )


def test_assemble_halved_witness_toy_scale(meet_context):
    cert = derive_decrease_certificate(2, 1)
    witness, m_prime = assemble_halved_witness(meet_context, cert)
    assert set(witness) == {"f1", "g1", "g2"}
    assert m_prime >= 1
    schema = build_condition("grid", (1, m_prime))
    assert verify_solution(meet_context.base, schema, witness)
