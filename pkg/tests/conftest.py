import pytest

from termlab.algebra import FiniteAlgebra, Operation


def semilattice2() -> FiniteAlgebra:
    """Two-element meet semilattice ({0,1}, and)."""
    return FiniteAlgebra(2, [Operation("meet", 2, (0, 0, 0, 1))])


def z2_affine() -> FiniteAlgebra:
    """({0,1}, m) with m(x,y,z) = x+y+z mod 2."""
    table = tuple((x + y + z) % 2 for x in range(2) for y in range(2) for z in range(2))
    return FiniteAlgebra(2, [Operation("m", 3, table)])


def projection2() -> FiniteAlgebra:
    """({0,1}, p) whose only operation is the first binary projection."""
    return FiniteAlgebra(2, [Operation("p", 2, (0, 0, 1, 1))])


def majority2() -> FiniteAlgebra:
    """({0,1}, maj) with the ternary majority operation."""
    table = tuple(
        1 if x + y + z >= 2 else 0 for x in range(2) for y in range(2) for z in range(2)
    )
    return FiniteAlgebra(2, [Operation("maj", 3, table)])


def chain3() -> FiniteAlgebra:
    """Three-element meet semilattice (the chain 0 < 1 < 2 under min)."""
    table = tuple(min(x, y) for x in range(3) for y in range(3))
    return FiniteAlgebra(3, [Operation("min", 2, table)])


def z3_affine() -> FiniteAlgebra:
    """({0,1,2}, m) with m(x,y,z) = x-y+z mod 3."""
    table = tuple(
        (x - y + z) % 3 for x in range(3) for y in range(3) for z in range(3)
    )
    return FiniteAlgebra(3, [Operation("m", 3, table)])


CORPUS = {
    "semilattice2": semilattice2,
    "z2_affine": z2_affine,
    "projection2": projection2,
    "majority2": majority2,
    "chain3": chain3,
    "z3_affine": z3_affine,
}


@pytest.fixture
def semilattice():
    return semilattice2()


@pytest.fixture
def affine():
    return z2_affine()


@pytest.fixture
def projections_only():
    return projection2()


@pytest.fixture
def majority():
    return majority2()
