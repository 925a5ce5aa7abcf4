"""Tests for Lie algebras and Cartan decompositions."""

import random
from fractions import Fraction

import pytest

from involutive.errors import (
    BadDecomposition,
    InputError,
    JacobiViolation,
    NotRegular,
)
from involutive.liealg import (
    CartanDecomposition,
    LieAlgebra,
    abelian_algebra,
    definiteness,
    det,
    sl2_decomposition,
    sl3_decomposition,
    sl3_matrices,
    su2_algebra,
)
from involutive.linalg import Matrix


def test_det_examples():
    assert det(Matrix([[2]])) == 2
    assert det(Matrix([[1, 2], [3, 4]])) == -2
    assert det(Matrix([[0, 1], [1, 0]])) == -1
    assert det(Matrix([[1, 2], [2, 4]])) == 0
    assert det(Matrix.identity(5)) == 1


def test_det_multiplicative():
    rng = random.Random(11)
    for _ in range(10):
        a = Matrix([[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)])
        b = Matrix([[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)])
        assert det(a.matmul(b)) == det(a) * det(b)


def test_definiteness():
    assert definiteness(Matrix.identity(3)) == "positive"
    assert definiteness(Matrix.identity(3) * Fraction(-1)) == "negative"
    assert definiteness(Matrix([[1, 0], [0, -1]])) == "indefinite_or_degenerate"
    assert definiteness(Matrix([[1, 1], [1, 1]])) == "indefinite_or_degenerate"


def test_su2_brackets():
    g = su2_algebra()
    assert g.bracket([1, 0, 0], [0, 1, 0]) == [0, 0, 1]
    assert g.bracket([0, 1, 0], [0, 0, 1]) == [1, 0, 0]
    assert g.bracket([0, 0, 1], [1, 0, 0]) == [0, 1, 0]
    assert g.bracket([0, 1, 0], [1, 0, 0]) == [0, 0, -1]


def test_su2_killing():
    k = su2_algebra().killing_form()
    assert k == Matrix.identity(3) * Fraction(-2)
    assert definiteness(k) == "negative"


def test_jacobi_violation_detected():
    # cyclic sum on (e0, e1, e2) equals [e0, e1] = e2, nonzero
    with pytest.raises(JacobiViolation):
        LieAlgebra(3, [(0, 1, 2, 1), (1, 2, 1, 1)])


def test_antisymmetry_conflict_detected():
    with pytest.raises(InputError):
        LieAlgebra(2, [(0, 1, 0, 1), (1, 0, 0, 1)])
    with pytest.raises(InputError):
        LieAlgebra(2, [(0, 0, 1, 1)])


def test_killing_invariance_random():
    g = LieAlgebra.from_matrices(sl3_matrices())
    k = g.killing_form()
    rng = random.Random(5)
    for _ in range(8):
        x = [Fraction(rng.randint(-3, 3)) for _ in range(8)]
        y = [Fraction(rng.randint(-3, 3)) for _ in range(8)]
        z = [Fraction(rng.randint(-3, 3)) for _ in range(8)]
        lhs = k.matvec(z)
        bxy = g.bracket(x, y)
        left = sum(a * b for a, b in zip(bxy, lhs))
        byz = g.bracket(y, z)
        kx = k.matvec(x)
        right = sum(a * b for a, b in zip(kx, byz))
        assert left == right


def test_from_matrices_roundtrip_brackets():
    mats = sl3_matrices()
    g = LieAlgebra.from_matrices(mats)
    # [E12, E21] = H1 in the chosen basis
    e12 = [1, 0, 0, 0, 0, 0, 0, 0]
    e21 = [0, 0, 0, 1, 0, 0, 0, 0]
    assert g.bracket(e12, e21) == [0, 0, 0, 0, 0, 0, 1, 0]
    # [H1, E12] = 2 E12
    h1 = [0, 0, 0, 0, 0, 0, 1, 0]
    assert g.bracket(h1, e12) == [2, 0, 0, 0, 0, 0, 0, 0]


def test_from_matrices_not_closed():
    # E12 and E13 alone close, but E12 with H1 generates E12 only... use a
    # genuinely non-closed pair: E12 and E23 have bracket E13 outside.
    bad = [sl3_matrices()[0], sl3_matrices()[2]]
    with pytest.raises(InputError):
        LieAlgebra.from_matrices(bad)


def test_json_round_trip():
    g = su2_algebra()
    h = LieAlgebra.from_json_dict(g.to_json_dict())
    assert h.bracket([1, 0, 0], [0, 1, 0]) == [0, 0, 1]
    assert h.killing_form() == g.killing_form()


def test_sl3_decomposition_dimensions():
    cd = sl3_decomposition()
    assert cd.g0.dim == 3
    assert cd.m.dim == 5
    assert cd.a.dim == 2
    assert cd.b.dim == 3
    assert cd.p.dim == 3
    assert cd.g_a.dim == 0
    assert cd.n == 2


def test_sl3_definiteness():
    cd = sl3_decomposition()
    from involutive.liealg import _gram

    assert definiteness(_gram(cd.killing, cd.g0.basis)) == "negative"
    assert definiteness(_gram(cd.killing, cd.m.basis)) == "positive"


def test_sl3_regular_basis():
    cd = sl3_decomposition()
    cd.require_regular_basis()
    # diag(1,1,-2) = (H1 + H2) + H2 in the stored a coordinates is singular
    singular = [0, 0, 0, 0, 0, 0, 1, 2]
    assert not cd.is_regular(singular)


def test_sl2_decomposition():
    cd = sl2_decomposition()
    assert cd.g0.dim == 1
    assert cd.m.dim == 2
    assert cd.a.dim == 1
    assert cd.b.dim == 1
    assert cd.p.dim == 1
    assert cd.g_a.dim == 0
    cd.require_regular_basis()


def test_not_maximal_abelian_rejected():
    alg = LieAlgebra.from_matrices(sl3_matrices())
    so3 = [
        [1, 0, 0, -1, 0, 0, 0, 0],
        [0, 1, 0, 0, -1, 0, 0, 0],
        [0, 0, 1, 0, 0, -1, 0, 0],
    ]
    with pytest.raises(BadDecomposition):
        CartanDecomposition(alg, so3, [[0, 0, 0, 0, 0, 0, 1, 1]])


def test_bad_g0_rejected():
    alg = LieAlgebra.from_matrices(sl3_matrices())
    # span{E12 - E21, E13 - E31} is not closed under the bracket
    g0 = [
        [1, 0, 0, -1, 0, 0, 0, 0],
        [0, 1, 0, 0, -1, 0, 0, 0],
    ]
    with pytest.raises(BadDecomposition):
        CartanDecomposition(alg, g0, [[0, 0, 0, 0, 0, 0, 1, 1]])


def test_a_not_abelian_rejected():
    alg = LieAlgebra.from_matrices(sl3_matrices())
    so3 = [
        [1, 0, 0, -1, 0, 0, 0, 0],
        [0, 1, 0, 0, -1, 0, 0, 0],
        [0, 0, 1, 0, 0, -1, 0, 0],
    ]
    # symmetric off-diagonal pair does not commute
    bad_a = [
        [1, 0, 0, 1, 0, 0, 0, 0],
        [0, 1, 0, 0, 1, 0, 0, 0],
    ]
    with pytest.raises(BadDecomposition):
        CartanDecomposition(alg, so3, bad_a)


def test_abelian_algebra():
    g = abelian_algebra(4)
    assert g.bracket([1, 2, 3, 4], [4, 3, 2, 1]) == [0, 0, 0, 0]
    assert g.killing_form() == Matrix.zeros(4, 4)
