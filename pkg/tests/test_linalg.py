from __future__ import annotations

import random
from fractions import Fraction

import pytest

from involutive.errors import DimensionMismatch, Inconsistent
from involutive.linalg import Matrix, Subspace, kernel, solve_affine, vec


def rand_matrix(rng: random.Random, m: int, n: int, span: int = 5) -> Matrix:
    return Matrix([[Fraction(rng.randint(-span, span)) for _ in range(n)] for _ in range(m)], ncols=n)


def test_kernel_identity_is_zero():
    ker = kernel(Matrix.identity(2))
    assert ker.dim == 0


def test_kernel_one_equation():
    ker = kernel(Matrix([[1, 1]]))
    assert ker.dim == 1
    assert ker.contains(vec([1, -1]))


def test_kernel_rank_two_example():
    m = Matrix([
        [1, 0, 1, 0, 1],
        [0, 1, 0, 1, 0],
        [1, 1, 1, 1, 1],
    ])
    assert m.rank() == 2
    ker = kernel(m)
    assert ker.dim == 3
    for v in ker.basis:
        assert all(x == 0 for x in m.matvec(v))


def test_rank_nullity_random():
    rng = random.Random(7)
    for _ in range(50):
        m = rand_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
        assert m.rank() + len(m.kernel()) == m.ncols
        for v in m.kernel():
            assert all(x == 0 for x in m.matvec(v))


def test_rref_is_idempotent_and_canonical():
    rng = random.Random(3)
    for _ in range(20):
        m = rand_matrix(rng, 4, 5)
        red, pivots = m.rref()
        red2, pivots2 = red.rref()
        assert red == red2 and pivots == pivots2
        for i, p in enumerate(pivots):
            assert red.rows[i][p] == 1
            assert all(red.rows[j][p] == 0 for j in range(red.nrows) if j != i)


def test_subspace_canonical_under_shuffle():
    rng = random.Random(11)
    for _ in range(30):
        gens = [[Fraction(rng.randint(-4, 4)) for _ in range(4)] for _ in range(3)]
        s1 = Subspace(4, gens)
        shuffled = gens[:]
        rng.shuffle(shuffled)
        # mixing in linear combinations must not change the stored basis
        if len(shuffled) >= 2:
            shuffled.append([a + b for a, b in zip(shuffled[0], shuffled[1])])
        s2 = Subspace(4, shuffled)
        assert s1 == s2


def test_intersect_self():
    s = Subspace(3, [[1, 2, 3], [0, 1, 1]])
    assert s.intersect(s) == s


def test_intersect_transverse_lines():
    u = Subspace(2, [[1, 0]])
    v = Subspace(2, [[0, 1]])
    assert u.intersect(v).dim == 0


def test_intersect_planes():
    u = Subspace(3, [[1, 0, 0], [0, 1, 0]])
    v = Subspace(3, [[0, 1, 0], [0, 0, 1]])
    w = u.intersect(v)
    assert w == Subspace(3, [[0, 1, 0]])


def test_intersect_dimension_formula_random():
    rng = random.Random(23)
    for _ in range(40):
        amb = rng.randint(1, 6)
        u = Subspace(amb, [[Fraction(rng.randint(-3, 3)) for _ in range(amb)] for _ in range(rng.randint(0, amb))])
        v = Subspace(amb, [[Fraction(rng.randint(-3, 3)) for _ in range(amb)] for _ in range(rng.randint(0, amb))])
        inter = u.intersect(v)
        assert inter.is_subspace_of(u) and inter.is_subspace_of(v)
        assert u.dim + v.dim - u.sum(v).dim == inter.dim


def test_intersect_ambient_mismatch():
    with pytest.raises(DimensionMismatch):
        Subspace(2, [[1, 0]]).intersect(Subspace(3, [[1, 0, 0]]))


def test_solve_identity():
    x, ker = solve_affine(Matrix.identity(2), vec([1, 2]))
    assert x == vec([1, 2]) and ker == []


def test_solve_zero_matrix():
    x, ker = solve_affine(Matrix.zeros(2, 3), vec([0, 0]))
    assert x == vec([0, 0, 0]) and len(ker) == 3


def test_solve_underdetermined():
    x, ker = solve_affine(Matrix([[1, 1]]), vec([3]))
    assert x == vec([3, 0])
    assert len(ker) == 1 and ker[0] in ([Fraction(-1), Fraction(1)], [Fraction(1), Fraction(-1)])


def test_solve_inconsistent():
    with pytest.raises(Inconsistent):
        Matrix([[1, 1], [1, 1]]).solve(vec([0, 1]))


def test_solution_set_structure_random():
    rng = random.Random(5)
    for _ in range(30):
        m = rand_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        target = [Fraction(rng.randint(-3, 3)) for _ in range(m.ncols)]
        rhs = m.matvec(target)
        x, ker = solve_affine(m, rhs)
        assert m.matvec(x) == rhs
        # target - x must be a kernel element
        diff = [a - b for a, b in zip(target, x)]
        assert Subspace(m.ncols, ker).contains(diff)


def test_inverse_round_trip():
    rng = random.Random(17)
    found = 0
    while found < 10:
        m = rand_matrix(rng, 4, 4)
        if m.rank() < 4:
            continue
        found += 1
        assert m.matmul(m.inverse()) == Matrix.identity(4)


def test_inverse_singular_raises():
    with pytest.raises(Inconsistent):
        Matrix([[1, 2], [2, 4]]).inverse()


def test_coordinates_and_contains():
    s = Subspace(3, [[1, 1, 0], [0, 0, 1]])
    c = s.coordinates(vec([2, 2, 5]))
    assert c is not None
    rebuilt = [Fraction(0)] * 3
    for co, row in zip(c, s.basis):
        rebuilt = [r + co * x for r, x in zip(rebuilt, row)]
    assert rebuilt == vec([2, 2, 5])
    assert not s.contains(vec([1, 0, 0]))


def test_fraction_strings_parse():
    m = Matrix([["1/2", "-3"], ["0", "7/5"]])
    assert m.rows[0][0] == Fraction(1, 2)
    assert m.rows[1][1] == Fraction(7, 5)
