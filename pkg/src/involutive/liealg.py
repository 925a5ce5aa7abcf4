"""Finite dimensional Lie algebras over Q and Cartan decompositions.

A LieAlgebra is given by structure constants on a chosen basis; the
constructor enforces antisymmetry and the Jacobi identity exactly.  A
CartanDecomposition g = g0 (+) m is checked from the structure constants
alone: bracket relations, Killing orthogonality, definiteness of the
Killing form on both summands, and maximality of the abelian subspace
a inside m.  It derives the orthogonal complements

    b = a-perp inside m,   g_a = centralizer of a inside g0,
    p = g_a-perp inside g0,

together with the bracket inclusions [a, b] in p and [a, p] in b that
make b and p realizable as tableaux of linear maps.  Regularity of an
element A of a means ad_A maps b injectively into p.

Definiteness is decided exactly with Sylvester's criterion on leading
principal minors (fraction-free determinants), never numerically.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    BadDecomposition,
    DimensionMismatch,
    InputError,
    JacobiViolation,
    NotInImage,
    NotRegular,
)
from .linalg import Matrix, Subspace, frac, kernel, vec


def det(m):
    """Exact determinant by fraction-free Gaussian elimination."""
    if m.nrows != m.ncols:
        raise DimensionMismatch("determinant needs a square matrix")
    n = m.nrows
    rows = [list(r) for r in m.rows]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            sign = -sign
        p = rows[c][c]
        result *= p
        for i in range(c + 1, n):
            f = rows[i][c] / p
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return sign * result


def definiteness(gram):
    """Classify a symmetric Gram matrix: "positive", "negative",
    "zero" (0x0), or "indefinite_or_degenerate"."""
    n = gram.nrows
    if n == 0:
        return "zero"
    minors = []
    for k in range(1, n + 1):
        sub = Matrix([row[:k] for row in gram.rows[:k]], ncols=k)
        minors.append(det(sub))
    if all(d > 0 for d in minors):
        return "positive"
    if all((d > 0 if k % 2 == 0 else d < 0) for k, d in enumerate(minors, 1)):
        return "negative"
    return "indefinite_or_degenerate"


class LieAlgebra:
    """Structure constants c_{ij}^k on a basis e_1..e_d (0-indexed API).

    brackets input: iterable of (i, j, k, c) meaning [e_i, e_j] has
    coefficient c on e_k; the opposite pair is filled in by antisymmetry
    and conflicting duplicates are rejected.
    """

    def __init__(self, dim, brackets):
        dim = int(dim)
        if dim < 1:
            raise InputError("Lie algebra dimension must be at least 1")
        self.dim = dim
        table = {}
        for item in brackets:
            i, j, k, c = item
            i, j, k = int(i), int(j), int(k)
            c = frac(c)
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise InputError("bracket index out of range: %r" % (item,))
            if i == j:
                if c != 0:
                    raise InputError("[e_%d, e_%d] must vanish" % (i, i))
                continue
            for key, val in (((i, j, k), c), ((j, i, k), -c)):
                if key in table and table[key] != val:
                    raise InputError(
                        "conflicting structure constants for %r" % (key,)
                    )
                table[key] = val
        # adjoint matrices of the basis: ad_i[k][j] = c_{ij}^k
        self._ad = []
        for i in range(dim):
            rows = [[Fraction(0)] * dim for _ in range(dim)]
            for (a, b, k), c in table.items():
                if a == i and c:
                    rows[k][b] = c
            self._ad.append(Matrix(rows, ncols=dim))
        self._check_jacobi()

    @classmethod
    def from_matrices(cls, mats):
        """Structure constants of a matrix Lie algebra on the given basis.

        mats: independent square matrices closed under the commutator.
        """
        if not mats:
            raise InputError("need at least one basis matrix")
        mats = [m if isinstance(m, Matrix) else Matrix([[frac(x) for x in row] for row in m]) for m in mats]
        sz = mats[0].nrows
        for m in mats:
            if m.nrows != sz or m.ncols != sz:
                raise DimensionMismatch("basis matrices must share a square shape")
        flat = [[x for row in m.rows for x in row] for m in mats]
        span = Subspace(sz * sz, flat)
        if span.dim != len(mats):
            raise InputError("basis matrices are linearly dependent")
        coords_matrix = Matrix.from_columns(flat, nrows=sz * sz)
        brackets = []
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                comm = mats[i].matmul(mats[j]).sub(mats[j].matmul(mats[i]))
                target = [x for row in comm.rows for x in row]
                if not span.contains(target):
                    raise InputError(
                        "matrices are not closed under the commutator "
                        "(failure at pair (%d, %d))" % (i, j)
                    )
                coeffs = coords_matrix.solve(target)
                for k, c in enumerate(coeffs):
                    if c:
                        brackets.append((i, j, k, c))
        return cls(len(mats), brackets)

    def _check_jacobi(self):
        d = self.dim
        ident = Matrix.identity(d)
        for i in range(d):
            for j in range(i + 1, d):
                ej = ident.rows[j]
                bij = self._ad[i].matvec(ej)
                for k in range(j + 1, d):
                    ek = ident.rows[k]
                    bjk = self._ad[j].matvec(ek)
                    bik = self._ad[i].matvec(ek)
                    term1 = self._ad[i].matvec(bjk)
                    term2 = self.bracket(ej, [-x for x in bik])
                    term3 = self.bracket(ek, bij)
                    total = [a + b + c for a, b, c in zip(term1, term2, term3)]
                    if any(x != 0 for x in total):
                        raise JacobiViolation(
                            "Jacobi identity fails on basis triple "
                            "(%d, %d, %d)" % (i, j, k)
                        )

    def bracket(self, x, y):
        """[x, y] for coordinate vectors x, y."""
        x = vec(x)
        y = vec(y)
        if len(x) != self.dim or len(y) != self.dim:
            raise DimensionMismatch("vectors do not match the algebra dimension")
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if xi:
                col = self._ad[i].matvec(y)
                out = [o + xi * c for o, c in zip(out, col)]
        return out

    def ad(self, x):
        """The adjoint matrix of the coordinate vector x."""
        x = vec(x)
        rows = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for i, xi in enumerate(x):
            if xi:
                for k in range(self.dim):
                    arow = self._ad[i].rows[k]
                    row = rows[k]
                    for j in range(self.dim):
                        if arow[j]:
                            row[j] += xi * arow[j]
        return Matrix(rows, ncols=self.dim)

    def killing_form(self):
        """Gram matrix K_{ij} = trace(ad_i ad_j)."""
        d = self.dim
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                prod = self._ad[i].matmul(self._ad[j])
                row.append(sum(prod.rows[k][k] for k in range(d)))
            rows.append(row)
        return Matrix(rows, ncols=d)

    def to_json_dict(self):
        brackets = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                col = self._ad[i].matvec(Matrix.identity(self.dim).rows[j])
                for k, c in enumerate(col):
                    if c:
                        brackets.append([i, j, k, str(c)])
        return {"dim": self.dim, "brackets": brackets}

    @classmethod
    def from_json_dict(cls, data):
        try:
            return cls(data["dim"], [(i, j, k, frac(c)) for i, j, k, c in data["brackets"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("malformed Lie algebra JSON") from exc


def _centralizer(alg, space_basis, of_basis):
    """{X in span(space_basis) : [X, v] = 0 for all v in of_basis}."""
    d = alg.dim
    if not space_basis:
        return Subspace(d, [])
    if not of_basis:
        return Subspace(d, space_basis)
    cols = []
    for x in space_basis:
        col = []
        for v in of_basis:
            col.extend(alg.bracket(x, v))
        cols.append(col)
    coeff_vectors = Matrix.from_columns(cols, nrows=len(of_basis) * d).kernel()
    gens = []
    for cv in coeff_vectors:
        w = [Fraction(0)] * d
        for c, x in zip(cv, space_basis):
            if c:
                w = [wi + c * xi for wi, xi in zip(w, x)]
        gens.append(w)
    return Subspace(d, gens)


def _ortho_complement_in(killing, inside_basis, of_basis, d):
    """{X in span(inside_basis) : K(X, v) = 0 for all v in of_basis}."""
    if not inside_basis:
        return Subspace(d, [])
    rows = []
    for v in of_basis:
        kv = killing.matvec(v)
        rows.append([sum(x[t] * kv[t] for t in range(d)) for x in inside_basis])
    if not rows:
        return Subspace(d, inside_basis)
    coeff_vectors = Matrix(rows, ncols=len(inside_basis)).kernel()
    gens = []
    for cv in coeff_vectors:
        w = [Fraction(0)] * d
        for c, x in zip(cv, inside_basis):
            if c:
                w = [wi + c * xi for wi, xi in zip(w, x)]
        gens.append(w)
    return Subspace(d, gens)


def _gram(killing, basis):
    n = len(basis)
    rows = []
    for x in basis:
        kx = killing.matvec(x)
        rows.append([sum(kx[t] * y[t] for t in range(len(kx))) for y in basis])
    return Matrix(rows, ncols=n)


def _bracket_into(alg, basis1, basis2, target):
    for x in basis1:
        for y in basis2:
            if not target.contains(alg.bracket(x, y)):
                return False
    return True


class CartanDecomposition:
    """g = g0 (+) m with a maximal abelian a in m, all checked exactly.

    Derived data: b (a-perp in m), g_a (centralizer of a in g0), p
    (g_a-perp in g0), the Killing Gram matrix, and ordered bases of every
    subspace.  The ordered a_basis is kept as given because downstream
    constructions use it as the flag of independent directions.
    """

    def __init__(self, algebra, g0_basis, a_basis):
        self.algebra = algebra
        d = algebra.dim
        g0_basis = [vec(v) for v in g0_basis]
        a_basis = [vec(v) for v in a_basis]
        for v in g0_basis + a_basis:
            if len(v) != d:
                raise DimensionMismatch("subspace vector length differs from dim g")
        self.killing = algebra.killing_form()
        g0 = Subspace(d, g0_basis)
        if g0.dim != len(g0_basis):
            raise BadDecomposition("g0 basis is linearly dependent")
        m = _ortho_complement_in(self.killing, Matrix.identity(d).rows, g0.basis, d)
        if g0.dim + m.dim != d:
            raise BadDecomposition(
                "g0 and its Killing orthocomplement do not split g "
                "(the Killing form is degenerate on g0)"
            )
        if not _bracket_into(algebra, g0.basis, g0.basis, g0):
            raise BadDecomposition("[g0, g0] is not contained in g0")
        if not _bracket_into(algebra, g0.basis, m.basis, m):
            raise BadDecomposition("[g0, m] is not contained in m")
        if not _bracket_into(algebra, m.basis, m.basis, g0):
            raise BadDecomposition("[m, m] is not contained in g0")
        if definiteness(_gram(self.killing, g0.basis)) not in ("negative", "zero"):
            raise BadDecomposition("Killing form is not negative definite on g0")
        if definiteness(_gram(self.killing, m.basis)) != "positive":
            raise BadDecomposition("Killing form is not positive definite on m")
        a = Subspace(d, a_basis)
        if a.dim != len(a_basis):
            raise BadDecomposition("a basis is linearly dependent")
        if not a.is_subspace_of(m):
            raise BadDecomposition("a is not contained in m")
        for i, x in enumerate(a_basis):
            for y in a_basis[i + 1 :]:
                if any(c != 0 for c in algebra.bracket(x, y)):
                    raise BadDecomposition("a is not abelian")
        if _centralizer(algebra, m.basis, a.basis) != a:
            raise BadDecomposition("a is not maximal abelian in m")
        self.g0 = g0
        self.m = m
        self.a_basis = a_basis
        self.a = a
        self.b = _ortho_complement_in(self.killing, m.basis, a.basis, d)
        if self.b.dim + a.dim != m.dim:
            raise BadDecomposition("a and its orthocomplement do not split m")
        self.g_a = _centralizer(algebra, g0.basis, a.basis)
        self.p = _ortho_complement_in(self.killing, g0.basis, self.g_a.basis, d)
        if self.p.dim + self.g_a.dim != g0.dim:
            raise BadDecomposition("g_a and its orthocomplement do not split g0")
        if not _bracket_into(algebra, [list(v) for v in a_basis], self.b.basis, self.p):
            raise BadDecomposition("[a, b] is not contained in p")
        if not _bracket_into(algebra, [list(v) for v in a_basis], self.p.basis, self.b):
            raise BadDecomposition("[a, p] is not contained in b")

    @property
    def n(self):
        return self.a.dim

    def coords_in(self, space, v):
        c = space.coordinates(v)
        if c is None:
            raise NotInImage("vector lies outside the requested subspace")
        return c

    def coords_b(self, v):
        return self.coords_in(self.b, v)

    def coords_p(self, v):
        return self.coords_in(self.p, v)

    def is_regular(self, a_elem):
        """A in a is regular when ad_A : b -> p has zero kernel."""
        cols = [self.coords_p(self.algebra.bracket(a_elem, x)) for x in self.b.basis]
        if self.b.dim == 0:
            return True
        m = Matrix.from_columns(cols, nrows=self.p.dim)
        return m.rank() == self.b.dim

    def require_regular_basis(self):
        for idx, a_elem in enumerate(self.a_basis):
            if not self.is_regular(a_elem):
                raise NotRegular(
                    "basis vector %d of a is not regular (ad restricted to "
                    "b has a kernel)" % idx
                )


def su2_algebra():
    """Compact three dimensional algebra with [e1,e2]=e3 cyclically."""
    return LieAlgebra(3, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])


def abelian_algebra(dim):
    return LieAlgebra(dim, [])


def sl2_matrices():
    h = [[1, 0], [0, -1]]
    e = [[0, 1], [0, 0]]
    f = [[0, 0], [1, 0]]
    return [Matrix(h), Matrix(e), Matrix(f)]


def sl2_decomposition():
    """sl(2): g0 = so(2), m = symmetric traceless, a = span(H)."""
    alg = LieAlgebra.from_matrices(sl2_matrices())
    # coordinates on (H, E, F): so(2) = span(E - F), a = span(H)
    return CartanDecomposition(alg, [[0, 1, -1]], [[1, 0, 0]])


def sl3_matrices():
    """Basis E12,E13,E23,E21,E31,E32,H1,H2 of traceless 3x3 matrices."""

    def unit(i, j):
        m = [[0] * 3 for _ in range(3)]
        m[i][j] = 1
        return Matrix(m)

    mats = [unit(0, 1), unit(0, 2), unit(1, 2), unit(1, 0), unit(2, 0), unit(2, 1)]
    h1 = Matrix([[1, 0, 0], [0, -1, 0], [0, 0, 0]])
    h2 = Matrix([[0, 0, 0], [0, 1, 0], [0, 0, -1]])
    return mats + [h1, h2]


def sl3_decomposition():
    """sl(3): g0 = so(3), m = symmetric traceless, a = diagonal traceless.

    In the basis E12,E13,E23,E21,E31,E32,H1,H2 the ordered a basis is
    (diag(1,0,-1), diag(0,1,-1)) = (H1+H2, H2), both regular.
    """
    alg = LieAlgebra.from_matrices(sl3_matrices())
    so3 = [
        [1, 0, 0, -1, 0, 0, 0, 0],
        [0, 1, 0, 0, -1, 0, 0, 0],
        [0, 0, 1, 0, 0, -1, 0, 0],
    ]
    a = [
        [0, 0, 0, 0, 0, 0, 1, 1],
        [0, 0, 0, 0, 0, 0, 0, 1],
    ]
    return CartanDecomposition(alg, so3, a)
