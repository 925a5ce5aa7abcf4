"""Tableaux of linear maps and their prolongation theory.

A tableau is a linear subspace A of Hom(a, b) for finite dimensional
rational vector spaces a (dimension n) and b (dimension r).  Its h-th
prolongation A^(h) is the space of symmetric tensors in b (x) S^{h+1}(a*)
all of whose contractions by vectors of a land in A^(h-1).  This module
computes prolongations exactly, the characters s_1 >= ... >= s_n attached
to a generic flag of subspaces of a, the Cartan test

    dim A^(1) <= s_1 + 2 s_2 + ... + n s_n   (equality <=> involutive),

and the least order k at which the prolongation tower becomes involutive.

Conventions.  An element of Hom(a, b) = b (x) a* is stored as a b-major
coordinate vector of length r*n (index b*n + i).  Higher prolongations use
the monomial bases of bases.py, again b-major.  Generic flags are sampled
with integer coefficients and certified by agreement of several
independent samples; a disagreement raises UnstableGenericity instead of
returning a silently wrong answer.
"""

from __future__ import annotations

import random
import threading
from fractions import Fraction

from .bases import contraction_matrix, sym_basis
from .errors import (
    CapExceeded,
    DimensionMismatch,
    InputError,
    UnstableGenericity,
)
from .linalg import Matrix, Subspace, frac, intersect

DEFAULT_MAX_DIM = 20000

_FLAG_ATTEMPTS = 4
_FLAG_BASE_BOUND = 8


class CharacterVector:
    """Characters (s_1, ..., s_n) of a tableau, with the Cartan integer.

    nu is the largest j with s_j != 0 (zero for the zero tableau) and
    principal = s_nu is the principal character.  Construction checks the
    defining inequalities b_dim >= s_1 >= ... >= s_n >= 0.
    """

    __slots__ = ("s", "nu", "principal")

    def __init__(self, s, b_dim):
        s = tuple(int(x) for x in s)
        if any(x < 0 for x in s):
            raise InputError("characters must be non-negative, got %r" % (s,))
        if any(s[j] < s[j + 1] for j in range(len(s) - 1)):
            raise InputError("characters must be non-increasing, got %r" % (s,))
        if s and s[0] > b_dim:
            raise InputError(
                "leading character %d exceeds dim b = %d" % (s[0], b_dim)
            )
        self.s = s
        nu = 0
        for j, x in enumerate(s):
            if x != 0:
                nu = j + 1
        self.nu = nu
        self.principal = s[nu - 1] if nu > 0 else 0

    def cartan_bound(self):
        """s_1 + 2 s_2 + ... + n s_n, the involutivity bound on dim A^(1)."""
        return sum((j + 1) * x for j, x in enumerate(self.s))

    def total(self):
        return sum(self.s)

    def __eq__(self, other):
        return isinstance(other, CharacterVector) and self.s == other.s

    def __repr__(self):
        return "CharacterVector(s=%r, nu=%d, principal=%d)" % (
            self.s,
            self.nu,
            self.principal,
        )


def _matrix_to_vector(m):
    out = []
    for row in m.rows:
        out.extend(row)
    return out


def _vector_to_matrix(v, r, n):
    return Matrix([list(v[b * n : (b + 1) * n]) for b in range(r)], ncols=n)


class Tableau:
    """A subspace of Hom(a, b) given by independent generator matrices.

    Each generator is an r x n Matrix (rows indexed by b, columns by a).
    Prolongations are cached per order; the cache is write-once and safe
    for concurrent readers.
    """

    def __init__(self, a_dim, b_dim, generators):
        a_dim = int(a_dim)
        b_dim = int(b_dim)
        if a_dim < 1 or b_dim < 1:
            raise InputError("tableau needs a_dim >= 1 and b_dim >= 1")
        gens = []
        for g in generators:
            if not isinstance(g, Matrix):
                g = Matrix([[frac(x) for x in row] for row in g], ncols=a_dim)
            if g.nrows != b_dim or g.ncols != a_dim:
                raise DimensionMismatch(
                    "generator is %dx%d, expected %dx%d"
                    % (g.nrows, g.ncols, b_dim, a_dim)
                )
            gens.append(g)
        self.a_dim = a_dim
        self.b_dim = b_dim
        self.generators = tuple(gens)
        span = Subspace(a_dim * b_dim, [_matrix_to_vector(g) for g in gens])
        if span.dim != len(gens):
            raise InputError(
                "generators are linearly dependent: %d matrices span a "
                "space of dimension %d" % (len(gens), span.dim)
            )
        self._levels = [span]
        self._lock = threading.Lock()

    @classmethod
    def from_vectors(cls, a_dim, b_dim, vectors):
        """Build a tableau from b-major coordinate vectors in b (x) a*."""
        mats = [_vector_to_matrix([frac(x) for x in v], b_dim, a_dim) for v in vectors]
        return cls(a_dim, b_dim, mats)

    @classmethod
    def from_json_dict(cls, data):
        try:
            a_dim = data["a_dim"]
            b_dim = data["b_dim"]
            gens = data["generators"]
        except (KeyError, TypeError) as exc:
            raise InputError("tableau JSON needs a_dim, b_dim, generators") from exc
        return cls(a_dim, b_dim, gens)

    def to_json_dict(self):
        return {
            "a_dim": self.a_dim,
            "b_dim": self.b_dim,
            "generators": [
                [[str(x) for x in row] for row in g.rows] for g in self.generators
            ],
        }

    @property
    def dim(self):
        return self._levels[0].dim

    def level(self, h, max_dim=DEFAULT_MAX_DIM):
        """A^(h) as a Subspace of b (x) S^{h+1}(a*), computed on demand."""
        if h < 0:
            raise InputError("prolongation order must be >= 0, got %d" % h)
        if h < len(self._levels):
            return self._levels[h]
        with self._lock:
            while len(self._levels) <= h:
                prev_h = len(self._levels) - 1
                nxt = _prolong_once(
                    self.a_dim, self.b_dim, self._levels[prev_h], prev_h, max_dim
                )
                self._levels.append(nxt)
        return self._levels[h]

    def prolong(self, max_dim=DEFAULT_MAX_DIM):
        """First prolongation A^(1) inside b (x) S^2(a*)."""
        return self.level(1, max_dim)

    def prolong_to(self, h, max_dim=DEFAULT_MAX_DIM):
        """Iterated prolongation A^(h); h = 0 returns the tableau's span."""
        return self.level(h, max_dim)

    def dim_at(self, h, max_dim=DEFAULT_MAX_DIM):
        return self.level(h, max_dim).dim

    def view_at_level(self, h, max_dim=DEFAULT_MAX_DIM):
        """A^(h) regarded as a tableau inside Hom(a, b (x) S^h(a*)).

        The embedding sends T to the map X -> i(X) T, which is injective,
        so a basis of A^(h) yields independent generators.
        """
        if h == 0:
            return self
        n, r = self.a_dim, self.b_dim
        lvl = self.level(h, max_dim)
        new_b = r * sym_basis(n, h).size
        contractions = [contraction_matrix(n, r, h + 1, i) for i in range(n)]
        gens = []
        for vec_t in lvl.basis:
            cols = [c.matvec(vec_t) for c in contractions]
            gens.append(
                Matrix([[cols[i][beta] for i in range(n)] for beta in range(new_b)],
                       ncols=n)
            )
        return Tableau(n, new_b, gens)


def _prolong_once(n, r, prev, prev_h, max_dim):
    """One prolongation step: from A^(prev_h) to A^(prev_h + 1).

    Solves the explicit symmetry-constraint system: writing the candidate
    contractions as i(e_i) T = sum_beta q^beta_i T_beta over a basis
    {T_beta} of the previous level, the coefficient of each monomial of
    the next level must be independent of which index is contracted away:

        sum_beta q^beta_i T_beta[b, M \\ i] = sum_beta q^beta_j T_beta[b, M \\ j]

    for all b, all next-level multi-indices M and all i < j in M.  The
    kernel of that system maps bijectively onto A^(prev_h + 1).
    """
    h1 = prev_h + 2  # symmetric degree of the next level
    sb_next = sym_basis(n, h1)
    sb_prev = sym_basis(n, h1 - 1)
    ambient = r * sb_next.size
    if ambient > max_dim:
        raise CapExceeded(
            "prolongation ambient dimension %d exceeds cap %d" % (ambient, max_dim)
        )
    d = prev.dim
    if d == 0:
        return Subspace(ambient, [])
    basis = prev.basis
    unknowns = n * d  # q index: i * d + beta
    rows = []
    for b in range(r):
        for mono in sb_next.indices:
            distinct = sorted(set(mono))
            for a_pos in range(len(distinct)):
                for b_pos in range(a_pos + 1, len(distinct)):
                    i, j = distinct[a_pos], distinct[b_pos]
                    row = [Fraction(0)] * unknowns
                    red_i = sb_prev.index_of[_remove(mono, i)]
                    red_j = sb_prev.index_of[_remove(mono, j)]
                    for beta in range(d):
                        row[i * d + beta] += basis[beta][b * sb_prev.size + red_i]
                        row[j * d + beta] -= basis[beta][b * sb_prev.size + red_j]
                    if any(x != 0 for x in row):
                        rows.append(row)
    if rows:
        sols = Matrix(rows, ncols=unknowns).kernel()
    else:
        sols = Matrix.identity(unknowns).rows
    out = []
    for q in sols:
        t = [Fraction(0)] * ambient
        for b in range(r):
            for m_idx, mono in enumerate(sb_next.indices):
                i0 = mono[0]
                red = sb_prev.index_of[_remove(mono, i0)]
                acc = Fraction(0)
                for beta in range(d):
                    c = q[i0 * d + beta]
                    if c:
                        acc += c * basis[beta][b * sb_prev.size + red]
                t[b * sb_next.size + m_idx] = acc
        out.append(t)
    return Subspace(ambient, out)


def _remove(mono, k):
    out = list(mono)
    out.remove(k)
    return tuple(out)


def prolong_via_intersection(tab, h=1, max_dim=DEFAULT_MAX_DIM):
    """Independent route to A^(h): intersect A^(h-1) (x) a* with the
    symmetric tensors inside b (x) S^{h-1+1}(a*) (x) a*.

    Kept as a cross-check oracle against the kernel-system route used by
    Tableau.level; both must return the same subspace.
    """
    if h < 1:
        raise InputError("intersection route needs h >= 1, got %d" % h)
    n, r = tab.a_dim, tab.b_dim
    prev = tab.level(h - 1, max_dim)
    sb_prev = sym_basis(n, h)
    sb_next = sym_basis(n, h + 1)
    big = r * sb_prev.size * n  # coords (b, J, i) -> (b*|S^h| + J)*n + i
    if big > max_dim:
        raise CapExceeded(
            "intersection ambient dimension %d exceeds cap %d" % (big, max_dim)
        )

    def embed(vec_t):
        # b (x) S^{h+1} -> b (x) S^h (x) a*, splitting each monomial by
        # its last tensor factor: m_M = sum_{i in M} m_{M \ i} (x) e*_i
        w = [Fraction(0)] * big
        for b in range(r):
            for m_idx, mono in enumerate(sb_next.indices):
                c = vec_t[b * sb_next.size + m_idx]
                if c == 0:
                    continue
                for i in sorted(set(mono)):
                    red = sb_prev.index_of[_remove(mono, i)]
                    w[(b * sb_prev.size + red) * n + i] += c
        return w

    tensor_basis_vectors = []
    for bv in prev.basis:
        for i in range(n):
            w = [Fraction(0)] * big
            for pos, c in enumerate(bv):
                if c != 0:
                    w[pos * n + i] = c
            tensor_basis_vectors.append(w)
    left = Subspace(big, tensor_basis_vectors)

    sym_vectors = []
    for b in range(r):
        for mono in sb_next.indices:
            vec_t = [Fraction(0)] * (r * sb_next.size)
            vec_t[b * sb_next.size + sb_next.index_of[mono]] = Fraction(1)
            sym_vectors.append(embed(vec_t))
    right = Subspace(big, sym_vectors)

    inter = intersect(left, right)
    out = []
    for w in inter.basis:
        vec_t = [Fraction(0)] * (r * sb_next.size)
        for b in range(r):
            for m_idx, mono in enumerate(sb_next.indices):
                i0 = mono[0]
                red = sb_prev.index_of[_remove(mono, i0)]
                vec_t[b * sb_next.size + m_idx] = w[(b * sb_prev.size + red) * n + i0]
        if embed(vec_t) != w:
            raise UnstableGenericity(
                "intersection produced a tensor outside the symmetric space; "
                "this indicates an internal convention error"
            )
        out.append(vec_t)
    return Subspace(r * sb_next.size, out)


def _sample_flag(rng, n, bound):
    """Random invertible n x n integer matrix; row j spans flag step j."""
    while True:
        rows = [
            [Fraction(rng.randint(-bound, bound)) for _ in range(n)]
            for _ in range(n)
        ]
        m = Matrix(rows, ncols=n)
        if m.rank() == n:
            return m


def character_partial_sums(tab, flag):
    """codim Ker(A, a_j) for j = 1..n along the given flag.

    flag is an n x n Matrix whose first j rows span the j-th flag
    subspace.  The j-th partial sum equals the rank of the evaluation map
    A -> Hom(a_j, b) restricted to those rows.
    """
    n, r = tab.a_dim, tab.b_dim
    if flag.nrows != n or flag.ncols != n:
        raise DimensionMismatch(
            "flag must be %dx%d, got %dx%d" % (n, n, flag.nrows, flag.ncols)
        )
    basis = tab.level(0).basis
    d = len(basis)
    sums = []
    rows = []
    for j in range(n):
        v = flag.rows[j]
        for b in range(r):
            row = []
            for bv in basis:
                row.append(sum(bv[b * n + i] * v[i] for i in range(n)))
            rows.append(row)
        sums.append(Matrix(rows, ncols=d).rank() if d else 0)
    return sums


def characters(tab, samples=5, seed=0):
    """Characters of the tableau from certified generic flags.

    Draws `samples` independent random flags and keeps the maximal
    codimension sequence; a result is returned only when all samples
    agree, retrying with a geometrically growing coefficient range, and
    otherwise UnstableGenericity is raised.
    """
    if samples < 1:
        raise InputError("need samples >= 1, got %d" % samples)
    n = tab.a_dim
    rng = random.Random(seed)
    bound = _FLAG_BASE_BOUND
    last = None
    for _ in range(_FLAG_ATTEMPTS):
        seqs = [
            character_partial_sums(tab, _sample_flag(rng, n, bound))
            for _ in range(samples)
        ]
        best = seqs[0]
        if all(s == best for s in seqs):
            s = [best[0]] + [best[j] - best[j - 1] for j in range(1, n)]
            cv = CharacterVector(s, tab.b_dim)
            if cv.total() != tab.dim:
                raise UnstableGenericity(
                    "character sum %d does not match dim A = %d; sampled "
                    "flags were not generic" % (cv.total(), tab.dim)
                )
            return cv
        last = seqs
        bound *= 8
    raise UnstableGenericity(
        "flag samples disagree after %d attempts (last sequences: %r); "
        "raise the sample count or the coefficient range" % (_FLAG_ATTEMPTS, last)
    )


def cartan_test(tab, samples=5, seed=0, max_dim=DEFAULT_MAX_DIM):
    """Cartan's involutivity test for a tableau.

    Returns {"involutive", "bound", "dim_A1", "characters"} where bound is
    s_1 + 2 s_2 + ... + n s_n.  The inequality dim A^(1) <= bound must
    hold for genuinely generic flags; a violation means the certified
    samples were still non-generic and raises UnstableGenericity.
    """
    cv = characters(tab, samples=samples, seed=seed)
    bound = cv.cartan_bound()
    dim_a1 = tab.prolong(max_dim).dim
    if dim_a1 > bound:
        raise UnstableGenericity(
            "dim A^(1) = %d exceeds the character bound %d; sampled flags "
            "were not generic" % (dim_a1, bound)
        )
    return {
        "involutive": dim_a1 == bound,
        "bound": bound,
        "dim_A1": dim_a1,
        "characters": cv,
    }


def involutive_index(tab, h_max, samples=5, seed=0, max_dim=DEFAULT_MAX_DIM):
    """Least order k <= h_max at which A^(k) passes the Cartan test.

    Every further prolongation up to h_max is then re-tested rather than
    assumed involutive.  Raises CapExceeded with the observed trajectory
    when no order up to h_max passes.
    """
    if h_max < 0:
        raise InputError("h_max must be >= 0, got %d" % h_max)
    rng = random.Random(seed)
    trajectory = []
    k = None
    k_chars = None
    for h in range(h_max + 1):
        view = tab.view_at_level(h, max_dim)
        res = cartan_test(
            view, samples=samples, seed=rng.randrange(2**32), max_dim=max_dim
        )
        trajectory.append(
            {
                "h": h,
                "dim": tab.dim_at(h, max_dim),
                "characters": res["characters"].s,
                "involutive": res["involutive"],
            }
        )
        if res["involutive"]:
            if k is None:
                k = h
                k_chars = res["characters"]
        elif k is not None:
            raise UnstableGenericity(
                "order %d failed the Cartan test although order %d passed; "
                "sampled flags were not generic (trajectory: %r)"
                % (h, k, trajectory)
            )
    if k is None:
        raise CapExceeded(
            "no involutive prolongation up to order %d; trajectory: %r"
            % (h_max, trajectory)
        )
    return {"k": k, "involutive_characters": k_chars, "trajectory": trajectory}
