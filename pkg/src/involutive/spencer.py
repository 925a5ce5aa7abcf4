"""Spencer complexes of a tableau: differentials, cohomology, harmonic splits.

For a tableau A inside Hom(a, b) the Spencer cells are

    C^{q,p}(A) = A^(q-1) (x) Lambda^p(a*),   with A^(-1) := b,

and the Koszul-type differential delta maps C^{q,p} into C^{q-1,p+1}.
This module restricts the full-space differential of bases.py to the
cells, computes cohomology dimensions H^{q,p} = dim Ker delta - rank of
the incoming delta, decides 2-acyclicity, and produces the harmonic
decomposition

    C^{q,p} = B^{q,p} (+) H^{q,p} (+) B_{q,p}

together with the inverse map sigma_{q,p}: B^{q-1,p+1} -> B_{q,p} of the
restricted differential.

Inner products: the standard bases of a and b are declared orthonormal;
the induced inner product makes the monomial/wedge basis orthogonal with
the combinatorial norms of bases.gram_diagonal.  Cohomology dimensions do
not depend on this choice; harmonic representatives and sigma do, so the
choice is fixed here once.  The adjoint of a differential with matrix D
between cells with Gram matrices G_src, G_dst is G_src^{-1} D^T G_dst,
not the bare transpose, because the cell bases are not orthonormal.

Cell coordinates order the basis of A^(q-1) first (tableau generators for
q = 1, the canonical reduced basis of the cached prolongation for q >= 2)
and the wedge index last: index = alpha * C(n, p) + k.
"""

from __future__ import annotations

from fractions import Fraction

from .bases import GradedCoords, ext_basis, full_space_dim, gram_diagonal, koszul_delta_full
from .errors import (
    CapExceeded,
    DimensionMismatch,
    Inconsistent,
    InputError,
    NotInImage,
    StructureViolation,
)
from .linalg import Matrix, Subspace, kernel
from .tableau import DEFAULT_MAX_DIM, involutive_index


class SpencerCell:
    """One cell C^{q,p}(A) with its embedding into b (x) S^q (x) Lambda^p."""

    def __init__(self, tableau, q, p, max_dim=DEFAULT_MAX_DIM):
        if q < 0:
            raise InputError("Spencer cell needs q >= 0, got %d" % q)
        if p < 0 or p > tableau.a_dim:
            raise InputError(
                "Spencer cell needs 0 <= p <= %d, got %d" % (tableau.a_dim, p)
            )
        n, r = tableau.a_dim, tableau.b_dim
        self.tableau = tableau
        self.q = q
        self.p = p
        if q == 0:
            a_basis = Matrix.identity(r).rows
        elif q == 1:
            a_basis = []
            for g in tableau.generators:
                flat = []
                for row in g.rows:
                    flat.extend(row)
                a_basis.append(flat)
        else:
            a_basis = tableau.level(q - 1, max_dim).basis
        self.a_basis = a_basis
        wedge = ext_basis(n, p)
        self.dim = len(a_basis) * wedge.size
        full_dim = full_space_dim(n, r, q, p)
        cols = []
        for av in a_basis:
            for k in range(wedge.size):
                col = [Fraction(0)] * full_dim
                for pos, c in enumerate(av):
                    if c != 0:
                        col[pos * wedge.size + k] = c
                cols.append(col)
        self.embed = Matrix.from_columns(cols, nrows=full_dim)
        g_full = gram_diagonal(n, r, q, p)
        scaled = Matrix(
            [[g_full[i] * x for x in row] for i, row in enumerate(self.embed.rows)],
            ncols=self.dim,
        )
        self.gram = self.embed.transpose().matmul(scaled)

    def embed_coords(self, coords):
        """Cell coordinates -> coordinates in the full tensor space."""
        return self.embed.matvec(coords)

    def coordinates_of(self, full_vec):
        """Full-space vector -> cell coordinates; NotInImage if outside."""
        try:
            return self.embed.solve(full_vec)
        except Inconsistent as exc:
            raise NotInImage(
                "vector does not lie in the Spencer cell C^{%d,%d}" % (self.q, self.p)
            ) from exc


def delta(cell, max_dim=DEFAULT_MAX_DIM):
    """Matrix of the Spencer differential C^{q,p} -> C^{q-1,p+1}.

    Expressed in cell coordinates on both sides.  The image is verified
    to lie in the target cell; delta^{0,p} = 0 by convention and the
    matrix then has zero rows.
    """
    t, q, p = cell.tableau, cell.q, cell.p
    if q == 0 or p >= t.a_dim:
        return Matrix.zeros(0, cell.dim)
    target = SpencerCell(t, q - 1, p + 1, max_dim)
    d_full = koszul_delta_full(t.a_dim, t.b_dim, q, p)
    image = d_full.matmul(cell.embed)
    cols = []
    for j in range(cell.dim):
        col = [image.rows[i][j] for i in range(image.nrows)]
        try:
            cols.append(target.coordinates_of(col))
        except NotInImage as exc:
            raise StructureViolation(
                "differential of C^{%d,%d} basis vector %d left C^{%d,%d}; "
                "the tableau's prolongation tower is inconsistent"
                % (q, p, j, q - 1, p + 1)
            ) from exc
    return Matrix.from_columns(cols, nrows=target.dim)


def _delta_in(t, q, p, max_dim=DEFAULT_MAX_DIM):
    """Differential arriving at C^{q,p} from C^{q+1,p-1} (zero-source for p=0)."""
    if p == 0:
        return Matrix.zeros(SpencerCell(t, q, p, max_dim).dim, 0)
    source = SpencerCell(t, q + 1, p - 1, max_dim)
    return delta(source, max_dim)


def cohomology_dim(t, q, p, max_dim=DEFAULT_MAX_DIM):
    """dim H^{q,p}(A) = dim Ker delta^{q,p} - rank delta^{q+1,p-1}."""
    cell = SpencerCell(t, q, p, max_dim)
    d_out = delta(cell, max_dim)
    ker_dim = cell.dim - d_out.rank()
    rank_in = _delta_in(t, q, p, max_dim).rank()
    h = ker_dim - rank_in
    if h < 0:
        raise StructureViolation(
            "negative cohomology dimension at (q,p)=(%d,%d); differentials "
            "do not compose to zero" % (q, p)
        )
    return h


def two_acyclicity_report(t, q_cap, samples=5, seed=0, max_dim=DEFAULT_MAX_DIM):
    """H^{q,2} for q = 1..max(q_cap, k+1), with k the involutive index.

    The involutive index is included when it is computable within the
    same cap; the report records exactly which range was verified.
    """
    if q_cap < 1:
        raise InputError("need q_cap >= 1, got %d" % q_cap)
    k = None
    try:
        k = involutive_index(t, h_max=q_cap + 1, samples=samples, seed=seed,
                             max_dim=max_dim)["k"]
    except CapExceeded:
        pass
    top = max(q_cap, k + 1) if k is not None else q_cap
    dims = {}
    for q in range(1, top + 1):
        dims[q] = cohomology_dim(t, q, 2, max_dim)
    return {
        "two_acyclic": all(v == 0 for v in dims.values()),
        "checked_q_range": [1, top],
        "H_q2_dims": dims,
        "involutive_index": k,
    }


def is_two_acyclic(t, q_cap, samples=5, seed=0, max_dim=DEFAULT_MAX_DIM):
    """True iff H^{q,2}(A) = 0 for q = 1..max(q_cap, k+1)."""
    return two_acyclicity_report(t, q_cap, samples, seed, max_dim)["two_acyclic"]


def codifferential(t, q, p, max_dim=DEFAULT_MAX_DIM):
    """Matrix of delta*_{q,p}: C^{q-1,p+1} -> C^{q,p}, the Gram adjoint of
    the outgoing differential of C^{q,p}.  Its image is B_{q,p}."""
    if q < 1:
        raise InputError("codifferential needs q >= 1, got %d" % q)
    if p >= t.a_dim:
        raise InputError("codifferential needs p < a_dim, got p = %d" % p)
    cell = SpencerCell(t, q, p, max_dim)
    dst = SpencerCell(t, q - 1, p + 1, max_dim)
    if cell.dim == 0 or dst.dim == 0:
        return Matrix.zeros(cell.dim, dst.dim)
    d = delta(cell, max_dim)
    return _adjoint(d, cell.gram, dst.gram)


def _image_subspace(m):
    return Subspace(m.nrows, m.transpose().rows)


def _adjoint(d, gram_src, gram_dst):
    """Adjoint of d: src -> dst with respect to the cell Gram matrices."""
    return gram_src.inverse().matmul(d.transpose().matmul(gram_dst))


def _orthogonal(u, v, gram):
    for x in u.basis:
        gx = gram.matvec(x)
        for y in v.basis:
            if sum(a * b for a, b in zip(gx, y)) != 0:
                return False
    return True


class HarmonicSplit:
    """Harmonic decomposition of one Spencer cell.

    Fields (all in cell coordinates of C^{q,p}):
      b_up      image of delta from C^{q+1,p-1}            (B^{q,p})
      harmonic  Ker delta  intersected with  Ker adjoint   (H^{q,p})
      b_down    image of the adjoint of the outgoing delta (B_{q,p})
      sigma_matrix  matrix of the inverse of delta restricted to b_down,
                written in the bases (image of delta in C^{q-1,p+1}) ->
                (basis of b_down); square of size dim b_down

    Construction verifies the decomposition identities exactly:
    pairwise orthogonality, Ker delta = B (+) H, Ker delta* = H (+) B_,
    dim H = dim H^{q,p}, and delta o sigma = identity on the image.
    """

    def __init__(self, tableau, q, p, max_dim=DEFAULT_MAX_DIM):
        self.tableau = tableau
        self.q = q
        self.p = p
        cell = SpencerCell(tableau, q, p, max_dim)
        self.cell = cell
        n = tableau.a_dim
        d_out = delta(cell, max_dim)
        # incoming differential and its adjoint (for Ker delta*)
        if p >= 1:
            src = SpencerCell(tableau, q + 1, p - 1, max_dim)
            d_in = delta(src, max_dim)
            if src.dim and cell.dim:
                adj_in = _adjoint(d_in, src.gram, cell.gram)
            else:
                adj_in = Matrix.zeros(0, cell.dim)
        else:
            d_in = Matrix.zeros(cell.dim, 0)
            adj_in = Matrix.zeros(0, cell.dim)
        # adjoint of the outgoing differential (for B_{q,p})
        if q >= 1 and p < n and cell.dim:
            dst = SpencerCell(tableau, q - 1, p + 1, max_dim)
            self._target_cell = dst
            if dst.dim:
                adj_out = _adjoint(d_out, cell.gram, dst.gram)
            else:
                adj_out = Matrix.zeros(cell.dim, 0)
        else:
            self._target_cell = None
            adj_out = Matrix.zeros(cell.dim, 0)
        self.d_out = d_out
        self.b_up = _image_subspace(d_in) if cell.dim else Subspace(0, [])
        self.b_down = _image_subspace(adj_out)
        ker_out = kernel(d_out) if d_out.nrows else Subspace(cell.dim, Matrix.identity(cell.dim).rows)
        ker_adj_in = kernel(adj_in) if adj_in.nrows else Subspace(cell.dim, Matrix.identity(cell.dim).rows)
        self.harmonic = ker_out.intersect(ker_adj_in)
        self._verify(ker_out, ker_adj_in)
        self.sigma_matrix = self._build_sigma()

    def _verify(self, ker_out, ker_adj_in):
        cell = self.cell
        if cell.dim == 0:
            return
        g = cell.gram
        pairs = [
            (self.b_up, self.harmonic),
            (self.b_up, self.b_down),
            (self.harmonic, self.b_down),
        ]
        if not all(_orthogonal(u, v, g) for u, v in pairs):
            raise StructureViolation(
                "harmonic components of C^{%d,%d} are not orthogonal"
                % (self.q, self.p)
            )
        total = self.b_up.sum(self.harmonic).sum(self.b_down)
        if total.dim != cell.dim or (
            self.b_up.dim + self.harmonic.dim + self.b_down.dim != cell.dim
        ):
            raise StructureViolation(
                "harmonic components of C^{%d,%d} do not sum to the cell"
                % (self.q, self.p)
            )
        if self.b_up.sum(self.harmonic) != ker_out:
            raise StructureViolation(
                "Ker delta != B (+) H at (q,p)=(%d,%d)" % (self.q, self.p)
            )
        if self.harmonic.sum(self.b_down) != ker_adj_in:
            raise StructureViolation(
                "Ker delta* != H (+) B_ at (q,p)=(%d,%d)" % (self.q, self.p)
            )

    def _build_sigma(self):
        """Solve delta(sigma(w)) = w for each basis vector of the image."""
        if self._target_cell is None or self.b_down.dim == 0:
            return Matrix.zeros(0, 0)
        bd = Matrix.from_columns(self.b_down.basis, nrows=self.cell.dim)
        restricted = self.d_out.matmul(bd)
        image_basis = _image_subspace(self.d_out).basis
        cols = []
        for w in image_basis:
            y = restricted.solve(w)
            check = restricted.matvec(y)
            if check != list(w):
                raise StructureViolation(
                    "sigma failed to invert delta at (q,p)=(%d,%d)"
                    % (self.q, self.p)
                )
            cols.append(y)
        return Matrix.from_columns(cols, nrows=self.b_down.dim)

    def dims(self):
        return (self.b_up.dim, self.harmonic.dim, self.b_down.dim)

    def sigma_on_cell_coords(self, target_cell_coords):
        """Preimage in B_{q,p} of a target given in C^{q-1,p+1} coordinates."""
        if self._target_cell is None:
            if any(x != 0 for x in target_cell_coords):
                raise NotInImage("the differential out of this cell is zero")
            return [Fraction(0)] * self.cell.dim
        bd = Matrix.from_columns(self.b_down.basis, nrows=self.cell.dim)
        restricted = self.d_out.matmul(bd)
        try:
            y = restricted.solve(list(target_cell_coords))
        except Inconsistent as exc:
            raise NotInImage(
                "target is not in the image of delta on C^{%d,%d}"
                % (self.q, self.p)
            ) from exc
        return bd.matvec(y)


def harmonic_split(t, q, p, max_dim=DEFAULT_MAX_DIM):
    """Harmonic decomposition of C^{q,p}(A); see HarmonicSplit."""
    return HarmonicSplit(t, q, p, max_dim)


def sigma(t, q, p, max_dim=DEFAULT_MAX_DIM):
    """The inverse sigma_{q,p}: B^{q-1,p+1} -> B_{q,p} of the differential.

    Returns a callable taking GradedCoords in bidegree (q-1, p+1) (full
    tensor-space coordinates), checking membership in B^{q-1,p+1}, and
    returning GradedCoords in bidegree (q, p).  NotInImage is raised when
    the target fails the membership check.
    """
    if q < 1:
        raise InputError("sigma needs q >= 1, got %d" % q)
    if p >= t.a_dim:
        raise InputError("sigma needs p < a_dim, got p = %d" % p)
    split = HarmonicSplit(t, q, p, max_dim)
    target_cell = split._target_cell or SpencerCell(t, q - 1, p + 1, max_dim)

    def apply(target):
        if not isinstance(target, GradedCoords):
            raise InputError("sigma expects GradedCoords")
        if (target.q, target.p) != (q - 1, p + 1):
            raise DimensionMismatch(
                "sigma target must have bidegree (%d,%d), got (%d,%d)"
                % (q - 1, p + 1, target.q, target.p)
            )
        cy = target_cell.coordinates_of(list(target.coords))
        cx = split.sigma_on_cell_coords(cy)
        return GradedCoords(q, p, split.cell.embed_coords(cx))

    return apply


def spencer_table(t, q_max, max_dim=DEFAULT_MAX_DIM):
    """Per-cell summary {(q,p): dim_cell, rank_delta, H_dim} for q <= q_max."""
    out = {}
    for q in range(q_max + 1):
        for p in range(t.a_dim + 1):
            cell = SpencerCell(t, q, p, max_dim)
            d = delta(cell, max_dim)
            out["%d,%d" % (q, p)] = {
                "dim_cell": cell.dim,
                "rank_delta": d.rank(),
                "H_dim": cohomology_dim(t, q, p, max_dim),
            }
    return out
