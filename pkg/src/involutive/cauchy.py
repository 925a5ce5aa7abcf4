"""Formal power-series Cauchy problem for involutive systems.

Cauchy data live in the coordinates adapted to a triangular normal form
of the involutive prolongation A^(k): a base point x0, constant values
P_(0..k-1) for the lower jet levels, and for each block index rho a
polynomial map P^[rho] in the first rho adapted variables prescribing
the [rho]-block of the level-k coordinates on the slice
u^{rho+1} = ... = u^n = 0.

The solver works degree by degree in the adapted variables u (where
x = x0 + basis_a u).  At each degree the data-prescribed coefficients
are copied, the remaining level-k coefficients are determined by the
exact linear slice of the curl equations

    iota(a_rho) d_sigma Q_(k) - iota(a_sigma) d_rho Q_(k)
        = iota(a_rho) S_(k+1)(a_sigma) - iota(a_sigma) S_(k+1)(a_rho),

and the lower levels integrate the full gradient prescriptions
d Q_(r) = (S_(r+1) + Q_(r+1))(dx).  Unique solvability of every slice
is asserted at runtime; it is exactly what involutivity provides.

The polar-space checks construct integral flags through a point of the
prolonged equation manifold from the section xi -> (xi, S_(k+1)(xi)) and
verify the dimension counts dim H(P, A_h) = n + s_{h+1} + ... + s_nu
and, for the normal-form block splitting, the restricted count of
H(P, A_h) intersected with Sigma(A_{h+1}), which must be h + 1.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .bases import contract_vector, sym_basis
from .errors import (
    CapExceeded,
    DimensionMismatch,
    Inconsistent,
    InconsistentData,
    InputError,
    UnstableGenericity,
)
from .linalg import Matrix, frac, solve_affine
from .poly import Polynomial, PolyMap
from .tableau import DEFAULT_MAX_DIM, involutive_index

MAX_SERIES_DEGREE = 12


class CauchyData:
    """Initial data: base point, lower-level constants, block functions.

    constants[h] is the value of Q_(h) at x0 for h = 0..k-1 (coordinates
    over the generator basis at level 0, the canonical prolongation
    bases above).  blocks[rho-1] is a list of Polynomials in rho
    variables, one per normal generator of the [rho] block.
    """

    def __init__(self, x0, constants=(), blocks=()):
        self.x0 = [frac(x) for x in x0]
        self.constants = [[frac(x) for x in vec] for vec in constants]
        self.blocks = [list(block) for block in blocks]
        for rho, block in enumerate(self.blocks, start=1):
            for p in block:
                if not isinstance(p, Polynomial):
                    raise InputError("block entries must be Polynomials")
                if p.num_vars != rho:
                    raise DimensionMismatch(
                        "block %d polynomial has %d variables, expected %d"
                        % (rho, p.num_vars, rho)
                    )

    def validate(self, n, level_dims, s, degree):
        if len(self.x0) != n:
            raise InputError("x0 has length %d, expected %d" % (len(self.x0), n))
        if len(self.constants) != len(level_dims):
            raise InputError(
                "expected %d constant levels, got %d"
                % (len(level_dims), len(self.constants))
            )
        for h, (vec, d) in enumerate(zip(self.constants, level_dims)):
            if len(vec) != d:
                raise InputError(
                    "P_(%d) has length %d, expected %d" % (h, len(vec), d)
                )
        nu = max((j + 1 for j, x in enumerate(s) if x), default=0)
        if len(self.blocks) != nu:
            raise InputError(
                "expected %d data blocks, got %d" % (nu, len(self.blocks))
            )
        for rho, block in enumerate(self.blocks, start=1):
            if len(block) != s[rho - 1]:
                raise InputError(
                    "block %d has %d components, expected %d"
                    % (rho, len(block), s[rho - 1])
                )
            for p in block:
                if p.total_degree() > degree:
                    raise InputError(
                        "block %d data exceeds the truncation degree %d"
                        % (rho, degree)
                    )

    def to_json_dict(self):
        return {
            "x0": [str(x) for x in self.x0],
            "P_const": [[str(x) for x in vec] for vec in self.constants],
            "P_blocks": {
                str(rho): [p.to_table() for p in block]
                for rho, block in enumerate(self.blocks, start=1)
            },
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            x0 = [frac(x) for x in data["x0"]]
            constants = [[frac(x) for x in vec] for vec in data.get("P_const", [])]
            raw = data.get("P_blocks", {})
            blocks = []
            for rho in range(1, len(raw) + 1):
                tables = raw[str(rho)]
                blocks.append(
                    [Polynomial.from_table(rho, tbl) for tbl in tables]
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("malformed Cauchy data JSON") from exc
        return cls(x0, constants, blocks)


class FormalSolution:
    """Truncated power-series solution.

    q_maps[h] is Q_(h) as a PolyMap in the original variables x^1..x^n;
    u_maps[h] is the same series in the adapted variables.  The series
    of the top level is also kept in normal-basis block coordinates.
    """

    def __init__(self, degree, x0, k, q_maps, u_maps, normal_series,
                 composition_identity, nf):
        self.degree = degree
        self.x0 = x0
        self.k = k
        self.q_maps = q_maps
        self.u_maps = u_maps
        self.normal_series = normal_series
        self.composition_identity = composition_identity
        self.nf = nf

    def jet_values(self, jet):
        """Values of (x, Q_(0..k)) at x0, padded to a jet layout."""
        vals = list(self.x0)
        for s in range(len(jet.dims)):
            if s < len(self.q_maps):
                vals.extend(
                    p.coefficient([0] * p.num_vars) for p in self.q_maps[s].components
                )
            else:
                vals.extend([Fraction(0)] * jet.dims[s])
        return vals

    def to_json_dict(self):
        return {
            "degree": self.degree,
            "x0": [str(x) for x in self.x0],
            "k": self.k,
            "Q": [[p.to_table() for p in m.components] for m in self.q_maps],
            "composition_identity": {
                str(rho): bool(v)
                for rho, v in self.composition_identity.items()
            },
        }

    def printout(self):
        lines = []
        for h, m in enumerate(self.q_maps):
            lines.append("Q_(%d): %d components, degree <= %d" % (h, m.dim, self.degree))
            for idx, p in enumerate(m.components):
                lines.append("  [%d] %r" % (idx, p))
        return "\n".join(lines)


def _affine_x_of_u(n, x0, basis_a):
    subs = []
    for i in range(n):
        terms = {tuple([0] * n): x0[i]} if x0[i] else {}
        for rho in range(n):
            c = basis_a.rows[i][rho]
            if c:
                e = [0] * n
                e[rho] = 1
                terms[tuple(e)] = c
        subs.append(Polynomial(n, terms))
    return subs


def _normal_gen_info(t, nf, k, max_dim):
    """Level-k coordinates of the normal generators, their block index,
    and their value matrices (columns = contraction by e_i, in the full
    b (x) S^k coordinates)."""
    n, r = t.a_dim, t.b_dim
    val_rows = r * sym_basis(n, k).size
    gen_vecs = []
    block_of = []
    val_mats = []
    for j, block in enumerate(nf.blocks, start=1):
        for q in block:
            flat = []
            for row in q.rows:
                flat.extend(row)
            val_mats.append(q)
            block_of.append(j)
            gen_vecs.append(flat)
    if not gen_vecs:
        return Matrix.zeros(0, 0), [], [], val_rows
    if k == 0:
        view_gens = [
            _flatten_matrix(g) for g in t.generators
        ]
    else:
        view = t.view_at_level(k, max_dim)
        view_gens = [_flatten_matrix(g) for g in view.generators]
    basis_mat = Matrix.from_columns(view_gens, nrows=len(view_gens[0]))
    coord_cols = [basis_mat.solve(v) for v in gen_vecs]
    big_n = Matrix.from_columns(coord_cols, nrows=len(coord_cols[0]))
    return big_n, block_of, val_mats, val_rows


def _flatten_matrix(m):
    flat = []
    for row in m.rows:
        flat.extend(row)
    return flat


def _level_basis_vectors(t, k, max_dim):
    """Basis of the level-k coordinates in b (x) S^{k+1}: the flattened
    generators at level 0 (the jet layout convention), the canonical
    prolongation basis above."""
    if k == 0:
        return [_flatten_matrix(g) for g in t.generators]
    return [list(v) for v in t.level(k, max_dim).basis]


def _level_to_value(t, k, vec, direction, max_dim):
    """Contraction of a level-k coordinate vector by a direction of a,
    in the full b (x) S^k coordinates."""
    n, r = t.a_dim, t.b_dim
    basis = _level_basis_vectors(t, k, max_dim)
    full = [Fraction(0)] * (r * sym_basis(n, k + 1).size)
    for c, bv in zip(vec, basis):
        if c:
            full = [x + c * y for x, y in zip(full, bv)]
    return contract_vector(n, r, k + 1, full, list(direction))


def _compose_chain_map(s_map, x_subs, u_series, jet, degree):
    """S-chain PolyMap composed with the solution jet, truncated."""
    subs = list(x_subs)
    n = jet.n
    for s, d in enumerate(jet.dims):
        if s < len(u_series):
            subs.extend(u_series[s])
        else:
            subs.extend([Polynomial.zero(n)] * d)
    comps = [p.compose(subs).truncate(degree) for p in s_map.components]
    return comps


def _monomials(n, d):
    if d == 0:
        return [tuple([0] * n)]
    out = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def solve_formal(sys, tower, nf, data, degree, k=None, max_dim=DEFAULT_MAX_DIM):
    """Unique formal solution through the given truncation degree.

    The data supply the block coefficients supported in their own
    variables; everything else is forced by the equations, degree by
    degree, through exact linear solves whose unique solvability is
    asserted (InconsistentData otherwise).
    """
    t = sys.tableau
    n, r = t.a_dim, t.b_dim
    if degree > MAX_SERIES_DEGREE:
        raise CapExceeded(
            "truncation degree %d exceeds the cap %d" % (degree, MAX_SERIES_DEGREE)
        )
    if k is None:
        k = involutive_index(t, h_max=max(tower.order, 0), max_dim=max_dim)["k"]
    if tower.order < k:
        raise InputError(
            "tower of order %d cannot solve at level k = %d" % (tower.order, k)
        )
    jet = tower.jet
    level_dims = jet.dims
    data.validate(n, level_dims[:k], nf.s, degree)
    basis_a = nf.basis_a
    a_inv = basis_a.inverse()
    x_subs = _affine_x_of_u(n, data.x0, basis_a)
    big_n, block_of, val_mats, val_rows = _normal_gen_info(t, nf, k, max_dim)
    nk = len(block_of)

    # iota matrices by u-direction: level-k coords -> full b (x) S^k coords
    flag_cols = [
        [basis_a.rows[i][rho] for i in range(n)] for rho in range(n)
    ]
    iota_u = []
    for rho in range(n):
        cols = [
            _level_to_value(t, k, vec, flag_cols[rho], max_dim)
            for vec in _identity_vectors(level_dims[k])
        ]
        iota_u.append(Matrix.from_columns(cols, nrows=val_rows))

    # normal generator values on the flag directions
    gen_val = [
        [
            _matvec_columns(val_mats[m], flag_cols[rho])
            for rho in range(n)
        ]
        for m in range(nk)
    ]

    # block coefficient series, seeded with the data
    g_terms = [dict() for _ in range(nk)]
    for m in range(nk):
        j = block_of[m]
        a_idx = sum(1 for mm in range(m) if block_of[mm] == j)
        p = data.blocks[j - 1][a_idx]
        for exp, c in p.terms.items():
            g_terms[m][exp + (0,) * (n - j)] = c

    def is_data_exponent(m, exp):
        j = block_of[m]
        return all(exp[i] == 0 for i in range(j, n))

    # lower-level series, seeded with the constants
    lower_terms = [dict() for _ in range(k)]
    for h in range(k):
        for alpha, c in enumerate(data.constants[h]):
            if c:
                lower_terms[h].setdefault(alpha, {})[tuple([0] * n)] = c
        for alpha in range(level_dims[h]):
            lower_terms[h].setdefault(alpha, {})

    def level_series(h):
        if h < k:
            return [
                Polynomial(n, lower_terms[h][alpha])
                for alpha in range(level_dims[h])
            ]
        cols = []
        for beta in range(level_dims[k]):
            acc = Polynomial.zero(n)
            for m in range(nk):
                c = big_n.rows[beta][m]
                if c:
                    acc = acc.add(Polynomial(n, g_terms[m]).scale(c))
            cols.append(acc)
        return cols

    iotas_lower = {}
    gen_matrix = None
    if k > 0:
        from .systems import _generator_matrix, _iota

        gen_matrix = _generator_matrix(t)
        for s in range(1, k + 1):
            for i in range(n):
                iotas_lower[(s, i)] = _iota(t, s, i, gen_matrix, max_dim)

    for d in range(1, degree + 1):
        u_series = [level_series(h) for h in range(k + 1)]
        s_top = _compose_chain_map(
            tower.s_chain[k], x_subs, u_series, jet, d - 1
        )
        # curl slice: unknowns are the non-data coefficients at degree d
        unknowns = []
        index_of = {}
        for m in range(nk):
            for exp in _monomials(n, d):
                if not is_data_exponent(m, exp):
                    index_of[(m, exp)] = len(unknowns)
                    unknowns.append((m, exp))
        rows = []
        rhs = []
        for rho in range(n):
            for sigma in range(rho + 1, n):
                srho_comp, ssigma_comp = _s_direction_values(
                    s_top, basis_a, iota_u, rho, sigma, level_dims[k],
                    val_rows, n,
                )
                for exp_k in _monomials(n, d - 1):
                    e_sig = _bump(exp_k, sigma)
                    e_rho = _bump(exp_k, rho)
                    for out_idx in range(val_rows):
                        row = [Fraction(0)] * len(unknowns)
                        val = Fraction(0)
                        # iota(a_rho) d_sigma Q - iota(a_sigma) d_rho Q
                        for m in range(nk):
                            c1 = gen_val[m][rho][out_idx] * (exp_k[sigma] + 1)
                            c2 = gen_val[m][sigma][out_idx] * (exp_k[rho] + 1)
                            for coeff, exp in ((c1, e_sig), (-c2, e_rho)):
                                if not coeff:
                                    continue
                                idx = index_of.get((m, exp))
                                if idx is not None:
                                    row[idx] += coeff
                                else:
                                    val -= coeff * g_terms[m].get(
                                        exp, Fraction(0)
                                    )
                        target = srho_comp[out_idx].coefficient(
                            list(exp_k)
                        ) - ssigma_comp[out_idx].coefficient(list(exp_k))
                        rows.append(row)
                        rhs.append(val + target)
        if unknowns:
            mat = Matrix(rows, ncols=len(unknowns))
            try:
                particular, homogeneous = solve_affine(mat, rhs)
            except Inconsistent as exc:
                raise InconsistentData(
                    "the degree-%d slice of the curl equations is "
                    "inconsistent" % d
                ) from exc
            if homogeneous:
                raise InconsistentData(
                    "the degree-%d slice of the curl equations is "
                    "underdetermined (%d free directions)" % (d, len(homogeneous))
                )
            for (m, exp), c in zip(unknowns, particular):
                if c:
                    g_terms[m][exp] = c
        elif any(rhs):
            raise InconsistentData(
                "the degree-%d curl slice has no unknowns but nonzero "
                "residual" % d
            )
        # integrate the lower levels downward
        for h in range(k - 1, -1, -1):
            u_series = [level_series(hh) for hh in range(k + 1)]
            s_comp = _compose_chain_map(
                tower.s_chain[h], x_subs, u_series, jet, d - 1
            )
            # gradient of Q_(h) in the u-direction rho
            for exp in _monomials(n, d):
                coeffs = {}
                for rho in range(n):
                    if exp[rho] == 0:
                        continue
                    below = _drop(exp, rho)
                    for alpha in range(level_dims[h]):
                        g = Fraction(0)
                        for j_dir in range(n):
                            c = basis_a.rows[j_dir][rho]
                            if not c:
                                continue
                            g += c * s_comp[alpha * n + j_dir].coefficient(
                                list(below)
                            )
                            io = iotas_lower[(h + 1, j_dir)]
                            for beta in range(level_dims[h + 1]):
                                cc = io.rows[alpha][beta]
                                if cc:
                                    g += c * cc * u_series[h + 1][beta].coefficient(
                                        list(below)
                                    )
                        value = g / exp[rho]
                        prev = coeffs.get(alpha)
                        if prev is None:
                            coeffs[alpha] = value
                        elif prev != value:
                            raise InconsistentData(
                                "mixed partials disagree at level %d, "
                                "degree %d" % (h, d)
                            )
                for alpha, c in coeffs.items():
                    if c:
                        lower_terms[h][alpha][exp] = c

    u_series = [level_series(h) for h in range(k + 1)]
    u_maps = [PolyMap(n, comps) for comps in u_series]
    # back to the original coordinates: u = a_inv (x - x0)
    u_of_x = []
    for rho in range(n):
        terms = {}
        const = Fraction(0)
        for i in range(n):
            c = a_inv.rows[rho][i]
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
                const -= c * data.x0[i]
        if const:
            terms[tuple([0] * n)] = const
        u_of_x.append(Polynomial(n, terms))
    q_maps = [
        PolyMap(n, [p.compose(u_of_x).truncate(degree) for p in m.components])
        for m in u_maps
    ]
    composition = {}
    for rho in range(1, len(nf.blocks) + 1):
        ok = True
        for m in range(nk):
            if block_of[m] == rho:
                for exp in g_terms[m]:
                    if any(exp[i] for i in range(rho, n)):
                        ok = False
        composition[rho] = ok
    return FormalSolution(
        degree, data.x0, k, q_maps, u_maps,
        [Polynomial(n, g_terms[m]) for m in range(nk)],
        composition, nf,
    )


def _identity_vectors(dim):
    out = []
    for i in range(dim):
        v = [Fraction(0)] * dim
        v[i] = Fraction(1)
        out.append(v)
    return out


def _matvec_columns(mat, vec):
    return [
        sum((row[i] * vec[i] for i in range(len(vec))), Fraction(0))
        for row in mat.rows
    ]


def _bump(exp, i):
    e = list(exp)
    e[i] += 1
    return tuple(e)


def _drop(exp, i):
    e = list(exp)
    e[i] -= 1
    return tuple(e)


def _s_direction_values(s_top, basis_a, iota_u, rho, sigma, dim_k, val_rows, n):
    """iota(a_rho) S(a_sigma) and iota(a_sigma) S(a_rho) as polynomial
    vectors in the full value coordinates."""
    s_of = []
    for direction in (sigma, rho):
        comps = [Polynomial.zero(s_top[0].num_vars) for _ in range(dim_k)]
        for beta in range(dim_k):
            for j_dir in range(n):
                c = basis_a.rows[j_dir][direction]
                if c:
                    comps[beta] = comps[beta].add(
                        s_top[beta * n + j_dir].scale(c)
                    )
        s_of.append(comps)
    out = []
    for io, comps in ((iota_u[rho], s_of[0]), (iota_u[sigma], s_of[1])):
        vals = []
        for out_idx in range(val_rows):
            acc = Polynomial.zero(comps[0].num_vars) if comps else Polynomial.zero(n)
            for beta in range(dim_k):
                c = io.rows[out_idx][beta]
                if c:
                    acc = acc.add(comps[beta].scale(c))
            vals.append(acc)
        out.append(vals)
    return out[0], out[1]


def verify_solution(sys, sol):
    """Exact residual of the defining equations with F = Q_(0).

    Expands Q^a_{alpha i} d_j F - Q^a_{alpha j} d_i F - Phi^a_{ij}(x, F)
    and reports the lowest total degree of any nonzero term.
    """
    t = sys.tableau
    n, r = t.a_dim, t.b_dim
    f = sol.q_maps[0]
    subs = [Polynomial.variable(n, i) for i in range(n)] + list(f.components)
    # degrees are measured at the base point of the series
    shift = []
    for i in range(n):
        terms = {}
        e = [0] * n
        e[i] = 1
        terms[tuple(e)] = Fraction(1)
        if sol.x0[i]:
            terms[tuple([0] * n)] = sol.x0[i]
        shift.append(Polynomial(n, terms))
    worst = None
    for i in range(n):
        for j in range(i + 1, n):
            for b in range(r):
                lhs = Polynomial.zero(n)
                for alpha, gmat in enumerate(t.generators):
                    ci = gmat.rows[b][i]
                    cj = gmat.rows[b][j]
                    if ci:
                        lhs = lhs.add(f.components[alpha].partial(j).scale(ci))
                    if cj:
                        lhs = lhs.sub(f.components[alpha].partial(i).scale(cj))
                res = lhs.sub(sys.phi_component(b, i, j).compose(subs))
                if not res.is_zero():
                    res = res.compose(shift)
                if not res.is_zero():
                    low = res.lowest_degree()
                    if worst is None or low < worst["degree"]:
                        exp = min(
                            (e for e in res.terms if sum(e) == low),
                        )
                        worst = {
                            "component": (b, i, j),
                            "degree": low,
                            "monomial": list(exp),
                        }
    clean_through = sol.degree - 1 if worst is None else min(
        worst["degree"] - 1, sol.degree - 1
    )
    return {
        "max_degree_checked": sol.degree - 1,
        "clean": worst is None or worst["degree"] > sol.degree - 1,
        "clean_through_degree": clean_through,
        "first_failure": worst,
    }


def _s_values_at_point(sys, tower, k, point, max_dim):
    """S_(k+1) component values at a jet point, per x-direction, as
    level-k coordinate vectors."""
    jet = tower.jet
    n = sys.tableau.a_dim
    s_map = tower.s_chain[k]
    if point is None:
        point = [Fraction(0)] * jet.num_vars
    point = [frac(x) for x in point]
    if len(point) < jet.num_vars:
        point = point + [Fraction(0)] * (jet.num_vars - len(point))
    dim_k = jet.dims[k]
    vals = []
    for i in range(n):
        vals.append(
            [s_map.components[beta * n + i].eval(point) for beta in range(dim_k)]
        )
    return vals


def _polar_operator(sys, tower, nf, k, point, max_dim):
    """Shared setup: flag directions, contraction matrices, S values."""
    t = sys.tableau
    n = t.a_dim
    dim_k = tower.jet.dims[k]
    val_rows = t.b_dim * sym_basis(n, k).size
    basis_a = nf.basis_a
    flag_cols = [[basis_a.rows[i][rho] for i in range(n)] for rho in range(n)]
    iota_e = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        cols = [
            _level_to_value(t, k, vec, e, max_dim)
            for vec in _identity_vectors(dim_k)
        ]
        iota_e.append(Matrix.from_columns(cols, nrows=val_rows))
    s_vals = _s_values_at_point(sys, tower, k, point, max_dim)

    def s_of(xi):
        out = [Fraction(0)] * dim_k
        for i in range(n):
            if xi[i]:
                out = [a + xi[i] * b for a, b in zip(out, s_vals[i])]
        return out

    def iota(xi, y):
        out = [Fraction(0)] * val_rows
        for i in range(n):
            if xi[i]:
                col = iota_e[i].matvec(y)
                out = [a + xi[i] * b for a, b in zip(out, col)]
        return out

    return n, dim_k, val_rows, flag_cols, s_of, iota


def _polar_rows(n, dim_k, val_rows, iota, s_of, flag_elem):
    """Linear conditions cut by one flag element (xi_l, X_l) on a vector
    (xi, X): iota(xi_l)(X - S(xi)) - iota(xi)(X_l - S(xi_l)) = 0."""
    xi_l, x_l = flag_elem
    resid_l = [a - b for a, b in zip(x_l, s_of(xi_l))]
    rows = []
    for out_idx in range(val_rows):
        rows.append([Fraction(0)] * (n + dim_k))
    # iota(xi_l) X  term
    for beta in range(dim_k):
        e = [Fraction(0)] * dim_k
        e[beta] = Fraction(1)
        col = iota(xi_l, e)
        for out_idx in range(val_rows):
            rows[out_idx][n + beta] += col[out_idx]
    # -iota(xi_l) S(xi) and -iota(xi) resid_l terms, linear in xi
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        col1 = iota(xi_l, s_of(e))
        col2 = iota(e, resid_l)
        for out_idx in range(val_rows):
            rows[out_idx][i] += -col1[out_idx] - col2[out_idx]
    return rows


def polar_dims(sys, tower, nf, point=None, k=None, max_dim=DEFAULT_MAX_DIM):
    """Dimensions of the polar spaces along a generic integral flag.

    Builds the flag from the certified normal-form directions through
    the section xi -> (xi, S_(k+1)|_P(xi)) and returns the list of
    dim H(P, A_h) for h = 0..n, asserting the involutive count
    n + s_{h+1} + ... + s_nu at every step.
    """
    if k is None:
        k = involutive_index(
            sys.tableau, h_max=max(tower.order, 0), max_dim=max_dim
        )["k"]
    n, dim_k, val_rows, flag_cols, s_of, iota = _polar_operator(
        sys, tower, nf, k, point, max_dim
    )
    flag = [(flag_cols[l], s_of(flag_cols[l])) for l in range(n)]
    dims = []
    rows = []
    s = nf.s
    for h in range(n + 1):
        if h > 0:
            rows.extend(
                _polar_rows(n, dim_k, val_rows, iota, s_of, flag[h - 1])
            )
        if rows:
            mat = Matrix([list(r) for r in rows], ncols=n + dim_k)
            dim_h = n + dim_k - mat.rank()
        else:
            dim_h = n + dim_k
        expected = n + sum(s[h:])
        if dim_h != expected:
            raise UnstableGenericity(
                "polar space at step %d has dimension %d, expected %d"
                % (h, dim_h, expected)
            )
        dims.append(dim_h)
    return dims


def restricted_polar_check(sys, tower, nf, h, point=None, k=None,
                           max_dim=DEFAULT_MAX_DIM):
    """Restricted polar count inside the block splitting.

    Intersects H(P, A_h) with Sigma(A_{h+1}) = (A_{h+1} + blocks 1..h of
    the level-k space) and verifies the dimension is h + 1.
    """
    if k is None:
        k = involutive_index(
            sys.tableau, h_max=max(tower.order, 0), max_dim=max_dim
        )["k"]
    t = sys.tableau
    n = t.a_dim
    if not (0 <= h < n):
        raise InputError("need 0 <= h < n, got h = %d" % h)
    n_, dim_k, val_rows, flag_cols, s_of, iota = _polar_operator(
        sys, tower, nf, k, point, max_dim
    )
    big_n, block_of, _vals, _vr = _normal_gen_info(t, nf, k, max_dim)
    nk = len(block_of)
    n_inv = big_n.inverse() if nk else None

    def project_high(y):
        """Component of y in the blocks beyond h (normal splitting)."""
        if not nk:
            return list(y)
        g = n_inv.matvec(y)
        g = [c if block_of[m] > h else Fraction(0) for m, c in enumerate(g)]
        return big_n.matvec(g)

    # parameters: xi in span(a_1..a_{h+1}), S in blocks 1..h
    params = []
    for l in range(h + 1):
        xi = flag_cols[l]
        params.append((xi, project_high(s_of(xi))))
    low_indices = [m for m in range(nk) if block_of[m] <= h]
    for m in low_indices:
        col = [big_n.rows[bb][m] for bb in range(dim_k)]
        params.append(([Fraction(0)] * n, col))
    flag = [(flag_cols[l], s_of(flag_cols[l])) for l in range(h)]
    cond_rows = []
    for elem in flag:
        cond_rows.extend(_polar_rows(n, dim_k, val_rows, iota, s_of, elem))
    if cond_rows:
        full = Matrix([list(r) for r in cond_rows], ncols=n + dim_k)
        cols = [full.matvec(list(xi) + list(x)) for xi, x in params]
        restricted = Matrix.from_columns(cols, nrows=full.nrows)
        dim = len(params) - restricted.rank()
    else:
        dim = len(params)
    if dim != h + 1:
        raise UnstableGenericity(
            "restricted polar space at h = %d has dimension %d, expected %d"
            % (h, dim, h + 1)
        )
    return True
