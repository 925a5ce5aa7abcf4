"""Sparse multivariate polynomials with exact rational coefficients.

A Polynomial stores a map from exponent tuples to nonzero Fraction
coefficients.  These house the non-homogeneous terms of the PDE systems,
the inductively constructed chain maps, residuals, and truncated Taylor
series, so all operations (product, derivative, composition, evaluation)
are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch
from .linalg import Vector, frac


class Polynomial:
    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: Mapping[tuple, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in items:
            e = tuple(int(x) for x in exps)
            if len(e) != num_vars:
                raise DimensionMismatch("exponent vector length != num_vars")
            if any(x < 0 for x in e):
                raise DimensionMismatch("negative exponent")
            c = frac(coeff)
            if c != 0:
                c0 = clean.get(e)
                c = c if c0 is None else c0 + c
                if c != 0:
                    clean[e] = c
                elif e in clean:
                    del clean[e]
        self.num_vars = num_vars
        self.terms = clean

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars: int, c) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: frac(c)})

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "Polynomial":
        e = [0] * num_vars
        e[i] = 1
        return cls(num_vars, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Degree of the zero polynomial is reported as -1."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t)):
            mono = "*".join(f"v{i}^{k}" for i, k in enumerate(e) if k)
            bits.append(f"{self.terms[e]}{'*' + mono if mono else ''}")
        return "Polynomial(" + " + ".join(bits) + ")"

    def _check(self, other: "Polynomial"):
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("polynomial arity mismatch")

    def add(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        p = Polynomial(self.num_vars)
        p.terms = out
        return p

    def neg(self) -> "Polynomial":
        p = Polynomial(self.num_vars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def sub(self, other: "Polynomial") -> "Polynomial":
        return self.add(other.neg())

    def scale(self, c) -> "Polynomial":
        c = frac(c)
        p = Polynomial(self.num_vars)
        if c != 0:
            p.terms = {e: c * v for e, v in self.terms.items()}
        return p

    def mul(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        p = Polynomial(self.num_vars)
        p.terms = out
        return p

    def pow(self, k: int) -> "Polynomial":
        if k < 0:
            raise DimensionMismatch("negative power")
        out = Polynomial.constant(self.num_vars, 1)
        for _ in range(k):
            out = out.mul(self)
        return out

    def partial(self, var: int) -> "Polynomial":
        if not 0 <= var < self.num_vars:
            raise DimensionMismatch("variable index out of range")
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            k = e[var]
            if k == 0:
                continue
            e2 = list(e)
            e2[var] = k - 1
            out[tuple(e2)] = c * k
        p = Polynomial(self.num_vars)
        p.terms = out
        return p

    def eval(self, point: Sequence) -> Fraction:
        if len(point) != self.num_vars:
            raise DimensionMismatch("evaluation point arity mismatch")
        pt = [frac(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute subs[i] for variable i; all subs share one arity."""
        if len(subs) != self.num_vars:
            raise DimensionMismatch("compose needs one substitution per variable")
        if subs:
            m = subs[0].num_vars
            if any(s.num_vars != m for s in subs):
                raise DimensionMismatch("substitutions have mixed arities")
        else:
            m = 0
        out = Polynomial.zero(m)
        # cache powers of each substitution as they are needed
        powers: list[dict[int, Polynomial]] = [dict() for _ in subs]
        for e, c in self.terms.items():
            term = Polynomial.constant(m, c)
            for i, k in enumerate(e):
                if k == 0:
                    continue
                cache = powers[i]
                if k not in cache:
                    cache[k] = subs[i].pow(k)
                term = term.mul(cache[k])
            out = out.add(term)
        return out

    def truncate(self, max_degree: int) -> "Polynomial":
        p = Polynomial(self.num_vars)
        p.terms = {e: c for e, c in self.terms.items() if sum(e) <= max_degree}
        return p

    def lowest_degree(self) -> int:
        """Smallest total degree with a nonzero term, or -1 if zero."""
        if not self.terms:
            return -1
        return min(sum(e) for e in self.terms)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def to_table(self) -> list[list]:
        """Serializable form: [[coeff string, [exponents]], ...], sorted."""
        out = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t)):
            out.append([str(self.terms[e]), list(e)])
        return out

    @classmethod
    def from_table(cls, num_vars: int, table: Iterable) -> "Polynomial":
        return cls(num_vars, [(tuple(e), frac(c)) for c, e in table])


class PolyMap:
    """A vector of polynomials in a shared list of variables."""

    __slots__ = ("num_vars", "components")

    def __init__(self, num_vars: int, components: Sequence[Polynomial]):
        for p in components:
            if p.num_vars != num_vars:
                raise DimensionMismatch("component arity mismatch")
        self.num_vars = num_vars
        self.components = list(components)

    @classmethod
    def zero(cls, num_vars: int, dim: int) -> "PolyMap":
        return cls(num_vars, [Polynomial.zero(num_vars) for _ in range(dim)])

    @classmethod
    def linear(cls, matrix_rows: Sequence[Sequence], num_vars: int) -> "PolyMap":
        """The linear map with the given matrix, as polynomials."""
        comps = []
        for row in matrix_rows:
            if len(row) != num_vars:
                raise DimensionMismatch("matrix width != num_vars")
            comps.append(
                Polynomial(num_vars, {tuple(int(i == j) for j in range(num_vars)): frac(c)
                                      for i, c in enumerate(row)})
            )
        return cls(num_vars, comps)

    @property
    def dim(self) -> int:
        return len(self.components)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMap)
            and self.num_vars == other.num_vars
            and self.components == other.components
        )

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def add(self, other: "PolyMap") -> "PolyMap":
        if self.dim != other.dim:
            raise DimensionMismatch("component count mismatch")
        return PolyMap(self.num_vars, [p.add(q) for p, q in zip(self.components, other.components)])

    def sub(self, other: "PolyMap") -> "PolyMap":
        if self.dim != other.dim:
            raise DimensionMismatch("component count mismatch")
        return PolyMap(self.num_vars, [p.sub(q) for p, q in zip(self.components, other.components)])

    def scale(self, c) -> "PolyMap":
        return PolyMap(self.num_vars, [p.scale(c) for p in self.components])

    def partial(self, var: int) -> "PolyMap":
        return PolyMap(self.num_vars, [p.partial(var) for p in self.components])

    def eval(self, point: Sequence) -> Vector:
        return [p.eval(point) for p in self.components]

    def compose(self, subs: Sequence[Polynomial]) -> "PolyMap":
        return PolyMap(subs[0].num_vars if subs else 0, [p.compose(subs) for p in self.components])

    def truncate(self, max_degree: int) -> "PolyMap":
        return PolyMap(self.num_vars, [p.truncate(max_degree) for p in self.components])

    def total_degree(self) -> int:
        return max((p.total_degree() for p in self.components), default=-1)

    def exponents(self) -> set[tuple[int, ...]]:
        out: set[tuple[int, ...]] = set()
        for p in self.components:
            out.update(p.terms)
        return out

    def coefficient_vector(self, exps: Sequence[int]) -> Vector:
        return [p.coefficient(exps) for p in self.components]
