"""Finite subgroups of the p-divisible torus (Q_p/Z_p)^n and their sums.

A subgroup H of order p^k is stored through the integer matrix A_H with
H = (A_H^{-1} Z^n)/Z^n.  The kernel of an integer matrix acting on the
torus only depends on the matrix up to left multiplication by GL_n(Z), so
A_H is kept in row HNF (see lattice.row_hnf); that makes equality of
subgroups literal equality of matrices.  The annihilator lattice
Lambda_H = {lam : lam . h is integral for all h in H} is the column span
of A_H^T.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import SingularMatrixError
from .lattice import (
    LatticeBasis,
    Matrix,
    PAdicMatrix,
    column_span_basis,
    freeze,
    hnf,
    identity_matrix,
    int_valuation,
    mat_inverse_fractions,
    mat_transpose,
    row_hnf,
    scalar_matrix,
)


@dataclass(frozen=True, order=True)
class TorsionSubgroup:
    """Finite subgroup of (Q_p/Z_p)^n in canonical (row HNF) form."""

    p: int
    matrix: Matrix  # A_H

    def __post_init__(self):
        object.__setattr__(self, "matrix", freeze(self.matrix))
        if self.matrix != row_hnf(self.matrix):
            raise ValueError("subgroup matrix must be in row HNF")
        det = 1
        for i in range(self.n):
            det *= self.matrix[i][i]
        if det != self.p ** int_valuation(det, self.p):
            raise ValueError("subgroup matrix must have p-power determinant")

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def order(self) -> int:
        out = 1
        for i in range(self.n):
            out *= self.matrix[i][i]
        return out

    def log_order(self) -> int:
        return int_valuation(self.order, self.p)

    def is_trivial(self) -> bool:
        return self.order == 1

    def generators(self):
        """Columns of A_H^{-1} reduced mod Z^n, as tuples of Fractions in [0, 1)."""
        inv = mat_inverse_fractions(self.matrix)
        cols = list(zip(*inv))
        return tuple(tuple(x - (x // 1) for x in col) for col in cols)

    def sort_key(self):
        return (self.order, self.matrix)


def trivial_subgroup(p: int, n: int) -> TorsionSubgroup:
    return TorsionSubgroup(p, identity_matrix(n))


def full_torsion(p: int, n: int, k: int = 1) -> TorsionSubgroup:
    """The p^k-torsion subgroup, of order p^{kn}."""
    return TorsionSubgroup(p, scalar_matrix(n, p ** k))


def subgroup_from_kernel_matrix(m: PAdicMatrix) -> TorsionSubgroup:
    """Kernel of the isogeny x -> Mx on the torus, i.e. the p-part of M^{-1}Z^n / Z^n."""
    if m.det == 0:
        raise SingularMatrixError("kernel of a singular matrix is not finite")
    inv = mat_inverse_fractions(m.entries)
    gens = []
    for col in zip(*inv):
        den = 1
        for x in col:
            den = den * x.denominator // math.gcd(den, x.denominator)
        unit = den // (m.p ** int_valuation(den, m.p)) if den > 1 else 1
        gens.append(tuple(x * unit for x in col))
    return subgroup_from_generators(m.p, m.n, gens)


def subgroup_from_generators(p: int, n: int, gens) -> TorsionSubgroup:
    """Subgroup generated by torus elements given as Fraction vectors.

    Every generator must have p-power order (p-power denominators).
    """
    e = 0
    for g in gens:
        for x in g:
            x = Fraction(x)
            d = x.denominator
            v = int_valuation(d, p) if d > 1 else 0
            if p ** v != d:
                raise ValueError("generator does not have p-power order")
            e = max(e, v)
    q = p ** e
    cols = [[q if i == j else 0 for i in range(n)] for j in range(n)]
    for g in gens:
        cols.append([int(Fraction(x) * q) for x in g])
    scaled = tuple(tuple(col[i] for col in cols) for i in range(n))
    basis = column_span_basis(scaled)  # basis of q . (Z^n + <gens>)
    # A_H = q . basis^{-1} maps the preimage lattice onto Z^n
    inv = mat_inverse_fractions(basis)
    a = [[x * q for x in row] for row in inv]
    if any(x.denominator != 1 for row in a for x in row):
        raise SingularMatrixError("generated lattice does not contain Z^n")
    return TorsionSubgroup(p, row_hnf([[int(x) for x in row] for row in a]))


def subgroup_from_annihilator(p: int, basis: LatticeBasis) -> TorsionSubgroup:
    """Subgroup whose annihilator lattice is the given column span."""
    return TorsionSubgroup(p, row_hnf(mat_transpose(basis.matrix)))


def annihilator_lattice(h: TorsionSubgroup) -> LatticeBasis:
    """Column-HNF basis of Lambda_H; its index equals |H|."""
    basis, _ = hnf(mat_transpose(h.matrix), h.p)
    return basis


def image_subgroup(gamma: PAdicMatrix, h: TorsionSubgroup) -> TorsionSubgroup:
    """Canonical form of gamma(H) for a nonsingular integer matrix gamma."""
    if gamma.det == 0:
        raise SingularMatrixError("image under a singular matrix")
    gens = []
    for col in h.generators():
        gens.append(tuple(sum(Fraction(gamma.entries[i][k]) * col[k]
                              for k in range(h.n)) for i in range(h.n)))
    return subgroup_from_generators(h.p, h.n, gens)


def enumerate_subgroups(p: int, n: int, k: int):
    """All subgroups of order p^k, canonically ordered.

    Row-HNF matrices with p-power diagonal biject with subgroups; the list
    is sorted lexicographically on the matrix entries.
    """
    out = []
    for exps in _compositions(k, n):
        diag = [p ** e for e in exps]
        ranges = []
        for j in range(n):
            for _ in range(j):
                ranges.append(range(diag[j]))
        for offs in itertools.product(*ranges):
            m = [[0] * n for _ in range(n)]
            pos = 0
            for j in range(n):
                m[j][j] = diag[j]
                for i in range(j):
                    m[i][j] = offs[pos]
                    pos += 1
            out.append(TorsionSubgroup(p, freeze(m)))
    out.sort(key=lambda h: h.matrix)
    return tuple(out)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class SumOfSubgroups:
    """Formal multiset of subgroups; total is the sum of the orders."""

    summands: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "summands", tuple(sorted(self.summands, key=lambda h: h.sort_key()))
        )

    @property
    def total(self) -> int:
        return sum(h.order for h in self.summands)

    def sort_key(self):
        return tuple(h.sort_key() for h in self.summands)


def enumerate_sums(p: int, n: int, m: int):
    """All formal sums of subgroups with orders adding up to m, canonically ordered."""
    powers = []
    q = 1
    while q <= m:
        powers.append(q)
        q *= p
    by_order = {q: enumerate_subgroups(p, n, int_valuation(q, p) if q > 1 else 0)
                for q in powers}

    sums = []

    def parts(remaining, max_q, chosen):
        if remaining == 0:
            pools = [
                itertools.combinations_with_replacement(by_order[q], c)
                for q, c in chosen
            ]
            for combo in itertools.product(*pools):
                sums.append(SumOfSubgroups(tuple(itertools.chain(*combo))))
            return
        for q in reversed(powers):
            if q > max_q or q > remaining:
                continue
            for c in range(remaining // q, 0, -1):
                parts(remaining - c * q, q // p, chosen + [(q, c)])

    parts(m, m, [])
    sums.sort(key=lambda s: s.sort_key())
    return tuple(sums)
