"""The isogeny monoid of the torus in matrix form, and sections of kernel.

An isogeny is a nonsingular integer matrix A acting on column vectors of
(Q_p/Z_p)^n; its Pontryagin dual on the lattice Z_p^n is the transpose.
Two matrices have the same kernel iff they agree up to left multiplication
by a p-adically unimodular matrix, which is why sections below are built
as (unimodular) . (canonical kernel matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NoIntegralSolutionError, SectionOutOfRangeError, SingularMatrixError
from .lattice import (
    LatticeBasis,
    Matrix,
    PAdicMatrix,
    freeze,
    hnf,
    mat_inverse_fractions,
    mat_mul,
    mat_transpose,
    solve_integer,
)
from .rng import SplitMix64, random_unimodular
from .torsion import TorsionSubgroup, enumerate_subgroups, subgroup_from_kernel_matrix


@dataclass(frozen=True)
class Isogeny:
    """Endoisogeny of the torus; kernel order is p^{v_p(det)}."""

    matrix: PAdicMatrix

    def __post_init__(self):
        if self.matrix.det == 0:
            raise SingularMatrixError("an isogeny must have nonzero determinant")

    @property
    def p(self) -> int:
        return self.matrix.p

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def kernel_order(self) -> int:
        return self.p ** self.matrix.det_valuation()

    def dual(self) -> PAdicMatrix:
        return self.matrix.transpose()


def compose(phi: Isogeny, psi: Isogeny) -> Isogeny:
    """Composite isogeny x -> phi(psi(x)); kernel orders multiply."""
    return Isogeny(phi.matrix.mul(psi.matrix))


def kernel(phi: Isogeny) -> TorsionSubgroup:
    """Canonical form of ker(phi) = (A^{-1}Z^n)/Z^n inside the torus."""
    return subgroup_from_kernel_matrix(phi.matrix)


@dataclass(frozen=True)
class Section:
    """A choice of isogeny with kernel H for every H of order at most p^B."""

    p: int
    n: int
    bound: int  # order bound exponent B
    provenance: str
    assignment: dict = field(compare=False, repr=False)

    def isogeny_for(self, h: TorsionSubgroup) -> Isogeny:
        if h not in self.assignment:
            raise SectionOutOfRangeError(
                f"section only covers kernels of order up to {self.p}^{self.bound}"
            )
        return self.assignment[h]

    def domain(self):
        return tuple(self.assignment)


def _all_subgroups(p: int, n: int, bound: int):
    for k in range(bound + 1):
        yield from enumerate_subgroups(p, n, k)


def canonical_section(p: int, n: int, bound: int) -> Section:
    """The section assigning to H its canonical kernel matrix A_H."""
    assignment = {
        h: Isogeny(PAdicMatrix(p, h.matrix)) for h in _all_subgroups(p, n, bound)
    }
    return Section(p, n, bound, "canonical", assignment)


def random_section(p: int, n: int, bound: int, seed: int) -> Section:
    """Seeded section: U_H . A_H with U_H a random integer unimodular matrix.

    Subgroups are visited in canonical enumeration order, drawing each U_H
    from one SplitMix64 stream, so equal seeds give identical sections.
    """
    rng = SplitMix64(seed)
    assignment = {}
    for h in _all_subgroups(p, n, bound):
        u = random_unimodular(rng, n)
        assignment[h] = Isogeny(PAdicMatrix(p, mat_mul(u, h.matrix)))
    return Section(p, n, bound, f"seeded:{seed}", assignment)


def psi_dual(phi: Isogeny) -> Matrix:
    """Matrix of the dual of the induced isomorphism, in the HNF basis of Lambda_H.

    With T = A^T and B the HNF basis of the column span of T, returns the
    unimodular X with B . X = T.
    """
    t = mat_transpose(phi.matrix.entries)
    basis, _ = hnf(t, phi.p)
    return solve_integer(basis, t)


def psi_dual_basis(phi: Isogeny) -> LatticeBasis:
    return hnf(mat_transpose(phi.matrix.entries), phi.p)[0]


def sigma_solve(
    gamma: PAdicMatrix, h: TorsionSubgroup, section: Section
) -> PAdicMatrix:
    """The automorphism with phi_{gamma H} . gamma = sigma . phi_H, solved exactly."""
    from .torsion import image_subgroup

    gh = image_subgroup(gamma, h)
    a_gh = section.isogeny_for(gh).matrix.entries
    a_h = section.isogeny_for(h).matrix.entries
    lhs = mat_mul(a_gh, gamma.entries)
    inv = mat_inverse_fractions(a_h)
    n = len(a_h)
    sigma = [
        [sum(Fraction(lhs[i][k]) * inv[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]
    if any(x.denominator != 1 for row in sigma for x in row):
        raise NoIntegralSolutionError("conjugator is not integral; section is broken")
    out = PAdicMatrix(gamma.p, freeze([[int(x) for x in row] for row in sigma]))
    if mat_mul(out.entries, a_h) != lhs:
        raise NoIntegralSolutionError("conjugator fails its defining equation")
    if not out.is_automorphism():
        raise NoIntegralSolutionError("conjugator is not an automorphism")
    return out
