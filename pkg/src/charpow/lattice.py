"""Exact integer-matrix linear algebra specialized to p-local questions.

Matrices are immutable tuples of tuples of Python ints.  Two Hermite forms
are used throughout the package:

* column HNF (``hnf``): canonical basis of the *column span* of a matrix.
  Upper triangular, positive pivots, entries to the right of each pivot
  reduced into ``[0, pivot)``.  This is the ``LatticeBasis`` form.
* row HNF (``row_hnf``): canonical representative of the *left*
  GL_n(Z)-orbit of a matrix.  Upper triangular, positive pivots, entries
  above each pivot reduced modulo the pivot of their column.  Two matrices
  have the same row HNF iff they define the same kernel on (Q_p/Z_p)^n,
  which is what makes subgroup equality a plain equality test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from .errors import NotInLatticeError, SingularMatrixError

Matrix = tuple  # tuple of tuples of int


def freeze(rows) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def scalar_matrix(n: int, c: int) -> Matrix:
    return tuple(tuple(c if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = len(b[0])
    inner = len(b)
    return tuple(
        tuple(sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols))
        for row in a
    )


def mat_transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_vec(a: Matrix, v) -> tuple:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def mat_det(a: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_inverse_fractions(a: Matrix):
    """Inverse as a tuple of tuples of Fractions (adjugate-free Gauss-Jordan)."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def int_valuation(x: int, p: int) -> int:
    if x == 0:
        raise SingularMatrixError("valuation of zero")
    v = 0
    x = abs(x)
    while x % p == 0:
        x //= p
        v += 1
    return v


def _xgcd(a: int, b: int):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PAdicMatrix:
    """Integer square matrix viewed in M_n(Z_p); carrier for isogenies and duals."""

    p: int
    entries: Matrix

    def __post_init__(self):
        object.__setattr__(self, "entries", freeze(self.entries))
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("entries must be square")
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def det(self) -> int:
        return mat_det(self.entries)

    def det_valuation(self) -> int:
        if self.det == 0:
            raise SingularMatrixError("matrix represents no isogeny (det = 0)")
        return int_valuation(self.det, self.p)

    def is_automorphism(self) -> bool:
        return self.det != 0 and self.det % self.p != 0

    def mul(self, other: "PAdicMatrix") -> "PAdicMatrix":
        assert self.p == other.p
        return PAdicMatrix(self.p, mat_mul(self.entries, other.entries))

    def transpose(self) -> "PAdicMatrix":
        return PAdicMatrix(self.p, mat_transpose(self.entries))

    @staticmethod
    def identity(p: int, n: int) -> "PAdicMatrix":
        return PAdicMatrix(p, identity_matrix(n))


@dataclass(frozen=True)
class LatticeBasis:
    """Column-HNF basis of a finite-index sublattice of Z^n."""

    p: int
    matrix: Matrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", freeze(self.matrix))
        m = self.matrix
        n = len(m)
        for i in range(n):
            if m[i][i] <= 0:
                raise ValueError("pivots must be positive")
            for j in range(n):
                if j < i and m[i][j] != 0:
                    raise ValueError("basis must be upper triangular")
                if j > i and not 0 <= m[i][j] < m[i][i]:
                    raise ValueError("entries right of a pivot must be reduced")

    @property
    def n(self) -> int:
        return len(self.matrix)

    def index(self) -> int:
        """Index [Z^n : L]; equals the product of the diagonal."""
        out = 1
        for i in range(self.n):
            out *= self.matrix[i][i]
        return out


def _eliminate_row(cols, active, r):
    """Column ops among ``active`` columns leaving a single nonzero in row r.

    Returns the index (within ``active``) of the surviving pivot column, or
    None if row r vanishes on the active columns.
    """
    acc = None
    for idx in active:
        if cols[idx][r] != 0:
            acc = idx
            break
    if acc is None:
        return None
    for idx in active:
        if idx == acc or cols[idx][r] == 0:
            continue
        a, b = cols[acc][r], cols[idx][r]
        g, x, y = _xgcd(a, b)
        ca, ci = cols[acc], cols[idx]
        new_acc = [x * u + y * v for u, v in zip(ca, ci)]
        new_idx = [(a // g) * v - (b // g) * u for u, v in zip(ca, ci)]
        cols[acc], cols[idx] = new_acc, new_idx
    return acc


def _reduce_off_pivots(h):
    """In-place reduction: entries right of each pivot into [0, pivot)."""
    n = len(h)
    for i in range(n - 1, -1, -1):
        if h[i][i] < 0:
            for r in range(n):
                h[r][i] = -h[r][i]
        for j in range(i + 1, n):
            q = h[i][j] // h[i][i]
            if q:
                for r in range(i + 1):
                    h[r][j] -= q * h[r][i]


def column_span_basis(entries) -> Matrix:
    """Column-HNF basis (n x n, upper triangular) of the span of an n x m matrix.

    Raises SingularMatrixError if the columns do not span a rank-n lattice.
    """
    n = len(entries)
    cols = [list(col) for col in zip(*entries)]
    active = list(range(len(cols)))
    pivots = [None] * n
    for r in range(n - 1, -1, -1):
        piv = _eliminate_row(cols, active, r)
        if piv is None:
            raise SingularMatrixError("columns do not have full rank")
        pivots[r] = piv
        active = [i for i in active if i != piv]
    h = [[cols[pivots[j]][i] for j in range(n)] for i in range(n)]
    _reduce_off_pivots(h)
    return freeze(h)


def hnf(entries, p: int):
    """Column Hermite normal form of a nonsingular integer matrix.

    Returns (H, U) with H a LatticeBasis, U unimodular and entries . U = H.matrix.
    """
    if isinstance(entries, PAdicMatrix):
        p = entries.p
        entries = entries.entries
    n = len(entries)
    if mat_det(entries) == 0:
        raise SingularMatrixError("hnf requires a nonsingular matrix")
    cols = [list(col) + [int(i == j) for j in range(n)]
            for i, col in enumerate(zip(*entries))]
    active = list(range(n))
    pivots = [None] * n
    for r in range(n - 1, -1, -1):
        piv = _eliminate_row(cols, active, r)
        pivots[r] = piv
        active = [i for i in active if i != piv]
    full = [[cols[pivots[j]][i] for j in range(n)] for i in range(2 * n)]
    h = [row[:] for row in full[:n]]
    u = [row[:] for row in full[n:]]
    # mirror the reduction pass on the transform columns
    for i in range(n - 1, -1, -1):
        if h[i][i] < 0:
            for r in range(n):
                h[r][i] = -h[r][i]
            for r in range(n):
                u[r][i] = -u[r][i]
        for j in range(i + 1, n):
            q = h[i][j] // h[i][i]
            if q:
                for r in range(i + 1):
                    h[r][j] -= q * h[r][i]
                for r in range(n):
                    u[r][j] -= q * u[r][i]
    return LatticeBasis(p, freeze(h)), freeze(u)


def row_hnf(entries) -> Matrix:
    """Row Hermite normal form: the canonical element of the left GL_n(Z)-orbit.

    Upper triangular with positive pivots; above-pivot entries lie in
    [0, pivot of their column).
    """
    n = len(entries)
    rows = [list(r) for r in entries]
    for c in range(n):
        acc = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if acc is None:
            raise SingularMatrixError("row_hnf requires a nonsingular matrix")
        rows[c], rows[acc] = rows[acc], rows[c]
        for i in range(c + 1, n):
            if rows[i][c] == 0:
                continue
            a, b = rows[c][c], rows[i][c]
            g, x, y = _xgcd(a, b)
            rc, ri = rows[c], rows[i]
            rows[c] = [x * u + y * v for u, v in zip(rc, ri)]
            rows[i] = [(a // g) * v - (b // g) * u for u, v in zip(rc, ri)]
    for j in range(n):
        if rows[j][j] < 0:
            rows[j] = [-x for x in rows[j]]
        for i in range(j):
            q = rows[i][j] // rows[j][j]
            if q:
                rows[i] = [u - q * v for u, v in zip(rows[i], rows[j])]
    return freeze(rows)


def snf(m: PAdicMatrix) -> tuple:
    """Elementary divisors of Z^n / M Z^n, returned as their p-parts.

    The chain d_1 | d_2 | ... | d_n is preserved.
    """
    if mat_det(m.entries) == 0:
        raise SingularMatrixError("snf requires a nonsingular matrix")
    divisors = snf_divisors(m.entries)
    return tuple(m.p ** int_valuation(d, m.p) for d in divisors)


def snf_divisors(entries) -> tuple:
    """Absolute elementary divisors over Z with the divisibility chain fixed up."""
    n = len(entries)
    a = [list(row) for row in entries]

    def improve(k):
        # clear row/column k against the pivot at (k, k)
        while True:
            for i in range(k + 1, n):
                if a[i][k] % a[k][k] != 0:
                    g, x, y = _xgcd(a[k][k], a[i][k])
                    rk, ri = a[k], a[i]
                    ck, ci = a[k][k] // g, a[i][k] // g
                    a[k] = [x * u + y * v for u, v in zip(rk, ri)]
                    a[i] = [ck * v - ci * u for u, v in zip(rk, ri)]
            for i in range(k + 1, n):
                q = a[i][k] // a[k][k]
                if q:
                    a[i] = [u - q * v for u, v in zip(a[i], a[k])]
            for j in range(k + 1, n):
                if a[k][j] % a[k][k] != 0:
                    g, x, y = _xgcd(a[k][k], a[k][j])
                    ck, cj = a[k][k] // g, a[k][j] // g
                    for r in range(n):
                        u, v = a[r][k], a[r][j]
                        a[r][k] = x * u + y * v
                        a[r][j] = ck * v - cj * u
            for j in range(k + 1, n):
                q = a[k][j] // a[k][k]
                if q:
                    for r in range(n):
                        a[r][j] -= q * a[r][k]
            if all(a[i][k] == 0 for i in range(k + 1, n)) and all(
                a[k][j] == 0 for j in range(k + 1, n)
            ):
                return

    for k in range(n):
        pivot = next(
            ((i, j) for i in range(k, n) for j in range(k, n) if a[i][j] != 0), None
        )
        if pivot is None:
            raise SingularMatrixError("snf requires a nonsingular matrix")
        i, j = pivot
        a[k], a[i] = a[i], a[k]
        for r in range(n):
            a[r][k], a[r][j] = a[r][j], a[r][k]
        improve(k)
    d = [abs(a[i][i]) for i in range(n)]
    # enforce d_1 | d_2 | ... | d_n
    for i in range(n - 1):
        for j in range(i + 1, n):
            if d[j] % d[i] != 0:
                g = gcd(d[i], d[j])
                d[i], d[j] = g, d[i] * d[j] // g
    d.sort()
    return tuple(d)


def det_valuation(m: PAdicMatrix) -> int:
    """v_p(det M); the log_p of the kernel order of the matching isogeny."""
    return m.det_valuation()


def solve_integer(basis: LatticeBasis, target) -> Matrix:
    """Solve B . X = T exactly over Z by back substitution.

    Every column of T must lie in the lattice spanned by B; otherwise
    NotInLatticeError is raised.
    """
    b = basis.matrix
    n = basis.n
    tcols = list(zip(*target))
    xcols = []
    for col in tcols:
        col = list(col)
        x = [0] * n
        for i in range(n - 1, -1, -1):
            r = col[i]
            for j in range(i + 1, n):
                r -= b[i][j] * x[j]
            if r % b[i][i] != 0:
                raise NotInLatticeError("column not in the lattice")
            x[i] = r // b[i][i]
        xcols.append(x)
    return freeze(zip(*xcols))


def in_lattice(basis: LatticeBasis, vector) -> bool:
    try:
        solve_integer(basis, tuple((v,) for v in vector))
        return True
    except NotInLatticeError:
        return False
