"""Truncated power-series arithmetic and formal group laws.

Coefficients live in one of two ring models: rationals viewed p-locally
(units are the fractions of valuation zero) or integers mod p^N.  All
polynomial arithmetic is exact and truncated at a fixed total degree D.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonIntegralCoefficientError, NoUnitCoefficientError


class RationalCoefficients:
    """Exact rationals with units read p-locally (denominators prime to p)."""

    def __init__(self, p: int):
        self.p = p

    def convert(self, x):
        return Fraction(x)

    def is_unit(self, x) -> bool:
        x = Fraction(x)
        return x != 0 and x.numerator % self.p != 0 and x.denominator % self.p != 0

    def __eq__(self, other):
        return isinstance(other, RationalCoefficients) and other.p == self.p

    def __hash__(self):
        return hash(("Q", self.p))

    def __repr__(self):
        return f"Q(p={self.p})"


class IntegersMod:
    """Z / p^level; level 1 is the prime field."""

    def __init__(self, p: int, level: int):
        self.p = p
        self.level = level
        self.q = p ** level

    def convert(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise NonIntegralCoefficientError(
                    f"{x} has p = {self.p} in its denominator"
                )
            inv = pow(x.denominator % self.q, -1, self.q)
            return (x.numerator * inv) % self.q
        return int(x) % self.q

    def is_unit(self, x) -> bool:
        return int(x) % self.p != 0

    def __eq__(self, other):
        return (
            isinstance(other, IntegersMod)
            and (other.p, other.level) == (self.p, self.level)
        )

    def __hash__(self):
        return hash(("Zmod", self.p, self.level))

    def __repr__(self):
        return f"Z/{self.q}"


def prime_field(p: int) -> IntegersMod:
    return IntegersMod(p, 1)


@dataclass(frozen=True)
class TruncatedPoly:
    """Multivariate polynomial, exact modulo total degree > trunc."""

    ring: object
    nvars: int
    trunc: int
    coeffs: tuple  # sorted tuple of (exponent tuple, coefficient)

    @staticmethod
    def make(ring, nvars, trunc, coeffs: dict) -> "TruncatedPoly":
        clean = {}
        for exps, c in coeffs.items():
            if sum(exps) > trunc:
                continue
            c = ring.convert(c)
            if c != ring.convert(0):
                clean[tuple(exps)] = c
        return TruncatedPoly(ring, nvars, trunc, tuple(sorted(clean.items())))

    @staticmethod
    def zero(ring, nvars, trunc):
        return TruncatedPoly.make(ring, nvars, trunc, {})

    @staticmethod
    def const(ring, nvars, trunc, c):
        return TruncatedPoly.make(ring, nvars, trunc, {(0,) * nvars: c})

    @staticmethod
    def var(ring, nvars, trunc, i):
        exps = tuple(int(j == i) for j in range(nvars))
        return TruncatedPoly.make(ring, nvars, trunc, {exps: 1})

    def as_dict(self):
        return dict(self.coeffs)

    def add(self, other: "TruncatedPoly") -> "TruncatedPoly":
        out = self.as_dict()
        for exps, c in other.coeffs:
            out[exps] = out.get(exps, 0) + c
        return TruncatedPoly.make(self.ring, self.nvars, self.trunc, out)

    def scale(self, c) -> "TruncatedPoly":
        c = self.ring.convert(c)
        return TruncatedPoly.make(
            self.ring, self.nvars, self.trunc,
            {exps: c * v for exps, v in self.coeffs},
        )

    def mul(self, other: "TruncatedPoly") -> "TruncatedPoly":
        out = {}
        for e1, c1 in self.coeffs:
            d1 = sum(e1)
            for e2, c2 in other.coeffs:
                if d1 + sum(e2) > self.trunc:
                    continue
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return TruncatedPoly.make(self.ring, self.nvars, self.trunc, out)

    def substitute(self, args) -> "TruncatedPoly":
        """Plug args[i] (all in one ambient poly ring) in for variable i."""
        assert len(args) == self.nvars
        tgt_nvars = args[0].nvars
        ring, trunc = self.ring, self.trunc
        powers = [[TruncatedPoly.const(ring, tgt_nvars, trunc, 1)] for _ in args]
        out = TruncatedPoly.zero(ring, tgt_nvars, trunc)
        for exps, c in self.coeffs:
            term = TruncatedPoly.const(ring, tgt_nvars, trunc, c)
            for v, e in enumerate(exps):
                while len(powers[v]) <= e:
                    powers[v].append(powers[v][-1].mul(args[v]))
                term = term.mul(powers[v][e])
            out = out.add(term)
        return out

    def constant_term(self):
        return dict(self.coeffs).get((0,) * self.nvars, self.ring.convert(0))


@dataclass(frozen=True)
class TruncatedSeries:
    """Univariate series, exact modulo x^{trunc+1}."""

    ring: object
    coeffs: tuple  # degrees 0..trunc

    @staticmethod
    def from_poly(poly: TruncatedPoly) -> "TruncatedSeries":
        assert poly.nvars == 1
        out = [poly.ring.convert(0)] * (poly.trunc + 1)
        for (e,), c in poly.coeffs:
            out[e] = c
        return TruncatedSeries(poly.ring, tuple(out))

    def to_poly(self) -> TruncatedPoly:
        return TruncatedPoly.make(
            self.ring, 1, self.trunc, {(e,): c for e, c in enumerate(self.coeffs)}
        )

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def zero(ring, trunc):
        return TruncatedSeries(ring, (ring.convert(0),) * (trunc + 1))

    @staticmethod
    def x(ring, trunc):
        out = [ring.convert(0)] * (trunc + 1)
        out[1] = ring.convert(1)
        return TruncatedSeries(ring, tuple(out))

    def add(self, other):
        return TruncatedSeries(
            self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def mul(self, other):
        d = self.trunc
        out = [0] * (d + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > d:
                    break
                out[i + j] += a * b
        return TruncatedSeries(self.ring, tuple(self.ring.convert(c) for c in out))

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(x)); inner must have zero constant term."""
        assert inner.coeffs[0] == self.ring.convert(0)
        d = self.trunc
        zero = self.ring.convert(0)
        out = TruncatedSeries.zero(self.ring, d)
        # Horner from the top degree down
        for c in reversed(self.coeffs[1:]):
            term = TruncatedSeries(self.ring, (self.ring.convert(c),) + (zero,) * d)
            out = out.add(term).mul(inner)
        const = TruncatedSeries(self.ring, (self.ring.convert(self.coeffs[0]),) + (zero,) * d)
        return out.add(const)

    def map_ring(self, new_ring) -> "TruncatedSeries":
        return TruncatedSeries(new_ring, tuple(new_ring.convert(c) for c in self.coeffs))

    def is_zero(self) -> bool:
        z = self.ring.convert(0)
        return all(c == z for c in self.coeffs)


@dataclass(frozen=True)
class FGL:
    """Formal group law F(x, y) over a coefficient ring, truncated at degree D."""

    ring: object
    trunc: int
    law: TruncatedPoly
    name: str

    def plus(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        return TruncatedSeries.from_poly(self.law.substitute([a.to_poly(), b.to_poly()]))

    def i_series(self, i: int) -> TruncatedSeries:
        cache = self.__dict__.setdefault("_i_cache", {})
        if i not in cache:
            if i == 0:
                cache[i] = TruncatedSeries.zero(self.ring, self.trunc)
            else:
                cache[i] = self.plus(
                    self.i_series(i - 1), TruncatedSeries.x(self.ring, self.trunc)
                )
        return cache[i]

    def reduce(self, new_ring) -> "FGL":
        coeffs = {
            exps: new_ring.convert(c) for exps, c in self.law.coeffs
        }
        law = TruncatedPoly.make(new_ring, 2, self.trunc, coeffs)
        return FGL(new_ring, self.trunc, law, f"{self.name} over {new_ring!r}")

    # --- axiom checks -----------------------------------------------------

    def unit_axiom_holds(self) -> bool:
        x1 = TruncatedPoly.var(self.ring, 1, self.trunc, 0)
        z1 = TruncatedPoly.zero(self.ring, 1, self.trunc)
        return (
            self.law.substitute([x1, z1]) == x1
            and self.law.substitute([z1, x1]) == x1
        )

    def is_commutative(self) -> bool:
        x = TruncatedPoly.var(self.ring, 2, self.trunc, 0)
        y = TruncatedPoly.var(self.ring, 2, self.trunc, 1)
        return self.law.substitute([y, x]) == self.law

    def associativity_residual_is_zero(self) -> bool:
        x = TruncatedPoly.var(self.ring, 3, self.trunc, 0)
        y = TruncatedPoly.var(self.ring, 3, self.trunc, 1)
        z = TruncatedPoly.var(self.ring, 3, self.trunc, 2)
        fxy = self.law.substitute([x, y])
        fyz = self.law.substitute([y, z])
        return self.law.substitute([fxy, z]) == self.law.substitute([x, fyz])


def default_truncation(p: int, n: int) -> int:
    """Smallest degree window covering the p^2-series checks."""
    return p ** (2 * n) + 1


def build_additive(ring, trunc: int) -> FGL:
    law = TruncatedPoly.make(ring, 2, trunc, {(1, 0): 1, (0, 1): 1})
    return FGL(ring, trunc, law, "additive")


def build_multiplicative(ring, trunc: int) -> FGL:
    law = TruncatedPoly.make(ring, 2, trunc, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
    return FGL(ring, trunc, law, "multiplicative")


def honda_logarithm(p: int, n: int, trunc: int) -> TruncatedSeries:
    """log(x) = sum x^{p^{ni}} / p^i, truncated."""
    ring = RationalCoefficients(p)
    coeffs = [Fraction(0)] * (trunc + 1)
    i = 0
    while p ** (n * i) <= trunc:
        coeffs[p ** (n * i)] = Fraction(1, p ** i)
        i += 1
    return TruncatedSeries(ring, tuple(coeffs))


def series_reversion(s: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of a series with s(0) = 0 and unit linear term."""
    ring = s.ring
    d = s.trunc
    assert s.coeffs[0] == ring.convert(0) and s.coeffs[1] == ring.convert(1)
    inv = TruncatedSeries.x(ring, d)
    for k in range(2, d + 1):
        residual = s.compose(inv).coeffs[k]
        if residual != ring.convert(0):
            coeffs = list(inv.coeffs)
            coeffs[k] = coeffs[k] - residual
            inv = TruncatedSeries(ring, tuple(coeffs))
    return inv


def build_honda_rational(p: int, n: int, trunc: int) -> FGL:
    """Height-n Honda law over the p-local rationals: exp(log x + log y).

    Coefficients are verified p-integral; a failure indicates a bug.
    """
    ring = RationalCoefficients(p)
    log = honda_logarithm(p, n, trunc)
    exp = series_reversion(log)
    check = log.compose(exp)
    assert check == TruncatedSeries.x(ring, trunc), "exp is not inverse to log"
    lx = TruncatedPoly.make(
        ring, 2, trunc, {(e, 0): c for e, c in enumerate(log.coeffs)}
    )
    ly = TruncatedPoly.make(
        ring, 2, trunc, {(0, e): c for e, c in enumerate(log.coeffs)}
    )
    u = lx.add(ly)
    # F = exp(u) by Horner in u; exp has no constant term
    law = TruncatedPoly.zero(ring, 2, trunc)
    for c in reversed(exp.coeffs[1:]):
        law = law.add(TruncatedPoly.const(ring, 2, trunc, c)).mul(u)
    for _, c in law.coeffs:
        if Fraction(c).denominator % p == 0:
            raise NonIntegralCoefficientError(
                f"honda({n}) law has non-integral coefficient {c}"
            )
    fgl = FGL(ring, trunc, law, f"honda({n}) at p={p}")
    if not (fgl.unit_axiom_holds() and fgl.is_commutative()):
        raise NonIntegralCoefficientError("honda construction broke the FGL axioms")
    return fgl


def build_honda(p: int, n: int, trunc: int, level: int = 1) -> FGL:
    """Honda law reduced to integers mod p^level (level 1: the residue field)."""
    return build_honda_rational(p, n, trunc).reduce(IntegersMod(p, level))


def i_series(fgl: FGL, i: int) -> TruncatedSeries:
    return fgl.i_series(i)


def weierstrass_degree(g: TruncatedSeries) -> int:
    """Smallest degree carrying a unit coefficient; g must vanish at 0."""
    ring = g.ring
    if g.coeffs[0] != ring.convert(0):
        raise ValueError("series must vanish at the origin")
    for d in range(1, g.trunc + 1):
        if ring.is_unit(g.coeffs[d]):
            return d
    raise NoUnitCoefficientError(
        f"no unit coefficient up to degree {g.trunc}; raise the truncation"
    )


def quotient_ring_rank(fgl: FGL, k: int):
    """Rank and monomial basis of R[[x]]/([p^k](x)) for the law's own prime."""
    p = fgl.ring.p
    rank = weierstrass_degree(fgl.i_series(p ** k))
    basis = tuple(
        "1" if e == 0 else ("x" if e == 1 else f"x^{e}") for e in range(rank)
    )
    return rank, basis


def abelian_quotient_rank(fgl: FGL, ks) -> int:
    """Tensor rank for a product of cyclic p-groups C_{p^{k_1}} x ... ."""
    rank = 1
    for k in ks:
        rank *= quotient_ring_rank(fgl, k)[0]
    return rank
