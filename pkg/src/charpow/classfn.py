"""Generalized class functions at a finite working level, and their operations.

The coefficient ring is modeled at level N as the ring of rational-valued
functions on all n x n matrices over Z/p^N.  An isogeny with matrix A acts
on the right by (c . A)(xi) = c(A xi); a stabilizer element acts through
the other side, (c . s)(xi) = c(xi s), so the two actions commute on the
nose.  Class functions are sparse maps from canonical tuple-class
representatives to such tables; a missing key is the zero element.

The working level must satisfy p^N >= exponent of the p-part of every
group acted on: tuple classes only see a matrix through its residue mod
the exponent, values only through its residue mod p^N, and one level has
to serve both.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import LevelMismatchError, NotASubgroupError, SectionOutOfRangeError
from .groups import (
    FiniteGroup,
    Homomorphism,
    Subgroup,
    TupleClass,
    enumerate_hom_classes,
    precompose,
    product_group,
    split_product_class,
    symm_class_to_sum,
    symmetric_group,
    wreath_class_to_decorated,
    wreath_group,
)
from .isogeny import Isogeny, Section, psi_dual
from .lattice import PAdicMatrix, mat_det, mat_transpose
from .rng import SplitMix64, random_fraction

ZERO = Fraction(0)
ONE = Fraction(1)


@lru_cache(maxsize=None)
def matrix_space(p: int, level: int, n: int):
    """All n x n matrices mod p^level, flattened row-major, lexicographic."""
    q = p ** level
    mats = tuple(itertools.product(range(q), repeat=n * n))
    index = {m: i for i, m in enumerate(mats)}
    return mats, index


@lru_cache(maxsize=None)
def _left_translation_perm(p, level, n, a_flat):
    """perm[t] = index of (A . xi_t) mod p^level."""
    q = p ** level
    mats, index = matrix_space(p, level, n)
    a = [[a_flat[i * n + j] % q for j in range(n)] for i in range(n)]
    perm = []
    for flat in mats:
        prod = tuple(
            sum(a[i][k] * flat[k * n + j] for k in range(n)) % q
            for i in range(n)
            for j in range(n)
        )
        perm.append(index[prod])
    return tuple(perm)


@lru_cache(maxsize=None)
def _right_translation_perm(p, level, n, s_flat):
    """perm[t] = index of (xi_t . S) mod p^level."""
    q = p ** level
    mats, index = matrix_space(p, level, n)
    s = [[s_flat[i * n + j] % q for j in range(n)] for i in range(n)]
    perm = []
    for flat in mats:
        prod = tuple(
            sum(flat[i * n + k] * s[k][j] for k in range(n)) % q
            for i in range(n)
            for j in range(n)
        )
        perm.append(index[prod])
    return tuple(perm)


def _flatten(entries):
    return tuple(int(x) for row in entries for x in row)


@dataclass(frozen=True)
class C0Element:
    """Rational-valued function on M_n(Z/p^level), the level-N coefficient model."""

    p: int
    n: int
    level: int
    values: tuple

    def __post_init__(self):
        size = (self.p ** self.level) ** (self.n * self.n)
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) != size:
            raise LevelMismatchError(
                f"table must have {size} entries, got {len(vals)}"
            )
        object.__setattr__(self, "values", vals)

    def _like(self, values):
        return C0Element(self.p, self.n, self.level, tuple(values))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def add(self, other: "C0Element") -> "C0Element":
        self._check(other)
        return self._like(a + b for a, b in zip(self.values, other.values))

    def sub(self, other: "C0Element") -> "C0Element":
        self._check(other)
        return self._like(a - b for a, b in zip(self.values, other.values))

    def mul(self, other: "C0Element") -> "C0Element":
        self._check(other)
        return self._like(a * b for a, b in zip(self.values, other.values))

    def scale(self, c) -> "C0Element":
        c = Fraction(c)
        return self._like(c * v for v in self.values)

    def act_isogeny(self, phi: Isogeny) -> "C0Element":
        """Right action (c . phi)(xi) = c(A_phi xi); a ring homomorphism."""
        return self.act_matrix_left(phi.matrix.entries)

    def act_matrix_left(self, entries) -> "C0Element":
        perm = _left_translation_perm(self.p, self.level, self.n, _flatten(entries))
        vals = self.values
        return self._like(vals[t] for t in perm)

    def act_matrix_right(self, entries) -> "C0Element":
        perm = _right_translation_perm(self.p, self.level, self.n, _flatten(entries))
        vals = self.values
        return self._like(vals[t] for t in perm)

    def _check(self, other):
        if (self.p, self.n, self.level) != (other.p, other.n, other.level):
            raise LevelMismatchError("coefficient tables live at different levels")


def c0_zero(p, n, level) -> C0Element:
    size = (p ** level) ** (n * n)
    return C0Element(p, n, level, (ZERO,) * size)


def c0_one(p, n, level) -> C0Element:
    size = (p ** level) ** (n * n)
    return C0Element(p, n, level, (ONE,) * size)


def c0_constant(p, n, level, c) -> C0Element:
    size = (p ** level) ** (n * n)
    return C0Element(p, n, level, (Fraction(c),) * size)


def c0_coordinate(p, n, level) -> C0Element:
    """The function xi -> its enumeration index; a convenient exact generator."""
    size = (p ** level) ** (n * n)
    return C0Element(p, n, level, tuple(Fraction(t) for t in range(size)))


def c0_delta(p, n, level, t: int) -> C0Element:
    size = (p ** level) ** (n * n)
    return C0Element(p, n, level, tuple(ONE if i == t else ZERO for i in range(size)))


def c0_random(p, n, level, rng: SplitMix64) -> C0Element:
    size = (p ** level) ** (n * n)
    return C0Element(p, n, level, tuple(random_fraction(rng) for _ in range(size)))


@dataclass(frozen=True)
class StabilizerElement:
    """Invertible matrix mod p^level acting by (c . s)(xi) = c(xi s)."""

    p: int
    n: int
    level: int
    entries: tuple

    def __post_init__(self):
        q = self.p ** self.level
        ent = tuple(tuple(int(x) % q for x in row) for row in self.entries)
        object.__setattr__(self, "entries", ent)
        if mat_det(ent) % self.p == 0:
            raise ValueError("stabilizer element must be invertible mod p")


def random_stabilizer(p, n, level, rng: SplitMix64) -> StabilizerElement:
    q = p ** level
    while True:
        ent = tuple(tuple(rng.below(q) for _ in range(n)) for _ in range(n))
        if mat_det(ent) % p != 0:
            return StabilizerElement(p, n, level, ent)


class ClassFunction:
    """Sparse map from tuple classes of a group to coefficient tables."""

    __slots__ = ("group", "p", "n", "level", "values")

    def __init__(self, group: FiniteGroup, p: int, n: int, level: int, values):
        self.group = group
        self.p = p
        self.n = n
        self.level = level
        keys = {c.rep for c in enumerate_hom_classes(group, n, p)}
        table = {}
        for rep, val in (values.items() if isinstance(values, dict) else values):
            rep = tuple(int(x) for x in rep)
            if rep not in keys:
                raise ValueError(f"{rep} is not a canonical tuple-class key")
            if (val.p, val.n, val.level) != (p, n, level):
                raise LevelMismatchError("value table level does not match")
            if not val.is_zero():
                table[rep] = val
        self.values = dict(sorted(table.items()))

    def classes(self):
        return enumerate_hom_classes(self.group, self.n, self.p)

    def value_at(self, key) -> C0Element:
        if isinstance(key, TupleClass):
            rep = key.rep  # already canonical
        else:
            from .groups import canonical_tuple

            rep = canonical_tuple(self.group, tuple(key))
        return self.values.get(rep) or c0_zero(self.p, self.n, self.level)

    def _like(self, values) -> "ClassFunction":
        return ClassFunction(self.group, self.p, self.n, self.level, values)

    def add(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        out = dict(self.values)
        for rep, val in other.values.items():
            out[rep] = out[rep].add(val) if rep in out else val
        return self._like(out)

    def mul(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return self._like(
            {
                rep: val.mul(other.values[rep])
                for rep, val in self.values.items()
                if rep in other.values
            }
        )

    def scale(self, c) -> "ClassFunction":
        return self._like({rep: val.scale(c) for rep, val in self.values.items()})

    def pow(self, k: int) -> "ClassFunction":
        out = constant_one(self.group, self.p, self.n, self.level)
        for _ in range(k):
            out = out.mul(self)
        return out

    def _check(self, other):
        if self.group is not other.group:
            raise ValueError("class functions live on different groups")
        if (self.p, self.n, self.level) != (other.p, other.n, other.level):
            raise LevelMismatchError("class functions live at different levels")

    def __eq__(self, other):
        return (
            isinstance(other, ClassFunction)
            and self.group is other.group
            and (self.p, self.n, self.level) == (other.p, other.n, other.level)
            and self.values == other.values
        )

    def __repr__(self):
        return (
            f"ClassFunction({self.group.name}, p={self.p}, n={self.n}, "
            f"level={self.level}, support={len(self.values)})"
        )


def constant_one(group, p, n, level) -> ClassFunction:
    one = c0_one(p, n, level)
    return ClassFunction(
        group, p, n, level,
        {c.rep: one for c in enumerate_hom_classes(group, n, p)},
    )


def constant_value(group, p, n, level, c0: C0Element) -> ClassFunction:
    return ClassFunction(
        group, p, n, level,
        {c.rep: c0 for c in enumerate_hom_classes(group, n, p)},
    )


def indicator(cls: TupleClass, level: int, c0: C0Element = None) -> ClassFunction:
    value = c0 if c0 is not None else c0_one(cls.p, cls.n, level)
    return ClassFunction(
        cls.group, cls.p, cls.n, level, {cls.rep: value}
    )


def random_class_function(group, p, n, level, seed: int) -> ClassFunction:
    rng = SplitMix64(seed)
    return ClassFunction(
        group, p, n, level,
        {c.rep: c0_random(p, n, level, rng)
         for c in enumerate_hom_classes(group, n, p)},
    )


# ---------------------------------------------------------------------------
# automorphism action, averaging, invariance


def _require_level_covers(group: FiniteGroup, p: int, level: int):
    needed = group.exponent_valuation(p)
    if level < needed:
        raise LevelMismatchError(
            f"group {group.name} needs level >= {needed}, have {level}"
        )


def act_by_residue(f: ClassFunction, gbar) -> ClassFunction:
    """Right action of an invertible matrix mod p^level on a class function.

    (f . g)([alpha]) = f([alpha g^T]) . g; keys are pulled back through the
    transpose, values move by left translation.
    """
    _require_level_covers(f.group, f.p, f.level)
    q = f.p ** f.level
    lift = tuple(tuple(int(x) % q for x in row) for row in gbar)
    if mat_det(lift) % f.p == 0:
        raise ValueError("matrix is not invertible mod p")
    tr = mat_transpose(lift)
    out = {}
    for cls in enumerate_hom_classes(f.group, f.n, f.p):
        val = f.value_at(precompose(cls, tr))
        if not val.is_zero():
            out[cls.rep] = val.act_matrix_left(lift)
    return f._like(out)


def aut_act(f: ClassFunction, gamma: PAdicMatrix) -> ClassFunction:
    """(f . gamma)([alpha]) = f([alpha gamma^T]) . gamma, for unimodular gamma."""
    if gamma.p != f.p:
        raise LevelMismatchError("prime mismatch")
    if not gamma.is_automorphism():
        raise ValueError("aut_act needs a matrix of determinant valuation 0")
    return act_by_residue(f, gamma.entries)


@lru_cache(maxsize=None)
def general_linear_residues(p: int, level: int, n: int):
    """All invertible n x n matrices mod p^level (invertibility = unit det mod p)."""
    q = p ** level
    out = []
    for flat in itertools.product(range(q), repeat=n * n):
        mat = tuple(tuple(flat[i * n + j] for j in range(n)) for i in range(n))
        if mat_det(mat) % p != 0:
            out.append(mat)
    return tuple(out)


def average(f: ClassFunction) -> ClassFunction:
    """Projection onto invariant class functions: average over GL_n(Z/p^level)."""
    gl = general_linear_residues(f.p, f.level, f.n)
    total = None
    for gbar in gl:
        moved = act_by_residue(f, gbar)
        total = moved if total is None else total.add(moved)
    return total.scale(Fraction(1, len(gl)))


def is_invariant(f: ClassFunction) -> bool:
    gl = general_linear_residues(f.p, f.level, f.n)
    return all(act_by_residue(f, gbar) == f for gbar in gl)


def stabilizer_act(f: ClassFunction, s: StabilizerElement) -> ClassFunction:
    if (s.p, s.n, s.level) != (f.p, f.n, f.level):
        raise LevelMismatchError("stabilizer element level does not match")
    return f._like(
        {rep: val.act_matrix_right(s.entries) for rep, val in f.values.items()}
    )


# ---------------------------------------------------------------------------
# restriction, products, transfers


def restrict(f: ClassFunction, hom: Homomorphism) -> ClassFunction:
    """Pullback along a homomorphism: (hom^* f)([alpha]) = f([hom . alpha])."""
    if hom.target is not f.group:
        raise ValueError("homomorphism target does not match the class function")
    out = {}
    for cls in enumerate_hom_classes(hom.source, f.n, f.p):
        mapped = TupleClass(f.group, tuple(hom(i) for i in cls.rep), f.p)
        val = f.value_at(mapped)
        if not val.is_zero():
            out[cls.rep] = val
    return ClassFunction(hom.source, f.p, f.n, f.level, out)


def external_product(f: ClassFunction, g: ClassFunction) -> ClassFunction:
    """Class function on the product group with value f([a]) g([b]) at ([a], [b])."""
    if (f.p, f.n, f.level) != (g.p, g.n, g.level):
        raise LevelMismatchError("external product needs matching levels")
    target = product_group(f.group, g.group)
    out = {}
    for cls in enumerate_hom_classes(target, f.n, f.p):
        a, b = split_product_class(cls)
        val = f.value_at(a).mul(g.value_at(b))
        if not val.is_zero():
            out[cls.rep] = val
    return ClassFunction(target, f.p, f.n, f.level, out)


def transfer_counts(iota: Homomorphism, alpha: TupleClass):
    """Multiplicity of each source class among conjugates landing in the image.

    Counts cosets g . im(iota) fixed by every entry of alpha, keyed by the
    source class of the conjugated tuple.
    """
    if not iota.is_injective():
        raise NotASubgroupError("transfer needs an injective homomorphism")
    big = iota.target
    inside = {img: src for src, img in enumerate(iota.mapping)}
    counts = {}
    seen = set()
    image = set(iota.mapping)
    for g in range(big.order):
        if g in seen:
            continue
        coset = {big.mul(g, h) for h in image}
        seen |= coset
        ginv = big.inverse(g)
        conj = tuple(big.mul(big.mul(ginv, t), g) for t in alpha.rep)
        if all(x in image for x in conj):
            # fixed coset (lemma: conjugating into the image fixes the coset)
            src_rep = TupleClass(
                iota.source, tuple(inside[x] for x in conj), alpha.p
            ).rep
            counts[src_rep] = counts.get(src_rep, 0) + 1
    return counts


def transfer(f: ClassFunction, iota: Homomorphism) -> ClassFunction:
    """Transfer along an injective homomorphism, by summing over fixed cosets."""
    if iota.source is not f.group:
        raise ValueError("class function does not live on the transfer source")
    big = iota.target
    out = {}
    for cls in enumerate_hom_classes(big, f.n, f.p):
        total = c0_zero(f.p, f.n, f.level)
        for src_rep, count in transfer_counts(iota, cls).items():
            val = f.value_at(src_rep)
            if not val.is_zero():
                total = total.add(val.scale(count))
        if not total.is_zero():
            out[cls.rep] = total
    return ClassFunction(big, f.p, f.n, f.level, out)


def transfer_from_subgroup(f: ClassFunction, sub: Subgroup) -> ClassFunction:
    return transfer(f, sub.inclusion())


# ---------------------------------------------------------------------------
# power operations


def _section_check(f: ClassFunction, m: int, section: Section):
    if (section.p, section.n) != (f.p, f.n):
        raise LevelMismatchError("section parameters do not match")
    need = 0
    q = 1
    while q * f.p <= m:
        q *= f.p
        need += 1
    if need > section.bound:
        raise SectionOutOfRangeError(
            f"power operation with m={m} needs section bound >= {need}"
        )


def power_op(f: ClassFunction, m: int, section: Section) -> ClassFunction:
    """P_m for the given section: ([alpha], +H_i) -> prod_i f([alpha phi_{H_i}^*]) . phi_{H_i}."""
    _section_check(f, m, section)
    target = product_group(f.group, symmetric_group(m))
    _require_level_covers(target, f.p, f.level)
    out = {}
    for cls in enumerate_hom_classes(target, f.n, f.p):
        alpha, tau = split_product_class(cls)
        val = c0_one(f.p, f.n, f.level)
        for h in symm_class_to_sum(tau).summands:
            phi = section.isogeny_for(h)
            pulled = precompose(alpha, mat_transpose(phi.matrix.entries))
            val = val.mul(f.value_at(pulled).act_isogeny(phi))
            if val.is_zero():
                break
        if not val.is_zero():
            out[cls.rep] = val
    return ClassFunction(target, f.p, f.n, f.level, out)


def total_power_op(f: ClassFunction, m: int, section: Section) -> ClassFunction:
    """The wreath-product refinement of power_op, using the psi-dual per summand."""
    _section_check(f, m, section)
    target = wreath_group(f.group, m)
    _require_level_covers(target, f.p, f.level)
    out = {}
    for cls in enumerate_hom_classes(target, f.n, f.p):
        val = c0_one(f.p, f.n, f.level)
        for h, alpha in wreath_class_to_decorated(cls).summands:
            phi = section.isogeny_for(h)
            pulled = precompose(alpha, psi_dual(phi))
            val = val.mul(f.value_at(pulled).act_isogeny(phi))
            if val.is_zero():
                break
        if not val.is_zero():
            out[cls.rep] = val
    return ClassFunction(target, f.p, f.n, f.level, out)


# ---------------------------------------------------------------------------
# transfer ideal


class TransferIdeal:
    """Q-basis data for the span of transfer images inside a class-function ring."""

    def __init__(self, group: FiniteGroup, p: int, n: int, level: int, generators):
        self.group = group
        self.p = p
        self.n = n
        self.level = level
        self.keys = tuple(c.rep for c in enumerate_hom_classes(group, n, p))
        self.generators = tuple(generators)  # integer vectors over self.keys
        self._rref = _row_reduce([list(map(Fraction, g)) for g in self.generators])

    @property
    def rank(self) -> int:
        return len(self._rref)

    def quotient_dim(self) -> int:
        return len(self.keys) - self.rank

    def contains_vector(self, vec) -> bool:
        row = [Fraction(x) for x in vec]
        row = _reduce_against(row, self._rref)
        return all(x == 0 for x in row)

    def contains(self, f: ClassFunction) -> bool:
        """Membership for a C0-valued function: every evaluation column must lie in the span."""
        size = (f.p ** f.level) ** (f.n * f.n)
        for t in range(size):
            vec = [f.value_at(rep).values[t] for rep in self.keys]
            if not self.contains_vector(vec):
                return False
        return True


def _row_reduce(rows):
    basis = []
    for row in rows:
        row = _reduce_against(row, basis)
        pivot = next((i for i, x in enumerate(row) if x != 0), None)
        if pivot is None:
            continue
        inv = Fraction(1) / row[pivot]
        row = [x * inv for x in row]
        basis.append(row)
        basis.sort(key=lambda r: next(i for i, x in enumerate(r) if x != 0))
        for i, other in enumerate(basis):
            if other is not row:
                p2 = next(j for j, x in enumerate(row) if x != 0)
                if other[p2] != 0:
                    basis[i] = [a - other[p2] * b for a, b in zip(other, row)]
    return [r for r in basis if any(x != 0 for x in r)]


def _reduce_against(row, basis):
    row = list(row)
    for b in basis:
        pivot = next(i for i, x in enumerate(b) if x != 0)
        if row[pivot] != 0:
            c = row[pivot]
            row = [a - c * v for a, v in zip(row, b)]
    return row


def transfer_ideal(p: int, n: int, level: int, m: int, g: FiniteGroup = None):
    """Span of all transfer images from the two-block subgroups at total size m.

    With g None this is the ideal in Cl_n(S_m); otherwise the wreath version
    in Cl_n(G wr S_m).
    """
    from .groups import delta_embed, wreath_delta_embed

    if m < 2:
        raise ValueError("transfer ideal needs m >= 2")
    if g is None or (g.structure and g.structure == ("symmetric", 1)):
        target = symmetric_group(m)
        embeds = [delta_embed(i, m - i) for i in range(1, m)]
    else:
        target = wreath_group(g, m)
        embeds = [wreath_delta_embed(g, i, m - i) for i in range(1, m)]
    keys = tuple(c.rep for c in enumerate_hom_classes(target, n, p))
    keypos = {rep: i for i, rep in enumerate(keys)}
    gens = []
    for iota in embeds:
        source_classes = enumerate_hom_classes(iota.source, n, p)
        columns = {src.rep: [0] * len(keys) for src in source_classes}
        for cls in enumerate_hom_classes(target, n, p):
            for src_rep, count in transfer_counts(iota, cls).items():
                columns[src_rep][keypos[cls.rep]] += count
        gens.extend(tuple(col) for col in columns.values())
    return TransferIdeal(target, p, n, level, gens)


# ---------------------------------------------------------------------------
# serialization


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_fraction(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def to_json_dict(f: ClassFunction) -> dict:
    return {
        "p": f.p,
        "n": f.n,
        "level": f.level,
        "group": f.group.name,
        "classes": [
            {"rep": list(rep), "value": [_fraction_str(v) for v in val.values]}
            for rep, val in sorted(f.values.items())
        ],
    }


def from_json_dict(data: dict, group: FiniteGroup = None) -> ClassFunction:
    from .groups import build_group

    if group is None:
        group = build_group(data["group"])
    p, n, level = int(data["p"]), int(data["n"]), int(data["level"])
    values = {}
    for entry in data["classes"]:
        rep = tuple(int(x) for x in entry["rep"])
        values[rep] = C0Element(
            p, n, level, tuple(_parse_fraction(s) for s in entry["value"])
        )
    return ClassFunction(group, p, n, level, values)
