"""Finite groups as explicit tables; commuting p-power tuples and their classes.

Groups are built from a small spec language ("S3", "C4", "C2xC2",
"wr(S2,2)") and cached per name, so repeated constructions hand back the
same object and conjugacy classes stay comparable across calls.  Tuple
classes are canonicalized to the lexicographically least representative of
their simultaneous-conjugacy orbit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    GroupTooLargeError,
    NotAHomomorphismError,
    NotASubgroupError,
    NotPPowerTupleError,
)
from .lattice import (
    LatticeBasis,
    Matrix,
    column_span_basis,
    int_valuation,
    solve_integer,
)
from .rng import SplitMix64
from .torsion import (
    SumOfSubgroups,
    annihilator_lattice,
    subgroup_from_annihilator,
)

ORDER_CAP = 10_000
FULL_CHECK_LIMIT = 200


class FiniteGroup:
    """Indexed element set with a full multiplication table."""

    def __init__(self, name, elements, mul_label, structure=None, generators=None):
        if len(elements) > ORDER_CAP:
            raise GroupTooLargeError(
                f"group {name} has order {len(elements)} > {ORDER_CAP}"
            )
        self.name = name
        self.elements = tuple(elements)
        self.index = {lab: i for i, lab in enumerate(self.elements)}
        self.structure = structure
        self.generators = generators
        n = len(self.elements)
        table = np.empty((n, n), dtype=np.uint16)
        for i, a in enumerate(self.elements):
            row = [self.index[mul_label(a, b)] for b in self.elements]
            table[i] = row
        self.table = table
        self._finish_init()

    def _finish_init(self):
        table = self.table
        n = self.order
        eye = np.arange(n)
        ident = np.nonzero((table == eye).all(axis=1) & (table.T == eye).all(axis=1))[0]
        if len(ident) != 1:
            raise ValueError(f"group {self.name} has no identity")
        self.identity = int(ident[0])
        inv = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero(table == self.identity)
        inv[rows] = cols
        if (inv < 0).any():
            raise ValueError(f"group {self.name} has an element without inverse")
        self.inv = inv.astype(np.uint16)
        self._check_associativity()
        self._orders = None
        self._hom_classes = {}
        self._subgroup_groups = {}

    def _check_associativity(self):
        table = self.table
        n = self.order
        if n <= FULL_CHECK_LIMIT:
            left = table[table.astype(np.intp), :]
            right = table[:, table.astype(np.intp)]
            ok = (left == right).all()
        else:
            rng = SplitMix64(0)
            ok = True
            for _ in range(20_000):
                i, j, k = rng.below(n), rng.below(n), rng.below(n)
                if table[table[i, j], k] != table[i, table[j, k]]:
                    ok = False
                    break
        if not ok:
            raise ValueError(f"multiplication table of {self.name} is not associative")

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return int(self.inv[i])

    def conjugate(self, x: int, g: int) -> int:
        return int(self.table[self.table[x, g], self.inv[x]])

    def orders(self):
        if self._orders is None:
            out = np.empty(self.order, dtype=np.int64)
            for i in range(self.order):
                k, acc = 1, i
                while acc != self.identity:
                    acc = self.mul(acc, i)
                    k += 1
                out[i] = k
            self._orders = out
        return self._orders

    def power(self, i: int, e: int) -> int:
        e %= int(self.orders()[i])
        acc = self.identity
        for _ in range(e):
            acc = self.mul(acc, i)
        return acc

    def exponent_valuation(self, p: int) -> int:
        """v_p of the exponent of the p-part of the group."""
        best = 0
        for o in self.orders():
            o = int(o)
            v = int_valuation(o, p) if o % p == 0 else 0
            best = max(best, v)
        return best

    def p_power_elements(self, p: int):
        orders = self.orders()
        out = []
        for i in range(self.order):
            o = int(orders[i])
            if o == p ** (int_valuation(o, p) if o % p == 0 else 0):
                out.append(i)
        return out

    def centralizer(self, idxs):
        table = self.table
        mask = np.ones(self.order, dtype=bool)
        for g in idxs:
            mask &= table[:, g] == table[g, :]
        return [int(i) for i in np.nonzero(mask)[0]]

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def _conjugated_columns(group, tup):
    table, inv = group.table, group.inv
    return [table[table[:, g].astype(np.intp), inv.astype(np.intp)] for g in tup]


def canonical_tuple(group, tup):
    """Lexicographically least member of the simultaneous-conjugacy orbit."""
    cols = _conjugated_columns(group, tup)
    x0 = int(np.lexsort(tuple(cols[::-1]))[0])
    return tuple(int(c[x0]) for c in cols)


@dataclass(frozen=True)
class TupleClass:
    """Conjugacy class of a commuting p-power-order tuple; rep is canonical."""

    group: FiniteGroup
    rep: tuple
    p: int

    def __post_init__(self):
        rep = tuple(int(g) for g in self.rep)
        orders = self.group.orders()
        for g in rep:
            o = int(orders[g])
            if o != self.p ** (int_valuation(o, self.p) if o % self.p == 0 else 0):
                raise NotPPowerTupleError(f"element {g} has order {o}")
        for a, b in itertools.combinations(rep, 2):
            if self.group.mul(a, b) != self.group.mul(b, a):
                raise NotPPowerTupleError("tuple entries do not commute")
        object.__setattr__(self, "rep", canonical_tuple(self.group, rep))

    @property
    def n(self) -> int:
        return len(self.rep)

    def __eq__(self, other):
        return (
            isinstance(other, TupleClass)
            and self.group is other.group
            and self.p == other.p
            and self.rep == other.rep
        )

    def __hash__(self):
        return hash((id(self.group), self.p, self.rep))


# ---------------------------------------------------------------------------
# group constructors and the group-spec mini-language

_GROUPS: dict = {}


def symmetric_group(m: int) -> FiniteGroup:
    name = f"S{m}"
    if name not in _GROUPS:
        elements = list(itertools.permutations(range(m)))
        mul = lambda s, t: tuple(s[t[i]] for i in range(m))
        _GROUPS[name] = FiniteGroup(name, elements, mul, structure=("symmetric", m))
    return _GROUPS[name]


def cyclic_group(k: int) -> FiniteGroup:
    name = f"C{k}"
    if name not in _GROUPS:
        mul = lambda a, b: (a + b) % k
        _GROUPS[name] = FiniteGroup(name, range(k), mul, structure=("cyclic", k))
    return _GROUPS[name]


def product_group(g: FiniteGroup, k: FiniteGroup) -> FiniteGroup:
    name = f"({g.name}x{k.name})"
    if name not in _GROUPS:
        if g.order * k.order > ORDER_CAP:
            raise GroupTooLargeError(f"{name} exceeds the order cap")
        elements = list(itertools.product(g.elements, k.elements))
        gm, km = g.index, k.index

        def mul(a, b):
            return (
                g.elements[g.table[gm[a[0]], gm[b[0]]]],
                k.elements[k.table[km[a[1]], km[b[1]]]],
            )

        _GROUPS[name] = FiniteGroup(name, elements, mul, structure=("product", g, k))
    return _GROUPS[name]


def wreath_group(g: FiniteGroup, m: int) -> FiniteGroup:
    name = f"wr({g.name},{m})"
    if name not in _GROUPS:
        if g.order ** m * _factorial(m) > ORDER_CAP:
            raise GroupTooLargeError(f"{name} exceeds the order cap")
        perms = list(itertools.permutations(range(m)))
        elements = [
            (vec, s)
            for vec in itertools.product(g.elements, repeat=m)
            for s in perms
        ]
        gm = g.index

        def mul(a, b):
            (v, s), (w, t) = a, b
            sinv = [0] * m
            for i in range(m):
                sinv[s[i]] = i
            vec = tuple(
                g.elements[g.table[gm[v[i]], gm[w[sinv[i]]]]] for i in range(m)
            )
            return (vec, tuple(s[t[i]] for i in range(m)))

        _GROUPS[name] = FiniteGroup(name, elements, mul, structure=("wreath", g, m))
    return _GROUPS[name]


def _factorial(m):
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def build_group(spec: str) -> FiniteGroup:
    """Build a group from the group-spec mini-language.

    Grammar: atom = S<m> | C<k> | wr(<spec>,<m>); product = atoms joined by x.
    """
    factors = _split_product(spec.replace(" ", ""))
    groups = [_build_atom(f) for f in factors]
    out = groups[0]
    for extra in groups[1:]:
        out = product_group(out, extra)
    return out


def _split_product(spec: str):
    parts, depth, cur = [], 0, []
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "x" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if not all(parts):
        raise ValueError(f"bad group spec {spec!r}")
    return parts


def _build_atom(atom: str) -> FiniteGroup:
    if atom.startswith("(") and atom.endswith(")"):
        return build_group(atom[1:-1])
    if atom.startswith("wr(") and atom.endswith(")"):
        inner = atom[3:-1]
        depth = 0
        for pos in range(len(inner) - 1, -1, -1):
            ch = inner[pos]
            if ch == ")":
                depth += 1
            elif ch == "(":
                depth -= 1
            elif ch == "," and depth == 0:
                return wreath_group(build_group(inner[:pos]), int(inner[pos + 1:]))
        raise ValueError(f"bad wreath spec {atom!r}")
    if atom[:1] == "S" and atom[1:].isdigit():
        return symmetric_group(int(atom[1:]))
    if atom[:1] == "C" and atom[1:].isdigit():
        return cyclic_group(int(atom[1:]))
    raise ValueError(f"bad group spec {atom!r}")


def trivial_group() -> FiniteGroup:
    return symmetric_group(1)


# ---------------------------------------------------------------------------
# homomorphisms and subgroups


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteGroup
    target: FiniteGroup
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(x) for x in self.mapping))
        if len(self.mapping) != self.source.order:
            raise NotAHomomorphismError("mapping must be total")
        if self.mapping[self.source.identity] != self.target.identity:
            raise NotAHomomorphismError("identity is not preserved")
        n = self.source.order
        if n <= FULL_CHECK_LIMIT:
            pairs = itertools.product(range(n), repeat=2)
        else:
            rng = SplitMix64(1)
            pairs = ((rng.below(n), rng.below(n)) for _ in range(20_000))
        for i, j in pairs:
            if self.mapping[self.source.mul(i, j)] != self.target.mul(
                self.mapping[i], self.mapping[j]
            ):
                raise NotAHomomorphismError("map fails the homomorphism law")

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == self.source.order


def identity_hom(g: FiniteGroup) -> Homomorphism:
    return Homomorphism(g, g, tuple(range(g.order)))


def trivial_hom(g: FiniteGroup, k: FiniteGroup) -> Homomorphism:
    return Homomorphism(g, k, (k.identity,) * g.order)


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    indices: tuple

    def __post_init__(self):
        idxs = tuple(sorted(set(int(i) for i in self.indices)))
        object.__setattr__(self, "indices", idxs)
        inside = set(idxs)
        if self.parent.identity not in inside:
            raise NotASubgroupError("subset misses the identity")
        for a in idxs:
            for b in idxs:
                if self.parent.mul(a, b) not in inside:
                    raise NotASubgroupError("subset is not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.indices)

    def as_group(self) -> FiniteGroup:
        cache = self.parent._subgroup_groups
        if self.indices not in cache:
            parent = self.parent
            elements = [parent.elements[i] for i in self.indices]
            mul = lambda a, b: parent.elements[
                parent.table[parent.index[a], parent.index[b]]
            ]
            name = f"{parent.name}|sub{len(cache)}:{self.indices[:6]}"
            cache[self.indices] = FiniteGroup(name, elements, mul)
        return cache[self.indices]

    def inclusion(self) -> Homomorphism:
        sub = self.as_group()
        return Homomorphism(sub, self.parent, self.indices)


def subgroup_closure(group: FiniteGroup, gens) -> Subgroup:
    seen = {group.identity}
    frontier = [group.identity]
    gens = [int(g) for g in gens]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = group.mul(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return Subgroup(group, tuple(sorted(seen)))


def abelian_subgroups(group: FiniteGroup):
    """All abelian subgroups, found by closing commuting extensions; |G| <= 1000."""
    if group.order > 1000:
        raise GroupTooLargeError("abelian subgroup enumeration capped at order 1000")
    found = {}
    frontier = [frozenset({group.identity})]
    found[frozenset({group.identity})] = Subgroup(group, (group.identity,))
    while frontier:
        current = frontier.pop()
        elems = sorted(current)
        cent = set(group.centralizer(elems))
        for g in sorted(cent - current):
            new = subgroup_closure(group, list(current) + [g])
            key = frozenset(new.indices)
            candidate_elems = new.indices
            abelian = all(
                group.mul(a, b) == group.mul(b, a)
                for a, b in itertools.combinations(candidate_elems, 2)
            )
            if abelian and key not in found:
                found[key] = new
                frontier.append(key)
    return tuple(sorted(found.values(), key=lambda s: (s.order, s.indices)))


# ---------------------------------------------------------------------------
# commuting tuple classes


def enumerate_hom_classes(group: FiniteGroup, n: int, p: int):
    """Complete duplicate-free list of classes of commuting p-power n-tuples."""
    key = (n, p)
    if key in group._hom_classes:
        return group._hom_classes[key]
    ppow = group.p_power_elements(p)
    # first coordinate only needs one representative per conjugacy class
    reps, seen = [], set()
    for g in ppow:
        c = canonical_tuple(group, (g,))[0]
        if c not in seen:
            seen.add(c)
            reps.append(c)
    found = set()

    def extend(prefix, commuting):
        if len(prefix) == n:
            found.add(canonical_tuple(group, prefix))
            return
        pool = reps if not prefix else commuting
        for g in pool:
            sub = [
                h
                for h in (commuting if prefix else ppow)
                if group.mul(g, h) == group.mul(h, g)
            ]
            extend(prefix + (g,), sub)

    extend((), ppow)
    classes = tuple(
        TupleClass(group, rep, p) for rep in sorted(found)
    )
    group._hom_classes[key] = classes
    return classes


def precompose(alpha: TupleClass, t: Matrix) -> TupleClass:
    """Class of the tuple h_j = prod_i g_i^{T[i][j]} (right action of matrices)."""
    g = alpha.group
    n = alpha.n
    out = []
    for j in range(len(t[0])):
        acc = g.identity
        for i in range(n):
            acc = g.mul(acc, g.power(alpha.rep[i], int(t[i][j])))
        out.append(acc)
    return TupleClass(g, tuple(out), alpha.p)


def fixed_cosets(group: FiniteGroup, subgroup: Subgroup, alpha: TupleClass):
    """Coset representatives g with gH fixed by every entry of alpha's rep."""
    if subgroup.parent is not group:
        raise NotASubgroupError("subgroup does not live in the given group")
    inside = set(subgroup.indices)
    seen = set()
    out = []
    for g in range(group.order):
        if g in seen:
            continue
        coset = {group.mul(g, h) for h in subgroup.indices}
        seen |= coset
        ginv = group.inverse(g)
        if all(
            group.mul(group.mul(ginv, t), g) in inside for t in alpha.rep
        ):
            out.append(g)
    return tuple(out)


def delta_embed(i: int, j: int) -> Homomorphism:
    """Block embedding of S_i x S_j into S_{i+j}."""
    source = product_group(symmetric_group(i), symmetric_group(j))
    target = symmetric_group(i + j)
    mapping = []
    for s, t in source.elements:
        glued = tuple(s) + tuple(x + i for x in t)
        mapping.append(target.index[glued])
    return Homomorphism(source, target, tuple(mapping))


def wreath_delta_embed(g: FiniteGroup, i: int, j: int) -> Homomorphism:
    """Embedding of (G wr S_i) x (G wr S_j) into G wr S_{i+j}."""
    source = product_group(wreath_group(g, i), wreath_group(g, j))
    target = wreath_group(g, i + j)
    mapping = []
    for (v, s), (w, t) in source.elements:
        label = (v + w, tuple(s) + tuple(x + i for x in t))
        mapping.append(target.index[label])
    return Homomorphism(source, target, tuple(mapping))


def diagonal_wreath_hom(g: FiniteGroup, m: int) -> Homomorphism:
    """G x S_m -> G wr S_m sending (g, s) to ((g, ..., g), s)."""
    source = product_group(g, symmetric_group(m))
    target = wreath_group(g, m)
    mapping = [target.index[((lab,) * m, s)] for lab, s in source.elements]
    return Homomorphism(source, target, tuple(mapping))


def include_left_factor(g: FiniteGroup, k: FiniteGroup) -> Homomorphism:
    """G -> G x K sending g to (g, e)."""
    prod = product_group(g, k)
    e = k.elements[k.identity]
    return Homomorphism(
        g, prod, tuple(prod.index[(lab, e)] for lab in g.elements)
    )


def times_hom(left: Homomorphism, right: Homomorphism) -> Homomorphism:
    """Product homomorphism source_l x source_r -> target_l x target_r."""
    source = product_group(left.source, right.source)
    target = product_group(left.target, right.target)
    mapping = []
    for a, b in source.elements:
        ia, ib = left.source.index[a], right.source.index[b]
        mapping.append(
            target.index[
                (left.target.elements[left(ia)], right.target.elements[right(ib)])
            ]
        )
    return Homomorphism(source, target, tuple(mapping))


def product_delta_homs(g: FiniteGroup, i: int, j: int):
    """The two restrictions comparing P_{i+j} with the external product P_i x P_j.

    Both start from G x (S_i x S_j): the first lands in G x S_{i+j} through
    the block embedding, the second in (G x S_i) x (G x S_j) through the
    diagonal on G.
    """
    de = delta_embed(i, j)
    source = product_group(g, de.source)
    big = product_group(g, symmetric_group(i + j))
    sm = symmetric_group(i + j)
    into_big = Homomorphism(
        source,
        big,
        tuple(
            big.index[(glab, sm.elements[de(de.source.index[st])])]
            for glab, st in source.elements
        ),
    )
    split = product_group(
        product_group(g, symmetric_group(i)), product_group(g, symmetric_group(j))
    )
    into_split = Homomorphism(
        source,
        split,
        tuple(
            split.index[((glab, st[0]), (glab, st[1]))]
            for glab, st in source.elements
        ),
    )
    return into_big, into_split


def product_components(group: FiniteGroup):
    if not (group.structure and group.structure[0] == "product"):
        raise ValueError(f"{group.name} is not a product group")
    return group.structure[1], group.structure[2]


def split_product_class(alpha: TupleClass):
    """Pair of component classes of a tuple class in a binary product group."""
    g, k = product_components(alpha.group)
    left = tuple(g.index[alpha.group.elements[i][0]] for i in alpha.rep)
    right = tuple(k.index[alpha.group.elements[i][1]] for i in alpha.rep)
    return TupleClass(g, left, alpha.p), TupleClass(k, right, alpha.p)


def pair_to_product_class(a: TupleClass, b: TupleClass) -> TupleClass:
    prod = product_group(a.group, b.group)
    rep = tuple(
        prod.index[(a.group.elements[x], b.group.elements[y])]
        for x, y in zip(a.rep, b.rep)
    )
    return TupleClass(prod, rep, a.p)


# ---------------------------------------------------------------------------
# the bijections with (decorated) sums of subgroups


def _perm_orbits(perms, m):
    seen = [False] * m
    orbits = []
    for start in range(m):
        if seen[start]:
            continue
        orbit = {start}
        frontier = [start]
        seen[start] = True
        while frontier:
            x = frontier.pop()
            for s in perms:
                y = s[x]
                if not seen[y]:
                    seen[y] = True
                    orbit.add(y)
                    frontier.append(y)
        orbits.append(sorted(orbit))
    return orbits


def _perm_power(s, e, m):
    out = tuple(range(m))
    for _ in range(e):
        out = tuple(s[out[i]] for i in range(m))
    return out


def _stabilizer_basis(perms, orbit, p, n) -> LatticeBasis:
    """Column-HNF basis of {lam : prod s_j^{lam_j} fixes the orbit base point}."""
    m = len(perms[0])
    x0 = orbit[0]
    exp = 1
    for s in perms:
        k = 1
        t = s
        while t != tuple(range(m)):
            t = tuple(s[t[i]] for i in range(m))
            k += 1
        while exp < k:
            exp *= p
    powers = [
        [_perm_power(s, e, m) for e in range(exp)] for s in perms
    ]
    cols = [[exp * int(i == j) for i in range(n)] for j in range(n)]
    for lam in itertools.product(range(exp), repeat=n):
        pos = x0
        for j in range(n):
            pos = powers[j][lam[j]][pos]
        if pos == x0:
            cols.append(list(lam))
    stacked = tuple(tuple(col[i] for col in cols) for i in range(n))
    return LatticeBasis(p, column_span_basis(stacked))


def symm_class_to_sum(alpha: TupleClass) -> SumOfSubgroups:
    """Canonical bijection from tuple classes in S_m to sums of subgroups."""
    group = alpha.group
    if not (group.structure and group.structure[0] == "symmetric"):
        raise ValueError("symm_class_to_sum needs a symmetric group class")
    m = group.structure[1]
    perms = [group.elements[i] for i in alpha.rep]
    n, p = alpha.n, alpha.p
    summands = []
    for orbit in _perm_orbits(perms, m):
        basis = _stabilizer_basis(perms, orbit, p, n)
        h = subgroup_from_annihilator(p, basis)
        assert h.order == len(orbit)
        summands.append(h)
    return SumOfSubgroups(tuple(summands))


def _coset_reps(basis: Matrix, n: int):
    """Canonical residues mod the column span of an upper-triangular basis."""
    return [
        tuple(v)
        for v in itertools.product(*[range(basis[i][i]) for i in range(n)])
    ]


def _reduce_mod_basis(basis: Matrix, v):
    v = list(v)
    for i in range(len(v) - 1, -1, -1):
        q = v[i] // basis[i][i]
        if q:
            for r in range(i + 1):
                v[r] -= q * basis[r][i]
    return tuple(v)


def sum_to_symm_class(s: SumOfSubgroups, n: int) -> TupleClass:
    """Inverse bijection: permutation tuple of the translation action on cosets."""
    m = s.total
    group = symmetric_group(m)
    if not s.summands:
        raise ValueError("empty sum")
    p = s.summands[0].p
    perms = [[None] * m for _ in range(n)]
    offset = 0
    for h in s.summands:
        basis = annihilator_lattice(h).matrix
        reps = _coset_reps(basis, n)
        pos = {r: offset + i for i, r in enumerate(reps)}
        for j in range(n):
            for r in reps:
                shifted = list(r)
                shifted[j] += 1
                perms[j][pos[r]] = pos[_reduce_mod_basis(basis, shifted)]
        offset += len(reps)
    rep = tuple(group.index[tuple(perm)] for perm in perms)
    return TupleClass(group, rep, p)


@dataclass(frozen=True)
class DecoratedSum:
    """Multiset of (subgroup H, tuple class over the HNF basis of Lambda_H)."""

    summands: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "summands",
            tuple(sorted(self.summands, key=lambda ha: (ha[0].sort_key(), ha[1].rep))),
        )

    @property
    def total(self) -> int:
        return sum(h.order for h, _ in self.summands)


def wreath_class_to_decorated(beta: TupleClass) -> DecoratedSum:
    """Split a tuple class in G wr S_m into subgroup summands with G-decorations."""
    wreath = beta.group
    if not (wreath.structure and wreath.structure[0] == "wreath"):
        raise ValueError("wreath_class_to_decorated needs a wreath group class")
    g, m = wreath.structure[1], wreath.structure[2]
    n, p = beta.n, beta.p
    perms = [wreath.elements[i][1] for i in beta.rep]
    summands = []
    for orbit in _perm_orbits(perms, m):
        basis = _stabilizer_basis(perms, orbit, p, n)
        h = subgroup_from_annihilator(p, basis)
        x0 = orbit[0]
        decoration = []
        for col in zip(*basis.matrix):
            acc = wreath.identity
            for j in range(n):
                acc = wreath.mul(acc, wreath.power(beta.rep[j], int(col[j])))
            vec, s = wreath.elements[acc]
            assert s[x0] == x0
            decoration.append(g.index[vec[x0]])
        summands.append((h, TupleClass(g, tuple(decoration), p)))
    return DecoratedSum(tuple(summands))


def decorated_to_wreath_class(s: DecoratedSum, n: int) -> TupleClass:
    """Inverse of wreath_class_to_decorated, up to class equality."""
    if not s.summands:
        raise ValueError("empty decorated sum")
    g = s.summands[0][1].group
    p = s.summands[0][0].p
    m = s.total
    wreath = wreath_group(g, m)
    perms = [[None] * m for _ in range(n)]
    vecs = [[None] * m for _ in range(n)]
    offset = 0
    for h, alpha in s.summands:
        basis = annihilator_lattice(h).matrix
        reps = _coset_reps(basis, n)
        pos = {r: offset + i for i, r in enumerate(reps)}

        def alpha_at(vec):
            coords = solve_integer(
                LatticeBasis(p, basis), tuple((x,) for x in vec)
            )
            acc = g.identity
            for l in range(n):
                acc = g.mul(acc, g.power(alpha.rep[l], int(coords[l][0])))
            return acc

        for j in range(n):
            ej = [int(j == i) for i in range(n)]
            for r in reps:
                target = _reduce_mod_basis(basis, [a + b for a, b in zip(r, ej)])
                perms[j][pos[r]] = pos[target]
                # cocycle value at position c = lam + r: alpha(r + e_j - r_target)
                diff = [a + b - c for a, b, c in zip(r, ej, target)]
                vecs[j][pos[target]] = g.elements[alpha_at(diff)]
        offset += len(reps)
    rep = []
    for j in range(n):
        label = (tuple(vecs[j]), tuple(perms[j]))
        rep.append(wreath.index[label])
    return TupleClass(wreath, tuple(rep), p)
