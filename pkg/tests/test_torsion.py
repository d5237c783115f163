import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charpow.lattice import PAdicMatrix, mat_det, mat_mul
from charpow.rng import SplitMix64, random_unimodular
from charpow.torsion import (
    SumOfSubgroups,
    annihilator_lattice,
    enumerate_subgroups,
    enumerate_sums,
    full_torsion,
    image_subgroup,
    subgroup_from_generators,
    trivial_subgroup,
)


def bruteforce_subgroups_of_torsion_square(p, e, order):
    """All subgroups of (Z/p^e)^2 with the given order, as frozensets.

    Oracle for enumerate_subgroups at n = 2: subgroups of order p^k <= p^e
    of the torus all live in the p^e-torsion (Z/p^e)^2.
    """
    q = p ** e
    elems = list(itertools.product(range(q), repeat=2))
    found = set()
    for g1 in elems:
        for g2 in elems:
            sub = set()
            frontier = [(0, 0)]
            sub.add((0, 0))
            while frontier:
                x = frontier.pop()
                for g in (g1, g2):
                    y = ((x[0] + g[0]) % q, (x[1] + g[1]) % q)
                    if y not in sub:
                        sub.add(y)
                        frontier.append(y)
            if len(sub) == order:
                found.add(frozenset(sub))
    return found


def subgroup_to_elements(h, q):
    """Elements of H inside (Z/q)^2, via the generators of A_H^{-1} mod Z^2."""
    gens = [tuple(int(x * q) % q for x in g) for g in h.generators()]
    sub = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = ((x[0] + g[0]) % q, (x[1] + g[1]) % q)
            if y not in sub:
                sub.add(y)
                frontier.append(y)
    return frozenset(sub)


def test_trivial_subgroup():
    assert enumerate_subgroups(2, 2, 0) == (trivial_subgroup(2, 2),)


@pytest.mark.parametrize("p,k,count", [(2, 1, 3), (2, 2, 7), (3, 1, 4)])
def test_subgroup_counts_against_bruteforce(p, k, count):
    subs = enumerate_subgroups(p, 2, k)
    assert len(subs) == count
    oracle = bruteforce_subgroups_of_torsion_square(p, k, p ** k)
    assert len(oracle) == count
    assert {subgroup_to_elements(h, p ** k) for h in subs} == oracle


def test_subgroups_are_duplicate_free_and_sorted():
    subs = enumerate_subgroups(2, 2, 2)
    assert len(set(subs)) == len(subs)
    assert list(subs) == sorted(subs, key=lambda h: h.matrix)


def test_sum_counts():
    assert len(enumerate_sums(2, 2, 1)) == 1
    assert len(enumerate_sums(2, 2, 3)) == 4
    assert len(enumerate_sums(2, 2, 4)) == 17


def test_sum_count_oracle_partitions():
    # independent partition-and-choose count for m = 3: 1+1+1 and 2+1
    subs1 = len(enumerate_subgroups(2, 2, 1))
    assert len(enumerate_sums(2, 2, 3)) == 1 + subs1


def test_sum_count_oracle_m4():
    # 1^4; 2+1+1; 2+2 (multiset); 4
    s1 = len(enumerate_subgroups(2, 2, 1))
    s2 = len(enumerate_subgroups(2, 2, 2))
    expected = 1 + s1 + s1 * (s1 + 1) // 2 + s2
    assert len(enumerate_sums(2, 2, 4)) == expected


def test_single_summand_sums_biject_with_subgroups():
    singles = [
        s for s in enumerate_sums(2, 2, 4) if len(s.summands) == 1
    ]
    assert {s.summands[0] for s in singles} == set(enumerate_subgroups(2, 2, 2))


def test_annihilator_trivial_and_full():
    assert annihilator_lattice(trivial_subgroup(2, 2)).matrix == ((1, 0), (0, 1))
    assert annihilator_lattice(full_torsion(2, 2)).matrix == ((2, 0), (0, 2))


def test_annihilator_pairing_oracle():
    # lambda in Lambda_H iff <lambda, h> is integral for every generator of H
    for h in enumerate_subgroups(2, 2, 2):
        basis = annihilator_lattice(h)
        assert basis.index() == h.order
        for col in zip(*basis.matrix):
            for gen in h.generators():
                pairing = sum(Fraction(c) * g for c, g in zip(col, gen))
                assert pairing.denominator == 1


def test_annihilator_valuation():
    for k in range(4):
        for h in enumerate_subgroups(2, 2, k):
            assert annihilator_lattice(h).index() == h.order


def test_image_identity_and_multiplication_by_p():
    h = full_torsion(2, 2)
    eye = PAdicMatrix(2, ((1, 0), (0, 1)))
    assert image_subgroup(eye, h) == h
    twice = PAdicMatrix(2, ((2, 0), (0, 2)))
    assert image_subgroup(twice, h) == trivial_subgroup(2, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_unimodular_image_permutes_subgroups(seed):
    rng = SplitMix64(seed)
    u = PAdicMatrix(2, random_unimodular(rng, 2))
    subs = enumerate_subgroups(2, 2, 2)
    image = {image_subgroup(u, h) for h in subs}
    assert image == set(subs)


def test_image_inverse_roundtrip():
    rng = SplitMix64(99)
    u = random_unimodular(rng, 2)
    det = mat_det(u)
    assert abs(det) == 1
    adj = ((u[1][1] * det, -u[0][1] * det), (-u[1][0] * det, u[0][0] * det))
    assert mat_mul(u, adj) == ((1, 0), (0, 1))
    gam, gam_inv = PAdicMatrix(2, u), PAdicMatrix(2, adj)
    for h in enumerate_subgroups(2, 2, 2):
        assert image_subgroup(gam, image_subgroup(gam_inv, h)) == h


def test_subgroup_from_generators_matches_order():
    h = subgroup_from_generators(2, 2, [(Fraction(1, 4), Fraction(0))])
    assert h.order == 4
    g = subgroup_from_generators(
        2, 2, [(Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1, 2))]
    )
    assert g == full_torsion(2, 2)


def test_sums_canonical_order_and_uniqueness():
    sums = enumerate_sums(2, 2, 4)
    assert len(set(sums)) == len(sums)
    assert list(sums) == sorted(sums, key=lambda s: s.sort_key())
    assert all(s.total == 4 for s in sums)


def test_sum_multiset_sorted():
    h1 = trivial_subgroup(2, 2)
    h2 = full_torsion(2, 2)
    assert SumOfSubgroups((h2, h1)) == SumOfSubgroups((h1, h2))


def bruteforce_subgroup_count_rank3(p, e, order):
    q = p ** e
    elems = list(itertools.product(range(q), repeat=3))
    found = set()
    for gens in itertools.combinations_with_replacement(elems, 2):
        sub = {(0, 0, 0)}
        frontier = [(0, 0, 0)]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = tuple((a + b) % q for a, b in zip(x, g))
                if y not in sub:
                    sub.add(y)
                    frontier.append(y)
        if len(sub) == order:
            found.add(frozenset(sub))
    return len(found)


def test_rank3_counts_against_bruteforce():
    assert len(enumerate_subgroups(2, 3, 1)) == bruteforce_subgroup_count_rank3(2, 1, 2) == 7
    assert len(enumerate_subgroups(2, 3, 2)) == bruteforce_subgroup_count_rank3(2, 2, 4) == 35
    assert len(enumerate_sums(2, 3, 2)) == 8
    for h in enumerate_subgroups(2, 3, 2):
        assert annihilator_lattice(h).index() == 4
