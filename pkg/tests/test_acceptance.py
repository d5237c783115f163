"""Acceptance criteria, one test per criterion.

Every check is exact (rational/integer equality); each criterion also
carries the runtime budget it must fit in.  Run with -s to see the
one-line pass reports.
"""

import itertools
import time
from fractions import Fraction

import pytest

from charpow.classfn import (
    average,
    constant_one,
    external_product,
    is_invariant,
    power_op,
    random_class_function,
    random_stabilizer,
    restrict,
    stabilizer_act,
    total_power_op,
    transfer_ideal,
)
from charpow.fgl import (
    RationalCoefficients,
    abelian_quotient_rank,
    build_honda,
    build_multiplicative,
    default_truncation,
    prime_field,
    quotient_ring_rank,
    weierstrass_degree,
)
from charpow.groups import (
    Homomorphism,
    build_group,
    decorated_to_wreath_class,
    diagonal_wreath_hom,
    enumerate_hom_classes,
    identity_hom,
    include_left_factor,
    product_delta_homs,
    abelian_subgroups,
    symm_class_to_sum,
    sum_to_symm_class,
    symmetric_group,
    times_hom,
    wreath_class_to_decorated,
    wreath_group,
    TupleClass,
)
from charpow.isogeny import canonical_section, random_section
from charpow.rng import SplitMix64
from charpow.torsion import (
    SumOfSubgroups,
    enumerate_subgroups,
    enumerate_sums,
)

P, N, LEVEL = 2, 2, 2


def _report(num, title, ok, t0, budget):
    elapsed = time.time() - t0
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num}: {title} ({elapsed:.1f}s / budget {budget}s)")
    assert ok, f"criterion {num} failed"
    assert elapsed < budget, f"criterion {num} exceeded {budget}s ({elapsed:.1f}s)"


def _bruteforce_pair_class_count(m):
    """Fully naive oracle: all commuting 2-power pairs in S_m up to conjugacy."""
    g = symmetric_group(m)
    ppow = [
        i for i in range(g.order) if int(g.orders()[i]) in (1, 2, 4)
    ]
    orbits = set()
    for a in ppow:
        for b in ppow:
            if g.mul(a, b) != g.mul(b, a):
                continue
            orbit = frozenset(
                (g.conjugate(x, a), g.conjugate(x, b)) for x in range(g.order)
            )
            orbits.add(orbit)
    return len(orbits)


def test_criterion_1_bijection_counts():
    t0 = time.time()
    ok = True
    for p in (2, 3):
        for n in (1, 2):
            for m in range(1, 7):
                classes = enumerate_hom_classes(symmetric_group(m), n, p)
                ok = ok and len(classes) == len(enumerate_sums(p, n, m))
    pinned = {2: 4, 3: 4, 4: 17}
    for m, expect in pinned.items():
        ok = ok and len(enumerate_hom_classes(symmetric_group(m), 2, 2)) == expect
        ok = ok and len(enumerate_sums(2, 2, m)) == expect
        ok = ok and _bruteforce_pair_class_count(m) == expect
    _report(1, "bijection counts hom(L,S_m)/~ = Sum_m", ok, t0, 10)


def test_criterion_2_transitive_classes():
    t0 = time.time()
    ok = True
    expected_n2 = {1: 3, 2: 7}
    for n in (1, 2):
        for k in (1, 2):
            g = symmetric_group(2 ** k)
            transitive = [
                c
                for c in enumerate_hom_classes(g, n, 2)
                if len(symm_class_to_sum(c).summands) == 1
            ]
            subs = enumerate_subgroups(2, n, k)
            ok = ok and len(transitive) == len(subs)
            ok = ok and {symm_class_to_sum(c).summands[0] for c in transitive} == set(
                subs
            )
            if n == 2:
                ok = ok and len(subs) == expected_n2[k]
    _report(2, "transitive classes of S_{p^k} = Sub_{p^k}", ok, t0, 5)


def test_criterion_3_transfer_ideal_dimension():
    t0 = time.time()
    ok = True
    for n in (1, 2):
        for k in (1, 2):
            ideal = transfer_ideal(2, n, LEVEL, 2 ** k)
            ok = ok and ideal.quotient_dim() == len(enumerate_subgroups(2, n, k))
    _report(3, "dim Cl_n(S_{p^k})/I_tr = |Sub_{p^k}|", ok, t0, 30)


def test_criterion_4_section_independence():
    t0 = time.time()
    sec = canonical_section(P, N, 2)
    seeded = [random_section(P, N, 2, s) for s in range(1, 6)]
    ok = True
    idx = 0
    for spec, count in (("S1", 7), ("C2", 7), ("S3", 6)):
        g = build_group(spec)
        for _ in range(count):
            idx += 1
            f = average(random_class_function(g, P, N, LEVEL, seed=1000 + idx))
            for m in range(1, 5):
                base = power_op(f, m, sec)
                ok = ok and all(power_op(f, m, s) == base for s in seeded)
    assert idx == 20
    _report(4, "section independence on 20 invariant functions", ok, t0, 120)


def test_criterion_5_invariance_preservation():
    t0 = time.time()
    sec = canonical_section(P, N, 2)
    ok = True
    for spec, seed in (("S1", 51), ("C2", 52), ("S3", 53)):
        g = build_group(spec)
        f = average(random_class_function(g, P, N, LEVEL, seed=seed))
        ok = ok and is_invariant(f)
        for m in range(1, 5):
            ok = ok and is_invariant(power_op(f, m, sec))
    _report(5, "invariance preserved under P_m (full GL_2(Z/4))", ok, t0, 120)


def test_criterion_6_restriction_and_mth_power():
    t0 = time.time()
    sec = canonical_section(P, N, 2)
    ok = True
    for spec, seed in (("S3", 61), ("C2", 62), ("S3", 63)):
        g = build_group(spec)
        f = random_class_function(g, P, N, LEVEL, seed=seed)
        for m in range(1, 5):
            pm = power_op(f, m, sec)
            back = restrict(pm, include_left_factor(g, symmetric_group(m)))
            ok = ok and back == f.pow(m)
            for i in range(1, m):
                into_big, into_split = product_delta_homs(g, i, m - i)
                lhs = restrict(pm, into_big)
                rhs = restrict(
                    external_product(
                        power_op(f, i, sec), power_op(f, m - i, sec)
                    ),
                    into_split,
                )
                ok = ok and lhs == rhs
    _report(6, "restriction identity and m-th power identity", ok, t0, 60)


def test_criterion_7_naturality_and_diagonal():
    t0 = time.time()
    sec = canonical_section(P, N, 2)
    s3 = build_group("S3")
    c2 = build_group("C2")
    transposition = next(i for i in range(6) if int(s3.orders()[i]) == 2)
    gamma = Homomorphism(c2, s3, (s3.identity, transposition))
    f = random_class_function(s3, P, N, LEVEL, seed=71)
    ok = True
    for m in range(1, 5):
        lhs = power_op(restrict(f, gamma), m, sec)
        rhs = restrict(
            power_op(f, m, sec),
            times_hom(gamma, identity_hom(symmetric_group(m))),
        )
        ok = ok and lhs == rhs
    for spec, ms in (("S1", (1, 2, 3, 4)), ("C2", (1, 2, 3)), ("S3", (1, 2))):
        g = build_group(spec)
        h = random_class_function(g, P, N, LEVEL, seed=72)
        for m in ms:
            total = total_power_op(h, m, sec)
            ok = ok and restrict(total, diagonal_wreath_hom(g, m)) == power_op(
                h, m, sec
            )
    _report(7, "naturality along C2 -> S3 and diagonal compatibility", ok, t0, 60)


def test_criterion_8_stabilizer_commutation():
    t0 = time.time()
    sec = canonical_section(P, N, 2)
    g = build_group("C2")
    f = random_class_function(g, P, N, LEVEL, seed=81)
    rng = SplitMix64(82)
    ok = True
    p2 = power_op(f, 2, sec)
    p3 = power_op(f, 3, sec)
    t2 = total_power_op(f, 2, sec)
    for _ in range(10):
        s = random_stabilizer(P, N, LEVEL, rng)
        ok = ok and stabilizer_act(p2, s) == power_op(stabilizer_act(f, s), 2, sec)
        ok = ok and stabilizer_act(p3, s) == power_op(stabilizer_act(f, s), 3, sec)
        ok = ok and stabilizer_act(t2, s) == total_power_op(
            stabilizer_act(f, s), 2, sec
        )
    _report(8, "stabilizer action commutes with P and total P", ok, t0, 60)


def test_criterion_9_wreath_bijection():
    t0 = time.time()
    ok = True
    for spec in ("wr(S2,2)", "wr(C2,2)"):
        w = build_group(spec)
        for n in (1, 2):
            classes = enumerate_hom_classes(w, n, 2)
            seen = set()
            for c in classes:
                d = wreath_class_to_decorated(c)
                seen.add(d)
                ok = ok and decorated_to_wreath_class(d, n) == c
            ok = ok and len(seen) == len(classes)
    # reduces to the plain bijection at G = e
    for m in range(1, 5):
        w = wreath_group(symmetric_group(1), m)
        classes = enumerate_hom_classes(w, 2, 2)
        plain = {
            SumOfSubgroups(
                tuple(h for h, _ in wreath_class_to_decorated(c).summands)
            )
            for c in classes
        }
        ok = ok and plain == set(enumerate_sums(2, 2, m))
        ok = ok and len(classes) == len(plain)
    _report(9, "wreath-product bijection round trips", ok, t0, 30)


def test_criterion_10_formal_groups():
    t0 = time.time()
    ok = True
    mult = build_multiplicative(RationalCoefficients(2), 6)
    ok = ok and mult.i_series(2).coeffs == (0, 2, 1, 0, 0, 0, 0)
    for p in (2, 3):
        m = build_multiplicative(RationalCoefficients(p), p + 2)
        ok = ok and weierstrass_degree(m.i_series(p)) == p
    for p, n in ((2, 1), (2, 2), (3, 1)):
        law = build_honda(p, n, default_truncation(p, n))
        ps = law.i_series(p)
        expected = tuple(
            1 if e == p ** n else 0 for e in range(law.trunc + 1)
        )
        ok = ok and ps.coeffs == expected
    h22 = build_honda(2, 2, default_truncation(2, 2))
    ok = ok and quotient_ring_rank(h22, 1)[0] == 4
    ok = ok and abelian_quotient_rank(h22, [1, 1]) == 16
    _report(10, "formal group laws: series, degrees, ranks", ok, t0, 30)


def test_criterion_11_injection_set_checks():
    t0 = time.time()
    ok = True
    # concatenation over the 2-adic digits of m is onto the sums of total m
    for n in (1, 2):
        for m in range(1, 7):
            digits = []
            rest, j = m, 0
            while rest:
                for _ in range(rest % 2):
                    digits.append(2 ** j)
                rest //= 2
                j += 1
            pools = [enumerate_sums(2, n, q) for q in digits]
            image = {
                SumOfSubgroups(
                    tuple(itertools.chain(*(s.summands for s in combo)))
                )
                for combo in itertools.product(*pools)
            }
            ok = ok and image == set(enumerate_sums(2, n, m))
    # abelian subgroups cover every tuple class
    for spec in ("S3", "S4"):
        g = build_group(spec)
        covered = set()
        for sub in abelian_subgroups(g):
            iota = sub.inclusion()
            for c in enumerate_hom_classes(iota.source, 2, 2):
                covered.add(TupleClass(g, tuple(iota(i) for i in c.rep), 2))
        ok = ok and covered == set(enumerate_hom_classes(g, 2, 2))
    # single subgroups plus p-fold sums of total p^{k-1} cover the p^k layer
    for n in (1, 2):
        for k in (1, 2):
            image = {
                SumOfSubgroups((h,)) for h in enumerate_subgroups(2, n, k)
            }
            pool = enumerate_sums(2, n, 2 ** (k - 1))
            for combo in itertools.product(pool, repeat=2):
                image.add(
                    SumOfSubgroups(
                        tuple(itertools.chain(*(s.summands for s in combo)))
                    )
                )
            ok = ok and image == set(enumerate_sums(2, n, 2 ** k))
    _report(11, "set-level checks behind the injection lemmas", ok, t0, 60)
