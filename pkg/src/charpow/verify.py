"""Property suites: exhaustive verification of the class-function identities.

Each suite returns CheckResult records; the CLI renders them and exits
nonzero if any fail.  Defaults are desk scale (p = 2, n = 2, level 2,
m <= 4, bijection counts up to m = 6).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .classfn import (
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
    transfer,
    transfer_ideal,
)
from .fgl import (
    RationalCoefficients,
    abelian_quotient_rank,
    build_honda,
    build_honda_rational,
    build_multiplicative,
    default_truncation,
    quotient_ring_rank,
    weierstrass_degree,
)
from .groups import (
    Subgroup,
    abelian_subgroups,
    build_group,
    decorated_to_wreath_class,
    diagonal_wreath_hom,
    enumerate_hom_classes,
    include_left_factor,
    product_delta_homs,
    product_group,
    symm_class_to_sum,
    sum_to_symm_class,
    symmetric_group,
    times_hom,
    wreath_class_to_decorated,
    wreath_group,
    Homomorphism,
    identity_hom,
)
from .isogeny import canonical_section, random_section
from .rng import SplitMix64
from .torsion import SumOfSubgroups, enumerate_subgroups, enumerate_sums


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    params: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyConfig:
    p: int = 2
    n: int = 2
    level: int = 2
    max_m: int = 4
    count_max_m: int = 6
    seeds: tuple = (1, 2)
    functions: int = 3
    groups: tuple = ("S1", "C2", "S3")


def _result(suite, name, params, ok, detail=""):
    return CheckResult(suite, name, str(params), bool(ok), detail)


def _section_bound(p: int, max_m: int) -> int:
    """Largest e with p^e <= max_m."""
    e, q = 0, 1
    while q * p <= max_m:
        q *= p
        e += 1
    return e


# ---------------------------------------------------------------------------
# bijections


def suite_bijections(cfg: VerifyConfig):
    out = []
    for p in (2, 3):
        for n in (1, 2):
            for m in range(1, cfg.count_max_m + 1):
                classes = enumerate_hom_classes(symmetric_group(m), n, p)
                sums = enumerate_sums(p, n, m)
                out.append(
                    _result(
                        "bijections",
                        "tuple-sum-count",
                        f"p={p} n={n} m={m}",
                        len(classes) == len(sums),
                        f"{len(classes)} classes vs {len(sums)} sums",
                    )
                )
                image = {symm_class_to_sum(c): c for c in classes}
                mutual = len(image) == len(classes) and set(image) == set(sums) and all(
                    sum_to_symm_class(s, n) == c for s, c in image.items()
                )
                out.append(
                    _result(
                        "bijections",
                        "tuple-sum-inverse",
                        f"p={p} n={n} m={m}",
                        mutual,
                    )
                )
    p = cfg.p
    for n in (1, 2):
        for k in (0, 1, 2):
            m = p ** k
            classes = enumerate_hom_classes(symmetric_group(m), n, p)
            transitive = [
                c for c in classes if len(symm_class_to_sum(c).summands) == 1
            ]
            subs = enumerate_subgroups(p, n, k)
            hit = {symm_class_to_sum(c).summands[0] for c in transitive}
            out.append(
                _result(
                    "bijections",
                    "transitive-vs-subgroups",
                    f"p={p} n={n} k={k}",
                    len(transitive) == len(subs) and hit == set(subs),
                    f"{len(transitive)} transitive classes vs {len(subs)} subgroups",
                )
            )
    # concatenation along the p-adic digits of m covers every sum
    for n in (1, 2):
        for m in range(1, cfg.count_max_m + 1):
            out.append(
                _result(
                    "bijections",
                    "digit-concat-onto",
                    f"p={p} n={n} m={m}",
                    _digit_concat_covers(p, n, m),
                )
            )
    # single subgroups plus p-fold smaller sums cover the top layer
    for n in (1, 2):
        for k in (1, 2):
            out.append(
                _result(
                    "bijections",
                    "top-split-onto",
                    f"p={p} n={n} k={k}",
                    _top_split_covers(p, n, k),
                )
            )
    # abelian subgroups cover all tuple classes
    for spec in ("S3", "S4"):
        g = build_group(spec)
        out.append(
            _result(
                "bijections",
                "abelian-cover",
                f"G={spec} p={p} n={cfg.n}",
                _abelian_classes_cover(g, cfg.n, p),
            )
        )
    # wreath bijection round trips
    for spec, n in (("wr(S2,2)", 1), ("wr(S2,2)", 2), ("wr(C2,2)", 1), ("wr(C2,2)", 2)):
        w = build_group(spec)
        classes = enumerate_hom_classes(w, n, 2)
        decorated = {}
        ok = True
        for c in classes:
            d = wreath_class_to_decorated(c)
            decorated[d] = decorated.get(d, 0) + 1
            if decorated_to_wreath_class(d, n) != c:
                ok = False
        ok = ok and all(v == 1 for v in decorated.values())
        out.append(
            _result("bijections", "wreath-roundtrip", f"G wr S: {spec} n={n}", ok,
                    f"{len(classes)} classes")
        )
    # the wreath bijection at trivial G reduces to the symmetric-group one
    for m in range(1, cfg.max_m + 1):
        w = wreath_group(symmetric_group(1), m)
        classes = enumerate_hom_classes(w, cfg.n, p)
        plain = {
            SumOfSubgroups(tuple(h for h, _ in wreath_class_to_decorated(c).summands))
            for c in classes
        }
        out.append(
            _result(
                "bijections",
                "wreath-trivial-G",
                f"p={p} n={cfg.n} m={m}",
                plain == set(enumerate_sums(p, cfg.n, m))
                and len(plain) == len(classes),
            )
        )
    return out


def _digit_concat_covers(p, n, m) -> bool:
    digits = []
    rest, j = m, 0
    while rest:
        digits.append((p ** j, rest % p))
        rest //= p
        j += 1
    pools = []
    for q, a in digits:
        pool = enumerate_sums(p, n, q)
        for _ in range(a):
            pools.append(pool)
    image = set()
    for combo in itertools.product(*pools):
        image.add(
            SumOfSubgroups(tuple(itertools.chain(*(s.summands for s in combo))))
        )
    return image == set(enumerate_sums(p, n, m))


def _top_split_covers(p, n, k) -> bool:
    target = set(enumerate_sums(p, n, p ** k))
    image = {
        SumOfSubgroups((h,)) for h in enumerate_subgroups(p, n, k)
    }
    pool = enumerate_sums(p, n, p ** (k - 1))
    for combo in itertools.product(pool, repeat=p):
        image.add(
            SumOfSubgroups(tuple(itertools.chain(*(s.summands for s in combo))))
        )
    return image == target


def _abelian_classes_cover(g, n, p) -> bool:
    target = set(enumerate_hom_classes(g, n, p))
    image = set()
    for sub in abelian_subgroups(g):
        iota = sub.inclusion()
        for c in enumerate_hom_classes(iota.source, n, p):
            from .groups import TupleClass

            image.add(TupleClass(g, tuple(iota(i) for i in c.rep), p))
    return image == target


# ---------------------------------------------------------------------------
# transfers


def suite_transfers(cfg: VerifyConfig):
    out = []
    p, n, level = cfg.p, cfg.n, cfg.level
    # transfer from the whole group is the identity
    g = build_group("S3")
    f = random_class_function(g, p, n, level, seed=11)
    whole = Subgroup(g, tuple(range(g.order)))
    lifted = restrict(f, _relabel_hom(whole.as_group(), g))
    out.append(
        _result(
            "transfers",
            "whole-group-identity",
            "G=S3",
            transfer(lifted, whole.inclusion()) == f,
        )
    )
    # S2 over the trivial subgroup: values 2 and 0
    s2 = build_group("S2")
    triv = Subgroup(s2, (s2.identity,))
    tr = transfer(constant_one(triv.as_group(), p, n, level), triv.inclusion())
    vals = {c.rep: tr.value_at(c).values for c in enumerate_hom_classes(s2, n, p)}
    ident_rep = (s2.identity,) * n
    ok = all(
        (set(v) == {Fraction(2)}) == (rep == ident_rep)
        and (set(v) == {Fraction(0)}) == (rep != ident_rep)
        for rep, v in vals.items()
    )
    out.append(_result("transfers", "trivial-subgroup-count", "G=S2", ok))
    # transfer ideal dimensions (I_tr in Cl_n(S_{p^k}))
    for n_ in (1, 2):
        for k in (1, 2):
            ideal = transfer_ideal(p, n_, level, p ** k)
            expect = len(enumerate_subgroups(p, n_, k))
            out.append(
                _result(
                    "transfers",
                    "ideal-quotient-dim",
                    f"p={p} n={n_} k={k}",
                    ideal.quotient_dim() == expect,
                    f"dim {ideal.quotient_dim()} vs |Sub| {expect}",
                )
            )
    # membership: multi-summand indicators in, transitive indicators out
    for m in (2, 4):
        ideal = transfer_ideal(p, n, level, m)
        sym = symmetric_group(m)
        ok_in, ok_out = True, True
        for c in enumerate_hom_classes(sym, n, p):
            vec = [Fraction(int(rep == c.rep)) for rep in ideal.keys]
            if len(symm_class_to_sum(c).summands) > 1:
                ok_in = ok_in and ideal.contains_vector(vec)
            else:
                ok_out = ok_out and not ideal.contains_vector(vec)
        out.append(
            _result("transfers", "ideal-membership-multi", f"m={m}", ok_in)
        )
        out.append(
            _result("transfers", "ideal-membership-transitive", f"m={m}", ok_out)
        )
    return out


def _relabel_hom(src, dst) -> Homomorphism:
    """Identity-on-labels isomorphism between equal-element groups."""
    return Homomorphism(src, dst, tuple(dst.index[lab] for lab in src.elements))


# ---------------------------------------------------------------------------
# power operations


def suite_powerops(cfg: VerifyConfig):
    out = []
    p, n, level = cfg.p, cfg.n, cfg.level
    sec = canonical_section(p, n, _section_bound(p, cfg.max_m))
    for spec in cfg.groups:
        g = build_group(spec)
        f = random_class_function(g, p, n, level, seed=21)
        # P_1 is the identity
        p1 = power_op(f, 1, sec)
        out.append(
            _result(
                "powerops",
                "P1-identity",
                f"G={spec}",
                restrict(p1, include_left_factor(g, symmetric_group(1))) == f,
            )
        )
        one = constant_one(g, p, n, level)
        for m in range(1, cfg.max_m + 1):
            out.append(
                _result(
                    "powerops",
                    "P-of-one",
                    f"G={spec} m={m}",
                    power_op(one, m, sec)
                    == constant_one(
                        product_group(g, symmetric_group(m)), p, n, level
                    ),
                )
            )
        f2 = random_class_function(g, p, n, level, seed=22)
        for m in (2, 3):
            out.append(
                _result(
                    "powerops",
                    "multiplicative",
                    f"G={spec} m={m}",
                    power_op(f.mul(f2), m, sec)
                    == power_op(f, m, sec).mul(power_op(f2, m, sec)),
                )
            )
        # m-th power identity via the trivial-S_m restriction
        for m in range(1, cfg.max_m + 1):
            pm = power_op(f, m, sec)
            back = restrict(pm, include_left_factor(g, symmetric_group(m)))
            out.append(
                _result(
                    "powerops", "mth-power", f"G={spec} m={m}", back == f.pow(m)
                )
            )
        # restriction identity
        for m in range(2, cfg.max_m + 1):
            for i in range(1, m):
                j = m - i
                into_big, into_split = product_delta_homs(g, i, j)
                lhs = restrict(power_op(f, m, sec), into_big)
                rhs = restrict(
                    external_product(power_op(f, i, sec), power_op(f, j, sec)),
                    into_split,
                )
                out.append(
                    _result(
                        "powerops",
                        "restriction-identity",
                        f"G={spec} i={i} j={j}",
                        lhs == rhs,
                    )
                )
    # naturality along C2 -> S2 in S3
    s3 = build_group("S3")
    c2 = build_group("C2")
    transposition = next(
        i for i in range(s3.order) if int(s3.orders()[i]) == 2
    )
    gamma = Homomorphism(
        c2, s3, (s3.identity, transposition)
    )
    f = random_class_function(s3, p, n, level, seed=23)
    for m in range(1, cfg.max_m + 1):
        lhs = power_op(restrict(f, gamma), m, sec)
        rhs = restrict(
            power_op(f, m, sec), times_hom(gamma, identity_hom(symmetric_group(m)))
        )
        out.append(_result("powerops", "naturality", f"m={m}", lhs == rhs))
    # diagonal compatibility of the total power operation; the C2 m=4 case
    # needs level 3 (G wr S_4 contains elements of order 8)
    cases = [
        ("S1", (1, 2, 3, 4), level),
        ("C2", (1, 2, 3), level),
        ("S3", (1, 2), level),
        ("C2", (4,), 3),
    ]
    for spec, ms, lvl in cases:
        g = build_group(spec)
        f = random_class_function(g, p, n, lvl, seed=24)
        for m in ms:
            total = total_power_op(f, m, sec)
            out.append(
                _result(
                    "powerops",
                    "diagonal-compatibility",
                    f"G={spec} m={m} level={lvl}",
                    restrict(total, diagonal_wreath_hom(g, m))
                    == power_op(f, m, sec),
                )
            )
    return out


# ---------------------------------------------------------------------------
# invariance


def suite_invariance(cfg: VerifyConfig, functions: int = None, seeds=None):
    out = []
    p, n, level = cfg.p, cfg.n, cfg.level
    functions = functions if functions is not None else cfg.functions
    seeds = seeds if seeds is not None else cfg.seeds
    sec = canonical_section(p, n, _section_bound(p, cfg.max_m))
    others = [random_section(p, n, _section_bound(p, cfg.max_m), s) for s in seeds]
    idx = 0
    for spec in cfg.groups:
        g = build_group(spec)
        for _ in range(functions):
            idx += 1
            f = average(random_class_function(g, p, n, level, seed=100 + idx))
            for m in range(1, cfg.max_m + 1):
                base = power_op(f, m, sec)
                out.append(
                    _result(
                        "invariance",
                        "preservation",
                        f"G={spec} f#{idx} m={m}",
                        is_invariant(base),
                    )
                )
                out.append(
                    _result(
                        "invariance",
                        "section-independence",
                        f"G={spec} f#{idx} m={m}",
                        all(power_op(f, m, s) == base for s in others),
                    )
                )
    return out


# ---------------------------------------------------------------------------
# stabilizer


def suite_stabilizer(cfg: VerifyConfig):
    out = []
    p, n, level = cfg.p, cfg.n, cfg.level
    sec = canonical_section(p, n, _section_bound(p, cfg.max_m))
    rng = SplitMix64(77)
    g = build_group("C2")
    f = random_class_function(g, p, n, level, seed=31)
    for i in range(10):
        s = random_stabilizer(p, n, level, rng)
        for m in (2, 3):
            out.append(
                _result(
                    "stabilizer",
                    "commutes-with-P",
                    f"s#{i} m={m}",
                    stabilizer_act(power_op(f, m, sec), s)
                    == power_op(stabilizer_act(f, s), m, sec),
                )
            )
        out.append(
            _result(
                "stabilizer",
                "commutes-with-total-P",
                f"s#{i} m=2",
                stabilizer_act(total_power_op(f, 2, sec), s)
                == total_power_op(stabilizer_act(f, s), 2, sec),
            )
        )
    return out


# ---------------------------------------------------------------------------
# formal group laws


def suite_fgl(cfg: VerifyConfig):
    out = []
    mult_q = build_multiplicative(RationalCoefficients(2), 9)
    two = mult_q.i_series(2)
    expect = [Fraction(0), Fraction(2), Fraction(1)] + [Fraction(0)] * 7
    out.append(
        _result("fgl", "mult-2-series", "p=2", list(two.coeffs) == expect,
                "[2](x) = 2x + x^2")
    )
    for p in (2, 3):
        m = build_multiplicative(RationalCoefficients(p), p + 2)
        out.append(
            _result(
                "fgl",
                "mult-weierstrass",
                f"p={p}",
                weierstrass_degree(m.i_series(p)) == p,
            )
        )
    for p, n in ((2, 1), (2, 2), (3, 1)):
        trunc = default_truncation(p, n)
        law = build_honda(p, n, trunc)
        ps = law.i_series(p)
        target = p ** n
        leading_ok = all(ps.coeffs[d] == 0 for d in range(target)) and law.ring.is_unit(
            ps.coeffs[target]
        )
        out.append(
            _result("fgl", "honda-height", f"p={p} n={n}", leading_ok,
                    f"[p](x) has first term x^{target} mod p")
        )
        out.append(
            _result(
                "fgl",
                "honda-axioms",
                f"p={p} n={n}",
                law.unit_axiom_holds()
                and law.is_commutative()
                and law.associativity_residual_is_zero(),
            )
        )
        ok = True
        for i in range(4):
            for j in range(4):
                if law.plus(law.i_series(i), law.i_series(j)) != law.i_series(i + j):
                    ok = False
        out.append(_result("fgl", "i-series-additivity", f"p={p} n={n}", ok))
    h22 = build_honda(2, 2, default_truncation(2, 2))
    rank1, basis = quotient_ring_rank(h22, 1)
    out.append(
        _result("fgl", "quotient-rank", "honda(2) p=2 k=1", rank1 == 4,
                f"rank {rank1}, basis {basis}")
    )
    out.append(
        _result(
            "fgl",
            "quotient-rank-product",
            "honda(2) p=2 C2xC2",
            abelian_quotient_rank(h22, [1, 1]) == 16,
        )
    )
    wd2 = weierstrass_degree(h22.i_series(2))
    wd4 = weierstrass_degree(h22.i_series(4))
    out.append(
        _result("fgl", "weierstrass-tower", "honda(2) p=2", (wd2, wd4) == (4, 16),
                f"[2] deg {wd2}, [4] deg {wd4}")
    )
    rational = build_honda_rational(2, 1, 6)
    out.append(
        _result(
            "fgl",
            "honda-rational-integral",
            "p=2 n=1",
            all(Fraction(c).denominator % 2 for _, c in rational.law.coeffs),
        )
    )
    return out


SUITES = {
    "bijections": suite_bijections,
    "transfers": suite_transfers,
    "powerops": suite_powerops,
    "invariance": suite_invariance,
    "stabilizer": suite_stabilizer,
    "fgl": suite_fgl,
}


def run_suites(names, cfg: VerifyConfig = None):
    cfg = cfg or VerifyConfig()
    if "all" in names:
        names = list(SUITES)
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
        results.extend(SUITES[name](cfg))
    results.sort(key=lambda r: (r.suite, r.name, r.params))
    return results
