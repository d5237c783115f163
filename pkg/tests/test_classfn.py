import json
from fractions import Fraction

import pytest

from charpow.classfn import (
    C0Element,
    ClassFunction,
    StabilizerElement,
    act_by_residue,
    aut_act,
    average,
    c0_constant,
    c0_coordinate,
    c0_delta,
    c0_one,
    c0_zero,
    constant_one,
    constant_value,
    external_product,
    from_json_dict,
    general_linear_residues,
    indicator,
    is_invariant,
    matrix_space,
    power_op,
    random_class_function,
    random_stabilizer,
    restrict,
    stabilizer_act,
    to_json_dict,
    total_power_op,
    transfer,
    transfer_ideal,
)
from charpow.errors import (
    LevelMismatchError,
    SectionOutOfRangeError,
)
from charpow.groups import (
    Homomorphism,
    Subgroup,
    TupleClass,
    build_group,
    diagonal_wreath_hom,
    enumerate_hom_classes,
    include_left_factor,
    product_delta_homs,
    product_group,
    symm_class_to_sum,
    symmetric_group,
    times_hom,
    identity_hom,
    wreath_class_to_decorated,
)
from charpow.isogeny import canonical_section, random_section
from charpow.lattice import PAdicMatrix
from charpow.rng import SplitMix64

P, N, LEVEL = 2, 2, 2


@pytest.fixture(scope="module")
def s3():
    return build_group("S3")


@pytest.fixture(scope="module")
def section():
    return canonical_section(P, N, 2)


def test_matrix_space_size():
    mats, index = matrix_space(2, 2, 2)
    assert len(mats) == 256
    assert index[mats[17]] == 17


def test_gl_size():
    assert len(general_linear_residues(2, 2, 2)) == 96
    assert general_linear_residues(2, 2, 1) == (((1,),), ((3,),))
    assert len(general_linear_residues(3, 1, 1)) == 2


def test_c0_ring_ops():
    one = c0_one(2, 1, 2)
    coord = c0_coordinate(2, 1, 2)
    assert coord.values == (0, 1, 2, 3)
    assert one.mul(coord) == coord
    assert coord.add(coord) == coord.scale(2)
    assert coord.sub(coord).is_zero()


def test_c0_isogeny_action_is_ring_hom():
    from charpow.isogeny import Isogeny

    phi = Isogeny(PAdicMatrix(2, ((2,),)))
    a = c0_coordinate(2, 1, 2)
    b = c0_delta(2, 1, 2, 1)
    assert a.mul(b).act_isogeny(phi) == a.act_isogeny(phi).mul(b.act_isogeny(phi))
    assert c0_one(2, 1, 2).act_isogeny(phi) == c0_one(2, 1, 2)
    # (c . [2])(xi) = c(2 xi mod 4)
    assert a.act_isogeny(phi).values == (0, 2, 0, 2)


def test_c0_left_right_actions_commute():
    a = c0_coordinate(2, 2, 2)
    left = ((1, 2), (3, 1))
    right = ((1, 1), (2, 3))
    assert (
        a.act_matrix_left(left).act_matrix_right(right)
        == a.act_matrix_right(right).act_matrix_left(left)
    )


def test_class_function_rejects_bad_keys(s3):
    with pytest.raises(ValueError):
        ClassFunction(s3, P, N, LEVEL, {(5, 5): c0_one(P, N, LEVEL)})


def test_class_function_zero_normalization(s3):
    f = ClassFunction(
        s3, P, N, LEVEL,
        {enumerate_hom_classes(s3, N, P)[0].rep: c0_zero(P, N, LEVEL)},
    )
    assert f == ClassFunction(s3, P, N, LEVEL, {})


def test_aut_act_identity_and_one(s3):
    f = random_class_function(s3, P, N, LEVEL, seed=1)
    eye = PAdicMatrix(2, ((1, 0), (0, 1)))
    assert aut_act(f, eye) == f
    one = constant_one(s3, P, N, LEVEL)
    gam = PAdicMatrix(2, ((1, 1), (0, 1)))
    assert aut_act(one, gam) == one


def test_aut_act_right_action_law(s3):
    f = random_class_function(s3, P, N, LEVEL, seed=2)
    g1 = PAdicMatrix(2, ((1, 1), (0, 1)))
    g2 = PAdicMatrix(2, ((0, 1), (1, 0)))
    assert aut_act(aut_act(f, g1), g2) == aut_act(f, g1.mul(g2))


def test_aut_act_rejects_non_unit(s3):
    f = random_class_function(s3, P, N, LEVEL, seed=3)
    with pytest.raises(ValueError):
        aut_act(f, PAdicMatrix(2, ((2, 0), (0, 1))))


def test_level_rule_enforced():
    # wr(C2,4) has 2-exponent 8: level 2 must be rejected for the aut action
    w = build_group("wr(C2,4)")
    f = constant_one(w, P, N, LEVEL)
    with pytest.raises(LevelMismatchError):
        act_by_residue(f, ((1, 0), (0, 1)))


def test_average_projects_onto_invariants(s3):
    f = random_class_function(s3, P, N, LEVEL, seed=4)
    fav = average(f)
    assert is_invariant(fav)
    assert average(fav) == fav
    # full-orbit oracle: averaging the orbit sum directly
    gl = general_linear_residues(P, LEVEL, N)
    total = None
    for gbar in gl:
        moved = act_by_residue(f, gbar)
        total = moved if total is None else total.add(moved)
    assert total.scale(Fraction(1, len(gl))) == fav


def test_transfer_whole_group_is_identity(s3):
    whole = Subgroup(s3, tuple(range(s3.order)))
    sub_group = whole.as_group()
    relabel = Homomorphism(
        sub_group, s3, tuple(s3.index[lab] for lab in sub_group.elements)
    )
    f = random_class_function(s3, P, N, LEVEL, seed=5)
    assert transfer(restrict(f, relabel), whole.inclusion()) == f


def test_transfer_constant_one_counts_fixed_cosets():
    s2 = build_group("S2")
    triv = Subgroup(s2, (s2.identity,))
    tr = transfer(constant_one(triv.as_group(), P, 1, LEVEL), triv.inclusion())
    assert tr.value_at((s2.identity,)) == c0_constant(P, 1, LEVEL, 2)
    assert tr.value_at((1,)).is_zero()


def test_transfer_indicator_supported_on_one_class():
    # Tr of an indicator is concentrated on the matching class of the big group
    s4 = build_group("S4")
    sub = Subgroup(
        s4,
        tuple(
            sorted(
                {s4.identity, s4.index[(1, 0, 2, 3)], s4.index[(0, 1, 3, 2)],
                 s4.index[(1, 0, 3, 2)]}
            )
        ),
    )
    k = sub.as_group()
    beta = enumerate_hom_classes(k, N, P)[3]
    tr = transfer(indicator(beta, LEVEL), sub.inclusion())
    iota = sub.inclusion()
    image_class = TupleClass(s4, tuple(iota(i) for i in beta.rep), P)
    support = set(tr.values)
    assert support == {image_class.rep}
    vals = set(tr.value_at(image_class).values)
    assert len(vals) == 1 and vals.pop() > 0


def test_transfer_ideal_m2_n1():
    ideal = transfer_ideal(P, 1, LEVEL, 2)
    assert ideal.quotient_dim() == 1
    s2 = symmetric_group(2)
    transposition_rep = (1,)
    # quotient supported on the transposition class only
    vec_identity = [
        Fraction(int(rep == (s2.identity,))) for rep in ideal.keys
    ]
    vec_transposition = [
        Fraction(int(rep == transposition_rep)) for rep in ideal.keys
    ]
    assert ideal.contains_vector(vec_identity)
    assert not ideal.contains_vector(vec_transposition)


def test_wreath_transfer_ideal_quotient_matches_single_summands():
    # the quotient by the wreath transfer ideal keeps one coordinate per
    # single-summand decorated sum
    from charpow.groups import wreath_class_to_decorated, wreath_group

    cases = [("S2", 2, 1), ("S2", 2, 2), ("C2", 4, 1)]
    for spec, m, n in cases:
        g = build_group(spec)
        ideal = transfer_ideal(2, n, 2, m, g)
        w = wreath_group(g, m)
        singles = [
            c
            for c in enumerate_hom_classes(w, n, 2)
            if len(wreath_class_to_decorated(c).summands) == 1
        ]
        assert ideal.quotient_dim() == len(singles)


def test_row_reduce_rank_and_membership_fuzz():
    from charpow.classfn import _reduce_against, _row_reduce

    def rank_oracle(rows):
        m = [list(map(Fraction, r)) for r in rows]
        rank, col = 0, 0
        ncols = len(m[0])
        while rank < len(m) and col < ncols:
            piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
            if piv is None:
                col += 1
                continue
            m[rank], m[piv] = m[piv], m[rank]
            pv = m[rank][col]
            m[rank] = [x / pv for x in m[rank]]
            for r in range(len(m)):
                if r != rank and m[r][col] != 0:
                    c = m[r][col]
                    m[r] = [a - c * b for a, b in zip(m[r], m[rank])]
            rank += 1
            col += 1
        return rank

    rng = SplitMix64(12345)
    for _ in range(120):
        nrows, ncols = 1 + rng.below(6), 1 + rng.below(6)
        rows = [[rng.below(7) - 3 for _ in range(ncols)] for _ in range(nrows)]
        basis = _row_reduce([list(map(Fraction, r)) for r in rows])
        assert len(basis) == rank_oracle(rows)
        coeffs = [Fraction(rng.below(5) - 2) for _ in range(nrows)]
        comb = [
            sum(coeffs[i] * rows[i][j] for i in range(nrows)) for j in range(ncols)
        ]
        assert all(x == 0 for x in _reduce_against(comb, basis))
        if len(basis) < ncols:
            pivots = {next(j for j, x in enumerate(b) if x != 0) for b in basis}
            free = next(j for j in range(ncols) if j not in pivots)
            shifted = list(comb)
            shifted[free] += 1
            assert not all(x == 0 for x in _reduce_against(shifted, basis))


def test_transfer_ideal_contains_constant_multiples():
    ideal = transfer_ideal(P, N, LEVEL, 2)
    sym = symmetric_group(2)
    multi = next(
        c
        for c in enumerate_hom_classes(sym, N, P)
        if len(symm_class_to_sum(c).summands) > 1
    )
    f = indicator(multi, LEVEL, c0_coordinate(P, N, LEVEL))
    assert ideal.contains(f)


# ---------------------------------------------------------------------------
# power operations: golden hand expansions


def test_power_op_golden_n1_coord_generator():
    # p=2, n=1, m=2, G trivial, level 2, f = coordinate generator.
    # Keys of S1 x S2 match classes of S2: identity pair and transposition.
    # Hand expansion of the defining formula:
    #   trivial sum (two trivial summands, phi = id): value = coord^2
    #   order-2 subgroup (phi = [2]): value = coord(2 xi) = (0, 2, 0, 2)
    g = build_group("S1")
    sec = canonical_section(2, 1, 1)
    f = constant_value(g, 2, 1, LEVEL, c0_coordinate(2, 1, LEVEL))
    out = power_op(f, 2, sec)
    target = out.group
    s2 = symmetric_group(2)
    e_rep = tuple(
        target.index[(g.elements[g.identity], s2.elements[s2.identity])]
        for _ in range(1)
    )
    t_rep = tuple(
        target.index[(g.elements[g.identity], s2.elements[s2.index[(1, 0)]])]
        for _ in range(1)
    )
    assert out.value_at(e_rep).values == (0, 1, 4, 9)
    assert out.value_at(t_rep).values == (0, 2, 0, 2)


def test_total_power_op_golden_s2_wreath():
    # G = S2, m = 2, p = 2, n = 1: full value table against the formula,
    # expanded by hand over the five classes of S2 wr S2.
    g = build_group("S2")
    sec = canonical_section(2, 1, 1)
    f = random_class_function(g, 2, 1, LEVEL, seed=8)
    out = total_power_op(f, 2, sec)
    w = out.group
    fe, ft = f.value_at((0,)), f.value_at((1,))
    two = PAdicMatrix(2, ((2,),))
    for cls in enumerate_hom_classes(w, 1, 2):
        d = wreath_class_to_decorated(cls)
        if len(d.summands) == 2:
            expected = Fraction(1)
            vals = [f.value_at(a.rep) for _, a in d.summands]
            expected = vals[0].mul(vals[1])
        else:
            (h, alpha), = d.summands
            # psi-dual of the canonical [2] is the identity: pulled class = alpha
            base = fe if alpha.rep == (0,) else ft
            expected = base.act_matrix_left(two.entries)
        assert out.value_at(cls) == expected


def test_power_op_one_and_multiplicativity(s3, section):
    one = constant_one(s3, P, N, LEVEL)
    for m in (1, 2, 3):
        target = product_group(s3, symmetric_group(m))
        assert power_op(one, m, section) == constant_one(target, P, N, LEVEL)
    f = random_class_function(s3, P, N, LEVEL, seed=9)
    g = random_class_function(s3, P, N, LEVEL, seed=10)
    for m in (2, 3):
        assert power_op(f.mul(g), m, section) == power_op(f, m, section).mul(
            power_op(g, m, section)
        )


def test_power_op_m1_identity(s3, section):
    f = random_class_function(s3, P, N, LEVEL, seed=11)
    p1 = power_op(f, 1, section)
    assert restrict(p1, include_left_factor(s3, symmetric_group(1))) == f


def test_mth_power_identity(s3, section):
    f = random_class_function(s3, P, N, LEVEL, seed=12)
    for m in (2, 3, 4):
        pm = power_op(f, m, section)
        back = restrict(pm, include_left_factor(s3, symmetric_group(m)))
        assert back == f.pow(m)


def test_restriction_identity(s3, section):
    f = random_class_function(s3, P, N, LEVEL, seed=13)
    for m, i in [(2, 1), (3, 1), (3, 2), (4, 2)]:
        j = m - i
        into_big, into_split = product_delta_homs(s3, i, j)
        lhs = restrict(power_op(f, m, section), into_big)
        rhs = restrict(
            external_product(power_op(f, i, section), power_op(f, j, section)),
            into_split,
        )
        assert lhs == rhs


def test_naturality(section):
    s3 = build_group("S3")
    c2 = build_group("C2")
    transposition = next(i for i in range(6) if int(s3.orders()[i]) == 2)
    gamma = Homomorphism(c2, s3, (s3.identity, transposition))
    f = random_class_function(s3, P, N, LEVEL, seed=14)
    for m in (1, 2, 3):
        lhs = power_op(restrict(f, gamma), m, section)
        rhs = restrict(
            power_op(f, m, section),
            times_hom(gamma, identity_hom(symmetric_group(m))),
        )
        assert lhs == rhs


def test_restrict_identity_and_trivial_map(s3):
    f = random_class_function(s3, P, N, LEVEL, seed=30)
    assert restrict(f, identity_hom(s3)) == f
    c4 = build_group("C4")
    from charpow.groups import trivial_hom

    pulled = restrict(f, trivial_hom(c4, s3))
    trivial_value = f.value_at((s3.identity,) * N)
    assert all(
        pulled.value_at(c) == trivial_value
        for c in enumerate_hom_classes(c4, N, P)
    )


def test_total_power_op_m1_is_identity(section):
    g = build_group("C2")
    f = random_class_function(g, P, N, LEVEL, seed=31)
    t1 = total_power_op(f, 1, section)
    assert restrict(t1, diagonal_wreath_hom(g, 1)) == power_op(f, 1, section)
    w = t1.group
    for rep, val in f.values.items():
        wrep = w.index[((g.elements[rep[0]],), (0,))], w.index[((g.elements[rep[1]],), (0,))]
        assert t1.value_at(tuple(wrep)) == val


def test_diagonal_compatibility(section):
    g = build_group("C2")
    f = random_class_function(g, P, N, LEVEL, seed=15)
    for m in (1, 2, 3):
        total = total_power_op(f, m, section)
        assert restrict(total, diagonal_wreath_hom(g, m)) == power_op(f, m, section)


def test_section_independence_on_invariants(s3, section):
    f = average(random_class_function(s3, P, N, LEVEL, seed=16))
    for m in (2, 3):
        base = power_op(f, m, section)
        for seed in (1, 2):
            assert power_op(f, m, random_section(P, N, 2, seed)) == base


def test_total_power_op_section_independence_on_invariants(section):
    g = build_group("C2")
    f = average(random_class_function(g, P, N, LEVEL, seed=26))
    base = total_power_op(f, 2, section)
    for seed in (1, 2):
        assert total_power_op(f, 2, random_section(P, N, 2, seed)) == base


def test_section_domain_order_contract():
    # seeded sections draw unimodular matrices while walking subgroups in
    # canonical enumeration order: order ascending, then lexicographic matrix
    from charpow.torsion import enumerate_subgroups

    sec = random_section(P, N, 2, 9)
    expected = []
    for k in range(3):
        expected.extend(enumerate_subgroups(P, N, k))
    assert list(sec.domain()) == expected


def test_section_dependence_without_invariance(s3, section):
    f = random_class_function(s3, P, N, LEVEL, seed=17)
    assert power_op(f, 2, section) != power_op(f, 2, random_section(P, N, 2, 1))


def test_invariance_preservation(s3, section):
    f = average(random_class_function(s3, P, N, LEVEL, seed=18))
    assert is_invariant(power_op(f, 2, section))


def test_stabilizer_commutation(s3, section):
    rng = SplitMix64(5)
    f = random_class_function(s3, P, N, LEVEL, seed=19)
    s = random_stabilizer(P, N, LEVEL, rng)
    assert stabilizer_act(power_op(f, 2, section), s) == power_op(
        stabilizer_act(f, s), 2, section
    )
    assert stabilizer_act(f, StabilizerElement(P, N, LEVEL, ((1, 0), (0, 1)))) == f
    one = constant_one(s3, P, N, LEVEL)
    assert stabilizer_act(one, s) == one


def test_section_out_of_range(s3):
    small = canonical_section(P, N, 1)
    f = random_class_function(s3, P, N, LEVEL, seed=20)
    with pytest.raises(SectionOutOfRangeError):
        power_op(f, 4, small)


def test_serialization_roundtrip(s3, section):
    f = random_class_function(s3, P, N, LEVEL, seed=21)
    blob = json.dumps(to_json_dict(f), sort_keys=True)
    back = from_json_dict(json.loads(blob))
    assert back == f
    p2 = power_op(f, 2, section)
    blob2 = json.dumps(to_json_dict(p2), sort_keys=True)
    assert from_json_dict(json.loads(blob2)) == p2
