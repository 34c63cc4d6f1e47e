import random
from math import comb

import pytest

from orbring import CaseTag, OrbifoldRing, ResourceBoundError, build_ring
from orbring.combinatorics import Permutation, conjugacy_class_data, cycle_type
from orbring.exact_linalg import poly_mul

HILB = CaseTag.hilb()
KUM = CaseTag.kummer()


def P(text, n):
    return Permutation.from_cycles(text, n)


@pytest.fixture(scope="module")
def a2():
    return OrbifoldRing(HILB, 2)


@pytest.fixture(scope="module")
def a2dt():
    return OrbifoldRing(HILB, 2, dt=True)


@pytest.fixture(scope="module")
def b2():
    return OrbifoldRing(KUM, 2)


def test_kummer_one_sectors():
    ring = OrbifoldRing(KUM, 1)
    assert len(ring.sectors) == 2
    ident, swap = ring.group
    assert ring.sectors[ident].poincare() == [1, 4, 6, 4, 1]
    assert len(ring.sectors[swap].components) == 16 and ring.sectors[swap].algebra.poincare() == [1]
    assert ring.poincare_invariants() == [1, 0, 22, 0, 1]


def test_hilb_two_total_poincare(a2):
    expected = [comb(8, k) for k in range(9)]
    for k in range(5):
        expected[k + 2] += comb(4, k)
    assert a2.poincare() == expected
    assert a2.ck_grading() == expected
    assert a2.ck_grading()[2] == 29
    assert sum(a2.ck_grading()) == a2.dim


def test_hilb_one_is_the_surface():
    ring = OrbifoldRing(HILB, 1)
    assert ring.poincare() == [1, 4, 6, 4, 1] == ring.poincare_invariants()


def test_kummer_two_sector_dims(b2):
    dims = sorted(sum(s.poincare()) for s in b2.sectors.values())
    assert dims == [16, 16, 16, 81, 81, 256]
    by_type = {}
    for g in b2.group:
        by_type.setdefault(cycle_type(g).parts, []).append(g)
    assert {lam.parts: size for lam, size, _ in conjugacy_class_data(3)} == {k: len(v) for k, v in by_type.items()}


def test_obstruction_rank_examples():
    a3 = OrbifoldRing(HILB, 3)
    c = P("(1 2 3)", 3)
    assert a3.obstruction_rank(c, c) == 2
    assert not a3.star(a3.fundamental_class(c), a3.fundamental_class(c))
    assert "obstruction rank 2" in a3.product_reason(c, c)
    for ring in (a3, OrbifoldRing(KUM, 2)):
        for h in ring.group:
            assert ring.obstruction_rank(ring.identity, h) == 0
    a2 = OrbifoldRing(HILB, 2)
    s = P("(1 2)", 2)
    assert a2.obstruction_rank(s, s) == 0


@pytest.mark.parametrize("case,n", [(HILB, 2), (HILB, 3), (KUM, 1), (KUM, 2)])
def test_unit_two_sided(case, n):
    ring = OrbifoldRing(case, n, dt=True)
    u = ring.unit()
    rng = random.Random(0)
    keys = list(ring.iter_basis())
    for key in rng.sample(keys, min(200, len(keys))):
        x = ring.basis_element(key)
        assert u * x == x == x * u


def test_untwisted_product_is_cup(a2):
    alg = a2.sectors[a2.identity].algebra
    rng = random.Random(1)
    basis = alg.basis()
    for _ in range(200):
        a, b = rng.choice(basis), rng.choice(basis)
        got = a2.star(a2.basis_element((a2.identity, (), a)), a2.basis_element((a2.identity, (), b)))
        assert got.terms == {(a2.identity, (), k): c for k, c in alg.mul_basis(a, b).items()}


def test_dt_flips_twisted_square(a2, a2dt):
    s = P("(1 2)", 2)
    x = a2.fundamental_class(s)
    plain = a2.star(x, x)
    twisted = a2dt.star(a2dt.fundamental_class(s), a2dt.fundamental_class(s))
    assert plain and twisted.terms == {k: -c for k, c in plain.terms.items()}
    # the class of the diagonal in A x A has degree 4
    assert plain.degrees() == {4}


def test_kummer_twisted_square_lands_on_points():
    ring = OrbifoldRing(KUM, 1)
    s = ring.group[1]
    sq = ring.star(ring.fundamental_class(s), ring.fundamental_class(s))
    # the sum of the 16 point classes squares to 16 times the point class of A
    assert set(k[0] for k in sq.terms) == {ring.identity}
    assert sum(sq.terms.values()) == 16
    assert ring.total_degree(next(iter(sq.terms))) == 4


def test_group_action_identity_and_homomorphism(b2):
    rng = random.Random(2)
    keys = list(b2.iter_basis())
    for key in rng.sample(keys, 40):
        x = b2.basis_element(key)
        assert b2.act(b2.identity, x) == x
        h1, h2 = rng.sample(b2.group, 2)
        assert b2.act(h1 * h2, x) == b2.act(h1, b2.act(h2, x))


def test_group_action_commutes_with_star(b2):
    rng = random.Random(3)
    for a, b, _ in b2.sample_low_degree(rng, 300):
        h = rng.choice(b2.group)
        x, y = b2.basis_element(a), b2.basis_element(b)
        assert b2.act(h, x * y) == b2.act(h, x) * b2.act(h, y)


def test_relabelled_letters_give_isomorphic_ring():
    # conjugating by any fixed permutation is a ring automorphism, so the
    # choice of orbit numbering cannot matter
    ring = OrbifoldRing(HILB, 3, dt=True)
    h = P("(1 3 2)", 3)
    rng = random.Random(4)
    for a, b, _ in ring.sample_low_degree(rng, 200):
        x, y = ring.basis_element(a), ring.basis_element(b)
        assert ring.act(h, x * y) == ring.act(h, x) * ring.act(h, y)


def test_invariant_subring_small_degrees(a2):
    sub = a2.invariant_subring([0, 1, 2])
    assert len(sub.bases[0]) == 1
    assert len(sub.bases[1]) == 4
    kum = OrbifoldRing(KUM, 1).invariant_subring([2])
    assert len(kum.bases[2]) == 22


def test_invariant_subring_graded_commutative(a2dt):
    sub = a2dt.invariant_subring([1, 2, 3])
    for p, q in [(1, 1), (1, 2), (2, 2), (1, 3)]:
        sign = (-1) ** (p * q)
        for x in sub.bases[p]:
            for y in sub.bases[q]:
                assert a2dt.star(x, y) == sign * a2dt.star(y, x)
    table = sub.structure_constants(1, 1)
    assert len(table) == 16
    assert all(isinstance(k, int) for coords in table.values() for k in coords)


@pytest.mark.parametrize("case,n", [(HILB, 2), (HILB, 3), (KUM, 1), (KUM, 2)])
def test_projector_and_molien_agree(case, n):
    ring = OrbifoldRing(case, n)
    assert ring.invariant_dims_projector() == ring.invariant_dims_molien()


def test_kummer_b2_is_seven(b2):
    assert b2.poincare_invariants("molien")[2] == 7
    assert b2.poincare_invariants("projector")[2] == 7


def test_selection_rule_table():
    ring = OrbifoldRing(HILB, 3)
    table = ring.k_selection_rule()
    c = P("(1 2 3)", 3)
    assert not table[(c, c)]
    assert all(table[(ring.identity, h)] for h in ring.group)
    generic = OrbifoldRing(CaseTag.hilb((1, 0, 22, 0, 1)), 2)
    with pytest.raises(ValueError):
        generic.k_selection_rule()


def test_generic_base_twisted_square_carries_euler_class():
    k3 = OrbifoldRing(CaseTag.hilb((1, 0, 22, 0, 1)), 2)
    s = P("(1 2)", 2)
    sq = k3.star(k3.fundamental_class(s), k3.fundamental_class(s))
    assert sq and sq.degrees() == {4}
    abelian = OrbifoldRing(HILB, 3)
    c = P("(1 2 3)", 3)
    assert abelian.pair_data(c, c).rank == 2 and not abelian.pair_data(c, c).active
    k3_3 = OrbifoldRing(CaseTag.hilb((1, 0, 22, 0, 1)), 3)
    # genus-one cover of the 3-cycle square: Euler class 24 * pt survives
    assert k3_3.pair_data(c, c).active
    assert k3_3.star(k3_3.fundamental_class(c), k3_3.fundamental_class(c))


def test_resource_bounds():
    with pytest.raises(ResourceBoundError):
        OrbifoldRing(HILB, 3, max_group_pairs=10)
    with pytest.raises(ResourceBoundError):
        build_ring(KUM, 2, max_dim=100)
    with pytest.raises(ValueError):
        OrbifoldRing(HILB, 0)


def test_ring_mismatch_rejected(a2, a2dt):
    with pytest.raises(ValueError):
        a2.unit() * a2dt.unit()


def test_generic_base_poincare_matches_symmetric_power():
    base = (1, 0, 22, 0, 1)
    ring = OrbifoldRing(CaseTag.hilb(base), 2)
    expected = poly_mul(list(base), list(base))
    for k, b in enumerate(base):
        expected[k + 2] += b
    assert ring.poincare() == expected
