import math
import random

import pytest

from orbring.combinatorics import (
    CaseTag,
    Partition,
    Permutation,
    age,
    centralizer,
    class_representative,
    conjugacy_class_data,
    coarsens,
    cycle_type,
    epsilon,
    orbit_join,
    permutations,
)

HILB = CaseTag.hilb()
KUM = CaseTag.kummer()


def P(text, n):
    return Permutation.from_cycles(text, n)


def test_cycle_notation_round_trip():
    g = P("(1 2)(3 4 5)", 5)
    assert g.images == (1, 0, 3, 4, 2)
    assert str(g) == "(1 2)(3 4 5)"
    assert str(P("id", 4)) == "id"
    assert P("(3 1 2)", 3) == P("(1 2 3)", 3)


@pytest.mark.parametrize("bad", ["(1 2", "(1 1)", "(0 1)", "(1 5)", "1 2", "(a b)"])
def test_cycle_notation_rejects_malformed(bad):
    with pytest.raises(ValueError):
        P(bad, 4)


def test_permutation_validates_images():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_composition_applies_right_factor_first():
    g, h = P("(1 2)", 3), P("(2 3)", 3)
    gh = g * h
    assert all(gh(x) == g(h(x)) for x in range(3))
    assert gh == P("(1 2 3)", 3)


def test_group_axioms_on_s4():
    group = permutations(4)
    e = Permutation.identity(4)
    rng = random.Random(1)
    for _ in range(200):
        a, b, c = rng.sample(group, 3)
        assert (a * b) * c == a * (b * c)
        assert a * e == a == e * a
        assert a * a.inverse() == e


def test_degree_mismatch():
    with pytest.raises(ValueError):
        P("(1 2)", 2) * P("(1 2)", 3)
    with pytest.raises(ValueError):
        orbit_join(P("(1 2)", 2), P("(1 2)", 3))


@pytest.mark.parametrize(
    "text,n,parts",
    [("id", 3, (1, 1, 1)), ("(1 2)(3 4 5)", 5, (3, 2)), ("(1 2 3 4)", 4, (4,))],
)
def test_cycle_type(text, n, parts):
    lam = cycle_type(P(text, n))
    assert lam.parts == parts
    assert lam.length == len(P(text, n).orbits)


def test_partition_data():
    lam = Partition((4, 2))
    assert lam.n == 6 and lam.length == 2 and lam.gcd == 2
    assert all(p % lam.gcd == 0 for p in lam.parts)
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_orbit_join_examples():
    assert orbit_join(P("(1 2)", 3), P("(2 3)", 3)) == ((0, 1, 2),)
    assert orbit_join(P("(1 2)", 4), P("(3 4)", 4)) == ((0, 1), (2, 3))
    g = P("(1 3)(2 4)", 5)
    assert orbit_join(g, g) == g.orbits


def test_orbit_join_matches_subgroup_orbits():
    group = permutations(4)
    for g in group[::3]:
        for h in group[::5]:
            # brute force: close {x} under g and h
            seen = set()
            blocks = []
            for x in range(4):
                if x in seen:
                    continue
                orb, frontier = {x}, [x]
                while frontier:
                    y = frontier.pop()
                    for z in (g(y), h(y)):
                        if z not in orb:
                            orb.add(z)
                            frontier.append(z)
                seen |= orb
                blocks.append(tuple(sorted(orb)))
            assert orbit_join(g, h) == tuple(sorted(blocks))
            assert coarsens(orbit_join(g, h), g.orbits)


@pytest.mark.parametrize("case", [HILB, KUM])
def test_age_examples(case):
    assert age(P("id", 5), case) == 0
    assert age(P("(1 2 3 4)", 5), case) == 3
    assert age(P("(1 2)(3 4 5)", 5), case) == 3


def test_age_is_class_function_and_codimension():
    for n in range(1, 6):
        group = permutations(n)
        for g in group:
            for case in (HILB, KUM):
                m = n if case.kind == "hilb" else n - 1
                if m < 1:
                    continue
                a = age(g, case)
                assert a == age(g.inverse(), case)
                codim = case.locus_dim(n) - case.locus_dim(len(g.orbits))
                assert a + age(g.inverse(), case) == codim
        for g in group[:: max(1, len(group) // 10)]:
            for h in group[:: max(1, len(group) // 7)]:
                assert age(g.conjugate_by(h), HILB) == age(g, HILB)


def test_epsilon_examples():
    assert epsilon(P("(1 2)", 2), P("(1 2)", 2), HILB) == 1
    assert epsilon(P("(1 2)", 3), P("(2 3)", 3), HILB) == 0
    for h in permutations(3):
        assert epsilon(P("id", 3), h, HILB) == 0


def test_epsilon_remark_identity_and_cocycle_small():
    group = permutations(4)
    for g in group:
        for h in group:
            e = epsilon(g, h, HILB)
            assert age(g, HILB) + age(h, HILB) - age(g * h, HILB) == 2 * e
            assert (1j) ** (age(g, HILB) + age(h, HILB) - age(g * h, HILB)) == (-1) ** e


def test_epsilon_cocycle_random_large():
    rng = random.Random(5)
    for n in (5, 6):
        for _ in range(300):
            g1, g2, g3 = (Permutation(tuple(rng.sample(range(n), n))) for _ in range(3))
            lhs = epsilon(g1, g2, HILB) + epsilon(g1 * g2, g3, HILB)
            rhs = epsilon(g1, g2 * g3, HILB) + epsilon(g2, g3, HILB)
            assert lhs == rhs


def test_conjugacy_class_data():
    data = conjugacy_class_data(3)
    assert [(lam.parts, size, z) for lam, size, z in data] == [((3,), 2, 3), ((2, 1), 3, 2), ((1, 1, 1), 1, 6)]
    assert [(lam.parts, s, z) for lam, s, z in conjugacy_class_data(1)] == [((1,), 1, 1)]
    for n in range(1, 7):
        rows = conjugacy_class_data(n)
        assert sum(s for _, s, _ in rows) == math.factorial(n)
        assert all(s * z == math.factorial(n) for _, s, z in rows)


def test_centralizer_orders_match_brute_force():
    group = permutations(5)
    for lam, size, z in conjugacy_class_data(5):
        g = class_representative(lam)
        assert cycle_type(g) == lam
        assert len(centralizer(g, group)) == z


def test_case_tag_validation():
    CaseTag.hilb((1, 0, 22, 0, 1))
    with pytest.raises(ValueError):
        CaseTag.hilb((1, 4, 6, 3, 1))
    with pytest.raises(ValueError):
        CaseTag.hilb((2, 0, 22, 0, 2))
    with pytest.raises(ValueError):
        CaseTag("kummer", (1, 0, 22, 0, 1))
    with pytest.raises(ValueError):
        CaseTag("other")
    assert KUM.degree(3) == 4 and HILB.degree(3) == 3
