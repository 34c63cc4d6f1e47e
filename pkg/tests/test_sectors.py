import itertools
import random

import pytest

from orbring.combinatorics import CaseTag, Permutation, coarsens, orbit_join, permutations
from orbring.exact_linalg import add_into
from orbring.sectors import (
    _conjugation_on_locus,
    build_sector,
    conjugation,
    gysin,
    gysin_by_adjoint,
    locus,
    restriction,
)

HILB = CaseTag.hilb()
KUM = CaseTag.kummer()


def P(text, n):
    return Permutation.from_cycles(text, n)


def on_algebra(smap, vec):
    """Apply a sector map to a class given on a single component."""
    out: dict = {}
    for k, c in vec.items():
        add_into(out, smap.apply_key(k), c)
    return out


def test_sector_examples():
    s = build_sector(HILB, 2, P("(1 2)", 2))
    assert (len(s.components), s.algebra.poincare()[1], s.age, s.dim) == (1, 4, 1, 2)
    s = build_sector(KUM, 1, P("(1 2)", 2))
    assert (len(s.components), s.algebra.poincare(), s.age) == (16, [1], 1)
    s = build_sector(KUM, 2, P("(1 2 3)", 3))
    assert (len(s.components), s.algebra.poincare(), s.age) == (81, [1], 2)


@pytest.mark.parametrize("case,n", [(HILB, 1), (HILB, 2), (HILB, 3), (KUM, 1), (KUM, 2), (KUM, 3)])
def test_sector_invariants(case, n):
    m = case.degree(n)
    total = case.locus_dim(m)
    for g in permutations(m):
        s = build_sector(case, n, g)
        assert 2 * s.age + s.dim == total
        l = len(g.orbits)
        if case.kind == "kummer":
            d = s.locus.modulus
            assert len(s.components) == d**4
            assert s.algebra.poincare()[1:2] == ([4 * (l - 1)] if l > 1 else [])
        assert s.betti() == s.poincare()


def test_wrong_degree_rejected():
    with pytest.raises(ValueError):
        build_sector(HILB, 3, P("(1 2)", 2))


def test_restriction_identity_when_blocks_agree():
    g = P("(1 2)", 3)
    res = restriction(locus(HILB, g.orbits), g.orbits)
    for k in res.source.algebra.basis():
        assert res.apply_key(k) == {k: 1}


def test_diagonal_pullback():
    res = restriction(locus(HILB, ((0,), (1,))), ((0, 1),))
    for j in range(4):
        assert res.apply_key(1 << j) == {1 << j: 1}
        assert res.apply_key(1 << (j + 4)) == {1 << j: 1}
    image = set()
    for k in res.source.algebra.basis():
        image |= set(res.apply_key(k))
    assert image == set(res.target.algebra.basis())


def test_kummer_restriction_to_points():
    g = P("(1 2)", 3)
    res = restriction(locus(KUM, g.orbits), ((0, 1, 2),))
    assert len(res.target.components) == 81 and len(res.source.components) == 1
    assert {res.component_map(t) for t in res.target.components} == {(0, 0, 0, 0)}
    assert all(res.apply_key(1 << j) == {} for j in range(res.source.algebra.m))


def _pairs(case, n, step=1):
    m = case.degree(n)
    group = permutations(m)
    for g in group[::step]:
        for h in group[::step]:
            yield g, h


def _res_pairs(case, n):
    seen = set()
    for g, h in _pairs(case, n):
        key = (g.orbits, orbit_join(g, h))
        if key not in seen:
            seen.add(key)
            yield key


@pytest.mark.parametrize("case,n", [(HILB, 2), (HILB, 3), (KUM, 2), (KUM, 3), (CaseTag.hilb((1, 0, 22, 0, 1)), 2)])
def test_restriction_is_unital_algebra_hom(case, n):
    rng = random.Random(0)
    for blocks, join in _res_pairs(case, n):
        res = restriction(locus(case, blocks), join)
        src, tgt = res.source.algebra, res.target.algebra
        assert res.apply_key(src.unit) == {tgt.unit: 1}
        basis = src.basis()
        pairs = itertools.product(basis, basis) if len(basis) <= 64 else (tuple(rng.sample(basis, 2)) for _ in range(300))
        for a, b in pairs:
            assert on_algebra(res, src.mul_basis(a, b)) == tgt.mul(res.apply_key(a), res.apply_key(b))


def _gysin_pairs(case, n):
    seen = set()
    for g, h in _pairs(case, n):
        key = (orbit_join(g, h), (g * h).orbits)
        if key not in seen:
            seen.add(key)
            yield key


@pytest.mark.parametrize("case,n", [(HILB, 2), (KUM, 2), (HILB, 3), (CaseTag.hilb((1, 2, 4, 2, 1)), 2)])
def test_gysin_adjoint_projection_and_self_intersection(case, n):
    rng = random.Random(1)
    for join, target_blocks in _gysin_pairs(case, n):
        assert coarsens(join, target_blocks)
        lt = locus(case, target_blocks)
        push = gysin(locus(case, join), lt)
        res = restriction(lt, join)
        lj = push.source
        tgt, src = lt.algebra, lj.algebra
        xs = src.basis() if len(src.basis()) <= 32 else rng.sample(src.basis(), 32)
        ys = tgt.basis() if len(tgt.basis()) <= 32 else rng.sample(tgt.basis(), 32)
        for x in xs:
            gx = push.apply_key(x)
            assert gx == gysin_by_adjoint(lj, lt, {x: 1})
            for y in ys:
                # adjointness
                assert tgt.pairing(gx, {y: 1}) == src.pairing({x: 1}, res.apply_key(y))
                # projection formula
                lhs: dict = {}
                for k, c in src.mul(res.apply_key(y), {x: 1}).items():
                    add_into(lhs, push.apply_key(k), c)
                assert lhs == tgt.mul({y: 1}, gx)
        codim = lt.dim - lj.dim
        back = on_algebra(res, push.apply_key(src.unit))
        if codim > 0 and case.euler_number == 0:
            assert back == {}
        elif codim > 0:
            # normal bundle of a diagonal is the tangent bundle: Euler class chi * pt
            assert back and all(c % case.euler_number == 0 for c in back.values())
        else:
            assert back == {src.unit: 1}


def test_gysin_codim_zero_is_identity():
    g = P("(1 2)(3 4)", 4)
    lj = locus(KUM, g.orbits)
    push = gysin(lj, lj)
    for k in lj.algebra.basis():
        assert push.apply_key(k) == {k: 1}
    assert all(push.component_map(t) == t for t in lj.components)


def test_conjugation_identity_and_centralizer():
    g = P("(1 2)", 3)
    c = conjugation(Permutation.identity(3), g, HILB)
    assert all(c.apply_key(k) == {k: 1} for k in c.source.algebra.basis())
    ident = P("id", 2)
    swap = conjugation(P("(1 2)", 2), ident, HILB)
    assert swap.apply_key(0b0001) == {0b10000: 1}
    assert swap.apply_key(0b10001) == {0b10001: -1}


@pytest.mark.parametrize("case,n", [(HILB, 3), (KUM, 2), (KUM, 3)])
def test_conjugation_functorial_and_label_preserving(case, n):
    m = case.degree(n)
    group = permutations(m)
    rng = random.Random(2)
    triples = list(itertools.product(group, repeat=3)) if len(group) <= 6 else [tuple(rng.sample(group, 3)) for _ in range(150)]
    for h1, h2, g in triples:
        c1 = conjugation(h1, g, case)
        c2 = conjugation(h2, g.conjugate_by(h1), case)
        c21 = conjugation(h2 * h1, g, case)
        assert all(c1.component_map(t) == t for t in c1.source.components)
        alg = c1.source.algebra
        keys = alg.basis() if len(alg.basis()) <= 64 else rng.sample(alg.basis(), 64)
        for k in keys:
            composed: dict = {}
            for k2, v in c1.apply_key(k).items():
                add_into(composed, c2.apply_key(k2), v)
            assert composed == c21.apply_key(k)


@pytest.mark.parametrize("case,n", [(HILB, 3), (KUM, 3)])
def test_conjugation_natural_for_restriction(case, n):
    m = case.degree(n)
    group = permutations(m)
    rng = random.Random(3)
    for _ in range(60):
        g, h, x = rng.sample(group, 3)
        join = orbit_join(g, h)
        res = restriction(locus(case, g.orbits), join)
        cg = conjugation(x, g, case)
        res2 = restriction(locus(case, g.conjugate_by(x).orbits), orbit_join(g.conjugate_by(x), h.conjugate_by(x)))
        cjoin = _conjugation_on_locus(x, res.target)
        keys = res.source.algebra.basis()
        for k in rng.sample(keys, min(32, len(keys))):
            left: dict = {}
            for k2, v in res.apply_key(k).items():
                add_into(left, cjoin.apply_key(k2), v)
            right: dict = {}
            for k2, v in cg.apply_key(k).items():
                add_into(right, res2.apply_key(k2), v)
            assert left == right
