"""Acceptance criteria, one test each, with their runtime limits.

Run with ``pytest tests/test_acceptance.py -v``; a summary with one pass/fail
line per criterion is printed at the end of the session.
"""

import sys
from functools import lru_cache

import pytest

from orbring.checks import associativity_suite, cocycle_suite, duality_suite, torsion_suite
from orbring.combinatorics import CaseTag, Permutation
from orbring.document import RunConfig, ring_document
from orbring.exact_linalg import ExteriorAlgebraModel, add_into
from orbring.oracles import euler_commuting_pairs, gottsche_series, molien_invariant_poincare
from orbring.ring import OrbifoldRing, restriction_ring_hom_check

HILB = CaseTag.hilb()
KUM = CaseTag.kummer()
SAMPLES = 10_000


def chi(poly):
    return sum((-1) ** i * c for i, c in enumerate(poly))


def test_criterion_01_kummer_k3(criterion):
    with criterion(1, "kummer n=1 gives the K3 Betti numbers and Euler number 24", 1.0) as rec:
        ring = OrbifoldRing(KUM, 1)
        doc = ring_document(ring, RunConfig("kummer", 1, command="build"))
        assert doc.poincare_invariants == [1, 0, 22, 0, 1]
        assert euler_commuting_pairs(KUM, 1) == 24 == chi(doc.poincare_invariants)
        rec.detail = f"invariants {doc.poincare_invariants}"


# -- criterion 2: reference model of A x A and the diagonal ---------------------

A = ExteriorAlgebraModel(4)
A2 = ExteriorAlgebraModel(8)


@lru_cache(maxsize=None)
def diagonal_pullback(key):
    """Restrict a monomial of A x A to the diagonal: e_(i,j) -> e_j."""
    out = {A.unit: 1}
    for bit in range(8):
        if key >> bit & 1:
            out = A.mul(out, {1 << (bit % 4): 1})
    return out


@lru_cache(maxsize=None)
def duals(k):
    return A2.dual_basis(k)


def diagonal_pushforward(vec):
    """Gysin map of the diagonal, determined by integration against every class:
    the coefficient of the dual of ``y`` is the integral of ``vec * y|diagonal``."""
    out: dict = {}
    for d in {A.degree(x) for x in vec}:
        # only classes y of complementary degree on the diagonal integrate nontrivially
        k = A.top_degree - d
        for y in A2.basis(k):
            c = A.integral(A.mul(vec, diagonal_pullback(y)))
            if c:
                add_into(out, duals(k)[y], c)
    return out


def test_criterion_02_product_rules(criterion):
    with criterion(2, "hilb n=2 with dt: cup, restricted cup, minus diagonal pushforward", 1.0) as rec:
        ring = OrbifoldRing(HILB, 2, dt=True)
        e, s = ring.group
        assert s == Permutation.from_cycles("(1 2)", 2)
        untw = [k for _, _, k in ring.sector_basis(e)]
        tw = [k for _, _, k in ring.sector_basis(s)]
        assert len(untw) == 256 and len(tw) == 16
        count = 0
        for a in untw:
            for b in untw:
                assert ring.basis_product((e, (), a), (e, (), b)) == {(e, (), k): c for k, c in A2.mul_basis(a, b).items()}
                count += 1
        for a in untw:
            ra = diagonal_pullback(a)
            for b in tw:
                expected = {(s, (), k): c for k, c in A.mul(ra, {b: 1}).items()}
                assert ring.basis_product((e, (), a), (s, (), b)) == expected
                expected = {(s, (), k): c for k, c in A.mul({b: 1}, ra).items()}
                assert ring.basis_product((s, (), b), (e, (), a)) == expected
                count += 2
        for a in tw:
            for b in tw:
                pushed = diagonal_pushforward(A.mul_basis(a, b))
                assert ring.basis_product((s, (), a), (s, (), b)) == {(e, (), k): -c for k, c in pushed.items()}
                count += 1
        rec.detail = f"{count} basis pairs"


def test_criterion_03_kummer_euler(criterion):
    with criterion(3, "kummer Euler numbers 24, 108, 448", 30.0) as rec:
        got = []
        for n in (1, 2, 3):
            model = chi(OrbifoldRing(KUM, n).poincare_invariants())
            oracle = euler_commuting_pairs(KUM, n)
            m = n + 1
            closed = m**3 * sum(d for d in range(1, m + 1) if m % d == 0)
            assert model == oracle == closed
            got.append(model)
        assert got == [24, 108, 448]
        rec.detail = f"chi {got}"


def test_criterion_04_kummer_b2(criterion):
    with criterion(4, "kummer b2 = 7 at n=2,3 by projector and Molien", 60.0) as rec:
        for n in (2, 3):
            ring = OrbifoldRing(KUM, n)
            projector = len(ring.invariant_basis(2))
            traced = ring.invariant_dims_molien()[2]
            oracle = molien_invariant_poincare(KUM, n)[2]
            assert projector == traced == oracle == 7
        rec.detail = "b2 = 7 for n = 2, 3"


def test_criterion_05_gottsche(criterion):
    with criterion(5, "hilb invariants match the Goettsche series for n=1..4", 300.0) as rec:
        series = gottsche_series(4)
        for n in range(1, 5):
            ring = OrbifoldRing(HILB, n)
            method = "molien" if n == 4 else "projector"
            assert ring.poincare_invariants(method) == list(series[n].coefficients)
        rec.detail = "n = 1..4, all degrees"


def test_criterion_06_associativity(criterion):
    with criterion(6, "associativity exhaustive n<=2, sampled for hilb 3,4 and kummer 3", 600.0) as rec:
        counts = []
        for case, n in [(HILB, 1), (HILB, 2), (KUM, 1), (KUM, 2)]:
            for dt in (False, True):
                res = associativity_suite(OrbifoldRing(case, n, dt))
                assert all(r.status == "pass" for r in res), [r.as_dict() for r in res]
                assert res[0].details["mode"] == "exhaustive"
                counts.append(res[0].details["triples"])
        for case, n in [(HILB, 3), (HILB, 4), (KUM, 3)]:
            for dt in (False, True):
                res = associativity_suite(OrbifoldRing(case, n, dt), samples=SAMPLES, seed=n)
                assert all(r.status == "pass" for r in res), [r.as_dict() for r in res]
                assert res[0].details["triples"] >= SAMPLES
                counts.append(res[0].details["triples"])
        rec.detail = f"{sum(counts)} triples, zero failures"


def test_criterion_07_cocycle(criterion):
    with criterion(7, "discrete torsion cocycle and integrality for n<=4", 10.0) as rec:
        total = 0
        for case in (HILB, KUM):
            for r in cocycle_suite(case, 4):
                assert r.status == "pass" and r.details["integral"], r.as_dict()
                total += r.details["triples"]
        rec.detail = f"{total} triples"


def test_criterion_08_restriction_hom(criterion):
    with criterion(8, "restriction from hilb on n+1 letters to kummer n is multiplicative", 120.0) as rec:
        checked = 0
        for n in (1, 2):
            for dt in (False, True):
                rep = restriction_ring_hom_check(n, dt)
                assert rep["status"] == "pass", rep
                checked += rep["checked"]
        rec.detail = f"{checked} basis pairs (degree-vacuous pairs excluded)"


def test_criterion_09_torsion(criterion):
    with criterion(9, "torsion component counts and labels, all pairs n<=3", 120.0) as rec:
        pairs = 0
        for n in (1, 2, 3):
            (r,) = torsion_suite(n)
            assert r.status == "pass" and r.details["skipped"] == 0, r.as_dict()
            pairs += r.details["pairs"]
        rec.detail = f"{pairs} pairs"


def test_criterion_10_duality_and_grading(criterion):
    with criterion(10, "palindromic invariants, grading and degree additivity", 600.0) as rec:
        names = []
        for case, n in [(HILB, 1), (HILB, 2), (HILB, 3), (HILB, 4), (KUM, 1), (KUM, 2), (KUM, 3)]:
            ring = OrbifoldRing(case, n, dt=True)
            inv = ring.poincare_invariants()
            assert inv == inv[::-1] and len(inv) - 1 == 4 * n
            assert ring.ck_grading() == ring.poincare()
            res = duality_suite(ring, seed=n)
            assert all(r.status == "pass" for r in res), [r.as_dict() for r in res if r.status != "pass"]
            additivity = next(r for r in res if r.name == "degree_additivity")
            assert additivity.details["violations"] == 0
            names.append(f"{case.kind}{n}")
        rec.detail = ", ".join(names)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
