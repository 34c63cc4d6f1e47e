"""Named property suites run against a ring and the independent oracles.

Each check yields a :class:`CheckResult` whose ``details`` carry the counts
and, on failure, a counterexample.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .combinatorics import HILB, KUMMER, CaseTag, orbit_join, permutations
from .oracles import (
    euler_commuting_pairs,
    gottsche_series,
    molien_invariant_poincare,
    sigma,
    torsion_bruteforce,
)
from .ring import OrbifoldRing, restriction_ring_hom_check
from .sectors import gysin, restriction

SUITES = ("associativity", "cocycle", "euler", "gottsche", "molien", "torsion", "duality", "restriction")

EXHAUSTIVE_MAX_N = 2
_INT_LIMIT = 2**62


@dataclass
class CheckResult:
    name: str
    status: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skip")

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "details": self.details}


def _result(name: str, ok: bool, **details) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", details)


# -- structure-constant tables ------------------------------------------------


@dataclass
class StructureTable:
    """All products of basis pairs as an integer sparse matrix.

    Row ``i * N + j`` holds ``denominator * (e_i * e_j)`` in the basis.
    """

    keys: list
    index: dict
    matrix: sp.csr_matrix
    denominator: int
    degree_violations: int
    first_violation: tuple | None

    @property
    def size(self) -> int:
        return len(self.keys)


def structure_table(ring: OrbifoldRing) -> StructureTable:
    keys = list(ring.iter_basis())
    index = {k: i for i, k in enumerate(keys)}
    degree = [ring.total_degree(k) for k in keys]
    N = len(keys)
    rows, cols, vals = [], [], []
    violations, first = 0, None
    for i, a in enumerate(keys):
        for j, b in enumerate(keys):
            for k, c in ring.basis_product(a, b).items():
                m = index[k]
                if degree[m] != degree[i] + degree[j]:
                    violations += 1
                    first = first or (ring.label(a), ring.label(b), ring.label(k))
                rows.append(i * N + j)
                cols.append(m)
                vals.append(c)
    den = math.lcm(1, *{Fraction(v).denominator for v in vals})
    ints = [int(Fraction(v) * den) for v in vals]
    if ints and max(abs(v) for v in ints) ** 2 * N >= _INT_LIMIT:
        raise OverflowError("structure constants too large for int64 checks")
    mat = sp.csr_matrix((np.array(ints, dtype=np.int64), (rows, cols)), shape=(N * N, N), dtype=np.int64)
    return StructureTable(keys, index, mat, den, violations, first)


def _associativity_exhaustive(ring: OrbifoldRing, table: StructureTable) -> CheckResult:
    N = table.size
    S = table.matrix
    S2 = S.reshape((N, N * N)).tocsr()
    for a in range(N):
        A = S[a * N : (a + 1) * N, :]
        left = A @ S2
        right = (S @ A).reshape((N, N * N))
        diff = (left - right).tocsr()
        diff.eliminate_zeros()
        if diff.nnz:
            r, c = diff.nonzero()
            b, cc = int(r[0]), int(c[0]) // N
            return _result(
                "associativity",
                False,
                mode="exhaustive",
                dt=ring.dt,
                counterexample=[ring.label(table.keys[x]) for x in (a, b, cc)],
            )
    return _result("associativity", True, mode="exhaustive", dt=ring.dt, triples=N**3)


def _associativity_sampled(ring: OrbifoldRing, samples: int, seed: int) -> CheckResult:
    """``samples`` uniform triples (conditioned on total degree at most the
    top degree) plus as many low-degree triples from random sectors."""
    rng = random.Random(seed)
    triples = ring.sample_triples(rng, samples) + ring.sample_low_degree(rng, samples)
    nonzero = 0
    for a, b, c in triples:
        x, y, z = (ring.basis_element(k) for k in (a, b, c))
        left = (x * y) * z
        right = x * (y * z)
        if left != right:
            return _result(
                "associativity",
                False,
                mode="sampled",
                seed=seed,
                dt=ring.dt,
                counterexample=[ring.label(k) for k in (a, b, c)],
            )
        nonzero += bool(left)
    return _result("associativity", True, mode="sampled", seed=seed, dt=ring.dt, triples=len(triples), nonzero=nonzero)


def _action_matrix(ring: OrbifoldRing, h, table: StructureTable) -> tuple[sp.csr_matrix, int]:
    rows, cols, vals = [], [], []
    for j, key in enumerate(table.keys):
        for k, c in ring.act(h, ring.basis_element(key)).terms.items():
            rows.append(table.index[k])
            cols.append(j)
            vals.append(Fraction(c))
    den = math.lcm(1, *{v.denominator for v in vals})
    data = np.array([int(v * den) for v in vals], dtype=np.int64)
    N = table.size
    return sp.csr_matrix((data, (rows, cols)), shape=(N, N), dtype=np.int64), den


def _invariance_exhaustive(ring: OrbifoldRing, table: StructureTable) -> CheckResult:
    S = table.matrix
    for h in ring.group:
        H, den = _action_matrix(ring, h, table)
        if abs(H).max() ** 2 * abs(S).max() * table.size**2 >= _INT_LIMIT:
            raise OverflowError("action matrices too large for int64 checks")
        left = (S @ H.T) * den
        right = sp.kron(H, H, format="csr").T @ S
        diff = (left - right).tocsr()
        diff.eliminate_zeros()
        if diff.nnz:
            r, _ = diff.nonzero()
            a, b = divmod(int(r[0]), table.size)
            return _result(
                "g_invariance",
                False,
                mode="exhaustive",
                h=str(h),
                counterexample=[ring.label(table.keys[a]), ring.label(table.keys[b])],
            )
    return _result("g_invariance", True, mode="exhaustive", elements=len(ring.group), pairs=table.size**2)


def _invariance_sampled(ring: OrbifoldRing, samples: int, seed: int) -> CheckResult:
    rng = random.Random(seed)
    for a, b, _ in ring.sample_low_degree(rng, samples):
        h = rng.choice(ring.group)
        x, y = ring.basis_element(a), ring.basis_element(b)
        if ring.act(h, x * y) != ring.act(h, x) * ring.act(h, y):
            return _result("g_invariance", False, mode="sampled", seed=seed, h=str(h), counterexample=[ring.label(a), ring.label(b)])
    return _result("g_invariance", True, mode="sampled", seed=seed, pairs=samples)


def associativity_suite(ring: OrbifoldRing, samples: int = 10_000, seed: int = 0) -> list[CheckResult]:
    t0 = time.perf_counter()
    if ring.n <= EXHAUSTIVE_MAX_N:
        table = structure_table(ring)
        out = [
            _associativity_exhaustive(ring, table),
            _invariance_exhaustive(ring, table),
            _result(
                "degree_additivity",
                table.degree_violations == 0,
                mode="exhaustive",
                violations=table.degree_violations,
                counterexample=table.first_violation,
            ),
        ]
    else:
        out = [_associativity_sampled(ring, samples, seed), _invariance_sampled(ring, max(1, samples // 10), seed)]
    out[0].details["seconds"] = round(time.perf_counter() - t0, 2)
    return out


# -- discrete torsion ---------------------------------------------------------


def cocycle_suite(case: CaseTag, n_max: int) -> list[CheckResult]:
    """Cocycle identity and integrality of epsilon over all triples of every
    acting group up to ``n_max``."""
    out = []
    for n in range(1, n_max + 1):
        m = case.degree(n)
        group = permutations(m)
        pos = {g: i for i, g in enumerate(group)}
        mult = np.array([[pos[g * h] for h in group] for g in group], dtype=np.int64)
        ages = np.array([m - len(g.orbits) for g in group], dtype=np.int64)
        twice = ages[:, None] + ages[None, :] - ages[mult]
        integral = not np.any(twice % 2)
        eps = twice // 2
        # eps[mult] is eps(g1 g2, g3) and eps[:, mult] is eps(g1, g2 g3)
        lhs = eps[:, :, None] + eps[mult]
        rhs = eps[:, mult] + eps[None, :, :]
        bad = np.argwhere(lhs != rhs)
        details = {"n": n, "triples": len(group) ** 3, "integral": bool(integral)}
        if len(bad):
            i, j, k = bad[0]
            details["counterexample"] = [str(group[i]), str(group[j]), str(group[k])]
        out.append(_result(f"cocycle[n={n}]", integral and not len(bad), **details))
    return out


# -- numerical oracles --------------------------------------------------------


def euler_suite(ring: OrbifoldRing) -> list[CheckResult]:
    inv = ring.poincare_invariants()
    chi = sum((-1) ** i * c for i, c in enumerate(inv))
    oracle = euler_commuting_pairs(ring.case, ring.n)
    details = {"model": chi, "oracle": oracle}
    ok = chi == oracle
    if ring.case.kind == KUMMER:
        closed = (ring.n + 1) ** 3 * sigma(ring.n + 1)
        details["closed_form"] = closed
        ok = ok and closed == oracle
    return [_result("euler", ok, **details)]


def gottsche_suite(ring: OrbifoldRing) -> list[CheckResult]:
    if ring.case.kind != HILB:
        return [CheckResult("gottsche", "skip", {"reason": "only defined for the hilb case"})]
    expected = list(gottsche_series(ring.n, ring.case.betti)[ring.n].coefficients)
    got = ring.poincare_invariants()
    return [_result("gottsche", got == expected, model=got, oracle=expected)]


def molien_suite(ring: OrbifoldRing, projector_limit: int = 4096) -> list[CheckResult]:
    oracle = list(molien_invariant_poincare(ring.case, ring.n).coefficients)
    traced = ring.invariant_dims_molien()
    details = {"oracle": oracle, "engine_traces": traced}
    ok = traced == oracle
    if ring.dim <= projector_limit:
        projector = ring.invariant_dims_projector()
        details["projector"] = projector
        ok = ok and projector == oracle
    else:
        details["projector"] = "skipped above dimension limit"
    return [_result("molien", ok, **details)]


def torsion_suite(n: int) -> list[CheckResult]:
    """Compare component counts and label maps of the engine with brute force."""
    if n > 3:
        return [CheckResult("torsion", "skip", {"reason": "enumeration limited to n <= 3"})]
    case = CaseTag.kummer()
    ring = OrbifoldRing(case, n)
    cache: dict = {}
    checked = skipped = 0
    for g in ring.group:
        for h in ring.group:
            gh = g * h
            lg, lh, lgh = (ring.sectors[x].locus for x in (g, h, gh))
            res_g = restriction(lg, orbit_join(g, h))
            lj = res_g.target
            sig = (lg.blocks, lh.blocks, lgh.blocks, lj.blocks)
            if sig not in cache:
                cache[sig] = torsion_bruteforce(n, g, h)
            rep = cache[sig]
            if rep["skipped"]:
                skipped += 1
                continue
            counts = {"g": len(lg.components), "h": len(lh.components), "gh": len(lgh.components), "join": len(lj.components)}
            engine_maps = {
                "g": res_g.component_map,
                "h": restriction(lh, lj.blocks).component_map,
                "gh": gysin(lj, lgh).component_map,
            }
            ok = counts == rep["components_4d"] and all(rep["labels_separate_components"].values()) and rep["rule_holds"]
            for k, fmap in engine_maps.items():
                table = rep["label_maps"][k]
                for t in lj.components:
                    if fmap(t) != tuple(table[x] for x in t):
                        ok = False
                        break
            checked += 1
            if not ok:
                return [_result("torsion", False, n=n, g=str(g), h=str(h), engine=counts, oracle=rep)]
    return [_result("torsion", True, n=n, pairs=checked, skipped=skipped)]


# -- duality and grading ------------------------------------------------------


def duality_suite(ring: OrbifoldRing, seed: int = 0, samples: int = 2000) -> list[CheckResult]:
    out = []
    inv = ring.poincare_invariants()
    top = 4 * ring.n
    out.append(
        _result(
            "palindromic",
            inv == inv[::-1] and len(inv) - 1 == top and inv[-1] != 0,
            invariants=inv,
            top_degree=top,
        )
    )
    out.append(_result("ck_grading", ring.ck_grading() == ring.poincare(), ck=ring.ck_grading(), poincare=ring.poincare()))

    rng = random.Random(seed)
    unit = ring.unit()
    violations, bad_unit = 0, None
    for a, b, _ in ring.sample_triples(rng, samples):
        x, y = ring.basis_element(a), ring.basis_element(b)
        if unit * x != x or x * unit != x:
            bad_unit = ring.label(a)
        want = ring.total_degree(a) + ring.total_degree(b)
        violations += sum(1 for k in (x * y).terms if ring.total_degree(k) != want)
    out.append(_result("unit", bad_unit is None, samples=samples, counterexample=bad_unit))
    out.append(_result("degree_additivity", violations == 0, mode="sampled", samples=samples, violations=violations))

    trivial_obstruction = ring.case.kind == KUMMER or ring.case.euler_number == 0
    table = ring.k_selection_rule() if trivial_obstruction and len(ring.group) <= 24 else None
    if table is not None:
        symmetric = all(table[(g, h)] == table[(h, g)] for g, h in table)
        out.append(_result("selection_rule", symmetric, pairs=len(table)))

    if ring.n <= 2:
        out.append(_invariant_commutativity(ring))
    return out


def _invariant_commutativity(ring: OrbifoldRing) -> CheckResult:
    sub = ring.invariant_subring()
    pairs = 0
    for p, bp in sub.bases.items():
        for q, bq in sub.bases.items():
            if p > q or p + q > ring.top_degree:
                continue
            sign = -1 if (p * q) % 2 else 1
            for x in bp:
                for y in bq:
                    pairs += 1
                    if ring.star(x, y) != sign * ring.star(y, x):
                        return _result("invariant_commutativity", False, degrees=[p, q])
    return _result("invariant_commutativity", True, pairs=pairs)


def restriction_suite(n: int, dt: bool = False) -> list[CheckResult]:
    """Restriction from the hilb ring on ``n + 1`` letters to the kummer ring."""
    rep = restriction_ring_hom_check(n, dt)
    return [_result("restriction", rep["status"] == "pass", **rep)]


# -- dispatch -----------------------------------------------------------------


def run_suite(
    suite: str,
    case: CaseTag,
    n: int,
    dt: bool = False,
    seed: int = 0,
    samples: int = 10_000,
    ring: OrbifoldRing | None = None,
) -> list[CheckResult]:
    if suite != "all" and suite not in SUITES:
        raise KeyError(suite)
    names = SUITES if suite == "all" else (suite,)
    out: list[CheckResult] = []
    for name in names:
        if name == "cocycle":
            out += cocycle_suite(case, n)
            continue
        if name == "torsion":
            out += torsion_suite(n) if case.kind == KUMMER else [CheckResult("torsion", "skip", {"reason": "kummer only"})]
            continue
        if name == "restriction":
            out += restriction_suite(n, dt) if case.kind == KUMMER else [CheckResult("restriction", "skip", {"reason": "kummer only"})]
            continue
        ring = ring or OrbifoldRing(case, n, dt)
        if name == "associativity":
            out += associativity_suite(ring, samples, seed)
        elif name == "euler":
            out += euler_suite(ring)
        elif name == "gottsche":
            out += gottsche_suite(ring)
        elif name == "molien":
            out += molien_suite(ring)
        elif name == "duality":
            out += duality_suite(ring, seed)
    return out
