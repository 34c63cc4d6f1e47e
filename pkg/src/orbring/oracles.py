"""Independent computations used to validate the ring engine.

Nothing here touches the algebra models or sector maps; only the
symmetric-group helpers are shared.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .combinatorics import (
    HILB,
    CaseTag,
    Permutation,
    UnionFind,
    age,
    centralizer,
    orbit_join,
    permutations,
)


@dataclass(frozen=True)
class PoincarePolynomial:
    coefficients: tuple[int, ...]
    variable: str = "t"

    def __post_init__(self) -> None:
        c = list(self.coefficients)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if any(x < 0 for x in c):
            raise ValueError(f"negative graded dimension in {c}")
        object.__setattr__(self, "coefficients", tuple(c or [0]))

    def __call__(self, t):
        return sum(c * t**i for i, c in enumerate(self.coefficients))

    def euler_characteristic(self) -> int:
        return self(-1)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_palindromic(self) -> bool:
        return self.coefficients == self.coefficients[::-1]

    def __getitem__(self, k: int) -> int:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coefficients):
            if c:
                mono = "" if i == 0 else (self.variable if i == 1 else f"{self.variable}^{i}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}{mono}"))
        return " + ".join(terms) or "0"


# -- Euler characteristic ---------------------------------------------------


def euler_commuting_pairs(case: CaseTag, n: int) -> int:
    """Orbifold Euler number ``(1/|G|) sum_{gh = hg} chi(M^<g,h>)``.

    Every fixed locus is a product of abelian surfaces (times a finite set in
    the kummer case), so only loci of dimension zero contribute.
    """
    if case.kind == HILB:
        if case.is_abelian:
            return 0
        e = sum((-1) ** i * b for i, b in enumerate(case.betti))
        return _euler_symmetric_product(e, n)
    m = case.degree(n)
    group = permutations(m)
    transitive = sum(1 for g in group for h in centralizer(g, group) if len(orbit_join(g, h)) == 1)
    total = Fraction(m**4 * transitive, math.factorial(m))
    if total.denominator != 1:
        raise ArithmeticError("non-integral orbifold Euler number")
    return int(total)


def _euler_symmetric_product(e: int, n: int) -> int:
    """Orbifold Euler number of ``X^n / S_n`` for a surface of Euler number ``e``:
    the coefficient of ``q^n`` in ``prod_k (1 - q^k)^(-e)``."""
    series = [1] + [0] * n
    for k in range(1, n + 1):
        factor = [0] * (n + 1)
        for m in range(0, n // k + 1):
            factor[k * m] = _binom_neg(e, m)
        series = _truncated_mul(series, factor, n)
    return series[n]


def _binom_neg(e: int, m: int) -> int:
    """Coefficient of ``x^m`` in ``(1 - x)^(-e)`` for any integer ``e``."""
    out = Fraction(1)
    for i in range(m):
        out *= Fraction(e + i, i + 1)
    return int(out)


def sigma(n: int) -> int:
    return sum(d for d in range(1, n + 1) if n % d == 0)


# -- Goettsche ---------------------------------------------------------------


def _truncated_mul(a: Sequence, b: Sequence, n: int) -> list:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def _padd(p: list[int], q: list[int]) -> list[int]:
    out = [0] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return out


def _pmul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def gottsche_series(n_max: int, betti: Sequence[int] = (1, 4, 6, 4, 1)) -> list[PoincarePolynomial]:
    """Poincare polynomials of ``S^[0..n_max]`` from the product
    ``prod_k prod_i (1 - (-1)^i t^(2k-2+i) q^k)^(-(-1)^i b_i)``."""
    if n_max > 6:
        raise ValueError("n_max is limited to 6")
    series: list[list[int]] = [[1]] + [[0] for _ in range(n_max)]
    for k in range(1, n_max + 1):
        for i, b in enumerate(betti):
            if not b:
                continue
            shift = 2 * k - 2 + i
            factor: list[list[int]] = [[0] for _ in range(n_max + 1)]
            for m in range(0, n_max // k + 1):
                if i % 2:
                    # (1 + t^shift q^k)^b
                    coeff = math.comb(b, m)
                else:
                    # (1 - t^shift q^k)^(-b)
                    coeff = math.comb(b + m - 1, m)
                if coeff:
                    factor[k * m] = [0] * (shift * m) + [coeff]
            new = [[0] for _ in range(n_max + 1)]
            for a, pa in enumerate(series):
                for c, pc in enumerate(factor[: n_max + 1 - a]):
                    if any(pc):
                        new[a + c] = _padd(new[a + c], _pmul(pa, pc))
            series = new
    return [PoincarePolynomial(tuple(p)) for p in series]


# -- Molien ------------------------------------------------------------------


def molien_dims(traces: Mapping[object, Sequence], degree: int | None = None):
    """Average of per-element traces.

    ``traces`` maps each group element to its trace in every degree.  With
    ``degree`` given the single average is returned, otherwise the list.
    """
    if not traces:
        raise ValueError("empty group")
    width = max(len(v) for v in traces.values())
    sums = [Fraction(0)] * width
    for v in traces.values():
        for k, x in enumerate(v):
            sums[k] += x
    out = []
    for s in sums:
        avg = s / len(traces)
        if avg.denominator != 1 or avg < 0:
            raise ArithmeticError(f"trace average {avg} is not a nonnegative integer")
        out.append(int(avg))
    if degree is not None:
        return out[degree] if degree < len(out) else 0
    return out


def _cycle_lengths_on_blocks(h: Permutation, blocks) -> list[int]:
    where = {x: i for i, b in enumerate(blocks) for x in b}
    perm = [where[h(b[0])] for b in blocks]
    seen = [False] * len(blocks)
    out = []
    for s in range(len(blocks)):
        if not seen[s]:
            c, x = 0, s
            while not seen[x]:
                seen[x] = True
                x = perm[x]
                c += 1
            out.append(c)
    return out


def _graded_trace_hilb(betti: Sequence[int], cycles: list[int]) -> list[int]:
    """Graded trace of a block permutation on ``H(X)^(tensor l)`` with Koszul signs."""
    out = [1]
    for c in cycles:
        sign = -1 if c % 2 == 0 else 1
        factor = [0] * (c * (len(betti) - 1) + 1)
        for p, b in enumerate(betti):
            factor[c * p] = b * sign**p
        out = _pmul(out, factor)
    return out


def _graded_trace_kummer(d: int, cycles: list[int]) -> list[int]:
    """``d^4 prod_c (1 - (-t)^c)^4 / (1 + t)^4``: translations fix every
    component and the weight subspace is pointwise fixed."""
    num = [1]
    for c in cycles:
        num = _pmul(num, [1] + [0] * (c - 1) + [-((-1) ** c)])
    num = _pmul(num, _pmul(num, _pmul(num, num)))
    for _ in range(4):
        num = _divide_one_plus_t(num)
    return [d**4 * x for x in num]


def _divide_one_plus_t(p: list[int]) -> list[int]:
    q = [0] * (len(p) - 1)
    rem = list(p)
    for i in range(len(p) - 1, 0, -1):
        q[i - 1] = rem[i]
        rem[i - 1] -= rem[i]
        rem[i] = 0
    if rem[0]:
        raise ArithmeticError("not divisible by 1 + t")
    return q


def molien_invariant_poincare(case: CaseTag, n: int) -> PoincarePolynomial:
    """Invariant Poincare polynomial from closed-form sector traces."""
    m = case.degree(n)
    group = permutations(m)
    top = 2 * case.locus_dim(m)
    traces: dict = {}
    for g in group:
        blocks = g.orbits
        a = age(g, case)
        d = math.gcd(*(len(b) for b in blocks))
        for h in centralizer(g, group):
            cycles = _cycle_lengths_on_blocks(h, blocks)
            if case.kind == HILB:
                tr = _graded_trace_hilb(case.betti, cycles)
            else:
                tr = _graded_trace_kummer(d, cycles)
            row = [0] * (top + 1)
            for k, x in enumerate(tr):
                row[k + 2 * a] += x
            traces[(g, h)] = row
    # each commuting pair contributes once; average over the group order
    sums = [sum(r[k] for r in traces.values()) for k in range(top + 1)]
    if any(s % len(group) for s in sums):
        raise ArithmeticError("non-integral Molien average")
    return PoincarePolynomial(tuple(s // len(group) for s in sums))


# -- torsion components ------------------------------------------------------


@dataclass
class _Level:
    """Level-``L`` torsion points of ``{x in (R/Z)^m : x constant on blocks, sum x = 0}``
    grouped by connected component."""

    blocks: tuple
    L: int
    points: list
    component_of: dict
    labels: dict

    @property
    def count(self) -> int:
        return len(set(self.component_of.values()))


def _level_points(blocks, L: int, bound: int) -> _Level:
    sizes = [len(b) for b in blocks]
    pts = [v for v in itertools.product(range(L), repeat=len(blocks)) if sum(s * x for s, x in zip(sizes, v)) % L == 0]
    steps = [
        v
        for v in itertools.product(range(-bound, bound + 1), repeat=len(blocks))
        if any(v) and sum(s * x for s, x in zip(sizes, v)) == 0
    ]
    uf = UnionFind(pts)
    index = set(pts)
    for p in pts:
        for v in steps:
            q = tuple((a + b) % L for a, b in zip(p, v))
            if q in index:
                uf.union(p, q)
    comp = {p: uf.find(p) for p in pts}
    d = math.gcd(*sizes)
    labels = {}
    for p in pts:
        # f(x) = sum (|B|/d) x_B lies in (1/d)Z/Z; record it as an integer mod d
        f = sum((s // d) * x for s, x in zip(sizes, p)) % L
        if (f * d) % L:
            raise AssertionError("weighted sum is not d-torsion")
        labels[p] = f * d // L
    return _Level(tuple(blocks), L, pts, comp, labels)


def _expand(point, blocks, m: int) -> tuple:
    out = [0] * m
    for x, b in zip(point, blocks):
        for i in b:
            out[i] = x
    return tuple(out)


def torsion_bruteforce(n: int, g: Permutation, h: Permutation, cap: int = 12) -> dict:
    """Enumerate torsion points of the kummer fixed loci of ``g``, ``h``, ``gh``
    and ``<g, h>`` in one real coordinate of ``A``.

    Reports, per locus, the number of connected components and whether the
    weighted-sum label is a complete invariant of components, and, for each
    inclusion of the join locus, the induced map on labels.  Components in
    ``A`` itself are fourth powers of these one-coordinate counts.
    """
    if n > 3:
        raise ValueError("torsion enumeration is limited to n <= 3")
    m = n + 1
    if g.n != m or h.n != m:
        raise ValueError(f"permutations must have degree {m}")
    loci = {"g": g.orbits, "h": h.orbits, "gh": (g * h).orbits, "join": orbit_join(g, h)}
    ds = {k: math.gcd(*(len(b) for b in v)) for k, v in loci.items()}
    L = math.lcm(*ds.values())
    report = {"n": n, "g": str(g), "h": str(h), "level": L, "d": ds, "skipped": False}
    if L > cap:
        report.update(skipped=True, reason=f"level {L} exceeds cap {cap}")
        return report
    levels = {k: _level_points(v, L, bound=m) for k, v in loci.items()}
    report["components"] = {k: lv.count for k, lv in levels.items()}
    report["components_4d"] = {k: lv.count**4 for k, lv in levels.items()}
    consistent = {}
    for k, lv in levels.items():
        by_comp: dict = {}
        for p in lv.points:
            by_comp.setdefault(lv.component_of[p], set()).add(lv.labels[p])
        consistent[k] = all(len(s) == 1 for s in by_comp.values()) and len(
            {next(iter(s)) for s in by_comp.values()}
        ) == len(by_comp)
    report["labels_separate_components"] = consistent
    join = levels["join"]
    maps = {}
    for k in ("g", "h", "gh"):
        target = levels[k]
        lookup = {_expand(p, target.blocks, m): target.labels[p] for p in target.points}
        table: dict = {}
        for p in join.points:
            table.setdefault(join.labels[p], set()).add(lookup[_expand(p, join.blocks, m)])
        if any(len(v) != 1 for v in table.values()):
            raise AssertionError("inclusion does not respect components")
        maps[k] = {s: next(iter(v)) for s, v in sorted(table.items())}
    report["label_maps"] = maps
    report["rule_holds"] = all(
        all(t == s % ds[k] for s, t in maps[k].items()) for k in ("g", "h", "gh")
    )
    return report
