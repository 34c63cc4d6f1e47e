"""The orbifold cohomology ring ``H(M, G) = (+)_g H^(*-2 age g)(M^g)`` with the
Chen-Ruan product, optionally twisted by discrete torsion.

For abelian surfaces (and in the kummer case) obstruction bundles are
trivial, so the product of a class in sector ``g`` with a class in sector
``h`` is zero when the virtual rank ``age g + age h - age gh - codim`` is
positive, and otherwise equals the pushforward into ``M^gh`` of the product
of both restrictions to ``M^<g,h>``.  With discrete torsion it is further
multiplied by ``(-1)^epsilon(g, h)``.

A base surface with nonzero Euler number ``chi`` contributes the Euler class
of the obstruction bundle instead: ``chi`` times the point class on each
orbit of ``<g, h>`` whose branched cover has genus one, and zero as soon as
some cover has higher genus.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .combinatorics import (
    CaseTag,
    Permutation,
    age,
    centralizer,
    epsilon,
    orbit_join,
    permutations,
)
from .exact_linalg import (
    EchelonBasis,
    ExteriorAlgebraModel,
    Vector,
    _clean,
    add_into,
    invariant_basis,
    scale_vector,
)
from .sectors import (
    SectorModel,
    build_sector,
    case_restriction,
    conjugation,
    gysin,
    locus,
    restriction,
)

BasisKey = tuple  # (g, component, algebra key)


class ResourceBoundError(RuntimeError):
    pass


class OrbifoldElement:
    """Sparse element of ``H(M, G)``: ``(g, component, key) -> coefficient``."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: OrbifoldRing, terms: dict | None = None) -> None:
        self.ring = ring
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __add__(self, other: OrbifoldElement) -> OrbifoldElement:
        self._check(other)
        return OrbifoldElement(self.ring, add_into(dict(self.terms), other.terms))

    def __sub__(self, other: OrbifoldElement) -> OrbifoldElement:
        self._check(other)
        return OrbifoldElement(self.ring, add_into(dict(self.terms), other.terms, -1))

    def __neg__(self) -> OrbifoldElement:
        return OrbifoldElement(self.ring, scale_vector(self.terms, -1))

    def __rmul__(self, c) -> OrbifoldElement:
        return OrbifoldElement(self.ring, scale_vector(self.terms, c))

    def __mul__(self, other: OrbifoldElement) -> OrbifoldElement:
        return self.ring.star(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, OrbifoldElement) and self.ring is other.ring and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: OrbifoldElement) -> None:
        if other.ring is not self.ring:
            raise ValueError("elements belong to different rings")

    def degrees(self) -> set[int]:
        return {self.ring.total_degree(k) for k in self.terms}

    def __repr__(self) -> str:
        return self.ring.format(self)


@dataclass
class _PairData:
    rank: int
    sign: int
    target: Permutation
    res_g: object = None
    res_h: object = None
    push: object = None
    join_algebra: object = None
    comp_table: dict | None = None
    euler: Vector | None = None
    active: bool = False


class OrbifoldRing:
    def __init__(
        self,
        case: CaseTag,
        n: int,
        dt: bool = False,
        max_dim: int | None = None,
        max_group_pairs: int | None = None,
    ) -> None:
        if n < 1:
            raise ValueError("n must be positive")
        self.case, self.n, self.dt = case, n, dt
        self.degree_letters = case.degree(n)
        order = math.factorial(self.degree_letters)
        if max_group_pairs is not None and order**2 > max_group_pairs:
            raise ResourceBoundError(f"|G|^2 = {order ** 2} exceeds bound {max_group_pairs}")
        self.group = permutations(self.degree_letters)
        self.identity = self.group[0]
        self.sectors: dict[Permutation, SectorModel] = {g: build_sector(case, n, g) for g in self.group}
        self.top_degree = 2 * case.locus_dim(self.degree_letters)
        if max_dim is not None and self.dim > max_dim:
            raise ResourceBoundError(f"total dimension {self.dim} exceeds bound {max_dim}")
        self._pairs: dict = {}
        self._products: dict = {}
        self._classes = None
        self._by_degree = None

    # -- bookkeeping -----------------------------------------------------

    @property
    def dim(self) -> int:
        return sum(sum(s.poincare()) for s in self.sectors.values())

    def total_degree(self, key: BasisKey) -> int:
        g, _, k = key
        s = self.sectors[g]
        return s.algebra.degree(k) + 2 * s.age

    def sector_basis(self, g: Permutation, degree: int | None = None) -> list[BasisKey]:
        s = self.sectors[g]
        if degree is not None:
            degree -= 2 * s.age
            if degree < 0:
                return []
        return [(g, t, k) for t, k in s.locus.basis(degree)]

    def basis(self, degree: int | None = None) -> list[BasisKey]:
        return [b for g in self.group for b in self.sector_basis(g, degree)]

    def iter_basis(self) -> Iterator[BasisKey]:
        for g in self.group:
            yield from self.sector_basis(g)

    def element(self, terms: dict) -> OrbifoldElement:
        return OrbifoldElement(self, terms)

    def basis_element(self, key: BasisKey, coeff=1) -> OrbifoldElement:
        return OrbifoldElement(self, {key: coeff})

    def fundamental_class(self, g: Permutation) -> OrbifoldElement:
        s = self.sectors[g]
        return OrbifoldElement(self, {(g, t, s.algebra.unit): 1 for t in s.components})

    def unit(self) -> OrbifoldElement:
        return self.fundamental_class(self.identity)

    def label(self, key: BasisKey) -> str:
        g, t, k = key
        comp = "" if t == () else "@" + ".".join(map(str, t))
        return f"[{g}{comp}]{self.sectors[g].algebra.label(k)}"

    def format(self, x: OrbifoldElement) -> str:
        if not x.terms:
            return "0"
        order = {g: i for i, g in enumerate(self.group)}
        keys = sorted(x.terms, key=lambda k: (order[k[0]], k[1], self.total_degree(k), _sort_key(k[2])))
        return " + ".join(f"{x.terms[k]}*{self.label(k)}" for k in keys)

    def poincare(self) -> list[int]:
        out = [0] * (self.top_degree + 1)
        for s in self.sectors.values():
            for i, b in enumerate(s.poincare()):
                out[i + 2 * s.age] += b
        return out

    def ck_grading(self) -> list[int]:
        """``dim h^i = sum_g b_(i - 2 age g)(M^g)``, tabulated sector by sector."""
        out = [0] * (self.top_degree + 1)
        for g in self.group:
            s = self.sectors[g]
            betti = s.betti()
            for i in range(len(out)):
                j = i - 2 * s.age
                if 0 <= j < len(betti):
                    out[i] += betti[j]
        return out

    # -- product ---------------------------------------------------------

    def obstruction_rank(self, g: Permutation, h: Permutation) -> int:
        join = orbit_join(g, h)
        codim = self.case.locus_dim(len((g * h).orbits)) - self.case.locus_dim(len(join))
        rank = age(g, self.case) + age(h, self.case) - age(g * h, self.case) - codim
        if rank < 0:
            raise AssertionError(f"negative obstruction rank for {g}, {h}")
        return rank

    def obstruction_euler_class(self, g: Permutation, h: Permutation) -> Vector | None:
        """Top Chern class of ``F_(g,h)`` on ``M^<g,h>`` when the rank is positive.

        ``F`` splits over the orbits ``B`` of ``<g, h>`` as ``g_B`` copies of
        the tangent bundle of the ``B``-th factor, where ``2 g_B`` is the
        rank defect of ``B``.  Its top Chern class is
        ``prod_B (chi(X) pt_B)^(g_B)``, which vanishes for abelian surfaces
        and, since ``pt^2 = 0``, whenever some ``g_B > 1``.  ``None`` means zero.
        """
        chi = self.case.euler_number
        if self.case.kind != "hilb" or chi == 0:
            return None
        blocks = orbit_join(g, h)
        genus = []
        for b in blocks:
            inside = set(b)
            count = [sum(1 for o in x.orbits if o[0] in inside) for x in (g, h, g * h)]
            twice = len(b) + 2 - sum(count)
            if twice % 2 or twice < 0:
                raise AssertionError(f"odd rank defect on orbit {b}")
            genus.append(twice // 2)
        if max(genus) > 1:
            return None
        alg = self.sectors[g].locus.algebra  # only its factor model is used
        factor = alg.factors[0]
        pt = factor.basis(factor.top_degree)[0]
        key = tuple(pt if gb else factor.unit for gb in genus)
        return {key: chi ** sum(genus)}

    def epsilon(self, g: Permutation, h: Permutation) -> int:
        return epsilon(g, h, self.case)

    def pair_data(self, g: Permutation, h: Permutation) -> _PairData:
        key = (g, h)
        hit = self._pairs.get(key)
        if hit is not None:
            return hit
        gh = g * h
        rank = self.obstruction_rank(g, h)
        sign = -1 if self.dt and self.epsilon(g, h) % 2 else 1
        data = _PairData(rank, sign, gh)
        join = orbit_join(g, h)
        euler = None
        if rank:
            euler = self.obstruction_euler_class(g, h)
        if rank == 0 or euler:
            data.active = True
            data.euler = euler
            lg, lh, lgh = (self.sectors[x].locus for x in (g, h, gh))
            data.res_g = restriction(lg, join)
            data.res_h = restriction(lh, join)
            lj = data.res_g.target
            data.push = gysin(lj, lgh)
            data.join_algebra = lj.algebra
            table: dict = {}
            for tj in lj.components:
                k2 = (data.res_g.component_map(tj), data.res_h.component_map(tj))
                table.setdefault(k2, Counter())[data.push.component_map(tj)] += 1
            data.comp_table = table
        self._pairs[key] = data
        return data

    def _key_product(self, g, h, ka, kb, data: _PairData) -> Vector:
        ck = (g, h, ka, kb)
        hit = self._products.get(ck)
        if hit is None:
            x = data.res_g.apply_key(ka)
            y = data.res_h.apply_key(kb)
            p = data.join_algebra.mul(x, y) if x and y else {}
            if p and data.euler is not None:
                p = data.join_algebra.mul(p, data.euler)
            hit = {}
            for k, c in p.items():
                add_into(hit, data.push.apply_key(k), c)
            self._products[ck] = hit
        return hit

    def basis_product(self, a: BasisKey, b: BasisKey) -> dict:
        """Structure constants of ``a * b`` as a sparse vector."""
        g, ta, ka = a
        h, tb, kb = b
        data = self.pair_data(g, h)
        if not data.active:
            return {}
        counts = data.comp_table.get((ta, tb))
        if not counts:
            return {}
        z = self._key_product(g, h, ka, kb, data)
        if not z:
            return {}
        out = {}
        gh = data.target
        for s, mult in counts.items():
            f = data.sign * mult
            for k, c in z.items():
                out[(gh, s, k)] = _clean(f * c)
        return out

    def star(self, a: OrbifoldElement, b: OrbifoldElement) -> OrbifoldElement:
        if a.ring is not self or b.ring is not self:
            raise ValueError("ring mismatch")
        out: dict = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                add_into(out, self.basis_product(ka, kb), ca * cb)
        return OrbifoldElement(self, out)

    def product_reason(self, g: Permutation, h: Permutation) -> str:
        data = self.pair_data(g, h)
        if not data.active:
            return f"obstruction rank {data.rank}"
        if data.rank:
            return f"epsilon {self.epsilon(g, h)}, Euler class of rank {data.rank}"
        return f"epsilon {self.epsilon(g, h)}"

    # -- group action ----------------------------------------------------

    def act(self, h: Permutation, x: OrbifoldElement) -> OrbifoldElement:
        """Image of ``x`` under ``h``: sector ``g`` goes to ``h g h^-1``."""
        out: dict = {}
        for (g, t, k), c in x.terms.items():
            cmap = conjugation(h, g, self.case)
            g2 = g.conjugate_by(h)
            add_into(out, {(g2, t, k2): v for k2, v in cmap.apply_key(k).items()}, c)
        return OrbifoldElement(self, out)

    def conjugacy_classes(self) -> list[tuple[Permutation, list[Permutation]]]:
        """``(representative, members)`` with the lexicographically first member as representative."""
        if self._classes is None:
            seen: set = set()
            out = []
            for g in self.group:
                if g in seen:
                    continue
                members = sorted({g.conjugate_by(h) for h in self.group})
                seen.update(members)
                out.append((members[0], members))
            self._classes = out
        return self._classes

    def centralizer_action(self, g: Permutation, degree: int) -> tuple[list, list[dict]]:
        """Basis of ``H^degree(M^g)`` (intrinsic degree) and the matrices of the centralizer."""
        s = self.sectors[g]
        basis = s.locus.basis(degree)
        mats = []
        for h in centralizer(g, self.group):
            cmap = conjugation(h, g, self.case)
            mats.append({(t, k): {(t, k2): v for k2, v in cmap.apply_key(k).items()} for t, k in basis})
        return basis, mats

    def invariant_basis(self, degree: int) -> list[OrbifoldElement]:
        """Basis of the image of the averaging projector in one total degree."""
        out = []
        for rep, members in self.conjugacy_classes():
            s = self.sectors[rep]
            d = degree - 2 * s.age
            if d < 0 or d > s.algebra.top_degree:
                continue
            basis, mats = self.centralizer_action(rep, d)
            if not basis:
                continue
            movers = {}
            for h in self.group:
                movers.setdefault(rep.conjugate_by(h), h)
            for v in invariant_basis(mats, basis):
                x = OrbifoldElement(self, {(rep, t, k): c for (t, k), c in v.items()})
                total = OrbifoldElement(self, {})
                for g2 in members:
                    total = total + self.act(movers[g2], x)
                out.append(total)
        return out

    def invariant_dims_projector(self) -> list[int]:
        return [len(self.invariant_basis(k)) for k in range(self.top_degree + 1)]

    def invariant_dims_molien(self) -> list[int]:
        """Invariant dimensions from traces of the engine's conjugation maps."""
        out = [Fraction(0)] * (self.top_degree + 1)
        for g in self.group:
            s = self.sectors[g]
            for h in centralizer(g, self.group):
                for i, tr in enumerate(self.sector_traces(g, h)):
                    out[i + 2 * s.age] += tr
        order = len(self.group)
        dims = [x / order for x in out]
        if any(x.denominator != 1 for x in dims):
            raise ArithmeticError(f"non-integral Molien average {dims}")
        return [int(x) for x in dims]

    def sector_traces(self, g: Permutation, h: Permutation) -> list:
        """Trace of ``h`` (in the centralizer of ``g``) on each degree of ``H(M^g)``."""
        s = self.sectors[g]
        cmap = conjugation(h, g, self.case)
        fixed = sum(1 for t in s.components if cmap.component_map(t) == t)
        alg = s.algebra
        if isinstance(alg, ExteriorAlgebraModel):
            m = alg.m
            mat = [[cmap.hom.images[c].get(1 << r, 0) for c in range(m)] for r in range(m)]
            return [fixed * e for e in _elementary_from_matrix(mat)]
        return [fixed * sum(cmap.apply_key(k).get(k, 0) for k in alg.basis(d)) for d in range(alg.top_degree + 1)]

    def poincare_invariants(self, method: str = "auto") -> list[int]:
        if method == "molien":
            return self.invariant_dims_molien()
        if method == "projector":
            return self.invariant_dims_projector()
        if method != "auto":
            raise ValueError(f"unknown method {method!r}")
        if max(max(s.algebra.poincare()) for s in self.sectors.values()) <= 256:
            return self.invariant_dims_projector()
        return self.invariant_dims_molien()

    def invariant_subring(self, degrees: Iterable[int] | None = None):
        return InvariantSubring(self, degrees)

    # -- selection rules and diagnostics --------------------------------

    def k_selection_rule(self) -> dict:
        """``(g, h) -> allowed`` from the K-theoretic Euler class of the trivial
        obstruction bundle, checked against the vanishing of ``1_g * 1_h``.

        Only meaningful when the obstruction bundle is trivial, i.e. for the
        kummer case and for bases with vanishing Euler number.
        """
        if self.case.kind == "hilb" and self.case.euler_number:
            raise ValueError("selection rule needs a base with Euler number 0")
        table = {}
        for g in self.group:
            for h in self.group:
                allowed = self.obstruction_rank(g, h) == 0
                nonzero = bool(self.star(self.fundamental_class(g), self.fundamental_class(h)))
                if allowed != nonzero:
                    raise AssertionError(f"selection rules disagree at ({g}, {h})")
                table[(g, h)] = allowed
        return table

    def basis_by_degree(self) -> list[list[BasisKey]]:
        if self._by_degree is None:
            out: list[list[BasisKey]] = [[] for _ in range(self.top_degree + 1)]
            for key in self.iter_basis():
                out[self.total_degree(key)].append(key)
            self._by_degree = out
        return self._by_degree

    def sample_triples(self, rng: random.Random, count: int, max_total: int | None = None) -> list[tuple]:
        """Uniform basis triples conditioned on total degree at most ``max_total``
        (the top degree by default; above it every product vanishes)."""
        top = self.top_degree if max_total is None else max_total
        by_degree = self.basis_by_degree()
        sizes = [len(b) for b in by_degree]
        shapes = [
            (p, q, r)
            for p in range(len(sizes))
            for q in range(len(sizes))
            for r in range(len(sizes))
            if p + q + r <= top and sizes[p] and sizes[q] and sizes[r]
        ]
        weights = [sizes[p] * sizes[q] * sizes[r] for p, q, r in shapes]
        out = []
        for p, q, r in rng.choices(shapes, weights, k=count):
            out.append(tuple(by_degree[x][rng.randrange(sizes[x])] for x in (p, q, r)))
        return out

    def sample_low_degree(self, rng: random.Random, count: int, max_intrinsic: int = 2) -> list[tuple]:
        """Triples from uniformly random sectors carrying classes of small
        intrinsic degree, where nonzero products are common."""
        out = []
        for _ in range(count):
            triple = []
            for _ in range(3):
                g = rng.choice(self.group)
                s = self.sectors[g]
                degrees = [d for d in range(min(max_intrinsic, s.algebra.top_degree) + 1) if s.algebra.basis(d)]
                keys = s.algebra.basis(rng.choice(degrees))
                triple.append((g, rng.choice(s.components), keys[rng.randrange(len(keys))]))
            out.append(tuple(triple))
        return out


class InvariantSubring:
    """The G-invariant part with a per-degree basis and structure constants."""

    def __init__(self, ring: OrbifoldRing, degrees: Iterable[int] | None = None) -> None:
        self.ring = ring
        degrees = range(ring.top_degree + 1) if degrees is None else degrees
        self.bases: dict[int, list[OrbifoldElement]] = {k: ring.invariant_basis(k) for k in degrees}
        self._echelon: dict = {}

    def dims(self) -> list[int]:
        return [len(self.bases.get(k, [])) for k in range(self.ring.top_degree + 1)]

    def _ech(self, k: int) -> EchelonBasis:
        if k not in self._echelon:
            ech = EchelonBasis(order=_sort_key)
            for v in self.bases[k]:
                if not ech.add(v.terms):
                    raise ArithmeticError("invariant basis is dependent")
            self._echelon[k] = ech
        return self._echelon[k]

    def coordinates(self, x: OrbifoldElement, degree: int) -> dict[int, object]:
        if not x.terms:
            return {}
        return self._ech(degree).coordinates(x.terms)

    def structure_constants(self, p: int, q: int) -> dict:
        """``(i, j) -> coordinates of basis_p[i] * basis_q[j]`` in degree ``p + q``."""
        out = {}
        if p + q > self.ring.top_degree:
            return out
        if p + q not in self.bases:
            self.bases[p + q] = self.ring.invariant_basis(p + q)
        for i, x in enumerate(self.bases[p]):
            for j, y in enumerate(self.bases[q]):
                out[(i, j)] = self.coordinates(self.ring.star(x, y), p + q)
        return out


def _sort_key(k):
    if isinstance(k, tuple):
        return tuple(_sort_key(x) for x in k)
    if isinstance(k, Permutation):
        return k.images
    return k


def _elementary_from_matrix(mat: list[list]) -> list:
    """Coefficients of ``det(1 + t M)`` via Newton's identities on ``tr(M^i)``."""
    m = len(mat)
    power = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    p = []
    for _ in range(m):
        power = [[sum(power[i][k] * mat[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
        p.append(sum(power[i][i] for i in range(m)))
    e = [Fraction(1)]
    for k in range(1, m + 1):
        s = sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1))
        e.append(s / k)
    return [_clean(x) for x in e]


def build_ring(case: CaseTag, n: int, dt: bool = False, **bounds) -> OrbifoldRing:
    return OrbifoldRing(case, n, dt, **bounds)


def restriction_ring_hom_check(n: int, dt: bool = False, pairs: Iterable | None = None) -> dict:
    """Check that restricting from ``H(A^(n+1), S_(n+1))`` to
    ``H(A_0^(n+1), S_(n+1))`` is multiplicative.

    Pairs whose total degree exceeds the top degree of the target are
    vacuous (both sides vanish for degree reasons) and are only counted.
    """
    big = OrbifoldRing(CaseTag.hilb(), n + 1, dt)
    small = OrbifoldRing(CaseTag.kummer(), n, dt)

    def restrict(x: dict) -> dict:
        out: dict = {}
        for (g, _, k), c in x.items():
            cmap = case_restriction(g.orbits)
            img = cmap.apply_key(k)
            if img:
                for t in cmap.target.components:
                    add_into(out, {(g, t, k2): v for k2, v in img.items()}, c)
        return out

    report = {"n": n, "dt": dt, "checked": 0, "vacuous": 0, "status": "pass", "failure": None}
    unit_img = restrict(big.unit().terms)
    if unit_img != small.unit().terms:
        report.update(status="fail", failure={"reason": "unit not preserved"})
        return report
    cache: dict = {}

    def r_basis(key):
        if key not in cache:
            cache[key] = restrict({key: 1})
        return cache[key]

    if pairs is None:
        by_degree: dict = {}
        for key in big.iter_basis():
            by_degree.setdefault(big.total_degree(key), []).append(key)
        pairs = (
            (a, b)
            for p, la in by_degree.items()
            for q, lb in by_degree.items()
            for a in la
            for b in lb
            if p + q <= small.top_degree
        )
        total = big.dim**2
    else:
        pairs = list(pairs)
        total = len(pairs)
    for a, b in pairs:
        left = restrict(big.basis_product(a, b))
        right: dict = {}
        for ka, ca in r_basis(a).items():
            for kb, cb in r_basis(b).items():
                add_into(right, small.basis_product(ka, kb), ca * cb)
        report["checked"] += 1
        if left != right:
            report.update(status="fail", failure={"a": big.label(a), "b": big.label(b)})
            return report
    report["vacuous"] = total - report["checked"]
    return report
