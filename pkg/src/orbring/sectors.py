"""Cohomological models of fixed loci and the maps between them.

A *locus* is the part of ``M`` constant on the blocks of a set partition of
the letters; both sectors ``M^g`` (blocks = orbits of ``g``) and the common
fixed loci ``M^<g,h>`` (blocks = joined orbits) are loci.  Blocks are
numbered by increasing minimal element.

Degree-one coordinates of a locus are indexed ``4 * block + j`` for
``j = 0..3`` (the four generators of ``H^1`` of the abelian surface).  In the
kummer case the locus is ``{x constant on blocks, sum x_i = 0}``, which has
``d**4`` components labelled by ``t in (Z/d)^4`` (``d`` = gcd of block
sizes); component ``t`` is where the weighted sum
``sum (|B|/d) x_B`` equals the torsion point ``t/d``.  Its ``H^1`` is
``Q^(4l)`` modulo the pullback of ``H^1(A)`` along that weighted sum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .combinatorics import (
    HILB,
    KUMMER,
    CaseTag,
    Permutation,
    SetPartition,
    age,
    canonical_blocks,
    coarsens,
)
from .exact_linalg import (
    ExteriorAlgebraModel,
    GradedAlgebraModel,
    TensorAlgebraModel,
    Vector,
    _clean,
    add_into,
    determinant,
    poly_power,
    quotient_model,
    scale_vector,
    surface_model,
)

Component = tuple[int, ...]


@dataclass(eq=False)
class LocusModel:
    case: CaseTag
    blocks: SetPartition
    algebra: GradedAlgebraModel
    modulus: int
    components: tuple[Component, ...]
    # exterior models only: image of each degree-one coordinate
    coordinate_images: list[Vector] | None = None
    weights: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        """Complex dimension."""
        return self.case.locus_dim(len(self.blocks))

    @property
    def is_exterior(self) -> bool:
        return isinstance(self.algebra, ExteriorAlgebraModel)

    def block_of(self) -> dict[int, int]:
        return {x: k for k, b in enumerate(self.blocks) for x in b}

    def poincare(self) -> list[int]:
        return [len(self.components) * c for c in self.algebra.poincare()]

    def basis(self, degree: int | None = None) -> list[tuple[Component, object]]:
        keys = self.algebra.basis(degree)
        return [(t, k) for t in self.components for k in keys]

    def __repr__(self) -> str:
        return f"LocusModel({self.case.kind}, {self.blocks}, {self.algebra!r}, components={len(self.components)})"


def _reduce_component(t: Component, d: int) -> Component:
    return tuple(x % d for x in t)


@lru_cache(maxsize=None)
def locus(case: CaseTag, blocks: SetPartition) -> LocusModel:
    blocks = canonical_blocks(blocks)
    l = len(blocks)
    if case.kind == HILB:
        if case.is_abelian:
            alg: GradedAlgebraModel = ExteriorAlgebraModel(4 * l)
            images = [{i: 1} for i in range(4 * l)]
            return LocusModel(case, blocks, alg, 1, ((),), images)
        alg = TensorAlgebraModel([surface_model(case.betti)] * l)
        return LocusModel(case, blocks, alg, 1, ((),))
    sizes = [len(b) for b in blocks]
    d = math.gcd(*sizes)
    weights = tuple(s // d for s in sizes)
    relations = []
    for j in range(4):
        row = [0] * (4 * l)
        for b, w in enumerate(weights):
            row[4 * b + j] = w
        relations.append(row)
    # kept coordinates are the first l-1 blocks; the sublattice they span has
    # index |weights[-1]| in H^1(component; Z), whence the fourth power
    kept = [[int(i == b) for i in range(l)] for b in range(l - 1)]
    index = determinant(kept + [list(weights)])
    model, projection = quotient_model(4 * l, relations, top_integral=index**4)
    for i in range(4 * (l - 1)):
        if projection[i] != {i: 1}:
            raise AssertionError("quotient did not keep the leading blocks")
    comps = tuple(itertools.product(range(d), repeat=4))
    return LocusModel(case, blocks, model, d, comps, projection, weights)


@dataclass(eq=False)
class SectorModel:
    g: Permutation
    case: CaseTag
    age: int
    locus: LocusModel

    @property
    def orbits(self) -> SetPartition:
        return self.locus.blocks

    @property
    def dim(self) -> int:
        return self.locus.dim

    @property
    def components(self) -> tuple[Component, ...]:
        return self.locus.components

    @property
    def algebra(self) -> GradedAlgebraModel:
        return self.locus.algebra

    def poincare(self) -> list[int]:
        return self.locus.poincare()

    def betti(self) -> list[int]:
        """Betti numbers of ``M^g`` from the cycle type alone, without the model."""
        l = len(self.orbits)
        if self.case.kind == HILB:
            return poly_power(list(self.case.betti), l)
        d = math.gcd(*(len(b) for b in self.orbits))
        return [d**4 * math.comb(4 * (l - 1), k) for k in range(4 * (l - 1) + 1)]


def build_sector(case: CaseTag, n: int, g: Permutation) -> SectorModel:
    if g.n != case.degree(n):
        raise ValueError(f"{case.kind} with n={n} needs permutations of degree {case.degree(n)}")
    return SectorModel(g, case, age(g, case), locus(case, g.orbits))


# ---------------------------------------------------------------------------
# algebra homomorphisms between locus models


class ExteriorHom:
    """Algebra map between exterior models fixed by its degree-one images."""

    def __init__(self, source: ExteriorAlgebraModel, target: ExteriorAlgebraModel, images: Sequence[Vector]) -> None:
        if len(images) != source.m:
            raise ValueError("need one image per source generator")
        self.source, self.target = source, target
        self.images = [{1 << i: c for i, c in img.items() if c} for img in images]
        self._cache: dict = {0: {0: 1}}

    def apply_key(self, key: int) -> Vector:
        hit = self._cache.get(key)
        if hit is None:
            low = key & -key
            rest = self.apply_key(key ^ low)
            hit = self.target.mul(self.images[low.bit_length() - 1], rest)
            self._cache[key] = hit
        return hit

    def apply(self, vec: Vector) -> Vector:
        out: Vector = {}
        for k, c in vec.items():
            add_into(out, self.apply_key(k), c)
        return out

    def matrix(self, degree: int) -> dict:
        return {k: self.apply_key(k) for k in self.source.basis(degree)}


class RegroupHom:
    """Map between tensor powers sending factor ``i`` of the source to factor
    ``target_of[i]`` of the target, multiplying factors that collide."""

    def __init__(self, source: TensorAlgebraModel, target: TensorAlgebraModel, target_of: Sequence[int]) -> None:
        self.source, self.target = source, target
        self.target_of = tuple(target_of)
        self._cache: dict = {}

    def apply_key(self, key: tuple) -> Vector:
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        factors = self.source.factors
        order = sorted(range(len(key)), key=lambda i: (self.target_of[i], i))
        # Koszul sign of the reordering
        sign = 1
        degs = [factors[i].degree(key[i]) for i in range(len(key))]
        for a in range(len(order)):
            for b in range(a + 1, len(order)):
                if order[a] > order[b] and degs[order[a]] * degs[order[b]] % 2:
                    sign = -sign
        parts: list[Vector] = []
        for t, tf in enumerate(self.target.factors):
            acc: Vector = {tf.unit: 1}
            for i in order:
                if self.target_of[i] == t:
                    acc = tf.mul(acc, {key[i]: 1})
            parts.append(acc)
        out: Vector = {(): sign}
        for p in parts:
            out = {k + (k2,): c * c2 for k, c in out.items() for k2, c2 in p.items()}
        out = {k: _clean(c) for k, c in out.items() if c}
        self._cache[key] = out
        return out

    def apply(self, vec: Vector) -> Vector:
        out: Vector = {}
        for k, c in vec.items():
            add_into(out, self.apply_key(k), c)
        return out

    def matrix(self, degree: int) -> dict:
        return {k: self.apply_key(k) for k in self.source.basis(degree)}


class TensorLift:
    """Section of a surjective regrouping map: each target factor is placed on
    the first source factor mapping to it."""

    def __init__(self, restriction: RegroupHom) -> None:
        self.restriction = restriction
        self.source = restriction.target
        self.target = restriction.source
        self.first = {}
        for i, t in enumerate(restriction.target_of):
            self.first.setdefault(t, i)
        self._cache: dict = {}

    def apply_key(self, key: tuple) -> Vector:
        hit = self._cache.get(key)
        if hit is None:
            cand = list(self.target.unit)
            for t, i in self.first.items():
                cand[i] = key[t]
            back = self.restriction.apply_key(tuple(cand))
            if set(back) != {key}:
                raise AssertionError("regrouping section failed")
            hit = {tuple(cand): _clean(Fraction(1) / Fraction(back[key]))}
            self._cache[key] = hit
        return hit

    def apply(self, vec: Vector) -> Vector:
        out: Vector = {}
        for k, c in vec.items():
            add_into(out, self.apply_key(k), c)
        return out


# ---------------------------------------------------------------------------
# sector maps


@dataclass(eq=False)
class SectorMap:
    """Map between locus models, possibly across components.

    ``kind`` is ``restriction`` (pullback from ``source`` to a coarser
    locus), ``gysin`` (pushforward into a finer locus), ``conjugation`` or
    ``case_restriction``.  ``component_map`` follows the geometry: it sends
    a component of the *smaller* space to the component containing it.
    """

    kind: str
    source: LocusModel
    target: LocusModel
    shift: int
    hom: object
    component_map: Callable[[Component], Component | None]
    fundamental: Vector | None = None
    _cache: dict = field(default_factory=dict)

    def apply_key(self, key) -> Vector:
        if self.kind != "gysin":
            return self.hom.apply_key(key)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.target.algebra.mul(self.fundamental, self.hom.apply_key(key))
            self._cache[key] = hit
        return hit

    def apply(self, vec: dict) -> dict:
        """Apply to a vector keyed by ``(component, basis key)``."""
        out: dict = {}
        for (t, k), c in vec.items():
            img = self.apply_key(k)
            if not img:
                continue
            for t2 in self.target_components(t):
                add_into(out, {(t2, k2): v for k2, v in img.items()}, c)
        return out

    def target_components(self, t: Component) -> list[Component]:
        if self.kind in ("restriction", "case_restriction"):
            return [t2 for t2 in self.target.components if self.component_map(t2) == t]
        return [self.component_map(t)]


def _degree_one_images(source: LocusModel, target: LocusModel, letter_map: Callable[[int], int]) -> list[Vector]:
    """Images of source generators when block ``B`` of the source goes to the
    target block containing ``letter_map(min(B))``."""
    where = target.block_of()
    out = []
    for gen in range(source.algebra.m):
        b, j = divmod(gen, 4)
        tb = where[letter_map(source.blocks[b][0])]
        out.append(dict(target.coordinate_images[4 * tb + j]))
    return out


def _check_weight_subspace(source: LocusModel, target: LocusModel) -> None:
    """The coarsening map must carry the weight vector of ``source`` to
    ``d_target / d_source`` times that of ``target``."""
    where = target.block_of()
    image = [0] * len(target.blocks)
    for b, w in zip(source.blocks, source.weights):
        image[where[b[0]]] += w
    ratio = Fraction(target.modulus, source.modulus)
    if [Fraction(x) for x in image] != [ratio * w for w in target.weights]:
        raise AssertionError(f"weight subspace not preserved from {source.blocks} to {target.blocks}")


@lru_cache(maxsize=None)
def restriction(source: LocusModel, target_blocks: SetPartition) -> SectorMap:
    """Pullback from ``source`` to the coarser locus with the given blocks."""
    target_blocks = canonical_blocks(target_blocks)
    if not coarsens(target_blocks, source.blocks):
        raise ValueError(f"{target_blocks} does not coarsen {source.blocks}")
    target = locus(source.case, target_blocks)
    if target_blocks == source.blocks:
        hom = _identity_hom(source.algebra)
        return SectorMap("restriction", source, target, 0, hom, lambda t: t)
    if source.is_exterior:
        if source.case.kind == KUMMER:
            _check_weight_subspace(source, target)
        hom = ExteriorHom(source.algebra, target.algebra, _degree_one_images(source, target, lambda x: x))
    else:
        where = target.block_of()
        hom = RegroupHom(source.algebra, target.algebra, [where[b[0]] for b in source.blocks])
    d = source.modulus
    return SectorMap("restriction", source, target, 0, hom, lambda t2: _reduce_component(t2, d))


class _IdentityHom:
    def __init__(self, algebra: GradedAlgebraModel) -> None:
        self.source = self.target = algebra

    def apply_key(self, key) -> Vector:
        return {key: 1}

    def apply(self, vec: Vector) -> Vector:
        return dict(vec)


def _identity_hom(algebra: GradedAlgebraModel) -> _IdentityHom:
    return _IdentityHom(algebra)


def fundamental_class(res: SectorMap) -> Vector:
    """Class of the coarser locus inside the finer one, computed from the
    defining adjunction ``integral(Z * y) = integral(res(y))``."""
    big, small = res.source.algebra, res.target.algebra
    top_small = small.top_degree
    duals = big.dual_basis(top_small)
    z: Vector = {}
    for u in big.basis(top_small):
        r = small.integral(res.hom.apply_key(u))
        if r:
            add_into(z, duals[u], r)
    return z


@lru_cache(maxsize=None)
def gysin(source: LocusModel, target: LocusModel) -> SectorMap:
    """Pushforward from the coarser locus ``source`` into ``target``.

    Realised as ``x -> Z * lift(x)`` where ``Z`` is the fundamental class and
    ``lift`` is a section of the restriction map; by the projection formula
    this is the adjoint of restriction for the Poincare pairings.
    """
    if not coarsens(source.blocks, target.blocks):
        raise ValueError(f"{source.blocks} does not coarsen {target.blocks}")
    codim = target.dim - source.dim
    d = target.modulus
    comp_map = lambda t: _reduce_component(t, d)  # noqa: E731
    if codim == 0:
        return SectorMap("gysin", source, target, 0, _identity_hom(source.algebra), comp_map, {target.algebra.unit: 1})
    res = restriction(target, source.blocks)
    if source.is_exterior:
        where = target.block_of()
        lift_images = []
        for gen in range(source.algebra.m):
            b, j = divmod(gen, 4)
            tb = where[source.blocks[b][0]]
            lift_images.append(dict(target.coordinate_images[4 * tb + j]))
        lift = ExteriorHom(source.algebra, target.algebra, lift_images)
        for gen in range(source.algebra.m):
            if res.hom.apply(lift.apply_key(1 << gen)) != {1 << gen: 1}:
                raise AssertionError("lift is not a section of restriction")
    else:
        lift = TensorLift(res.hom)
    z = fundamental_class(res)
    if not z:
        raise ArithmeticError("degenerate pairing: vanishing fundamental class")
    return SectorMap("gysin", source, target, 2 * codim, lift, comp_map, z)


@lru_cache(maxsize=None)
def _conjugation_on_locus(h: Permutation, source: LocusModel) -> SectorMap:
    target = locus(source.case, canonical_blocks([h(x) for x in b] for b in source.blocks))
    if source.is_exterior:
        hom = ExteriorHom(source.algebra, target.algebra, _degree_one_images(source, target, h))
    else:
        where = target.block_of()
        hom = RegroupHom(source.algebra, target.algebra, [where[h(b[0])] for b in source.blocks])
    return SectorMap("conjugation", source, target, 0, hom, lambda t: t)


def conjugation(h: Permutation, g: Permutation, case: CaseTag) -> SectorMap:
    """Pushforward along ``x -> h.x`` from ``M^g`` to ``M^(h g h^-1)``."""
    if h.n != g.n:
        raise ValueError("degree mismatch")
    return _conjugation_on_locus(h, locus(case, g.orbits))


@lru_cache(maxsize=None)
def case_restriction(blocks: SetPartition) -> SectorMap:
    """Restriction from the hilb locus of ``A^(n+1)`` to the kummer locus of
    ``A_0^(n+1)`` with the same blocks; every component receives the class."""
    source = locus(CaseTag.hilb(), blocks)
    target = locus(CaseTag.kummer(), blocks)
    hom = ExteriorHom(source.algebra, target.algebra, [dict(target.coordinate_images[i]) for i in range(source.algebra.m)])
    return SectorMap("case_restriction", source, target, 0, hom, lambda t: ())


# ---------------------------------------------------------------------------
# reference (slow) adjoint, used to validate the projection-formula route


def gysin_by_adjoint(source: LocusModel, target: LocusModel, x: Vector) -> Vector:
    """Pushforward of ``x`` (a class on one component of ``source``) computed
    directly from ``<gysin(x), y> = <x, res(y)>`` on a full basis of ``target``."""
    res = restriction(target, source.blocks)
    codim = target.dim - source.dim
    out: Vector = {}
    degs = {source.algebra.degree(k) for k in x}
    for p in degs:
        part = {k: c for k, c in x.items() if source.algebra.degree(k) == p}
        q = target.algebra.top_degree - p - 2 * codim
        if q < 0:
            continue
        duals = target.algebra.dual_basis(q)
        for y in target.algebra.basis(q):
            val = source.algebra.integral(source.algebra.mul(part, res.hom.apply_key(y)))
            if val:
                add_into(out, duals[y], val)
    return out
