"""Exact rational linear algebra and finite-dimensional graded algebras.

Scalars are Python ``int`` or :class:`fractions.Fraction`; nothing in this
module ever touches floating point.  Vectors in an algebra are sparse
``dict`` objects mapping basis keys to nonzero coefficients.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Hashable, Iterable, Sequence

Vector = dict  # basis key -> Rational
MatrixQ = list  # row-major list of lists of Rational


def _clean(x: Rational) -> Rational:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def add_into(acc: Vector, vec: Vector, scale: Rational = 1) -> Vector:
    for k, v in vec.items():
        s = acc.get(k, 0) + scale * v
        if s:
            acc[k] = _clean(s)
        else:
            acc.pop(k, None)
    return acc


def scale_vector(vec: Vector, c: Rational) -> Vector:
    if not c:
        return {}
    return {k: _clean(c * v) for k, v in vec.items()}


# ---------------------------------------------------------------------------
# dense matrices


def rref(matrix: Sequence[Sequence[Rational]]) -> tuple[MatrixQ, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in matrix]
    if not m:
        return [], []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return [[_clean(x) for x in row] for row in m], pivots


def rref_kernel(matrix: Sequence[Sequence[Rational]]) -> tuple[int, list[list], list[list]]:
    """Return ``(rank, kernel basis, image basis)`` of a rational matrix.

    The kernel basis has one vector per free column; the image basis is
    made of the pivot columns of the input.
    """
    if not matrix:
        return 0, [], []
    cols = len(matrix[0])
    red, pivots = rref(matrix)
    free = [c for c in range(cols) if c not in pivots]
    kernel = []
    for f in free:
        v = [0] * cols
        v[f] = 1
        for row, p in zip(red, pivots):
            v[p] = _clean(-Fraction(row[f]))
        kernel.append(v)
    image = [[matrix[i][p] for i in range(len(matrix))] for p in pivots]
    return len(pivots), kernel, image


def determinant(matrix: Sequence[Sequence[Rational]]) -> Rational:
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return _clean(det)


class EchelonBasis:
    """Incrementally maintained sparse echelon basis of a subspace.

    Besides membership and rank, it can express any vector in the span in
    terms of the vectors that were originally added.
    """

    def __init__(self, order: Callable[[Hashable], object] | None = None) -> None:
        self.rows: dict = {}  # pivot key -> (row, combination of originals)
        self.originals: list[Vector] = []
        self.order = order

    def __len__(self) -> int:
        return len(self.originals)

    def _pivot(self, vec: Vector):
        return min(vec, key=self.order) if self.order else min(vec)

    def _reduce(self, vec: Vector, track: bool):
        vec = dict(vec)
        combo: Vector = {}
        changed = True
        while changed:
            changed = False
            for key in [k for k in vec if k in self.rows]:
                if key not in vec:
                    continue
                row, rcombo = self.rows[key]
                c = vec[key]
                add_into(vec, row, -c)
                if track:
                    add_into(combo, rcombo, -c)
                changed = True
        return vec, combo

    def add(self, vec: Vector) -> bool:
        """Add ``vec``; return False (and add nothing) if it is dependent."""
        residual, combo = self._reduce(vec, track=True)
        if not residual:
            return False
        idx = len(self.originals)
        self.originals.append(dict(vec))
        add_into(combo, {idx: 1})
        p = self._pivot(residual)
        inv = Fraction(1) / Fraction(residual[p])
        residual = scale_vector(residual, inv)
        combo = scale_vector(combo, inv)
        # keep rows fully reduced against the new pivot
        for key, (row, rcombo) in list(self.rows.items()):
            c = row.get(p)
            if c:
                self.rows[key] = (add_into(dict(row), residual, -c), add_into(dict(rcombo), combo, -c))
        self.rows[p] = (residual, combo)
        return True

    def contains(self, vec: Vector) -> bool:
        return not self._reduce(vec, track=False)[0]

    def coordinates(self, vec: Vector) -> dict[int, Rational]:
        """Coefficients of ``vec`` on the added vectors; raises if outside the span."""
        residual, combo = self._reduce(vec, track=True)
        if residual:
            raise ValueError("vector not in span")
        return scale_vector(combo, -1)


# ---------------------------------------------------------------------------
# graded algebras


class GradedAlgebraModel:
    """Finite-dimensional graded-commutative algebra with an integration
    functional on its top degree."""

    top_degree: int

    def basis(self, degree: int | None = None) -> list:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def label(self, key) -> str:
        return str(key)

    @property
    def unit(self):
        raise NotImplementedError

    def mul_basis(self, a, b) -> Vector:
        raise NotImplementedError

    def integral_basis(self, key) -> Rational:
        raise NotImplementedError

    @property
    def dim(self) -> int:
        return sum(self.poincare())

    def poincare(self) -> list[int]:
        return [len(self.basis(k)) for k in range(self.top_degree + 1)]

    def mul(self, x: Vector, y: Vector) -> Vector:
        out: Vector = {}
        for a, ca in x.items():
            for b, cb in y.items():
                add_into(out, self.mul_basis(a, b), ca * cb)
        return out

    def integral(self, x: Vector) -> Rational:
        total = 0
        for k, c in x.items():
            if self.degree(k) == self.top_degree:
                total += c * self.integral_basis(k)
        return _clean(total)

    def pairing(self, x: Vector, y: Vector) -> Rational:
        return self.integral(self.mul(x, y))

    def gram(self, k: int) -> MatrixQ:
        """Pairing matrix between degree ``k`` and degree ``top - k``."""
        left, right = self.basis(k), self.basis(self.top_degree - k)
        return [[self.pairing({a: 1}, {b: 1}) for b in right] for a in left]

    def dual_basis(self, k: int) -> dict:
        """Left duals: ``integral(dual[a] * b) == delta(a, b)`` for ``a, b`` in degree ``k``."""
        here, there = self.basis(k), self.basis(self.top_degree - k)
        # G[i][j] = integral(there_i * here_j); want D with D G = I
        g = [[self.pairing({t: 1}, {h: 1}) for h in here] for t in there]
        n = len(here)
        aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(zip(*g))]
        red, piv = rref(aug)
        if piv[:n] != list(range(n)):
            raise ArithmeticError(f"degenerate pairing in degree {k}")
        inv_t = [row[n:] for row in red]  # inverse of G^T
        return {h: {t: inv_t[j][i] for i, t in enumerate(there) if inv_t[j][i]} for j, h in enumerate(here)}


def _popcount(x: int) -> int:
    return bin(x).count("1")


@lru_cache(maxsize=None)
def _masks_of_degree(m: int, k: int) -> tuple[int, ...]:
    return tuple(sum(1 << i for i in c) for c in itertools.combinations(range(m), k))


def merge_sign(s: int, t: int) -> int:
    """Sign of the shuffle sorting the concatenation of index sets ``s`` then ``t``."""
    inv = 0
    while t:
        low = t & -t
        inv += _popcount(s & ~((low << 1) - 1))
        t ^= low
    return -1 if inv & 1 else 1


class ExteriorAlgebraModel(GradedAlgebraModel):
    """Exterior algebra on ``m`` degree-one generators; basis keys are bitmasks.

    The monomial of all generators in increasing order integrates to
    ``top_integral``.
    """

    def __init__(self, m: int, top_integral: Rational = 1) -> None:
        self.m = m
        self.top_degree = m
        self.top_integral = _clean(Fraction(top_integral))
        self.full = (1 << m) - 1
        self._mulcache: dict = {}

    def __repr__(self) -> str:
        return f"ExteriorAlgebraModel({self.m}, top_integral={self.top_integral})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExteriorAlgebraModel) and (self.m, self.top_integral) == (other.m, other.top_integral)

    def __hash__(self) -> int:
        return hash((self.m, self.top_integral))

    def basis(self, degree: int | None = None) -> list[int]:
        if degree is None:
            return [s for k in range(self.m + 1) for s in _masks_of_degree(self.m, k)]
        if not 0 <= degree <= self.m:
            return []
        return list(_masks_of_degree(self.m, degree))

    def degree(self, key: int) -> int:
        return _popcount(key)

    @staticmethod
    def indices(key: int) -> tuple[int, ...]:
        return tuple(i for i in range(key.bit_length()) if key >> i & 1)

    def label(self, key: int) -> str:
        if key == 0:
            return "1"
        return "e" + ".".join(str(i + 1) for i in self.indices(key))

    @property
    def unit(self) -> int:
        return 0

    def generator(self, i: int) -> Vector:
        if not 0 <= i < self.m:
            raise IndexError(f"generator {i} out of range for {self.m} generators")
        return {1 << i: 1}

    def mul_monomials(self, a: int, b: int) -> tuple[int, int] | None:
        if a & b:
            return None
        return a | b, merge_sign(a, b)

    def mul_basis(self, a: int, b: int) -> Vector:
        r = self.mul_monomials(a, b)
        return {} if r is None else {r[0]: r[1]}

    def mul(self, x: Vector, y: Vector) -> Vector:
        out: Vector = {}
        for a, ca in x.items():
            for b, cb in y.items():
                if a & b:
                    continue
                k = a | b
                s = out.get(k, 0) + merge_sign(a, b) * ca * cb
                if s:
                    out[k] = s
                else:
                    del out[k]
        return out

    def integral_basis(self, key: int) -> Rational:
        return self.top_integral if key == self.full else 0

    def dual_basis(self, k: int) -> dict:
        out = {}
        for s in self.basis(k):
            c = self.full ^ s
            out[s] = {c: _clean(Fraction(1, merge_sign(c, s)) / self.top_integral)}
        return out

    def poincare(self) -> list[int]:
        return [math.comb(self.m, k) for k in range(self.m + 1)]


class TensorAlgebraModel(GradedAlgebraModel):
    """Graded tensor product with Koszul signs; keys are tuples of factor keys."""

    def __init__(self, factors: Sequence[GradedAlgebraModel]) -> None:
        self.factors = tuple(factors)
        self.top_degree = sum(f.top_degree for f in self.factors)
        self._basis_cache: dict = {}

    def __repr__(self) -> str:
        return f"TensorAlgebraModel({list(self.factors)})"

    def basis(self, degree: int | None = None) -> list[tuple]:
        if degree is None:
            return [k for d in range(self.top_degree + 1) for k in self.basis(d)]
        if degree not in self._basis_cache:
            out = []
            for combo in itertools.product(*(f.basis() for f in self.factors)):
                if sum(f.degree(c) for f, c in zip(self.factors, combo)) == degree:
                    out.append(combo)
            self._basis_cache[degree] = out
        return self._basis_cache[degree]

    def degree(self, key: tuple) -> int:
        return sum(f.degree(c) for f, c in zip(self.factors, key))

    def label(self, key: tuple) -> str:
        return "(x)".join(f.label(c) for f, c in zip(self.factors, key))

    @property
    def unit(self) -> tuple:
        return tuple(f.unit for f in self.factors)

    def mul_basis(self, a: tuple, b: tuple) -> Vector:
        sign = 1
        later = 0  # total degree of a-factors to the right of the current one
        for i in range(len(a) - 1, -1, -1):
            if (self.factors[i].degree(b[i]) * later) & 1:
                sign = -sign
            later += self.factors[i].degree(a[i])
        out: Vector = {(): sign}
        for f, x, y in zip(self.factors, a, b):
            piece = f.mul_basis(x, y)
            if not piece:
                return {}
            out = {k + (k2,): c * c2 for k, c in out.items() for k2, c2 in piece.items()}
        return {k: _clean(c) for k, c in out.items() if c}

    def integral_basis(self, key: tuple) -> Rational:
        return _clean(math.prod(Fraction(f.integral_basis(c)) for f, c in zip(self.factors, key)))

    def dual_basis(self, k: int) -> dict:
        fduals = [{d: f.dual_basis(d) for d in range(f.top_degree + 1)} for f in self.factors]
        out = {}
        for key in self.basis(k):
            cand: Vector = {(): 1}
            for f, fd, c in zip(self.factors, fduals, key):
                cand = {kk + (k2,): v * v2 for kk, v in cand.items() for k2, v2 in fd[f.degree(c)][c].items()}
            val = self.pairing(cand, {key: 1})
            out[key] = scale_vector(cand, Fraction(1) / Fraction(val))
        return out

    def poincare(self) -> list[int]:
        out = [1]
        for f in self.factors:
            out = poly_mul(out, f.poincare())
        return out


class TableAlgebraModel(GradedAlgebraModel):
    """Algebra given by an explicit sparse multiplication table on a labelled basis."""

    def __init__(self, degrees: Sequence[int], table: dict, integrals: dict, labels: Sequence[str] | None = None) -> None:
        self.degrees = list(degrees)
        self.table = table
        self.integrals = integrals
        self.labels = list(labels) if labels else [f"b{i}" for i in range(len(degrees))]
        self.top_degree = max(self.degrees)

    def basis(self, degree: int | None = None) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if degree is None or d == degree]

    def degree(self, key: int) -> int:
        return self.degrees[key]

    def label(self, key: int) -> str:
        return self.labels[key]

    @property
    def unit(self) -> int:
        return 0

    def mul_basis(self, a: int, b: int) -> Vector:
        if a == 0:
            return {b: 1}
        if b == 0:
            return {a: 1}
        return self.table.get((a, b), {})

    def integral_basis(self, key: int) -> Rational:
        return self.integrals.get(key, 0)


def surface_model(betti: Sequence[int]) -> GradedAlgebraModel:
    """Cohomology model of a surface with trivial canonical class.

    The abelian surface is modelled exactly as an exterior algebra on four
    generators.  Any other palindromic Betti vector ``(1, b1, b2, b1, 1)``
    gets a Poincare duality algebra with the prescribed Betti numbers: odd
    classes pair off into the point class, ``H^2`` carries the diagonal form,
    and all other products of positive-degree classes vanish.
    """
    betti = tuple(betti)
    if betti == (1, 4, 6, 4, 1):
        return ExteriorAlgebraModel(4)
    _, b1, b2, b3, _ = betti
    degrees = [0] + [1] * b1 + [2] * b2 + [3] * b3 + [4]
    labels = ["1"] + [f"a{i + 1}" for i in range(b1)] + [f"u{i + 1}" for i in range(b2)] + [f"c{i + 1}" for i in range(b3)] + ["pt"]
    a0, u0, c0, pt = 1, 1 + b1, 1 + b1 + b2, len(degrees) - 1
    table: dict = {}
    for i in range(b1):
        table[(a0 + i, c0 + i)] = {pt: 1}
        table[(c0 + i, a0 + i)] = {pt: -1}
    for i in range(b2):
        table[(u0 + i, u0 + i)] = {pt: 1}
    return TableAlgebraModel(degrees, table, {pt: 1}, labels)


def wedge(a: Vector, b: Vector, model: ExteriorAlgebraModel) -> Vector:
    for key in itertools.chain(a, b):
        if key >> model.m:
            raise IndexError(f"basis key {key:b} out of range for {model.m} generators")
    return model.mul(a, b)


def tensor_algebra(models: Sequence[GradedAlgebraModel]) -> GradedAlgebraModel:
    if len(models) == 1:
        return models[0]
    return TensorAlgebraModel(models)


def quotient_model(m: int, relations: Sequence[Sequence[Rational]], top_integral: Rational = 1) -> tuple[ExteriorAlgebraModel, list[Vector]]:
    """Exterior algebra on ``Q^m`` modulo the span of degree-one ``relations``.

    Coordinates are kept greedily in index order whenever they are
    independent of the relations and of the coordinates already kept.
    Returns the model and, for every coordinate ``i``, its image as a
    combination of the kept generators.
    """
    relations = [list(r) for r in relations]
    if relations and len(rref(relations)[1]) != len(relations):
        raise ValueError("relations are linearly dependent")
    span = EchelonBasis()
    for r in relations:
        span.add({i: x for i, x in enumerate(r) if x})
    kept: list[int] = []
    for i in range(m):
        if span.add({i: 1}):
            kept.append(i)
    model = ExteriorAlgebraModel(len(kept), top_integral)
    # express each coordinate modulo the relations in kept coordinates
    rel_rows = [{i: x for i, x in enumerate(r) if x} for r in relations]
    position = {c: j for j, c in enumerate(kept)}
    projection: list[Vector] = []
    dropped = [i for i in range(m) if i not in position]
    if dropped:
        # solve for each dropped coordinate: e_i = sum over kept + span(relations)
        cols = dropped
        mat = [[row.get(c, 0) for c in cols] + [row.get(k, 0) for k in kept] for row in rel_rows]
        red, piv = rref(mat)
        if piv[: len(cols)] != list(range(len(cols))):
            raise ArithmeticError("relations do not eliminate the dropped coordinates")
        reduced = dict(zip(cols, red))
    for i in range(m):
        if i in position:
            projection.append({position[i]: 1})
        else:
            row = reduced[i]
            projection.append({position[k]: _clean(-Fraction(row[len(cols) + j])) for j, k in enumerate(kept) if row[len(cols) + j]})
    return model, projection


def poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_power(p: Sequence[int], k: int) -> list[int]:
    out = [1]
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def is_monomial_action(matrices: Sequence[dict]) -> bool:
    return all(len(col) == 1 and abs(next(iter(col.values()))) == 1 for mat in matrices for col in mat.values())


def invariant_basis(matrices: Sequence[dict], basis: Sequence, check_closure: int = 8, seed: int = 0) -> list[Vector]:
    """Basis of the subspace fixed by a finite group acting on one degree block.

    Each element of ``matrices`` maps a basis key to the image vector
    (columns of the action matrix).  The basis returned spans the image of
    the averaging projector; its size is cross-checked against the
    trace-averaged (Molien) dimension.
    """
    order = len(matrices)
    if order == 0:
        raise ValueError("empty group")
    if check_closure and order > 1:
        _check_closure(matrices, basis, check_closure, seed)
    trace_sum = sum(mat[b].get(b, 0) for mat in matrices for b in basis)
    expected = Fraction(trace_sum, order)
    if expected.denominator != 1 or expected < 0:
        raise ArithmeticError(f"trace average {expected} is not a dimension")
    out: list[Vector] = []
    if is_monomial_action(matrices):
        seen = set()
        for b in basis:
            if b in seen:
                continue
            acc: Vector = {}
            for mat in matrices:
                add_into(acc, mat[b])
            seen.update(next(iter(mat[b])) for mat in matrices)
            if acc:
                out.append(acc)
    else:
        pos = {b: i for i, b in enumerate(basis)}
        ech = EchelonBasis(order=pos.__getitem__)
        for b in basis:
            acc = {}
            for mat in matrices:
                add_into(acc, mat[b])
            if acc and ech.add(acc):
                out.append(acc)
            if len(out) == expected:
                break
    if len(out) != expected:
        raise ArithmeticError(f"projector rank {len(out)} != Molien dimension {expected}")
    return out


def _apply(mat: dict, vec: Vector) -> Vector:
    out: Vector = {}
    for k, c in vec.items():
        add_into(out, mat[k], c)
    return out


def _check_closure(matrices: Sequence[dict], basis: Sequence, samples: int, seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(samples):
        a, b = rng.choice(matrices), rng.choice(matrices)
        comp = {k: _apply(a, b[k]) for k in basis}
        if not any(all(comp[k] == m[k] for k in basis) for m in matrices):
            raise ValueError("action is not closed under composition")
