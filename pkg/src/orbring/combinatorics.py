"""Symmetric-group machinery: permutations, partitions, orbits, ages and
the discrete-torsion exponent.

Permutations are stored 0-indexed in one-line notation.  Composition
follows ``(g * h)(x) == g(h(x))``: ``h`` is applied first.  Cycle notation
at the text boundary is 1-indexed, e.g. ``"(1 2)(3 4 5)"``, with ``"id"``
for the identity.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Iterator, Sequence

HILB = "hilb"
KUMMER = "kummer"

ABELIAN_SURFACE_BETTI = (1, 4, 6, 4, 1)


class UnionFind:
    def __init__(self, items: Iterable) -> None:
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in self.parent}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def classes(self) -> list[list]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return list(groups.values())


SetPartition = tuple[tuple[int, ...], ...]


def canonical_blocks(blocks: Iterable[Iterable[int]]) -> SetPartition:
    """Sort each block and order blocks by their minimal element."""
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation of 0..{len(self.images) - 1}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, text: str, n: int) -> Permutation:
        """Parse 1-indexed cycle notation such as ``"(1 2)(3 4 5)"`` or ``"id"``."""
        text = text.strip()
        images = list(range(n))
        if text in ("", "id", "()"):
            return cls(tuple(images))
        if not re.fullmatch(r"(\(\s*\d+(\s+\d+)*\s*\)\s*)+", text):
            raise ValueError(f"malformed cycle notation: {text!r}")
        seen: set[int] = set()
        for cyc in re.findall(r"\(([^)]*)\)", text):
            entries = [int(tok) - 1 for tok in cyc.split()]
            for x in entries:
                if not 0 <= x < n:
                    raise ValueError(f"entry {x + 1} out of range for degree {n}")
                if x in seen:
                    raise ValueError(f"entry {x + 1} repeated in {text!r}")
                seen.add(x)
            for a, b in zip(entries, entries[1:] + entries[:1]):
                images[a] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        if self.n != other.n:
            raise ValueError("degree mismatch")
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def conjugate_by(self, h: Permutation) -> Permutation:
        """Return ``h * self * h^-1``."""
        return h * self * h.inverse()

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    @cached_property
    def orbits(self) -> SetPartition:
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            orb = []
            x = start
            while not seen[x]:
                seen[x] = True
                orb.append(x)
                x = self.images[x]
            out.append(orb)
        return canonical_blocks(out)

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycles of length >= 2, each starting at its minimal element."""
        out = []
        for orb in self.orbits:
            if len(orb) < 2:
                continue
            cyc = [orb[0]]
            x = self.images[orb[0]]
            while x != orb[0]:
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "id"
        return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cyc)


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(p < 1 for p in self.parts) or list(self.parts) != sorted(self.parts, reverse=True):
            raise ValueError(f"invalid partition {self.parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def gcd(self) -> int:
        return reduce(math.gcd, self.parts, 0)

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out

    def centralizer_order(self) -> int:
        return math.prod(k**m * math.factorial(m) for k, m in self.multiplicities().items())

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class CaseTag:
    """Which quotient stack is being modelled.

    ``hilb``: the symmetric group on ``n`` letters permuting ``S^n`` for a
    surface ``S`` with trivial canonical class and the given Betti numbers.
    ``kummer``: the symmetric group on ``n + 1`` letters acting on the kernel
    of the summation map ``A^(n+1) -> A`` for an abelian surface ``A``.
    """

    kind: str
    betti: tuple[int, ...] = field(default=ABELIAN_SURFACE_BETTI)

    def __post_init__(self) -> None:
        if self.kind not in (HILB, KUMMER):
            raise ValueError(f"unknown case {self.kind!r}")
        b = tuple(self.betti)
        if len(b) != 5 or b[0] != 1 or b[4] != 1 or b != b[::-1] or min(b) < 0:
            raise ValueError(f"Betti vector must be palindromic with b0 = b4 = 1, got {b}")
        if self.kind == KUMMER and b != ABELIAN_SURFACE_BETTI:
            raise ValueError("the kummer case is defined for an abelian surface only")
        object.__setattr__(self, "betti", b)

    @classmethod
    def hilb(cls, betti: Sequence[int] = ABELIAN_SURFACE_BETTI) -> CaseTag:
        return cls(HILB, tuple(betti))

    @classmethod
    def kummer(cls) -> CaseTag:
        return cls(KUMMER)

    @property
    def is_abelian(self) -> bool:
        return self.betti == ABELIAN_SURFACE_BETTI

    @property
    def euler_number(self) -> int:
        """Topological Euler characteristic of the base surface."""
        return sum((-1) ** i * b for i, b in enumerate(self.betti))

    def degree(self, n: int) -> int:
        """Number of letters the acting symmetric group permutes."""
        return n if self.kind == HILB else n + 1

    def locus_dim(self, num_blocks: int) -> int:
        """Complex dimension of the locus constant on ``num_blocks`` blocks."""
        return 2 * num_blocks if self.kind == HILB else 2 * (num_blocks - 1)


def cycle_type(g: Permutation) -> Partition:
    return Partition(tuple(sorted((len(o) for o in g.orbits), reverse=True)))


def orbit_join(g: Permutation, h: Permutation) -> SetPartition:
    """Orbits of the subgroup generated by ``g`` and ``h``."""
    if g.n != h.n:
        raise ValueError(f"degree mismatch: {g.n} != {h.n}")
    uf = UnionFind(range(g.n))
    for i in range(g.n):
        uf.union(i, g(i))
        uf.union(i, h(i))
    return canonical_blocks(uf.classes())


def coarsens(coarse: SetPartition, fine: SetPartition) -> bool:
    """True when every block of ``fine`` lies inside a block of ``coarse``."""
    where = {x: k for k, b in enumerate(coarse) for x in b}
    return all(len({where[x] for x in b}) == 1 for b in fine)


def age(g: Permutation, case: CaseTag) -> int:
    # (dim_C S / 2) * (letters - orbits) with dim_C S = 2
    return g.n - len(g.orbits)


def epsilon(g: Permutation, h: Permutation, case: CaseTag) -> int:
    twice = age(g, case) + age(h, case) - age(g * h, case)
    if twice % 2:
        raise ArithmeticError(f"non-integral discrete torsion for {g}, {h}")
    return twice // 2


def permutations(n: int) -> list[Permutation]:
    """All of S_n in lexicographic one-line order."""
    return [Permutation(p) for p in itertools.permutations(range(n))]


def integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - k, k):
            yield (k,) + rest


def conjugacy_class_data(n: int) -> list[tuple[Partition, int, int]]:
    """``(cycle type, class size, centralizer order)`` for every class of S_n."""
    out = []
    for parts in integer_partitions(n):
        lam = Partition(parts)
        z = lam.centralizer_order()
        out.append((lam, math.factorial(n) // z, z))
    return out


def centralizer(g: Permutation, group: Iterable[Permutation]) -> list[Permutation]:
    return [h for h in group if h * g == g * h]


def class_representative(lam: Partition) -> Permutation:
    """The permutation with consecutive cycles of the given lengths."""
    images = []
    start = 0
    for k in lam.parts:
        images.extend(start + (i + 1) % k for i in range(k))
        start += k
    return Permutation(tuple(images))
