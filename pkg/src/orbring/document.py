"""JSON documents for rings and check reports.

Rationals are written as ``"p/q"`` strings (``"p"`` when integral) and are
never converted to floats.  Output is deterministic for a fixed
configuration, and files are replaced atomically.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .combinatorics import CaseTag, cycle_type
from .ring import OrbifoldRing

SCHEMA = 1


@dataclass
class RunConfig:
    case: str
    n: int
    dt: bool = False
    command: str = "build"
    output: str | None = None
    seed: int = 0
    base_betti: tuple[int, ...] | None = None
    max_dim: int | None = None
    max_group_pairs: int | None = None

    def __post_init__(self) -> None:
        for name in ("max_dim", "max_group_pairs"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def case_tag(self) -> CaseTag:
        if self.case == "kummer":
            if self.base_betti is not None:
                raise ValueError("--base-betti applies to the hilb case only")
            return CaseTag.kummer()
        return CaseTag.hilb(self.base_betti or (1, 4, 6, 4, 1))

    def header(self) -> dict:
        tag = self.case_tag()
        return {
            "case": self.case,
            "n": self.n,
            "dt": self.dt,
            "base_betti": list(tag.betti),
            "engine_version": __version__,
            "seed": self.seed,
            "bounds": {"max_dim": self.max_dim, "max_group_pairs": self.max_group_pairs},
        }


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str):
        raise TypeError(f"rationals are serialized as strings, got {type(text).__name__}")
    return Fraction(text)


@dataclass
class RingDocument:
    header: dict
    sectors: list[dict]
    poincare_total: list[int]
    poincare_invariants: list[int] | None
    structure_constants: list[dict] | None
    checks: list[dict] = field(default_factory=list)
    schema: int = SCHEMA

    def to_json(self) -> str:
        data = {"schema": self.schema}
        data.update({k: v for k, v in asdict(self).items() if k != "schema"})
        return json.dumps(data, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> RingDocument:
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        for entry in data.get("structure_constants") or []:
            parse_rational(entry["coeff"])
        return cls(**data)

    def constants(self) -> dict:
        """``(g, h, i, j) -> {target index: Fraction}`` with sectors in cycle notation."""
        out: dict = {}
        for e in self.structure_constants or []:
            out.setdefault((e["g"], e["h"], e["i"], e["j"]), {})[e["target_basis"]] = parse_rational(e["coeff"])
        return out


def sector_entries(ring: OrbifoldRing) -> list[dict]:
    out = []
    for g in ring.group:
        s = ring.sectors[g]
        out.append(
            {
                "g": str(g),
                "partition": list(cycle_type(g).parts),
                "age": s.age,
                "component_count": len(s.components),
                "betti": s.algebra.poincare(),
            }
        )
    return out


def structure_constant_entries(ring: OrbifoldRing) -> list[dict]:
    """Nonzero products of sector-local basis elements.

    Index ``i`` enumerates ``(component, monomial)`` of sector ``g`` in the
    ring's fixed order, and likewise for ``j`` and ``target_basis``.
    """
    local = {g: {k: i for i, k in enumerate(ring.sector_basis(g))} for g in ring.group}
    out = []
    for g in ring.group:
        for h in ring.group:
            if not ring.pair_data(g, h).active:
                continue
            gh = g * h
            for i, a in enumerate(ring.sector_basis(g)):
                for j, b in enumerate(ring.sector_basis(h)):
                    prod = ring.basis_product(a, b)
                    for key in sorted(prod, key=local[gh].__getitem__):
                        out.append(
                            {
                                "g": str(g),
                                "h": str(h),
                                "i": i,
                                "j": j,
                                "target_basis": local[gh][key],
                                "coeff": format_rational(prod[key]),
                            }
                        )
    return out


def ring_document(ring: OrbifoldRing, config: RunConfig, constants: bool = True, checks: list | None = None) -> RingDocument:
    return RingDocument(
        header=config.header(),
        sectors=sector_entries(ring),
        poincare_total=ring.poincare(),
        poincare_invariants=ring.poincare_invariants(),
        structure_constants=structure_constant_entries(ring) if constants else None,
        checks=[c.as_dict() if hasattr(c, "as_dict") else c for c in (checks or [])],
    )


def constants_from_ring(ring: OrbifoldRing) -> dict:
    """The same mapping as :meth:`RingDocument.constants`, straight from the engine."""
    local = {g: {k: i for i, k in enumerate(ring.sector_basis(g))} for g in ring.group}
    out: dict = {}
    for g in ring.group:
        for h in ring.group:
            for i, a in enumerate(ring.sector_basis(g)):
                for j, b in enumerate(ring.sector_basis(h)):
                    prod = ring.basis_product(a, b)
                    if prod:
                        out[(str(g), str(h), i, j)] = {local[g * h][k]: Fraction(c) for k, c in prod.items()}
    return out


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
