"""Command-line front end: ``orbring build|check|multiply|poincare``."""

from __future__ import annotations

import argparse
import json
import re
import sys

from .checks import SUITES, run_suite
from .combinatorics import Permutation
from .document import RunConfig, format_rational, ring_document, write_atomic
from .exact_linalg import ExteriorAlgebraModel
from .ring import OrbifoldElement, OrbifoldRing, ResourceBoundError

EXIT_OK, EXIT_FAIL, EXIT_BOUND = 0, 1, 2

_SPEC = re.compile(r"^\s*(?P<sector>id|(\(\s*\d+(\s+\d+)*\s*\)\s*)+)\s*(@(?P<comp>\d+(\.\d+)*))?\s*(:(?P<gens>\d+(\s*,\s*\d+)*)?)?\s*$")


class SpecError(ValueError):
    pass


def parse_element(ring: OrbifoldRing, text: str) -> OrbifoldElement:
    """Parse ``SECTOR[@c.c.c.c][:i,j,...]`` or ``#k``.

    ``SECTOR`` is 1-indexed cycle notation or ``id``; ``@`` selects a torsion
    component (default: the sum over all components); ``:`` lists 1-indexed
    degree-one generators whose product is taken (default: the fundamental
    class).  ``#k`` is the k-th element (0-indexed) of the ring's basis.
    """
    text = text.strip()
    if text.startswith("#"):
        try:
            k = int(text[1:])
        except ValueError:
            raise SpecError(f"malformed basis index {text!r}") from None
        for i, key in enumerate(ring.iter_basis()):
            if i == k:
                return ring.basis_element(key)
        raise SpecError(f"basis index {k} out of range (dimension {ring.dim})")
    m = _SPEC.match(text)
    if not m:
        raise SpecError(f"malformed element spec {text!r}")
    try:
        g = Permutation.from_cycles(m["sector"], ring.degree_letters)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    sector = ring.sectors[g]
    if m["comp"]:
        comp = tuple(int(x) for x in m["comp"].split("."))
        if comp not in sector.components:
            raise SpecError(f"component {m['comp']} does not exist in sector {g}")
        comps = [comp]
    else:
        comps = list(sector.components)
    alg = sector.algebra
    vec = {alg.unit: 1}
    if m["gens"]:
        if not isinstance(alg, ExteriorAlgebraModel):
            raise SpecError("generator lists need an exterior model; use #k instead")
        for x in (int(t) for t in m["gens"].split(",")):
            if not 1 <= x <= alg.m:
                raise SpecError(f"generator {x} out of range 1..{alg.m}")
            vec = alg.mul(vec, alg.generator(x - 1))
    return OrbifoldElement(ring, {(g, t, k): c for t in comps for k, c in vec.items()})


def _config(args) -> RunConfig:
    betti = None
    if getattr(args, "base_betti", None):
        try:
            betti = tuple(int(x) for x in args.base_betti.split(","))
        except ValueError:
            raise ValueError(f"malformed --base-betti {args.base_betti!r}") from None
    return RunConfig(
        case=args.case,
        n=args.n,
        dt=args.dt,
        command=args.command,
        output=getattr(args, "output", None),
        seed=args.seed,
        base_betti=betti,
        max_dim=args.max_dim,
        max_group_pairs=args.max_group_pairs,
    )


def _ring(config: RunConfig) -> OrbifoldRing:
    return OrbifoldRing(
        config.case_tag(),
        config.n,
        config.dt,
        max_dim=config.max_dim,
        max_group_pairs=config.max_group_pairs,
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    config = _config(args)
    ring = _ring(config)
    if not args.no_constants and args.constants_limit and ring.dim > args.constants_limit:
        raise ResourceBoundError(
            f"dimension {ring.dim} exceeds --constants-limit {args.constants_limit}; pass --no-constants"
        )
    checks = run_suite("duality", ring.case, ring.n, ring.dt, config.seed, ring=ring) if args.with_checks else []
    doc = ring_document(ring, config, constants=not args.no_constants, checks=checks)
    _emit(doc.to_json(), config.output)
    return EXIT_OK


def cmd_check(args) -> int:
    config = _config(args)
    ring = None
    if args.suite not in ("cocycle", "torsion", "restriction"):
        ring = _ring(config)
    results = run_suite(args.suite, config.case_tag(), config.n, config.dt, config.seed, args.samples, ring=ring)
    report = {
        "schema": 1,
        "header": config.header() | {"suite": args.suite},
        "checks": [r.as_dict() for r in results],
    }
    _emit(json.dumps(report, indent=1, default=str) + "\n", config.output)
    if config.output:
        for r in results:
            print(f"{r.status.upper():4} {r.name}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_multiply(args) -> int:
    config = _config(args)
    ring = _ring(config)
    try:
        a = parse_element(ring, args.a)
        b = parse_element(ring, args.b)
    except SpecError as exc:
        print(f"orbring multiply: {exc}", file=sys.stderr)
        return EXIT_BOUND
    print(f"a = {ring.format(a)}")
    print(f"b = {ring.format(b)}")
    pairs = sorted({(ka[0], kb[0]) for ka in a.terms for kb in b.terms})
    for g, h in pairs:
        data = ring.pair_data(g, h)
        if not data.active:
            print(f"sectors {g} * {h}: 0 (obstruction rank {data.rank})")
            continue
        eps = ring.epsilon(g, h)
        extra = f", obstruction rank {data.rank} with Euler class" if data.rank else ""
        print(f"sectors {g} * {h} -> {g * h}: epsilon {eps}, sign {data.sign:+d}{extra}")
    print(f"a * b = {ring.format(ring.star(a, b))}")
    return EXIT_OK


def cmd_poincare(args) -> int:
    config = _config(args)
    ring = _ring(config)
    total = ring.poincare()
    inv = ring.poincare_invariants(args.method)
    print("total:      " + " ".join(map(str, total)))
    print("invariants: " + " ".join(map(str, inv)))
    print(f"euler:      {sum((-1) ** i * c for i, c in enumerate(inv))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbring", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--case", choices=("hilb", "kummer"), required=True)
        p.add_argument("-n", type=int, required=True)
        p.add_argument("--dt", action="store_true", help="twist the product by discrete torsion")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--base-betti", help="b0,b1,b2,b3,b4 of the base surface (hilb only)")
        p.add_argument("--max-dim", type=int, help="refuse rings of larger total dimension")
        p.add_argument("--max-group-pairs", type=int, help="refuse groups with more than this many pairs")

    p = sub.add_parser("build", help="write a ring document")
    common(p)
    p.add_argument("-o", "--output")
    p.add_argument("--no-constants", action="store_true", help="omit structure constants")
    p.add_argument("--constants-limit", type=int, default=1000, help="largest dimension exported with constants")
    p.add_argument("--with-checks", action="store_true", help="embed the duality suite")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="run a property suite")
    common(p)
    p.add_argument("--suite", choices=SUITES + ("all",), required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("multiply", help="print a star product")
    common(p)
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_multiply)

    p = sub.add_parser("poincare", help="print Poincare polynomials")
    common(p)
    p.add_argument("--method", choices=("auto", "projector", "molien"), default="auto")
    p.set_defaults(func=cmd_poincare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceBoundError as exc:
        print(f"orbring: resource bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except ValueError as exc:
        print(f"orbring: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (AssertionError, ArithmeticError) as exc:
        print(f"orbring: internal check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
