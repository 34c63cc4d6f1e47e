"""Product rules of the orbifold S^2 / S_2 for an abelian surface S.

Shows the three kinds of products (untwisted, mixed, twisted) on a few
classes, and how the discrete-torsion sign changes only the last one.
"""

from orbring import CaseTag, OrbifoldRing
from orbring.cli import parse_element


def show(ring: OrbifoldRing, a: str, b: str) -> None:
    x, y = parse_element(ring, a), parse_element(ring, b)
    print(f"  {a:>10} * {b:<10} = {ring.format(x * y)}")


def main() -> None:
    for dt in (False, True):
        ring = OrbifoldRing(CaseTag.hilb(), 2, dt=dt)
        print(f"-- hilb n=2, dt={dt}, total dimension {ring.dim}")
        show(ring, "id:1", "id:6")       # cup product on A x A
        show(ring, "id:1", "(1 2):2")    # restrict to the diagonal, then cup
        show(ring, "id:5", "(1 2):2")    # the second factor restricts to the same class
        show(ring, "(1 2):1", "(1 2):2") # push forward along the diagonal
        show(ring, "(1 2)", "(1 2)")     # the class of the diagonal, up to sign
    print("invariant Betti numbers:", OrbifoldRing(CaseTag.hilb(), 2).poincare_invariants())


if __name__ == "__main__":
    main()
