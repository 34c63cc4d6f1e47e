"""The Kummer K3 surface as the orbifold A/{+-1} with its 16 twisted points.

Builds the n = 1 kummer ring, prints the sectors, the invariant Betti numbers,
and the square of the twisted fundamental class with and without discrete
torsion.
"""

from orbring import CaseTag, OrbifoldRing
from orbring.oracles import PoincarePolynomial, euler_commuting_pairs


def main() -> None:
    for dt in (False, True):
        ring = OrbifoldRing(CaseTag.kummer(), 1, dt=dt)
        print(f"-- kummer n=1, dt={dt}")
        for g, s in ring.sectors.items():
            print(f"  sector {g}: age {s.age}, {len(s.components)} component(s), betti {s.algebra.poincare()}")
        inv = PoincarePolynomial(tuple(ring.poincare_invariants()))
        print(f"  invariant Poincare polynomial: {inv}")
        print(f"  Euler number: model {inv.euler_characteristic()}, oracle {euler_commuting_pairs(ring.case, 1)}")
        swap = ring.group[1]
        one = ring.fundamental_class(swap)
        print(f"  [twisted] * [twisted] = {ring.format(one * one)}")


if __name__ == "__main__":
    main()
