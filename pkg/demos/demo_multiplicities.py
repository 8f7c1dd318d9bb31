"""Walkthrough: weight multiplicities two ways, tensor powers, branching.

The Freudenthal recursion and the character-series division must agree
entry by entry; on top of them sit tensor-power tables and the alternating
branching sums, cross-checked against a greedy decomposition of the
character product.
"""

from affinewalks import algebra_from_name
from affinewalks.algebra import Weight
from affinewalks.highestweight import (branching_mult,
                                       character_series_oracle,
                                       decompose_product, freudenthal_table,
                                       tensor_power_table)


def main():
    alg = algebra_from_name("A1~")
    L0 = alg.Lambda0()

    table = freudenthal_table(alg, L0, 8)
    oracle = character_series_oracle(alg, L0, 8)
    print("Freudenthal == series division:", table == oracle)
    print("delta-string of the basic module (partition numbers):",
          [table.mult(d, (0,)) for d in range(9)])

    omega = Weight.make(2, (0,), 0)          # h_vee * Lambda0
    square = tensor_power_table(alg, omega, 2, 6)
    print("\ntensor square layer totals:",
          {d: square.layer_total(d) for d in range(7)})

    comps = decompose_product(alg, L0, omega, 1, 6)
    print("\ncomponents of V(Lambda0) (x) V(2 Lambda0) up to depth 6:")
    top = L0 + omega
    for (d, m), mult in sorted(comps.items()):
        beta = top - Weight.make(0, m, d)
        check = branching_mult(alg, L0, omega, 1, beta)
        print(f"   depth {d}, offset {m[0]:+d}: multiplicity {mult} "
              f"(alternating sum gives {check})")
        assert check == mult


if __name__ == "__main__":
    main()
