"""Walkthrough: Cartan data, the bilinear form, and the affine Weyl group.

Builds the rank-one and rank-two untwisted algebras, prints the derived
invariants, and exercises the Weyl action on weights.
"""

from fractions import Fraction

from affinewalks import (algebra_from_name, classify_weight, inner_product,
                         pairing_coroot, weyl_vector)
from affinewalks.algebra import Weight
from affinewalks.weyl import (apply, enumerate_bounded, finite_group,
                              lattice_basis, reflect, translate)


def main():
    for name in ("A1~", "A2~"):
        alg = algebra_from_name(name)
        rho = weyl_vector(alg)
        print(f"== {name}: rank {alg.rank}")
        print(f"   marks {alg.marks}, comarks {alg.comarks}, "
              f"h = {alg.coxeter}, h_vee = {alg.dual_coxeter}")
        print(f"   Weyl vector: level {rho.k}, finite part {rho.z}")
        print(f"   (delta|Lambda0) = "
              f"{inner_product(alg, alg.delta(), alg.Lambda0())}")
        print(f"   |finite Weyl group| = {len(finite_group(alg))}, "
              f"lattice basis {lattice_basis(alg)}")

    alg = algebra_from_name("A1~")
    rho = weyl_vector(alg)
    L0 = alg.Lambda0()

    print("\nReflections and translations on A1~:")
    print("   s0(Lambda0)      =", reflect(alg, 0, L0))
    print("   t_alpha(Lambda0) =", translate(alg, (1,), L0))

    print("\nWeyl orbit of rho (norm-bounded enumeration, |alpha| <= 2):")
    for w in enumerate_bounded(alg, 2.0):
        img = apply(alg, w, rho)
        print(f"   t_{w.trans} * w{w.finite.word or '()'}: "
              f"level {img.k}, z = {img.z[0]}, b = {img.b}, "
              f"norm^2 = {inner_product(alg, img, img)}")

    half = Weight.make(0, (Fraction(1, 2),), 0)
    cls = classify_weight(alg, half)
    print(f"\nalpha_1/2 has pairings "
          f"({pairing_coroot(alg, half, 0)}, {pairing_coroot(alg, half, 1)})"
          f" -> integral={cls.integral}, dominant={cls.dominant}")


if __name__ == "__main__":
    main()
