"""Walk through stream encodings and gate-level arithmetic.

Shows how a probability becomes a bit stream, how AND/XNOR gates
multiply, why the MUX adder halves its result, and how integer streams
make addition exact.
"""
from fractions import Fraction

from iscsim import (BIPOLAR, Lfsr, b2is, b2s, decode, decode_exact,
                    expand_seeds, int_add, mul_bipolar, mul_unipolar, or_add,
                    scaled_add, tree_add)


def main():
    n = 2047  # one full period of the default 11-bit register

    print("== binary streams ==")
    for x in (0.25, 0.5, 0.75):
        s = b2s(x, n, Lfsr(seed=5))
        print(f"  unipolar {x}: mean of {n} bits = {decode(s):.4f}")

    print("\n== gate-level multipliers ==")
    a = b2s(0.5, n, Lfsr(seed=3))
    b = b2s(0.75, n, Lfsr(seed=11))
    print(f"  AND(0.5, 0.75)  -> {decode(mul_unipolar(a, b)):.4f} "
          f"(exact 0.375)")
    a = b2s(-0.5, n, Lfsr(seed=3), fmt=BIPOLAR)
    b = b2s(0.5, n, Lfsr(seed=11), fmt=BIPOLAR)
    print(f"  XNOR(-0.5, 0.5) -> {decode(mul_bipolar(a, b)):.4f} "
          f"(exact -0.25)")

    print("\n== conventional adders lose precision ==")
    a = b2s(0.6, n, Lfsr(seed=3))
    b = b2s(0.8, n, Lfsr(seed=11))
    sel = b2s(0.5, n, Lfsr(seed=19))
    print(f"  MUX(0.6, 0.8) -> {decode(scaled_add(a, b, sel)):.4f} "
          f"(the scaled sum 0.7, not 1.4)")
    print(f"  OR(0.6, 0.8)  -> {decode(or_add(a, b)):.4f} "
          f"(a+b-ab = 0.92, biased)")

    print("\n== integer streams add exactly ==")
    seeds = expand_seeds(7, 8)
    gens = lambda k: [Lfsr(seed=int(s)) for s in seeds[k * 4:(k + 1) * 4]]
    s1 = b2is(1.5, 4, n, gens(0), fmt=BIPOLAR)
    s2 = b2is(-2.25, 4, n, gens(1), fmt=BIPOLAR)
    total = int_add(s1, s2)
    print(f"  decode(s1) = {decode_exact(s1)} = {decode(s1):.4f}")
    print(f"  decode(s2) = {decode_exact(s2)} = {decode(s2):.4f}")
    print(f"  decode(s1 + s2) = {decode_exact(total)}  "
          f"(= decode(s1) + decode(s2) exactly, range grows to "
          f"{total.m})")

    print("\n== a whole adder tree stays exact ==")
    parts = [b2is(v, 2, n, [Lfsr(seed=int(s)) for s in
                            expand_seeds(50 + i, 2)], fmt=BIPOLAR)
             for i, v in enumerate((0.5, -1.0, 1.5, 0.25))]
    total = tree_add(parts)
    lhs = decode_exact(total)
    rhs = sum(decode_exact(p) for p in parts)
    print(f"  tree sum {lhs} == element-wise sum {rhs}: {lhs == rhs}")


if __name__ == "__main__":
    main()
