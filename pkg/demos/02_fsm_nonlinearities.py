"""Transfer curves of the saturating-counter nonlinearities.

A counter driven by a bipolar stream approximates tanh; driven by an
integer stream it covers inputs beyond [-1, 1].  The exact Markov
stationary oracle is printed next to the empirical decode.
"""
import math

import numpy as np

from iscsim import FsmConfig, Lfsr, b2is, decode, expand_seeds
from iscsim.fsm import nsexp, nstanh, oracle_mean
from iscsim.markov import b2is_step_dist
from iscsim.streams import BIPOLAR


def main():
    n_bits, width = 16384, 16

    print("== tanh curves: state count 8*m on range-m streams ==")
    print(f"  {'s':>6} {'m=1':>20} {'m=4':>20} {'tanh(4s)':>9}")
    for s in np.linspace(-2, 2, 9):
        cols = []
        for m in (1, 4):
            cfg = FsmConfig(8 * m)
            if abs(s) > m:
                cols.append(f"{'(out of range)':>20}")
                continue
            seeds = expand_seeds(int(10 * s) + 100 * m, m, width)
            st = b2is(float(s), m, n_bits,
                      [Lfsr(width, int(x)) for x in seeds], fmt=BIPOLAR)
            emp = decode(nstanh(cfg, st))
            orc = oracle_mean(cfg, b2is_step_dist(m, float(s)))
            cols.append(f"{emp:+.3f} (oracle {orc:+.3f})")
        print(f"  {s:+.2f} {cols[0]:>20} {cols[1]:>20} "
              f"{math.tanh(4 * s):+.3f}")
    print("  the m=1 machine saturates at |s|=1; m=4 keeps tracking")

    print("\n== exp curves: output ~ exp(-2Gs) for s > 0 ==")
    m, gain = 2, 2
    cfg = FsmConfig(32 * m, mode="exp", gain=m * 1)
    print(f"  {'s':>5} {'empirical':>10} {'oracle':>8} {'exp(-2s)':>9}")
    for s in (0.1, 0.25, 0.5, 1.0, 1.5):
        seeds = expand_seeds(int(100 * s), m, width)
        st = b2is(s, m, n_bits, [Lfsr(width, int(x)) for x in seeds],
                  fmt=BIPOLAR)
        emp = decode(nsexp(cfg, st))
        orc = oracle_mean(cfg, b2is_step_dist(m, s))
        print(f"  {s:5.2f} {emp:10.4f} {orc:8.4f} {math.exp(-2 * s):9.4f}")


if __name__ == "__main__":
    main()
