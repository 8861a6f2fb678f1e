"""Train a small network, then run it on both inference engines.

The stochastic engine trades element range against stream length: the
same accuracy is reached with (m=1, N=1024), (m=2, N=512) and
(m=4, N=256), i.e. a 4x latency reduction at constant precision.
"""
import numpy as np

from iscsim import NetworkConfig, StochasticEngine, fixed_point_infer
from iscsim.datasets import as_uint8, blob_dataset
from iscsim.network import calibrate_range, mlp_accuracy, train_small_mlp


def main():
    x, y = blob_dataset(4, 16, 60, seed=11)
    xtr, ytr, xte, yte = x[:160], y[:160], x[160:], y[160:]
    net = train_small_mlp(xtr, ytr, [16, 8, 8, 4], epochs=2000, lr=2.0,
                          seed=5)
    print(f"fixed-point holdout accuracy: {mlp_accuracy(net, xte, yte):.3f}")

    images = as_uint8(xte)
    print("\n== range vs stream length ==")
    for m, n in ((1, 1024), (2, 512), (4, 256)):
        engine = StochasticEngine(
            net, NetworkConfig(m_weight=m, stream_length=n), master_seed=7)
        agree = correct = 0
        for img, lab in zip(images, yte):
            pred = engine.infer(img).label
            agree += pred == int(np.argmax(fixed_point_infer(img, net)))
            correct += pred == int(lab)
        print(f"  m={m} N={n:4d}: accuracy {correct / len(yte):.3f}, "
              f"agreement with fixed point {agree / len(yte):.3f}")

    print("\n== calibrated nonlinearity ranges ==")
    cfg = NetworkConfig(m_weight=4, stream_length=256)
    for layer in (0, 1):
        mp = calibrate_range(net, layer, images[:10], cfg, master_seed=7)
        print(f"  hidden layer {layer + 1}: 95% of adder outputs within "
              f"+/-{mp}")


if __name__ == "__main__":
    main()
