#!/usr/bin/env python3
"""Offline MLP trainer exporting isc-weights-v1 weight files.

Trains a sigmoid feed-forward classifier with minibatch SGD on IDX-format
image/label data (MNIST layout), clips weights to [-4, 4], quantizes them
to 10-bit fixed-point codes with 7 fraction bits, and writes the JSON
interchange format consumed by the inference engine.  The engine is used
only through its public artifacts: the weight file and the command-line
validator.  Nothing here imports the engine package.

Usage:
    train.py --dims 784,100,200,10 --seed 1 --out weights.json \
             --mnist-dir data/ [--epochs 30] [--lr 0.2] [--batch 64]
"""
from __future__ import annotations

import argparse
import json
import logging
import struct
import subprocess
import sys
from pathlib import Path

import numpy as np

log = logging.getLogger("train")

WEIGHT_CLIP = 4.0
FRAC_BITS = 7
TOTAL_BITS = 10
FORMAT_TAG = "isc-weights-v1"

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"
TEST_IMAGES = "t10k-images-idx3-ubyte"
TEST_LABELS = "t10k-labels-idx1-ubyte"


def read_idx_images(path: Path) -> np.ndarray:
    data = path.read_bytes()
    magic, n, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != 0x00000803:
        raise ValueError(f"{path}: not an IDX image file")
    body = np.frombuffer(data, dtype=np.uint8, offset=16)
    if body.size != n * rows * cols:
        raise ValueError(f"{path}: truncated image payload")
    return body.reshape(n, rows * cols)


def read_idx_labels(path: Path) -> np.ndarray:
    data = path.read_bytes()
    magic, n = struct.unpack(">II", data[:8])
    if magic != 0x00000801:
        raise ValueError(f"{path}: not an IDX label file")
    body = np.frombuffer(data, dtype=np.uint8, offset=8)
    if body.size != n:
        raise ValueError(f"{path}: truncated label payload")
    return body


def _sigmoid(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


class Mlp:
    """Sigmoid hidden layers, affine output trained with softmax loss."""

    def __init__(self, dims: list[int], seed: int):
        rng = np.random.Generator(np.random.PCG64(seed))
        self.dims = dims
        self.ws = [rng.normal(0.0, 1.0 / np.sqrt(dims[i]),
                              size=(dims[i + 1], dims[i]))
                   for i in range(len(dims) - 1)]
        self.bs = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Scores for a [n, in_dim] batch."""
        a = x.T
        for i, (w, b) in enumerate(zip(self.ws, self.bs)):
            z = w @ a + b[:, None]
            a = z if i == len(self.ws) - 1 else _sigmoid(z)
        return a.T

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.forward(x), axis=1)

    def error_rate(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(self.predict(x) != y))

    def train_epoch(self, x: np.ndarray, y: np.ndarray, lr: float,
                    batch: int, rng: np.random.Generator) -> float:
        order = rng.permutation(len(y))
        total_loss = 0.0
        for start in range(0, len(y), batch):
            idx = order[start:start + batch]
            xb, yb = x[idx], y[idx]
            acts = [xb.T]
            for i, (w, b) in enumerate(zip(self.ws, self.bs)):
                z = w @ acts[-1] + b[:, None]
                acts.append(z if i == len(self.ws) - 1 else _sigmoid(z))
            zl = acts[-1] - acts[-1].max(axis=0, keepdims=True)
            p = np.exp(zl)
            p /= p.sum(axis=0, keepdims=True)
            onehot = np.zeros_like(p)
            onehot[yb, np.arange(len(yb))] = 1.0
            total_loss += float(-np.log(p[yb, np.arange(len(yb))]
                                        + 1e-30).sum())
            delta = (p - onehot) / len(yb)
            for i in reversed(range(len(self.ws))):
                gw = delta @ acts[i].T
                gb = delta.sum(axis=1)
                if i > 0:
                    a = acts[i]
                    delta = (self.ws[i].T @ delta) * a * (1 - a)
                self.ws[i] -= lr * gw
                self.bs[i] -= lr * gb
        return total_loss / len(y)


def quantize_codes(a: np.ndarray) -> np.ndarray:
    lo, hi = -(1 << (TOTAL_BITS - 1)), (1 << (TOTAL_BITS - 1)) - 1
    raw = np.rint(np.asarray(a, dtype=np.float64) * (1 << FRAC_BITS))
    return np.clip(raw, lo, hi).astype(int)


def export_weights(model: Mlp, path: Path) -> None:
    """Clip to the representable interval, quantize, write the JSON file."""
    layers = []
    for w, b in zip(model.ws, model.bs):
        wq = quantize_codes(np.clip(w, -WEIGHT_CLIP, WEIGHT_CLIP))
        bq = quantize_codes(np.clip(b, -WEIGHT_CLIP, WEIGHT_CLIP))
        layers.append({"w": wq.ravel().tolist(), "b": bq.tolist()})
    doc = {
        "format": FORMAT_TAG,
        "layer_dims": model.dims,
        "frac_bits": FRAC_BITS,
        "total_bits": TOTAL_BITS,
        "layers": layers,
    }
    path.write_text(json.dumps(doc))


def export_validate(path: Path,
                    validator: str = "iscsim") -> bool | None:
    """Round-trip the file through the engine's weight validator.

    Returns True/False for a verdict, or None (with a warning) when the
    validator binary is not installed.
    """
    try:
        result = subprocess.run(
            [validator, "infer", "--weights", str(path), "--validate-only"],
            capture_output=True, text=True)
    except FileNotFoundError:
        log.warning("validator %r not found; skipping export validation",
                    validator)
        return None
    if result.returncode != 0:
        log.error("export validation failed: %s",
                  (result.stderr or result.stdout).strip())
        return False
    return True


def load_dataset(mnist_dir: Path):
    xtr = read_idx_images(mnist_dir / TRAIN_IMAGES).astype(np.float64) / 256.0
    ytr = read_idx_labels(mnist_dir / TRAIN_LABELS).astype(np.int64)
    test_path = mnist_dir / TEST_IMAGES
    if test_path.exists():
        xte = read_idx_images(test_path).astype(np.float64) / 256.0
        yte = read_idx_labels(mnist_dir / TEST_LABELS).astype(np.int64)
    else:
        xte = yte = None
    return xtr, ytr, xte, yte


def train(dims: list[int], mnist_dir: Path, seed: int, epochs: int,
          lr: float, batch: int) -> tuple[Mlp, float | None]:
    xtr, ytr, xte, yte = load_dataset(mnist_dir)
    if xtr.shape[1] != dims[0]:
        raise ValueError(f"data has {xtr.shape[1]} features, "
                         f"--dims starts with {dims[0]}")
    model = Mlp(dims, seed)
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    for epoch in range(epochs):
        loss = model.train_epoch(xtr, ytr, lr, batch, rng)
        log.info("epoch %d/%d: loss %.4f", epoch + 1, epochs, loss)
    test_error = model.error_rate(xte, yte) if xte is not None else None
    if test_error is not None:
        log.info("final test error: %.4f", test_error)
    return model, test_error


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", required=True,
                        help="comma-separated layer sizes, e.g. 784,100,200,10")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True)
    parser.add_argument("--mnist-dir", default="data")
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--lr", type=float, default=0.2)
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--skip-validate", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    dims = [int(d) for d in args.dims.split(",")]
    mnist_dir = Path(args.mnist_dir)
    if not (mnist_dir / TRAIN_IMAGES).exists():
        log.error("training data not found under %s", mnist_dir)
        return 2
    model, test_error = train(dims, mnist_dir, args.seed, args.epochs,
                              args.lr, args.batch)
    out = Path(args.out)
    export_weights(model, out)
    log.info("wrote %s", out)
    if not args.skip_validate and export_validate(out) is False:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
