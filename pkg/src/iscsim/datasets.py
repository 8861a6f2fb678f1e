"""Deterministic synthetic datasets for desk-scale experiments."""
from __future__ import annotations

import numpy as np


def xor_dataset() -> tuple[np.ndarray, np.ndarray]:
    x = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    return x, y


def blob_dataset(n_classes: int, n_features: int, n_per_class: int,
                 seed: int, spread: float = 0.12) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian blobs with per-class centers, clipped to [0, 1)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = rng.uniform(0.15, 0.85, size=(n_classes, n_features))
    xs, ys = [], []
    for c in range(n_classes):
        pts = centers[c] + rng.normal(0, spread, size=(n_per_class, n_features))
        xs.append(np.clip(pts, 0.0, 255.0 / 256.0))
        ys.append(np.full(n_per_class, c))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    order = rng.permutation(len(y))
    return x[order], y[order]


def as_uint8(x: np.ndarray) -> np.ndarray:
    """Unit-interval features to 8-bit pixels on the /256 grid."""
    return np.clip(np.floor(np.asarray(x) * 256.0), 0, 255).astype(np.uint8)
