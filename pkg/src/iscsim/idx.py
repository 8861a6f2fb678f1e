"""Reader/writer for the IDX format used by the MNIST distribution."""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    pass


def read_idx_images(path: str | Path) -> np.ndarray:
    """Returns a [n, rows*cols] uint8 array."""
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise IdxFormatError(f"{path}: truncated IDX image file")
    magic, n, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGES_MAGIC:
        raise IdxFormatError(f"{path}: bad magic {magic:#010x}")
    body = np.frombuffer(data, dtype=np.uint8, offset=16)
    if body.size != n * rows * cols:
        raise IdxFormatError(f"{path}: payload size mismatch")
    return body.reshape(n, rows * cols).copy()


def read_idx_labels(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise IdxFormatError(f"{path}: truncated IDX label file")
    magic, n = struct.unpack(">II", data[:8])
    if magic != LABELS_MAGIC:
        raise IdxFormatError(f"{path}: bad magic {magic:#010x}")
    body = np.frombuffer(data, dtype=np.uint8, offset=8)
    if body.size != n:
        raise IdxFormatError(f"{path}: payload size mismatch")
    return body.copy()


def write_idx_images(path: str | Path, images: np.ndarray,
                     rows: int, cols: int) -> None:
    images = np.asarray(images, dtype=np.uint8)
    if images.ndim != 2 or images.shape[1] != rows * cols:
        raise IdxFormatError("images must be [n, rows*cols]")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IMAGES_MAGIC, images.shape[0], rows, cols))
        fh.write(images.tobytes())


def write_idx_labels(path: str | Path, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", LABELS_MAGIC, labels.size))
        fh.write(labels.tobytes())
