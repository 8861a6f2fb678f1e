"""isc-weights-v1 file format: JSON with raw fixed-point codes."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fixedpoint import raw_bounds
from .network import LayerWeights

FORMAT_TAG = "isc-weights-v1"


class WeightFileError(ValueError):
    pass


def save_weights(path: str | Path, net: list[LayerWeights]) -> None:
    dims = [net[0].in_dim] + [l.out_dim for l in net]
    doc = {
        "format": FORMAT_TAG,
        "layer_dims": dims,
        "frac_bits": net[0].frac_bits,
        "total_bits": net[0].total_bits,
        "layers": [
            {"w": layer.w_raw.ravel().tolist(), "b": layer.b_raw.tolist()}
            for layer in net
        ],
    }
    Path(path).write_text(json.dumps(doc))


def load_weights(path: str | Path) -> list[LayerWeights]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise WeightFileError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise WeightFileError(f"{path}: missing or wrong format tag "
                              f"(expected {FORMAT_TAG!r})")
    try:
        dims = [int(d) for d in doc["layer_dims"]]
        frac_bits = int(doc["frac_bits"])
        total_bits = int(doc["total_bits"])
        layers_doc = doc["layers"]
    except (KeyError, TypeError, ValueError) as e:
        raise WeightFileError(f"{path}: malformed header fields ({e})") from e
    if len(dims) < 2 or len(layers_doc) != len(dims) - 1:
        raise WeightFileError(f"{path}: layer_dims/layers inconsistency")
    lo, hi = raw_bounds(total_bits)
    net = []
    for i, ld in enumerate(layers_doc):
        in_dim, out_dim = dims[i], dims[i + 1]
        w = np.asarray(ld.get("w", []), dtype=np.int64)
        b = np.asarray(ld.get("b", []), dtype=np.int64)
        if w.size != in_dim * out_dim or b.size != out_dim:
            raise WeightFileError(
                f"{path}: layer {i} shape mismatch "
                f"(want {out_dim}x{in_dim} + {out_dim})")
        for name, arr in (("w", w), ("b", b)):
            if arr.size and (arr.min() < lo or arr.max() > hi):
                raise WeightFileError(
                    f"{path}: layer {i} {name} codes outside [{lo}, {hi}]")
        net.append(LayerWeights(w.reshape(out_dim, in_dim).astype(np.int32),
                                b.astype(np.int32), frac_bits, total_bits))
    return net
