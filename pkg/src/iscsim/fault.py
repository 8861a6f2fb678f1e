"""Bit-deviation injection modeling quasi-synchronous operation.

Timing violations are abstracted as i.i.d. bit flips: on the stochastic
engine they hit hidden-layer output bits at a per-layer rate; on the
fixed-point engine they hit every bit of the quantized activation words.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .fixedpoint import raw_bounds
from .network import (LayerWeights, NetworkConfig, StochasticEngine, _sigmoid,
                      pixels_to_unit)

STREAM_BITS = "neuron-output-bits"
WORD_BITS = "fixed-point-word-bits"

SWEEP_HEADER = ["p1", "p2", "p3", "stream_length", "seed", "error_rate"]


@dataclass
class DeviationProfile:
    """Per-layer deviation rates and an owned RNG stream."""

    rates: tuple[float, ...]
    target: str = STREAM_BITS
    seed: int = 0

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.rates):
            raise ValueError("deviation rates must lie in [0, 1]")
        if self.target not in (STREAM_BITS, WORD_BITS):
            raise ValueError(f"unknown target {self.target!r}")
        self._rngs = {}

    def rate(self, layer_index: int) -> float:
        if layer_index < len(self.rates):
            return self.rates[layer_index]
        return 0.0

    def _rng(self, layer_index: int) -> np.random.Generator:
        if layer_index not in self._rngs:
            self._rngs[layer_index] = np.random.Generator(
                np.random.PCG64((self.seed << 8) + layer_index))
        return self._rngs[layer_index]

    def flip_bits(self, bits: np.ndarray, layer_index: int) -> np.ndarray:
        p = self.rate(layer_index)
        if p == 0.0:
            return bits
        flips = self._rng(layer_index).random(bits.shape) < p
        return bits ^ flips.astype(bits.dtype)

    def flip_words(self, raw: np.ndarray, total_bits: int,
                   layer_index: int) -> np.ndarray:
        p = self.rate(layer_index)
        if p == 0.0:
            return raw
        rng = self._rng(layer_index)
        out = raw.astype(np.int64)
        lo, hi = raw_bounds(total_bits)
        span = hi - lo + 1
        offs = out - lo  # unsigned view of the two's-complement word
        for bit in range(total_bits):
            mask = rng.random(out.shape) < p
            offs = np.where(mask, offs ^ (1 << bit), offs)
        return (offs % span) + lo


def inject(value, rate: float, rng: np.random.Generator,
           total_bits: int | None = None):
    """Flip each bit independently with probability `rate`.

    With total_bits=None the value is a 0/1 bit array (stochastic mode);
    otherwise it is a raw two's-complement word array (fixed-point mode).
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must lie in [0, 1]")
    prof = DeviationProfile((rate,), seed=0)
    prof._rngs[0] = rng
    if total_bits is None:
        return prof.flip_bits(np.asarray(value), 0)
    return prof.flip_words(np.asarray(value), total_bits, 0)


def fixed_point_infer_faulty(image: np.ndarray, net: list[LayerWeights],
                             profile: DeviationProfile) -> np.ndarray:
    """Oracle forward pass with word-bit flips on hidden activations."""
    x = pixels_to_unit(image)
    for li, layer in enumerate(net[:-1]):
        x = _sigmoid(layer.w @ x + layer.b)
        frac = layer.frac_bits
        raw = np.rint(x * (1 << frac)).astype(np.int64)
        raw = profile.flip_words(raw, layer.total_bits, li)
        x = raw.astype(np.float64) / (1 << frac)
    return net[-1].w @ x + net[-1].b


def _error_rate_stochastic(engine: StochasticEngine, images: np.ndarray,
                           labels: np.ndarray,
                           profile: DeviationProfile | None) -> float:
    wrong = 0
    for image, label in zip(images, labels):
        if engine.infer(image, deviation=profile).label != int(label):
            wrong += 1
    return wrong / len(labels)


def _error_rate_fixed(net, images, labels, profile) -> float:
    wrong = 0
    for image, label in zip(images, labels):
        scores = fixed_point_infer_faulty(image, net, profile)
        if int(np.argmax(scores)) != int(label):
            wrong += 1
    return wrong / len(labels)


def fault_sweep(net: list[LayerWeights], base_cfg: NetworkConfig,
                p1_grid: Sequence[float], p2_grid: Sequence[float],
                lengths: Sequence[int], images: np.ndarray,
                labels: np.ndarray, seeds: Iterable[int],
                engine: str = "stochastic") -> list[dict]:
    """Grid sweep of misclassification rate vs deviation rates and N."""
    rows = []
    for n in lengths:
        cfg = NetworkConfig(m_weight=base_cfg.m_weight, stream_length=int(n),
                            n_tanh=base_cfg.n_tanh, m_prime=base_cfg.m_prime,
                            lfsr_width=base_cfg.lfsr_width)
        for seed in seeds:
            eng = (StochasticEngine(net, cfg, seed)
                   if engine == "stochastic" else None)
            for p1 in p1_grid:
                for p2 in p2_grid:
                    target = STREAM_BITS if engine == "stochastic" else WORD_BITS
                    prof = DeviationProfile((p1, p2), target=target, seed=seed)
                    if engine == "stochastic":
                        err = _error_rate_stochastic(eng, images, labels, prof)
                    else:
                        err = _error_rate_fixed(net, images, labels, prof)
                    rows.append({"p1": p1, "p2": p2, "p3": 0.0,
                                 "stream_length": int(n), "seed": int(seed),
                                 "error_rate": err})
    return rows


def sweep_csv(rows: list[dict], fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=SWEEP_HEADER)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: f"{row[k]:.10g}" if isinstance(row[k], float)
                         else row[k] for k in SWEEP_HEADER})
