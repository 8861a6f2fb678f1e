"""Two's-complement fixed-point values for weights and activations."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

WEIGHT_TOTAL_BITS = 10
WEIGHT_FRAC_BITS = 7  # range +/-4 with 10 total bits


@dataclass(frozen=True)
class FixedPointValue:
    raw: int
    frac_bits: int = WEIGHT_FRAC_BITS
    total_bits: int = WEIGHT_TOTAL_BITS

    def __post_init__(self):
        lo, hi = raw_bounds(self.total_bits)
        if not lo <= self.raw <= hi:
            raise ValueError(f"raw code {self.raw} outside [{lo}, {hi}]")

    @property
    def value(self) -> float:
        return self.raw / (1 << self.frac_bits)


def raw_bounds(total_bits: int) -> tuple[int, int]:
    return -(1 << (total_bits - 1)), (1 << (total_bits - 1)) - 1


def quantize(x: float, frac_bits: int = WEIGHT_FRAC_BITS,
             total_bits: int = WEIGHT_TOTAL_BITS) -> FixedPointValue:
    """Round-to-nearest onto the fixed-point grid, saturating at the ends."""
    return FixedPointValue(int(quantize_array(np.array([x]), frac_bits, total_bits)[0]),
                           frac_bits, total_bits)


def quantize_array(a: np.ndarray, frac_bits: int = WEIGHT_FRAC_BITS,
                   total_bits: int = WEIGHT_TOTAL_BITS) -> np.ndarray:
    """Vector quantization to raw integer codes (int32)."""
    lo, hi = raw_bounds(total_bits)
    raw = np.rint(np.asarray(a, dtype=np.float64) * (1 << frac_bits))
    n_clip = int(np.count_nonzero((raw < lo) | (raw > hi)))
    if n_clip:
        log.warning("clamping %d values outside the representable range", n_clip)
    return np.clip(raw, lo, hi).astype(np.int32)


def dequantize_array(raw: np.ndarray, frac_bits: int = WEIGHT_FRAC_BITS) -> np.ndarray:
    return np.asarray(raw, dtype=np.float64) / (1 << frac_bits)
