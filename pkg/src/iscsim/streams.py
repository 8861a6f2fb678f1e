"""Stream value carriers and binary/integer stream generation.

Two carriers exist: BinaryStream (bits, unipolar or bipolar) and
IntegerStream (small integers with a range parameter m and an optional
implicit scale).  Generation goes through an LFSR + comparator (b2s) or
m of them plus a column adder (b2is).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO, Union

import numpy as np

from .lfsr import Lfsr, whiten

UNIPOLAR = "unipolar"
BIPOLAR = "bipolar"


class StreamFormatError(ValueError):
    """Stream length/format mismatch between operands."""


class DomainError(ValueError):
    """Input value outside the encodable range."""


@dataclass(frozen=True)
class BinaryStream:
    """A length-N sequence of bits with an encoding format."""

    bits: np.ndarray
    format: str = UNIPOLAR

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise StreamFormatError("bits must be one-dimensional")
        if bits.size and bits.max() > 1:
            raise StreamFormatError("bits must be 0/1")
        if self.format not in (UNIPOLAR, BIPOLAR):
            raise StreamFormatError(f"unknown format {self.format!r}")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return self.bits.size


@dataclass(frozen=True)
class IntegerStream:
    """A length-N sequence of integers in [0,m] or [-m,m], plus a scale.

    The decoded value is mean(elements) * scale; scale is 1 unless the
    stream was generated with implicit scaling.
    """

    elements: np.ndarray
    m: int
    format: str = UNIPOLAR
    scale: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=np.int32)
        if el.ndim != 1:
            raise StreamFormatError("elements must be one-dimensional")
        if self.m < 1:
            raise StreamFormatError("range parameter m must be >= 1")
        if self.format not in (UNIPOLAR, BIPOLAR):
            raise StreamFormatError(f"unknown format {self.format!r}")
        lo = -self.m if self.format == BIPOLAR else 0
        if el.size and (el.min() < lo or el.max() > self.m):
            raise StreamFormatError(
                f"elements outside [{lo}, {self.m}] for {self.format} stream")
        if self.scale <= 0:
            raise StreamFormatError("scale must be positive")
        object.__setattr__(self, "elements", el)
        object.__setattr__(self, "scale", Fraction(self.scale))

    def __len__(self) -> int:
        return self.elements.size


Stream = Union[BinaryStream, IntegerStream]


def _threshold(p: float, bits: int) -> int:
    return int(round(p * (1 << bits)))


def b2s(x: float, n_bits: int, lfsr: Lfsr, fmt: str = UNIPOLAR,
        threshold_bits: int | None = None) -> BinaryStream:
    """Binary-to-stochastic conversion: bit_i = [lfsr_i < round(p * 2^w)].

    Unipolar x must lie in [0,1]; bipolar x in [-1,1] is mapped through
    p = (x+1)/2.  Ties at the comparator are resolved by the rounding of
    the threshold, so full-period ones-counts are exact integers.
    """
    if fmt == UNIPOLAR:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"unipolar value {x} outside [0, 1]")
        p = x
    elif fmt == BIPOLAR:
        if not -1.0 <= x <= 1.0:
            raise DomainError(f"bipolar value {x} outside [-1, 1]")
        p = (x + 1.0) / 2.0
    else:
        raise StreamFormatError(f"unknown format {fmt!r}")
    tb = lfsr.width if threshold_bits is None else threshold_bits
    t = _threshold(p, tb)
    values = whiten(lfsr.values(n_bits), lfsr.width)
    if tb != lfsr.width:
        values = values >> (lfsr.width - tb)
    return BinaryStream((values < t).astype(np.uint8), fmt)


def b2is(s: float, m: int, n_bits: int, lfsrs: Sequence[Lfsr],
         implicit: bool = False, fmt: str = UNIPOLAR,
         scale: Fraction | None = None) -> IntegerStream:
    """Binary-to-integer-stochastic conversion: column-wise sum of m streams.

    Explicit mode splits s equally over the m substreams (s in [0,m] or
    [-m,m]); implicit mode encodes s directly in each substream (s in
    [0,1] or [-1,1]) and declares scale 1/m.  A caller-supplied scale
    generalizes this: each substream encodes s / (m * scale).
    """
    if len(lfsrs) != m:
        raise StreamFormatError(f"need {m} generators, got {len(lfsrs)}")
    if scale is None:
        scale = Fraction(1, m) if implicit else Fraction(1)
    sub = s / (m * float(scale))
    cols = np.zeros(n_bits, dtype=np.int32)
    for gen in lfsrs:
        cols += b2s(sub, n_bits, gen, fmt=fmt).bits
    if fmt == BIPOLAR:
        cols = 2 * cols - m
    return IntegerStream(cols, m, fmt, scale)


def decode_exact(stream: Stream) -> Fraction:
    """Decoded stream value as an exact rational."""
    if len(stream) == 0:
        raise StreamFormatError("cannot decode an empty stream")
    if isinstance(stream, BinaryStream):
        mean = Fraction(int(stream.bits.sum()), len(stream))
        return mean if stream.format == UNIPOLAR else 2 * mean - 1
    total = int(np.sum(stream.elements, dtype=np.int64))
    return Fraction(total, len(stream)) * stream.scale


def decode(stream: Stream) -> float:
    """Decoded stream value as a float (see decode_exact)."""
    return float(decode_exact(stream))


def dump_stream(stream: Stream, fh: TextIO) -> None:
    """Debug dump: header `format m implicit_scale length`, one element per line."""
    if isinstance(stream, BinaryStream):
        m, scale, data = 1, Fraction(1), stream.bits
    else:
        m, scale, data = stream.m, stream.scale, stream.elements
    fh.write(f"{stream.format} {m} {scale} {len(stream)}\n")
    for v in data:
        fh.write(f"{int(v)}\n")


def load_stream(fh: TextIO) -> Stream:
    """Inverse of dump_stream.  m == 1 with unit scale loads as BinaryStream
    when all elements are bits."""
    fmt, m_s, scale_s, n_s = fh.readline().split()
    m, n = int(m_s), int(n_s)
    scale = Fraction(scale_s)
    data = np.array([int(fh.readline()) for _ in range(n)], dtype=np.int32)
    if m == 1 and scale == 1 and data.size and data.min() >= 0 and data.max() <= 1:
        return BinaryStream(data.astype(np.uint8), fmt)
    return IntegerStream(data, m, fmt, scale)
