"""Gate-level stochastic arithmetic.

Conventional SC: AND / XNOR multipliers, MUX scaled adder, OR adder and
the accumulative parallel counter.  Integral SC: element-wise products
and exact integer additions with range widening.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .streams import (BIPOLAR, UNIPOLAR, BinaryStream, IntegerStream,
                      StreamFormatError)


def _check_binary(a: BinaryStream, b: BinaryStream, fmt: str | None = None) -> None:
    if len(a) != len(b):
        raise StreamFormatError(f"length mismatch: {len(a)} vs {len(b)}")
    if a.format != b.format:
        raise StreamFormatError(f"format mismatch: {a.format} vs {b.format}")
    if fmt is not None and a.format != fmt:
        raise StreamFormatError(f"expected {fmt} streams, got {a.format}")


def mul_unipolar(a: BinaryStream, b: BinaryStream) -> BinaryStream:
    """Unipolar product: bit-wise AND.  Needs independent operands."""
    _check_binary(a, b, UNIPOLAR)
    return BinaryStream(a.bits & b.bits, UNIPOLAR)


def mul_bipolar(a: BinaryStream, b: BinaryStream) -> BinaryStream:
    """Bipolar product: bit-wise XNOR.  Needs independent operands."""
    _check_binary(a, b, BIPOLAR)
    return BinaryStream((~(a.bits ^ b.bits)) & 1, BIPOLAR)


def scaled_add(a: BinaryStream, b: BinaryStream, select: BinaryStream) -> BinaryStream:
    """MUX adder: out decodes to (a+b)/2 when select decodes to 0.5."""
    _check_binary(a, b)
    if len(select) != len(a):
        raise StreamFormatError("select length mismatch")
    s = select.bits
    return BinaryStream(np.where(s == 1, a.bits, b.bits), a.format)


def or_add(a: BinaryStream, b: BinaryStream) -> BinaryStream:
    """OR adder: out = a + b - a*b; approximates the sum for small inputs."""
    _check_binary(a, b, UNIPOLAR)
    return BinaryStream(a.bits | b.bits, UNIPOLAR)


@dataclass(frozen=True)
class ApcAccumulator:
    """Accumulative parallel counter; its output is plain binary and
    terminal for the stochastic pipeline."""

    n_inputs: int
    count: int = 0
    cycles: int = 0

    def __post_init__(self):
        if self.count > self.n_inputs * self.cycles:
            raise ValueError("count exceeds n_inputs * cycles")


def apc_step(acc: ApcAccumulator, bits: np.ndarray) -> ApcAccumulator:
    """One clock: add the popcount of the parallel input bits."""
    bits = np.asarray(bits)
    if bits.size != acc.n_inputs:
        raise StreamFormatError(
            f"expected {acc.n_inputs} parallel bits, got {bits.size}")
    return ApcAccumulator(acc.n_inputs, acc.count + int(bits.sum()),
                          acc.cycles + 1)


def int_mul(s1: IntegerStream, s2: IntegerStream) -> IntegerStream:
    """Element-wise integer product; ranges multiply, scales multiply."""
    if len(s1) != len(s2):
        raise StreamFormatError(f"length mismatch: {len(s1)} vs {len(s2)}")
    if s1.format != s2.format:
        raise StreamFormatError(f"format mismatch: {s1.format} vs {s2.format}")
    return IntegerStream(s1.elements * s2.elements, s1.m * s2.m,
                         s1.format, s1.scale * s2.scale)


def int_mul_binary(s: IntegerStream, x: BinaryStream) -> IntegerStream:
    """Gate an integer stream with a unipolar bit stream.

    element_i = x_i ? s_i : 0 — for two's-complement elements this is a
    bit-wise AND with the replicated gating bit.  Range is unchanged.
    """
    if len(s) != len(x):
        raise StreamFormatError(f"length mismatch: {len(s)} vs {len(x)}")
    if x.format != UNIPOLAR:
        raise StreamFormatError("gating stream must be unipolar")
    return IntegerStream(np.where(x.bits == 1, s.elements, 0),
                         s.m, s.format, s.scale)


def int_add(s1: IntegerStream, s2: IntegerStream) -> IntegerStream:
    """Exact integer addition; ranges add, decode is the sum of decodes."""
    if len(s1) != len(s2):
        raise StreamFormatError(f"length mismatch: {len(s1)} vs {len(s2)}")
    if s1.format != s2.format:
        raise StreamFormatError(f"format mismatch: {s1.format} vs {s2.format}")
    if s1.scale != s2.scale:
        raise StreamFormatError(f"scale mismatch: {s1.scale} vs {s2.scale}")
    return IntegerStream(s1.elements + s2.elements, s1.m + s2.m,
                         s1.format, s1.scale)


def tree_add(streams: Sequence[IntegerStream]) -> IntegerStream:
    """Left-balanced pairwise fold of int_add.

    The sum is exact so the fold order cannot change the result; a fixed
    order keeps intermediate ranges reproducible.
    """
    if not streams:
        raise StreamFormatError("tree_add needs at least one stream")
    level = list(streams)
    while len(level) > 1:
        nxt = [int_add(level[i], level[i + 1])
               for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]
