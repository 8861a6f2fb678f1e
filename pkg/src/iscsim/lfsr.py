"""Fibonacci LFSR pseudorandom generators and seed management.

All stream generation in this package is driven by maximal-length
Fibonacci LFSRs: the register content (a nonzero integer) is the value
handed to the comparator, and one shift step is performed per cycle.
"""
from __future__ import annotations

import math

import numpy as np

# Maximal-length tap positions (1-based bit indices of the feedback
# polynomial) for register widths 3..16.  Each set yields period 2^w - 1.
MAXIMAL_TAPS: dict[int, tuple[int, ...]] = {
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
}

DEFAULT_WIDTH = 11


class InvalidLfsrState(ValueError):
    """Raised when an LFSR would be constructed with a zero register."""


def tap_mask(width: int, taps: tuple[int, ...] | None = None) -> int:
    if taps is None:
        if width not in MAXIMAL_TAPS:
            raise ValueError(f"no built-in maximal taps for width {width}")
        taps = MAXIMAL_TAPS[width]
    mask = 0
    for t in taps:
        if not 1 <= t <= width:
            raise ValueError(f"tap position {t} outside 1..{width}")
        mask |= 1 << (t - 1)
    return mask


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def leap(width: int) -> int:
    """Elementary shifts per emitted value: the smallest step >= width
    that is coprime to the period 2^width - 1.

    A full register turnover between emitted values removes the serial
    correlation of the comparator output (adjacent raw states share all
    but one bit); coprimality keeps the emitted sequence a permutation
    of the nonzero states, preserving full-period exactness.
    """
    period = (1 << width) - 1
    d = width
    while math.gcd(d, period) != 1:
        d += 1
    return d


class Lfsr:
    """A leap-forward Fibonacci LFSR.

    The register state is never zero; construction rejects zero seeds and
    the maximal-length feedback keeps the orbit inside the nonzero states.
    Each emitted value advances the register by leap(width) elementary
    shifts, so successive values share no register bits.
    """

    __slots__ = ("width", "mask", "state", "leap")

    def __init__(self, width: int = DEFAULT_WIDTH, seed: int = 1,
                 taps: tuple[int, ...] | None = None):
        if not 0 < seed < (1 << width):
            raise InvalidLfsrState(
                f"seed must be a nonzero {width}-bit value, got {seed}")
        self.width = width
        self.mask = tap_mask(width, taps)
        self.state = int(seed)
        self.leap = leap(width)

    @property
    def period(self) -> int:
        return (1 << self.width) - 1

    def next(self) -> int:
        """Return the current register value and advance one step."""
        value = self.state
        full = (1 << self.width) - 1
        for _ in range(self.leap):
            fb = _parity(self.state & self.mask)
            self.state = ((self.state << 1) | fb) & full
        return value

    def values(self, n: int) -> np.ndarray:
        """The next n register values as an array (advances the register)."""
        out = np.empty(n, dtype=np.uint32)
        for i in range(n):
            out[i] = self.next()
        return out

    def copy(self) -> "Lfsr":
        c = Lfsr.__new__(Lfsr)
        c.width, c.mask, c.state, c.leap = (self.width, self.mask,
                                            self.state, self.leap)
        return c


def lfsr_next(state: Lfsr) -> tuple[Lfsr, int]:
    """Functional single step: returns (advanced register, emitted value)."""
    nxt = state.copy()
    value = nxt.next()
    return nxt, value


_WHITEN_A1 = 0x45D9F3B
_WHITEN_A2 = 0x119DE1F3


def whiten(values, width: int):
    """Fixed multiply-xorshift bijection on w-bit values.

    Consecutive LFSR registers share all but `leap` bits, which leaves
    threshold comparators serially correlated; hashing the register
    through an odd-multiplier permutation removes that structure.  As a
    bijection fixing 0 it maps the nonzero states onto themselves, so
    full-period counting arguments are unaffected.
    """
    full = (1 << width) - 1
    a1 = (_WHITEN_A1 & full) | 1
    a2 = (_WHITEN_A2 & full) | 1
    v = np.asarray(values, dtype=np.int64) if not np.isscalar(values) else int(values)
    v = (v * a1) & full
    v = v ^ (v >> (width // 2))
    v = (v * a2) & full
    v = v ^ (v >> ((2 * width) // 3))
    return v


def lfsr_values_bank(seeds: np.ndarray, width: int, n: int) -> np.ndarray:
    """Run many LFSRs of the same width in lockstep.

    Returns a [len(seeds), n] uint32 array of register values.  Vectorized
    over registers; the per-cycle loop is the only Python-level loop.
    """
    seeds = np.asarray(seeds, dtype=np.uint32)
    if np.any(seeds == 0) or np.any(seeds >= (1 << width)):
        raise InvalidLfsrState("bank seeds must be nonzero width-bit values")
    mask = np.uint32(tap_mask(width))
    full = np.uint32((1 << width) - 1)
    state = seeds.copy()
    out = np.empty((len(seeds), n), dtype=np.uint32)
    step = leap(width)
    for i in range(n):
        out[:, i] = state
        for _ in range(step):
            v = state & mask
            v ^= v >> np.uint32(16)
            v ^= v >> np.uint32(8)
            v ^= v >> np.uint32(4)
            v ^= v >> np.uint32(2)
            v ^= v >> np.uint32(1)
            state = ((state << np.uint32(1)) | (v & np.uint32(1))) & full
    return out


def expand_seeds(master_seed: int, count: int, width: int = DEFAULT_WIDTH) -> np.ndarray:
    """Expand one master seed into `count` nonzero per-stream seeds.

    Seeds within one permutation block of size 2^width - 1 are distinct;
    blocks are reshuffled independently when more seeds are requested.
    """
    rng = np.random.Generator(np.random.PCG64(master_seed))
    nstates = (1 << width) - 1
    blocks = []
    remaining = count
    while remaining > 0:
        perm = rng.permutation(nstates) + 1
        blocks.append(perm[:remaining])
        remaining -= len(perm[:remaining])
    return np.concatenate(blocks).astype(np.uint32) if blocks else np.empty(0, np.uint32)
