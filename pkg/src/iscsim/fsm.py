"""Saturating-counter FSM nonlinearities.

Conventional streams drive the counter by +/-1 per bit; integer streams
drive it by their element value, clamped to [0, n_states-1].  tanh-mode
output is bipolar, exp-mode output is unipolar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import markov
from .lfsr import Lfsr, expand_seeds
from .streams import (BIPOLAR, UNIPOLAR, BinaryStream, IntegerStream,
                      StreamFormatError, b2is, decode)

TANH = "tanh"
EXP = "exp"


@dataclass(frozen=True)
class FsmConfig:
    """Counter geometry and output rule for one FSM instance.

    offset defaults to n_states/2 - 1 in tanh mode (output 1 strictly
    above it) and to n_states - gain - 1 in exp mode (output 1 at or
    below it, i.e. everywhere except the top `gain` states).  The
    initial state defaults to the middle of the counter.
    """

    n_states: int
    mode: str = TANH
    offset: int | None = None
    gain: int = 1
    initial_state: int | None = None

    def __post_init__(self):
        if self.mode not in (TANH, EXP):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n_states < 2:
            raise ValueError("n_states must be >= 2")
        if self.mode == TANH and self.n_states % 2:
            raise ValueError("tanh mode needs an even state count")
        if self.mode == EXP and not 1 <= self.gain < self.n_states:
            raise ValueError("gain must lie in [1, n_states)")
        if self.offset is None:
            off = (self.n_states // 2 - 1 if self.mode == TANH
                   else self.n_states - self.gain - 1)
            object.__setattr__(self, "offset", off)
        if not 0 <= self.offset < self.n_states:
            raise ValueError("offset outside the state range")
        if self.initial_state is None:
            object.__setattr__(self, "initial_state", self.n_states // 2)
        if not 0 <= self.initial_state < self.n_states:
            raise ValueError("initial state outside the state range")


def run_fsm(steps: np.ndarray, cfg: FsmConfig) -> np.ndarray:
    """Run the counter over a [rows, N] step array; returns output bits.

    The output bit of cycle i observes the counter after update i.
    """
    steps = np.atleast_2d(np.asarray(steps, dtype=np.int64))
    rows, n = steps.shape
    counter = np.full(rows, cfg.initial_state, dtype=np.int64)
    out = np.empty((rows, n), dtype=np.uint8)
    hi = cfg.n_states - 1
    for i in range(n):
        counter = np.clip(counter + steps[:, i], 0, hi)
        if cfg.mode == TANH:
            out[:, i] = counter > cfg.offset
        else:
            out[:, i] = counter <= cfg.offset
    return out


def _bipolar_steps(x_stream: BinaryStream) -> np.ndarray:
    if x_stream.format != BIPOLAR:
        raise StreamFormatError("FSM input stream must be bipolar")
    return 2 * x_stream.bits.astype(np.int64) - 1


def stanh(cfg: FsmConfig, x_stream: BinaryStream) -> BinaryStream:
    """Conventional FSM tanh: bipolar in, bipolar out, approx tanh(nx/2)."""
    if cfg.mode != TANH:
        raise StreamFormatError("stanh needs a tanh-mode config")
    return BinaryStream(run_fsm(_bipolar_steps(x_stream), cfg)[0], BIPOLAR)


def sexp(cfg: FsmConfig, x_stream: BinaryStream) -> BinaryStream:
    """Conventional FSM exponentiation: bipolar in, unipolar out,
    approx exp(-2Gx) for x > 0."""
    if cfg.mode != EXP:
        raise StreamFormatError("sexp needs an exp-mode config")
    return BinaryStream(run_fsm(_bipolar_steps(x_stream), cfg)[0], UNIPOLAR)


def _integer_steps(s_stream: IntegerStream) -> np.ndarray:
    if s_stream.format != BIPOLAR:
        raise StreamFormatError("integer FSM input stream must be bipolar")
    return s_stream.elements.astype(np.int64)


def nstanh(cfg: FsmConfig, s_stream: IntegerStream) -> BinaryStream:
    """Integer-stream tanh: counter jumps by the element value."""
    if cfg.mode != TANH:
        raise StreamFormatError("nstanh needs a tanh-mode config")
    return BinaryStream(run_fsm(_integer_steps(s_stream), cfg)[0], BIPOLAR)


def nsexp(cfg: FsmConfig, s_stream: IntegerStream) -> BinaryStream:
    """Integer-stream exponentiation with m-step transitions."""
    if cfg.mode != EXP:
        raise StreamFormatError("nsexp needs an exp-mode config")
    return BinaryStream(run_fsm(_integer_steps(s_stream), cfg)[0], UNIPOLAR)


def sigmoid_stream(s_stream: IntegerStream, cfg: FsmConfig) -> BinaryStream:
    """Sigmoid through tanh: the nstanh bit pattern reinterpreted as a
    unipolar stream decodes to (1 + tanh)/2."""
    bits = nstanh(cfg, s_stream)
    return BinaryStream(bits.bits, UNIPOLAR)


def oracle_mean(cfg: FsmConfig, steps: markov.StepDist) -> float:
    """Stationary expected decoded output of the chain under `steps`.

    Bipolar-decoded in tanh mode, unipolar in exp mode.
    """
    f = markov.output_indicator(cfg.n_states, cfg.mode, cfg.offset, cfg.gain)
    mean = markov.stationary_output_mean(cfg.n_states, steps, f)
    return 2 * mean - 1 if cfg.mode == TANH else mean


def fsm_transfer_curve(cfg: FsmConfig, m: int, s_grid: Iterable[float],
                       n_bits: int, master_seed: int,
                       lfsr_width: int = 16) -> list[tuple[float, float, float, float]]:
    """Sweep the transfer function: (s, empirical, oracle, analytic) rows.

    Inputs are explicitly-split b2is streams of range m; the config's
    state count must be m * n for the analytic column tanh(ns/2), and
    the gain must be m * G for exp(-2Gs).  Wide registers keep the
    stream length well below the generator period, which the sampling
    bound of the oracle comparison assumes.
    """
    grid = list(s_grid)
    seeds = expand_seeds(master_seed, m * len(grid), lfsr_width)
    rows = []
    for idx, s in enumerate(grid):
        gens = [Lfsr(lfsr_width, int(seeds[idx * m + k])) for k in range(m)]
        stream = b2is(s, m, n_bits, gens, fmt=BIPOLAR)
        steps = markov.b2is_step_dist(m, s, bipolar=True)
        if cfg.mode == TANH:
            empirical = decode(nstanh(cfg, stream))
            n_eff = cfg.n_states / m
            analytic = math.tanh(n_eff * s / 2.0)
        else:
            empirical = decode(nsexp(cfg, stream))
            g_eff = cfg.gain / m
            analytic = math.exp(-2.0 * g_eff * s) if s > 0 else 1.0
        rows.append((s, empirical, oracle_mean(cfg, steps), analytic))
    return rows


def transfer_curve_csv(rows: list[tuple[float, float, float, float]], fh) -> None:
    fh.write("s,empirical,oracle,analytic\n")
    for s, emp, orc, ana in rows:
        fh.write(f"{s:.10g},{emp:.10g},{orc:.10g},{ana:.10g}\n")
