"""Exact stationary analysis of the saturating-counter chains.

The FSM nonlinearities are birth-death Markov chains on {0..K-1} with
multi-step jumps and clamping at both ends.  This module computes their
stationary distribution, the expected output for a given output rule,
and the variance of the length-N time average — the oracle used to
bound empirical transfer values.
"""
from __future__ import annotations

import math

import numpy as np

StepDist = dict[int, float]


def binary_step_dist(p_one: float) -> StepDist:
    """Step distribution of the conventional chain: +1 w.p. p, else -1."""
    return {+1: p_one, -1: 1.0 - p_one}


def b2is_step_dist(m: int, s: float, bipolar: bool = True,
                   scale: float = 1.0) -> StepDist:
    """Element distribution of an explicitly-split b2is stream.

    Each of the m substreams is Bernoulli with the equal-split success
    probability; the column sum is binomial, recentered for bipolar.
    """
    sub = s / (m * scale)
    q = (sub + 1.0) / 2.0 if bipolar else sub
    if not -1e-12 <= q <= 1 + 1e-12:
        raise ValueError(f"substream probability {q} outside [0,1]")
    q = min(max(q, 0.0), 1.0)
    dist: StepDist = {}
    for k in range(m + 1):
        prob = math.comb(m, k) * q**k * (1 - q) ** (m - k)
        step = 2 * k - m if bipolar else k
        dist[step] = dist.get(step, 0.0) + prob
    return dist


def transition_matrix(n_states: int, steps: StepDist) -> np.ndarray:
    """Row-stochastic matrix of the clamped counter chain."""
    P = np.zeros((n_states, n_states))
    for c in range(n_states):
        for jump, prob in steps.items():
            nxt = min(max(c + jump, 0), n_states - 1)
            P[c, nxt] += prob
    return P


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, sum(pi) = 1 by least squares."""
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def birth_death_stationary(n_states: int, p_up: float) -> np.ndarray:
    """Closed form for the +/-1 chain: pi_k proportional to (p/q)^k.

    Independent of transition_matrix/stationary_distribution; used to
    cross-check them.
    """
    if p_up in (0.0, 1.0):
        pi = np.zeros(n_states)
        pi[-1 if p_up == 1.0 else 0] = 1.0
        return pi
    r = p_up / (1.0 - p_up)
    pi = r ** np.arange(n_states)
    return pi / pi.sum()


def output_indicator(n_states: int, mode: str, offset: int, gain: int = 1) -> np.ndarray:
    """Per-state output bit: tanh fires above the offset, exp fires while
    the counter is below the top `gain` states."""
    states = np.arange(n_states)
    if mode == "tanh":
        return (states > offset).astype(float)
    if mode == "exp":
        return (states < n_states - gain).astype(float)
    raise ValueError(f"unknown mode {mode!r}")


def stationary_output_mean(n_states: int, steps: StepDist, f: np.ndarray) -> float:
    """E_pi[f]: stationary probability that the output bit is 1."""
    P = transition_matrix(n_states, steps)
    pi = stationary_distribution(P)
    return float(pi @ f)


def time_average_stats(n_states: int, steps: StepDist, f: np.ndarray,
                       initial_state: int, n_cycles: int,
                       max_lag: int = 2048) -> tuple[float, float]:
    """Expected value and std of the length-N output-bit average.

    The mean accounts for warm-up from the given initial state exactly;
    the variance uses the stationary autocovariance series truncated once
    it has decayed below 1e-12.
    """
    P = transition_matrix(n_states, steps)
    pi = stationary_distribution(P)
    mu = float(pi @ f)

    # Exact finite-N mean from the initial state.  The output bit of
    # cycle i observes the counter after update i, hence powers 1..N.
    dist = np.zeros(n_states)
    dist[initial_state] = 1.0
    total = 0.0
    for _ in range(n_cycles):
        dist = dist @ P
        total += float(dist @ f)
    mean_n = total / n_cycles

    # Stationary autocovariance c_d = pi . (f * P^d f) - mu^2.
    var0 = float(pi @ (f * f)) - mu * mu
    acc = var0
    v = f.copy()
    for d in range(1, min(max_lag, n_cycles)):
        v = P @ v
        c = float(pi @ (f * v)) - mu * mu
        acc += 2.0 * (1.0 - d / n_cycles) * c
        if abs(c) < 1e-12 and d > 8:
            break
    var = max(acc / n_cycles, 0.0)
    return mean_n, math.sqrt(var)
