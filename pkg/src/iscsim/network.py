"""Integer-stochastic neuron and multi-layer network inference.

The network is a feed-forward sigmoid MLP with an affine classification
layer.  Two engines evaluate it: a fixed-point oracle (quantized weights,
float arithmetic) and the cycle-accurate stochastic engine built from
b2s/b2is streams, AND-gated products, an exact tree adder and the
NStanh-based sigmoid.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fixedpoint import (WEIGHT_FRAC_BITS, WEIGHT_TOTAL_BITS, dequantize_array,
                         quantize_array)
from .fsm import TANH, FsmConfig, run_fsm
from .lfsr import DEFAULT_WIDTH, expand_seeds, lfsr_values_bank, whiten
from .streams import BIPOLAR, UNIPOLAR, BinaryStream, IntegerStream

log = logging.getLogger(__name__)

WEIGHT_RANGE = 4.0  # weights are confined to [-4, 4]


@dataclass(frozen=True)
class LayerWeights:
    """Quantized weight matrix [out, in] and bias vector as raw codes."""

    w_raw: np.ndarray
    b_raw: np.ndarray
    frac_bits: int = WEIGHT_FRAC_BITS
    total_bits: int = WEIGHT_TOTAL_BITS

    def __post_init__(self):
        w = np.asarray(self.w_raw, dtype=np.int32)
        b = np.asarray(self.b_raw, dtype=np.int32)
        if w.ndim != 2 or b.ndim != 1 or b.size != w.shape[0]:
            raise ValueError("weight matrix must be [out, in] with matching bias")
        object.__setattr__(self, "w_raw", w)
        object.__setattr__(self, "b_raw", b)

    @property
    def in_dim(self) -> int:
        return self.w_raw.shape[1]

    @property
    def out_dim(self) -> int:
        return self.w_raw.shape[0]

    @property
    def w(self) -> np.ndarray:
        return dequantize_array(self.w_raw, self.frac_bits)

    @property
    def b(self) -> np.ndarray:
        return dequantize_array(self.b_raw, self.frac_bits)


@dataclass(frozen=True)
class NetworkConfig:
    """Stochastic-engine parameters.

    m_weight must divide 4 so that the weight-stream scale 4/m maps onto
    an integer FSM factor n_tanh = 4/m_weight; m_prime is the calibrated
    adder-output range per hidden layer (None: derive per inference).
    """

    m_weight: int = 4
    stream_length: int = 256
    n_tanh: int | None = None
    m_prime: tuple[int, ...] | None = None
    lfsr_width: int | None = None

    def __post_init__(self):
        if self.m_weight not in (1, 2, 4):
            raise ValueError("m_weight must be one of 1, 2, 4")
        if self.stream_length < 1:
            raise ValueError("stream_length must be positive")
        if self.n_tanh is None:
            object.__setattr__(self, "n_tanh", 4 // self.m_weight)

    @property
    def weight_scale(self) -> Fraction:
        return Fraction(4, self.m_weight)


@dataclass(frozen=True)
class InferenceResult:
    label: int
    class_counts: np.ndarray
    cycles: int


def quantize_weights(w: np.ndarray, b: np.ndarray,
                     frac_bits: int = WEIGHT_FRAC_BITS,
                     total_bits: int = WEIGHT_TOTAL_BITS) -> LayerWeights:
    """Round a real-valued layer onto the fixed-point grid (clamping to
    the representable range with a logged warning)."""
    return LayerWeights(quantize_array(w, frac_bits, total_bits),
                        quantize_array(b, frac_bits, total_bits),
                        frac_bits, total_bits)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # exp overflow saturates to 0/1, which is the intended limit
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def pixels_to_unit(image: np.ndarray) -> np.ndarray:
    """8-bit pixels scaled by /256 so they land exactly on the stream grid;
    float inputs are taken as already unit-interval."""
    image = np.asarray(image)
    if image.dtype == np.uint8:
        return image.astype(np.float64) / 256.0
    return image.astype(np.float64)


def fixed_point_infer(image: np.ndarray, net: list[LayerWeights]) -> np.ndarray:
    """Oracle forward pass: sigmoid hidden layers, affine final layer."""
    x = pixels_to_unit(image)
    for layer in net[:-1]:
        if x.size != layer.in_dim:
            raise ValueError(f"input dim {x.size} != layer in_dim {layer.in_dim}")
        x = _sigmoid(layer.w @ x + layer.b)
    last = net[-1]
    if x.size != last.in_dim:
        raise ValueError(f"input dim {x.size} != layer in_dim {last.in_dim}")
    return last.w @ x + last.b


def _even_at_least_two(v: int) -> int:
    return max(2, v + (v % 2))


def symmetric_window(values: np.ndarray, coverage: float = 0.95) -> int:
    """Smallest m' >= 1 with P(|S| <= m') >= coverage."""
    a = np.abs(np.asarray(values, dtype=np.int64))
    if a.size == 0:
        raise ValueError("empty sample set")
    mp = 1
    total = a.size
    while np.count_nonzero(a <= mp) / total < coverage:
        mp += 1
    return mp


class StochasticEngine:
    """Cycle-accurate stochastic evaluation of a network.

    Weight element streams are derived from the master seed once and
    reused across images (regeneration would reproduce them bit for bit).
    One generator set of (in_dim + 1) * m LFSRs is shared by all neurons
    of a layer; pixels own a further in_dim generators.
    """

    def __init__(self, net: list[LayerWeights], cfg: NetworkConfig,
                 master_seed: int):
        self.net = net
        self.cfg = cfg
        self.master_seed = master_seed
        dims = [net[0].in_dim] + [l.out_dim for l in net]
        self.layer_dims = dims

        n_gens = dims[0] + sum((l.in_dim + 1) * cfg.m_weight for l in net)
        width = cfg.lfsr_width
        if width is None:
            width = DEFAULT_WIDTH
            while (1 << width) - 1 < n_gens and width < 16:
                width += 1
            if width != DEFAULT_WIDTH:
                log.info("widened LFSR width to %d for %d generators",
                         width, n_gens)
        self.width = width

        seeds = expand_seeds(master_seed, n_gens, width)
        self.pixel_seeds = seeds[:dims[0]]
        self._pixel_vals: np.ndarray | None = None
        ofs = dims[0]
        self._weight_streams: list[tuple[np.ndarray, np.ndarray]] = []
        n = cfg.stream_length
        m = cfg.m_weight
        for layer in net:
            k = (layer.in_dim + 1) * m
            layer_seeds = seeds[ofs:ofs + k]
            ofs += k
            vals = whiten(lfsr_values_bank(layer_seeds, width, n), width)
            vals = vals.reshape(layer.in_dim + 1, m, n)
            self._weight_streams.append(self._element_streams(layer, vals))

    def _weight_threshold(self, raw: np.ndarray, frac_bits: int) -> np.ndarray:
        # substream encodes w/4 in bipolar: p = (w/4 + 1)/2
        p = (dequantize_array(raw, frac_bits) / WEIGHT_RANGE + 1.0) / 2.0
        return np.rint(p * (1 << self.width)).astype(np.int64)

    def _element_streams(self, layer: LayerWeights,
                         vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Integer element streams S_w [out, in, N] and S_b [out, N]."""
        m, n = self.cfg.m_weight, self.cfg.stream_length
        t_w = self._weight_threshold(layer.w_raw, layer.frac_bits)
        t_b = self._weight_threshold(layer.b_raw, layer.frac_bits)
        vin = vals[:layer.in_dim].astype(np.int64)        # [in, m, N]
        s_w = np.empty((layer.out_dim, layer.in_dim, n), dtype=np.int8)
        chunk = max(1, 2_000_000 // max(1, layer.in_dim * m * n // 8))
        for j0 in range(0, layer.out_dim, chunk):
            j1 = min(j0 + chunk, layer.out_dim)
            b = vin[None, :, :, :] < t_w[j0:j1, :, None, None]
            s_w[j0:j1] = (2 * b.sum(axis=2) - m).astype(np.int8)
        vb = vals[layer.in_dim].astype(np.int64)          # [m, N]
        bb = vb[None, :, :] < t_b[:, None, None]
        s_b = (2 * bb.sum(axis=1) - m).astype(np.int16)
        return s_w, s_b

    def pixel_bits(self, image: np.ndarray) -> np.ndarray:
        """Unipolar pixel streams [in_dim, N] via shared B2S converters."""
        image = np.asarray(image)
        if image.size != self.layer_dims[0]:
            raise ValueError(f"image size {image.size} != input dim "
                             f"{self.layer_dims[0]}")
        if self._pixel_vals is None:
            self._pixel_vals = whiten(
                lfsr_values_bank(self.pixel_seeds, self.width,
                                 self.cfg.stream_length), self.width)
        vals = self._pixel_vals
        if image.dtype == np.uint8:
            t = image.astype(np.int64) * (1 << (self.width - 8))
        else:
            t = np.rint(np.asarray(image, np.float64) * (1 << self.width)).astype(np.int64)
        return (vals < t[:, None]).astype(np.uint8)

    def adder_output(self, x_bits: np.ndarray, layer_index: int) -> np.ndarray:
        """Tree-adder element streams Z [out, N] for one layer."""
        s_w, s_b = self._weight_streams[layer_index]
        prod = np.einsum("jin,in->jn", s_w.astype(np.int32),
                         x_bits.astype(np.int32), optimize=True)
        return prod + s_b

    def _sigmoid_cfg(self, m_prime: int) -> FsmConfig:
        n_states = _even_at_least_two(self.cfg.n_tanh * m_prime)
        return FsmConfig(n_states=n_states, mode=TANH)

    def _layer_m_prime(self, layer_index: int, z: np.ndarray) -> int:
        if self.cfg.m_prime is not None:
            return self.cfg.m_prime[layer_index]
        return symmetric_window(z)

    def infer(self, image: np.ndarray,
              deviation=None) -> InferenceResult:
        """Full pipeline for one image; deviation is an optional
        DeviationProfile applied at hidden-layer stream outputs."""
        x = self.pixel_bits(image)
        n_layers = len(self.net)
        for li in range(n_layers - 1):
            z = self.adder_output(x, li)
            cfg = self._sigmoid_cfg(self._layer_m_prime(li, z))
            x = run_fsm(z, cfg)
            if deviation is not None:
                x = deviation.flip_bits(x, li)
        z = self.adder_output(x, n_layers - 1)
        counts = z.sum(axis=1, dtype=np.int64)
        return InferenceResult(int(np.argmax(counts)), counts,
                               self.cfg.stream_length)

    def hidden_stream(self, z_row: np.ndarray, m_prime: int) -> BinaryStream:
        """Debug view of one neuron activation as a unipolar stream."""
        cfg = self._sigmoid_cfg(m_prime)
        return BinaryStream(run_fsm(z_row, cfg)[0], UNIPOLAR)


def stochastic_neuron(pixel_streams: list[BinaryStream],
                      weight_streams: list[IntegerStream],
                      bias_stream: IntegerStream,
                      m_prime: int, n_tanh: int) -> BinaryStream:
    """Single integer-stochastic neuron from explicit streams.

    AND-gated products, exact tree addition with the bias, then the
    NStanh sigmoid sized n_tanh * m_prime.  Output is unipolar.
    """
    from .ops import int_mul_binary, tree_add

    if len(pixel_streams) != len(weight_streams):
        raise ValueError("one weight stream per pixel stream required")
    n = len(bias_stream)
    for s in list(pixel_streams) + list(weight_streams):
        if len(s) != n:
            raise ValueError("all streams must share one length")
    prods = [int_mul_binary(w, p)
             for w, p in zip(weight_streams, pixel_streams)]
    total = tree_add(prods + [bias_stream])
    cfg = FsmConfig(n_states=_even_at_least_two(n_tanh * m_prime), mode=TANH)
    from .fsm import sigmoid_stream
    return sigmoid_stream(total, cfg)


def stochastic_infer(image: np.ndarray, net: list[LayerWeights],
                     cfg: NetworkConfig, master_seed: int,
                     deviation=None) -> InferenceResult:
    """One-shot convenience wrapper around StochasticEngine."""
    return StochasticEngine(net, cfg, master_seed).infer(image, deviation)


def calibrate_range(net: list[LayerWeights], layer_index: int,
                    sample_images: np.ndarray, cfg: NetworkConfig,
                    master_seed: int, coverage: float = 0.95) -> int:
    """Calibrated NStanh input range m' for one layer: the smallest
    symmetric window covering `coverage` of the adder-output mass."""
    sample_images = np.atleast_2d(sample_images)
    if sample_images.shape[0] == 0:
        raise ValueError("empty calibration sample set")
    engine = StochasticEngine(net, cfg, master_seed)
    collected = []
    for image in sample_images:
        x = engine.pixel_bits(image)
        for li in range(layer_index):
            z = engine.adder_output(x, li)
            fcfg = engine._sigmoid_cfg(engine._layer_m_prime(li, z))
            x = run_fsm(z, fcfg)
        collected.append(engine.adder_output(x, layer_index).ravel())
    return symmetric_window(np.concatenate(collected), coverage)


def train_small_mlp(x: np.ndarray, y: np.ndarray, dims: list[int],
                    epochs: int, lr: float, seed: int,
                    clip: float = WEIGHT_RANGE) -> list[LayerWeights]:
    """Plain full-batch backprop trainer for desk-scale experiments.

    Sigmoid hidden layers, identity output trained with softmax
    cross-entropy.  Deterministic for a fixed seed; weights are clipped
    to the representable interval before quantization.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if max(dims) > 64:
        raise ValueError("train_small_mlp is for layers of <= 64 units")
    rng = np.random.Generator(np.random.PCG64(seed))
    ws = [rng.normal(0, 1.0 / math.sqrt(dims[i]), size=(dims[i + 1], dims[i]))
          for i in range(len(dims) - 1)]
    bs = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
    onehot = np.eye(dims[-1])[y]

    for _ in range(epochs):
        acts = [x.T]  # columns are samples
        for i, (w, b) in enumerate(zip(ws, bs)):
            z = w @ acts[-1] + b[:, None]
            acts.append(z if i == len(ws) - 1 else _sigmoid(z))
        zl = acts[-1]
        zl = zl - zl.max(axis=0, keepdims=True)
        p = np.exp(zl)
        p /= p.sum(axis=0, keepdims=True)
        delta = (p - onehot.T) / x.shape[0]
        for i in reversed(range(len(ws))):
            gw = delta @ acts[i].T
            gb = delta.sum(axis=1)
            if i > 0:
                a = acts[i]
                delta = (ws[i].T @ delta) * a * (1 - a)
            ws[i] -= lr * gw
            bs[i] -= lr * gb
        if any(not np.all(np.isfinite(w)) or np.abs(w).max() > 1e6
               for w in ws):
            raise FloatingPointError(
                f"training diverged (non-finite or exploding weights) "
                f"at lr={lr}")

    return [quantize_weights(np.clip(w, -clip, clip), np.clip(b, -clip, clip))
            for w, b in zip(ws, bs)]


def mlp_accuracy(net: list[LayerWeights], x: np.ndarray, y: np.ndarray) -> float:
    """Fixed-point argmax accuracy on unit-interval inputs."""
    correct = 0
    for xi, yi in zip(x, y):
        scores = fixed_point_infer(xi, net)
        if int(np.argmax(scores)) == int(yi):
            correct += 1
    return correct / len(y)
