"""iscsim: bit-exact simulator for integral stochastic computing."""

from .lfsr import Lfsr, expand_seeds, lfsr_next
from .streams import (BIPOLAR, UNIPOLAR, BinaryStream, DomainError,
                      IntegerStream, StreamFormatError, b2is, b2s, decode,
                      decode_exact)
from .ops import (ApcAccumulator, apc_step, int_add, int_mul, int_mul_binary,
                  mul_bipolar, mul_unipolar, or_add, scaled_add, tree_add)
from .fsm import (FsmConfig, fsm_transfer_curve, nsexp, nstanh, sexp,
                  sigmoid_stream, stanh)
from .fixedpoint import FixedPointValue, quantize
from .network import (InferenceResult, LayerWeights, NetworkConfig,
                      StochasticEngine, calibrate_range, fixed_point_infer,
                      quantize_weights, stochastic_infer, stochastic_neuron,
                      train_small_mlp)
from .fault import DeviationProfile, fault_sweep, inject
from .weights_io import load_weights, save_weights

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
