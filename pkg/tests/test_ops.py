from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iscsim.lfsr import Lfsr, expand_seeds
from iscsim.ops import (ApcAccumulator, apc_step, int_add, int_mul,
                        int_mul_binary, mul_bipolar, mul_unipolar, or_add,
                        scaled_add, tree_add)
from iscsim.streams import (BIPOLAR, UNIPOLAR, BinaryStream, IntegerStream,
                            StreamFormatError, b2s, decode, decode_exact)


def _bits(pattern, fmt=UNIPOLAR):
    return BinaryStream(np.array(pattern, dtype=np.uint8), fmt)


def test_mul_unipolar_is_and():
    out = mul_unipolar(_bits([1, 1, 0, 0]), _bits([1, 0, 1, 0]))
    assert np.array_equal(out.bits, [1, 0, 0, 0])


def test_mul_unipolar_identity_with_ones():
    a = b2s(0.3, 256, Lfsr(11, 5))
    ones = _bits([1] * 256)
    assert np.array_equal(mul_unipolar(a, ones).bits, a.bits)


def test_mul_bipolar_is_xnor():
    out = mul_bipolar(_bits([1, 1, 0, 0], BIPOLAR), _bits([1, 0, 1, 0], BIPOLAR))
    assert np.array_equal(out.bits, [1, 0, 0, 1])


def test_mul_bipolar_identity_with_plus_one():
    a = b2s(-0.4, 256, Lfsr(11, 5), fmt=BIPOLAR)
    plus_one = _bits([1] * 256, BIPOLAR)
    assert np.array_equal(mul_bipolar(a, plus_one).bits, a.bits)


def test_mul_format_checks():
    with pytest.raises(StreamFormatError):
        mul_unipolar(_bits([1], BIPOLAR), _bits([1], BIPOLAR))
    with pytest.raises(StreamFormatError):
        mul_bipolar(_bits([1]), _bits([1]))
    with pytest.raises(StreamFormatError):
        mul_unipolar(_bits([1, 0]), _bits([1]))


def test_scaled_add_selects():
    a, b = _bits([1, 1, 1, 1]), _bits([0, 0, 0, 0])
    sel = _bits([1, 0, 1, 0])
    assert np.array_equal(scaled_add(a, b, sel).bits, [1, 0, 1, 0])
    assert np.array_equal(scaled_add(a, b, _bits([1] * 4)).bits, a.bits)


def test_or_add_dominates_inputs():
    a = b2s(0.2, 512, Lfsr(11, 3))
    b = b2s(0.3, 512, Lfsr(11, 4))
    out = or_add(a, b)
    assert np.all(out.bits >= a.bits)
    assert np.all(out.bits >= b.bits)


def test_or_add_closed_form():
    a = b2s(0.5, 2047, Lfsr(11, 3))
    b = b2s(0.5, 2047, Lfsr(11, 4))
    assert abs(decode(or_add(a, b)) - 0.75) < 0.03


def test_apc_counts_popcounts():
    acc = ApcAccumulator(n_inputs=4)
    acc = apc_step(acc, np.array([1, 1, 0, 1]))
    acc = apc_step(acc, np.array([0, 0, 0, 1]))
    assert acc.count == 4
    assert acc.cycles == 2
    with pytest.raises(StreamFormatError):
        apc_step(acc, np.array([1, 1]))


def test_int_mul_ranges_and_scales_multiply():
    s1 = IntegerStream(np.array([2, -1]), m=2, format=BIPOLAR,
                       scale=Fraction(1, 2))
    s2 = IntegerStream(np.array([-3, 3]), m=3, format=BIPOLAR,
                       scale=Fraction(2))
    out = int_mul(s1, s2)
    assert out.m == 6
    assert out.scale == Fraction(1)
    assert np.array_equal(out.elements, [-6, -3])


def test_int_mul_binary_gates():
    s = IntegerStream(np.array([3, -2, 1]), m=4, format=BIPOLAR)
    x = _bits([1, 0, 1])
    out = int_mul_binary(s, x)
    assert np.array_equal(out.elements, [3, 0, 1])
    assert out.m == 4 and out.scale == s.scale
    with pytest.raises(StreamFormatError):
        int_mul_binary(s, _bits([1, 0, 1], BIPOLAR))


def test_int_add_exact_and_range_widening():
    s1 = IntegerStream(np.array([1, -2]), m=2, format=BIPOLAR)
    s2 = IntegerStream(np.array([3, 3]), m=3, format=BIPOLAR)
    out = int_add(s1, s2)
    assert out.m == 5
    assert decode_exact(out) == decode_exact(s1) + decode_exact(s2)


def test_int_add_scale_mismatch_rejected():
    s1 = IntegerStream(np.array([1]), m=2, scale=Fraction(1, 2))
    s2 = IntegerStream(np.array([1]), m=2, scale=Fraction(1, 3))
    with pytest.raises(StreamFormatError):
        int_add(s1, s2)


def test_tree_add_empty_rejected():
    with pytest.raises(StreamFormatError):
        tree_add([])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(1, 64),
       st.sampled_from([1, 2, 4, 8]))
def test_tree_add_exact_rational_property(seed, n_streams, length, m):
    rng = np.random.Generator(np.random.PCG64(seed))
    streams = [IntegerStream(rng.integers(-m, m + 1, size=length), m=m,
                             format=BIPOLAR, scale=Fraction(1, 3))
               for _ in range(n_streams)]
    total = tree_add(streams)
    assert decode_exact(total) == sum(decode_exact(s) for s in streams)
    assert total.m == n_streams * m


def test_tree_add_order_invariant_decode():
    rng = np.random.Generator(np.random.PCG64(1))
    streams = [IntegerStream(rng.integers(-2, 3, size=32), m=2,
                             format=BIPOLAR) for _ in range(5)]
    fwd = decode_exact(tree_add(streams))
    rev = decode_exact(tree_add(list(reversed(streams))))
    assert fwd == rev
