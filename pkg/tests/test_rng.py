from __future__ import annotations

import numpy as np
import pytest

from rafpy.rng import ALGORITHM, derive_seed, make_rng, seed_sequence


def test_same_keys_same_stream():
    a = make_rng(7, "signal").standard_normal(16)
    b = make_rng(7, "signal").standard_normal(16)
    assert np.array_equal(a, b)


@pytest.mark.parametrize(
    ("left", "right"),
    [
        ((7, "signal"), (7, "noise")),
        ((7, "signal"), (8, "signal")),
        ((7, "success-rate", 0, 1), (7, "success-rate", 1, 0)),
    ],
)
def test_different_keys_different_streams(left, right):
    a = make_rng(*left).standard_normal(8)
    b = make_rng(*right).standard_normal(8)
    assert not np.array_equal(a, b)


def test_bit_generator_is_philox():
    assert ALGORITHM == "philox4x64-10"
    assert isinstance(make_rng(0).bit_generator, np.random.Philox)


def test_derive_seed():
    seed = derive_seed(7, "success-rate", 3, 12)
    assert seed == derive_seed(7, "success-rate", 3, 12)
    assert 0 <= seed < 2**64
    assert seed != derive_seed(7, "success-rate", 3, 13)


def test_seed_sequence_accepts_negative_and_large_seeds():
    assert seed_sequence(-1).entropy == [2**64 - 1]
    assert seed_sequence(2**64 + 5).entropy == [5]


def test_bool_key_rejected():
    with pytest.raises(TypeError, match="ambiguous"):
        seed_sequence(0, True)
