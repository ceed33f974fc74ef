import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symnav.network import (
    Chromosome,
    NetworkSpec,
    SymmetricDepth,
    WeightMatrices,
    activation,
    decode,
    dumps_chromosome,
    encode,
    forward,
    genome_length,
    loads_chromosome,
    steering_command,
)


def random_chromosome(spec, rng, scale=1.0):
    return Chromosome(rng.uniform(-scale, scale, genome_length(spec)), spec)


def test_activation_values():
    assert activation(0.0) == 0.0
    # logistic(x) - 1/2 == tanh(x/2) / 2
    assert activation(1.2) == pytest.approx(math.tanh(0.6) / 2, abs=1e-15)
    assert activation(1.2) == pytest.approx(0.268525, abs=1e-6)
    assert activation(800.0) == 0.5 and activation(-800.0) == -0.5


def test_activation_is_exactly_odd():
    xs = np.random.default_rng(0).normal(0, 5, 10000)
    assert np.array_equal(activation(-xs), -activation(xs))
    for x in xs[:200]:
        assert activation(-float(x)) == -activation(float(x))


def test_genome_lengths():
    assert genome_length(NetworkSpec((4, 4, 2), symmetric=False)) == 24
    assert genome_length(NetworkSpec((4, 4, 2))) == 12
    assert genome_length(NetworkSpec((5, 4, 2))) == 12
    first = NetworkSpec((4, 4, 2), symmetric_depth=SymmetricDepth.FIRST_LAYER_ONLY)
    assert genome_length(first) == 8 + 8


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 20).map(lambda k: 2 * k), min_size=2, max_size=4))
def test_even_widths_halve_the_genome(widths):
    sizes = tuple(widths) + (2,)
    full = genome_length(NetworkSpec(sizes, symmetric=False))
    assert genome_length(NetworkSpec(sizes)) * 2 == full


def test_decode_mirrors_stored_genes():
    spec = NetworkSpec((4, 2, 2))
    w = decode(Chromosome(np.array([0.3, -0.7, 0.1, 0.2, 0.5, -0.4]), spec))
    assert list(w.matrices[0][0]) == [0.3, -0.7, 0.7, -0.3]
    assert list(w.matrices[0][1]) == [0.1, 0.2, -0.2, -0.1]
    assert list(w.matrices[1][:, 0]) == [0.5, -0.4]


def test_odd_fan_in_has_zero_center():
    spec = NetworkSpec((5, 3, 2))
    w = decode(random_chromosome(spec, np.random.default_rng(1)))
    assert np.all(w.matrices[0][:, 2] == 0.0)
    assert w.matrices[1].shape == (2, 3) and np.all(w.matrices[1][:, 1] == 0.0)


def test_unconstrained_layout_is_row_major():
    spec = NetworkSpec((4, 4, 2), symmetric=False)
    w = decode(Chromosome(np.arange(24.0), spec))
    assert np.array_equal(w.matrices[0], np.arange(16.0).reshape(4, 4))
    assert np.array_equal(w.matrices[1], np.arange(16.0, 24.0).reshape(2, 4))


@pytest.mark.parametrize("sizes", [(4, 4, 2), (5, 4, 2), (7, 6, 3, 2), (25, 25, 2)])
@pytest.mark.parametrize("depth", list(SymmetricDepth))
def test_encode_inverts_decode(sizes, depth):
    spec = NetworkSpec(sizes, True, depth)
    c = random_chromosome(spec, np.random.default_rng(3))
    assert np.array_equal(encode(decode(c)), c.genes)


def test_chromosome_validation():
    spec = NetworkSpec((4, 4, 2))
    with pytest.raises(ValueError):
        Chromosome(np.zeros(11), spec)
    with pytest.raises(ValueError):
        Chromosome(np.array([np.nan] + [0.0] * 11), spec)
    with pytest.raises(ValueError):
        NetworkSpec((4, 2))
    with pytest.raises(ValueError):
        NetworkSpec((4, 4, 3))


def test_zero_weights_give_zero_outputs():
    spec = NetworkSpec((6, 6, 2), symmetric=False)
    assert forward(decode(Chromosome(np.zeros(48), spec)), np.ones(6)) == (0.0, 0.0)


def test_palindromic_input_gives_zero():
    spec = NetworkSpec((8, 8, 2))
    w = decode(random_chromosome(spec, np.random.default_rng(2)))
    x = np.array([0.1, 0.5, 0.9, 0.3, 0.3, 0.9, 0.5, 0.1])
    assert forward(w, x) == (0.0, 0.0)


def test_forward_matches_plain_matrix_product():
    rng = np.random.default_rng(4)
    spec = NetworkSpec((9, 7, 2))
    w = decode(random_chromosome(spec, rng))
    x = rng.uniform(0, 1, 9)
    h = 1 / (1 + np.exp(-(w.matrices[0] @ x))) - 0.5
    o = 1 / (1 + np.exp(-(w.matrices[1] @ h))) - 0.5
    assert np.allclose(forward(w, x), o, atol=1e-14, rtol=0)


def test_forward_rejects_wrong_width():
    w = decode(Chromosome(np.zeros(12), NetworkSpec((4, 4, 2))))
    with pytest.raises(ValueError, match="4"):
        forward(w, np.zeros(5))


@settings(max_examples=300, deadline=None)
@given(st.integers(4, 40), st.integers(1, 40), st.sampled_from(list(SymmetricDepth)),
       st.integers(0, 2**32 - 1))
def test_reversed_inputs_negate_outputs(n, hidden, depth, seed):
    rng = np.random.default_rng(seed)
    spec = NetworkSpec((n, hidden, 2), True, depth)
    w = decode(random_chromosome(spec, rng, 3.0))
    x = rng.uniform(0, 1, n)
    a = forward(w, x)
    b = forward(w, x[::-1])
    assert abs(a[0] + b[0]) < 1e-12 and abs(a[1] + b[1]) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_negated_inputs_negate_outputs_unconstrained(n, seed):
    rng = np.random.default_rng(seed)
    spec = NetworkSpec((n, n, 2), symmetric=False)
    w = decode(random_chromosome(spec, rng))
    x = rng.uniform(-1, 1, n)
    a, b = forward(w, x), forward(w, -x)
    assert abs(a[0] + b[0]) < 1e-12 and abs(a[1] + b[1]) < 1e-12


def test_steering_command():
    m = math.radians(35)
    assert steering_command(0.0, 0.0, m) == 0.0
    assert steering_command(0.5, -0.5, m) == m
    assert steering_command(-0.5, 0.5, m) == -m
    assert steering_command(0.1, 0.05, m) == pytest.approx(0.1 * m)
    for a, b in np.random.default_rng(0).uniform(-0.5, 0.5, (100, 2)):
        assert steering_command(b, a, m) == -steering_command(a, b, m)


@pytest.mark.parametrize("spec", [NetworkSpec((5, 5, 2)), NetworkSpec((6, 4, 2), symmetric=False),
                                  NetworkSpec((6, 4, 2), True, SymmetricDepth.FIRST_LAYER_ONLY)])
def test_chromosome_text_round_trip(spec):
    c = random_chromosome(spec, np.random.default_rng(8))
    back = loads_chromosome(dumps_chromosome(c))
    assert back == c and back.spec == spec


def test_weight_matrices_report_sizes():
    w = decode(Chromosome(np.zeros(12), NetworkSpec((4, 4, 2))))
    assert isinstance(w, WeightMatrices) and w.layer_sizes == (4, 4, 2)
