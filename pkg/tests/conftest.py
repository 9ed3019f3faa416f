import numpy as np
import pytest

from mlpforge import Activation, DeterministicRng, build_network


class SequenceRng:
    """Test stub: serves a fixed list of uniform() values and counts calls."""

    def __init__(self, values):
        self.values = list(values)
        self.calls = 0
        self.seed = 0
        self.state = 0

    def uniform(self):
        value = self.values[self.calls]
        self.calls += 1
        return value

    def uniform_signed(self):
        return self.uniform() * 2.0 - 1.0


class ForbiddenRng:
    """Test stub that fails the test if any draw happens."""

    def uniform(self):
        raise AssertionError("rng.uniform() must not be called here")

    def uniform_signed(self):
        raise AssertionError("rng.uniform_signed() must not be called here")


def make_net(seed=42, sizes=(2, 3, 1), activation=Activation.SIGMOID):
    return build_network(activation, sizes, DeterministicRng(seed))


def assert_networks_equal(a, b):
    assert a.activation == b.activation
    assert a.layer_sizes == b.layer_sizes
    for wa, wb in zip(a.weights, b.weights):
        np.testing.assert_array_equal(wa, wb)
    for wa, wb in zip(a.prev_weights, b.prev_weights):
        np.testing.assert_array_equal(wa, wb)
    for ta, tb in zip(a.thresholds, b.thresholds):
        np.testing.assert_array_equal(ta, tb)
    for ta, tb in zip(a.prev_thresholds, b.prev_thresholds):
        np.testing.assert_array_equal(ta, tb)


@pytest.fixture
def seq_rng():
    return SequenceRng
