"""Layered feed-forward network with per-neuron thresholds.

A network of L layers keeps, per adjacent layer pair, a weight matrix
indexed [dest neuron][source neuron], plus per-neuron thresholds that
are subtracted from the weighted input sum.  Every parameter also keeps
its previous value (the value it had before its most recent update),
which the momentum term and the hidden-layer error recursion both read.
"""

import math
from enum import Enum

import numpy as np

from .activations import Activation, _CALC
from .errors import ConfigurationError, DimensionError, DomainError


class Mode(Enum):
    TRAIN = "train"
    EVAL = "eval"


def hidden_width(input_dim: int) -> int:
    """Minimal hidden-layer width for an n-input three-layer net: 2n + 1."""
    if input_dim < 1:
        raise DomainError("input_dim must be >= 1")
    return 2 * input_dim + 1


def validate_topology(layer_sizes) -> tuple:
    sizes = tuple(int(n) for n in layer_sizes)
    if len(sizes) < 3:
        raise ConfigurationError(
            f"need at least input, one hidden, and output layer, got {list(sizes)}"
        )
    if any(n < 1 for n in sizes):
        raise ConfigurationError(f"layer sizes must be >= 1, got {list(sizes)}")
    return sizes


class Network:
    """Mutable network state: parameters plus last-pass outputs/errors.

    Attributes
    ----------
    activation      : gate used by every non-input neuron
    layer_sizes     : tuple of layer widths, input first
    weights         : list of (dest, source) float64 matrices per layer pair
    prev_weights    : same shapes; value of each weight before its last update
    thresholds      : list of per-layer float64 vectors (input layer included,
                      though input thresholds are never used or trained)
    prev_thresholds : same shapes
    outputs         : per-layer vectors from the last forward pass
    errors          : per-layer backprop deltas from the last training step
    dropped         : per-layer bool vectors; True where the last Train-mode
                      pass dropped a hidden neuron
    """

    def __init__(self, activation, layer_sizes, weights, prev_weights,
                 thresholds, prev_thresholds):
        self.activation = activation
        self.layer_sizes = validate_topology(layer_sizes)
        self.weights = weights
        self.prev_weights = prev_weights
        self.thresholds = thresholds
        self.prev_thresholds = prev_thresholds
        self.outputs = [np.zeros(n) for n in self.layer_sizes]
        self.errors = [np.zeros(n) for n in self.layer_sizes]
        self.dropped = [np.zeros(n, dtype=bool) for n in self.layer_sizes]

    # --- parameter vector ------------------------------------------------
    # Flat order, used identically by gradients and the model file: all
    # weight matrices in layer order, each row-major [dest][source], then
    # all threshold vectors in layer order.

    def num_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(self.layer_sizes)

    def params_flat(self) -> np.ndarray:
        parts = [w.ravel() for w in self.weights]
        parts += [t for t in self.thresholds]
        return np.concatenate(parts)

    def set_params_flat(self, flat) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.num_params():
            raise DimensionError(
                f"expected {self.num_params()} parameters, got {flat.size}"
            )
        pos = 0
        for w in self.weights:
            w[...] = flat[pos:pos + w.size].reshape(w.shape)
            pos += w.size
        for t in self.thresholds:
            t[...] = flat[pos:pos + t.size]
            pos += t.size

    # --- forward pass -----------------------------------------------------

    def feed_forward(self, input_vector, mode: Mode = Mode.EVAL, rng=None,
                     dropout_prob: float = 0.3) -> np.ndarray:
        """Propagate one input vector and return the output-layer vector.

        Train mode consumes exactly one rng.uniform() draw per hidden
        neuron, in layer order then index order; a draw below
        dropout_prob zeroes that neuron for this pass.  Eval mode makes
        no draws and drops nothing.  Surviving activations are not
        rescaled by 1/(1 - p).
        """
        sizes = self.layer_sizes
        if len(input_vector) != sizes[0]:
            raise DimensionError(
                f"input has {len(input_vector)} components, layer expects {sizes[0]}"
            )
        if mode is Mode.TRAIN and rng is None:
            raise ConfigurationError("Train-mode forward pass requires an rng")

        calc = _CALC[self.activation]
        outs = self.outputs
        outs[0][...] = np.asarray(input_vector, dtype=np.float64)
        self.dropped[0][...] = False

        last = len(sizes) - 1
        for k in range(1, last + 1):
            w = self.weights[k - 1]
            thr = self.thresholds[k]
            src = outs[k - 1]
            dst = outs[k]
            drop = self.dropped[k]
            for d in range(sizes[k]):
                if mode is Mode.TRAIN and k != last and rng.uniform() < dropout_prob:
                    drop[d] = True
                    dst[d] = 0.0
                    continue
                drop[d] = False
                a = 0.0
                row = w[d]
                for s in range(sizes[k - 1]):
                    a += row[s] * src[s]
                a -= thr[d]
                dst[d] = calc(a)
        return outs[last].copy()


def build_network(kind: Activation, layer_sizes, rng) -> Network:
    """Create a fully connected network with uniform [-1, 1) parameters.

    The draw order is fixed so equal seeds give bit-identical networks:
    first one threshold per neuron (input layer, then each hidden layer
    in order, then output layer), then the synapse weights one layer
    pair at a time, iterating source neurons in the outer loop and dest
    neurons in the inner loop.  Every draw is rng.uniform_signed().
    prev_* values start equal to the current values.
    """
    sizes = validate_topology(layer_sizes)
    thresholds = []
    for n in sizes:
        thresholds.append(np.array([rng.uniform_signed() for _ in range(n)]))
    weights = []
    for k in range(len(sizes) - 1):
        w = np.zeros((sizes[k + 1], sizes[k]))
        for s in range(sizes[k]):
            for d in range(sizes[k + 1]):
                w[d, s] = rng.uniform_signed()
        weights.append(w)
    prev_weights = [w.copy() for w in weights]
    prev_thresholds = [t.copy() for t in thresholds]
    return Network(kind, sizes, weights, prev_weights, thresholds, prev_thresholds)
