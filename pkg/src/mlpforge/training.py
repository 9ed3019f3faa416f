"""Per-pattern training with momentum, epoch loops, and RMS error.

The update order within one pattern is strict: forward pass first, then
every output neuron computes its delta and immediately updates its
incoming weights and threshold, then the hidden layers from last to
first do the same.  The hidden-layer delta recursion reads each
outgoing synapse's *previous* weight, which (because downstream layers
have just updated) is exactly the weight used in the forward pass.

train_pattern is the plain-Python form of one step; run_training drives
whole epochs through a compiled kernel that is bit-for-bit equivalent
(see tests), so long runs stay fast without changing a single result.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .activations import Activation, _DERIV
from .errors import ConfigurationError, DimensionError, DomainError
from .network import Mode, Network
from .rng import DeterministicRng


@dataclass(frozen=True)
class Hyperparams:
    """Training constants; defaults are the library's canonical values."""

    rate: float = 0.5
    learning_rate: float = 0.1
    momentum: float = 0.05
    dropout_prob: float = 0.3
    paper_faithful: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.rate) and math.isfinite(self.learning_rate)
                and math.isfinite(self.momentum) and math.isfinite(self.dropout_prob)):
            raise ConfigurationError("hyperparameters must be finite")
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be > 0")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ConfigurationError("dropout_prob must be in [0, 1]")
        if self.momentum < 0:
            raise ConfigurationError("momentum must be >= 0")


@dataclass
class TrainingLog:
    """Configuration snapshot plus the per-interval RMS error trace."""

    activation: Activation
    layer_sizes: tuple
    hyper: Hyperparams
    seed: int
    epochs: int
    log_every: int
    entries: list = field(default_factory=list)  # (epoch index, rms error)
    final_epoch: int = -1
    diverged: bool = False
    network: Network = None


def _update_incoming(network: Network, k: int, d: int, delta: float,
                     rate: float, learning_rate: float, momentum: float) -> None:
    """Update neuron (k, d)'s incoming weights and threshold in place.

    new_w = w + rate*lr*delta*source_output + momentum*(w - prev_w),
    then prev_w takes the pre-update w.  The threshold trains the same
    way with source value -1.
    """
    w = network.weights[k - 1][d]
    pw = network.prev_weights[k - 1][d]
    src = network.outputs[k - 1]
    for s in range(network.layer_sizes[k - 1]):
        tmp = w[s]
        w[s] = tmp + rate * learning_rate * delta * src[s] + momentum * (tmp - pw[s])
        pw[s] = tmp
    thr = network.thresholds[k]
    pthr = network.prev_thresholds[k]
    tmp = thr[d]
    thr[d] = tmp + rate * learning_rate * delta * -1.0 + momentum * (tmp - pthr[d])
    pthr[d] = tmp


def train_pattern(network: Network, input_vector, target_vector,
                  hyper: Hyperparams, rng) -> None:
    """Run one forward/backward pass on a single pattern, mutating the net."""
    sizes = network.layer_sizes
    last = len(sizes) - 1
    if len(target_vector) != sizes[last]:
        raise DimensionError(
            f"target has {len(target_vector)} components, layer expects {sizes[last]}"
        )
    network.feed_forward(input_vector, Mode.TRAIN, rng, hyper.dropout_prob)

    deriv = _DERIV[network.activation]
    rate, lr, mom = hyper.rate, hyper.learning_rate, hyper.momentum
    outs = network.outputs
    errs = network.errors

    for d in range(sizes[last]):
        o = outs[last][d]
        delta = (target_vector[d] - o) * deriv(o)
        errs[last][d] = delta
        _update_incoming(network, last, d, delta, rate, lr, mom)

    for k in range(last - 1, 0, -1):
        # prev_weights of the k -> k+1 synapses hold the forward-pass values
        # because layer k+1 has already been updated
        pw_out = network.prev_weights[k]
        for d in range(sizes[k]):
            e = 0.0
            for j in range(sizes[k + 1]):
                e += pw_out[j, d] * errs[k + 1][j]
            o = outs[k][d]
            e *= deriv(o)
            errs[k][d] = e
            _update_incoming(network, k, d, e, rate, lr, mom)


def rms_error(network: Network, dataset) -> float:
    """Eval-mode RMS over a dataset: sqrt(sum of squared errors / N)."""
    if len(dataset.pairs) == 0:
        raise DomainError("dataset must be non-empty")
    last = len(network.layer_sizes) - 1
    err = 0.0
    for x, t in dataset.pairs:
        out = network.feed_forward(x, Mode.EVAL)
        for kk in range(len(t)):
            d = out[kk] - t[kk]
            err += d * d
    return math.sqrt(err / len(dataset.pairs))


def _flat_state(network: Network):
    """Copy network state into the flat layout the kernels index by offset."""
    sizes = np.array(network.layer_sizes, dtype=np.int64)
    w_off = np.zeros(len(sizes) - 1, dtype=np.int64)
    t_off = np.zeros(len(sizes), dtype=np.int64)
    pos = 0
    for k in range(len(sizes) - 1):
        w_off[k] = pos
        pos += int(sizes[k] * sizes[k + 1])
    pos = 0
    for k in range(len(sizes)):
        t_off[k] = pos
        pos += int(sizes[k])
    return {
        "sizes": sizes,
        "w_off": w_off,
        "t_off": t_off,
        "W": np.concatenate([w.ravel() for w in network.weights]),
        "PW": np.concatenate([w.ravel() for w in network.prev_weights]),
        "TH": np.concatenate(network.thresholds),
        "PTH": np.concatenate(network.prev_thresholds),
        "outs": np.concatenate(network.outputs),
        "errs": np.concatenate(network.errors),
        "dropped": np.concatenate(network.dropped),
    }


def _write_back(network: Network, st) -> None:
    pos = 0
    for w, pw in zip(network.weights, network.prev_weights):
        w[...] = st["W"][pos:pos + w.size].reshape(w.shape)
        pw[...] = st["PW"][pos:pos + w.size].reshape(w.shape)
        pos += w.size
    pos = 0
    for k, n in enumerate(network.layer_sizes):
        network.thresholds[k][...] = st["TH"][pos:pos + n]
        network.prev_thresholds[k][...] = st["PTH"][pos:pos + n]
        network.outputs[k][...] = st["outs"][pos:pos + n]
        network.errors[k][...] = st["errs"][pos:pos + n]
        network.dropped[k][...] = st["dropped"][pos:pos + n]
        pos += n


def draw_permutation(n: int, rng) -> list:
    """Seeded Fisher-Yates order for one epoch (n - 1 uniform draws)."""
    idx = list(range(n))
    for i in range(n - 1):
        j = i + int(rng.uniform() * (n - i))
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def run_training(network: Network, dataset, epochs: int, hyper: Hyperparams,
                 log_every: int, rng, stop_below_rms: float = None,
                 shuffle: bool = False, progress=None) -> TrainingLog:
    """Train for a fixed number of epochs, logging RMS at intervals.

    One epoch is one pass over the dataset in stored order, one
    train_pattern step per pair.  RMS is recorded after every epoch
    whose index is a multiple of log_every, and after the final epoch.
    By default the logged value is Eval-mode rms_error over the whole
    dataset; with hyper.paper_faithful each epoch instead accumulates
    squared errors from an extra Train-mode (dropout-perturbed) forward
    pass per pattern, which also consumes RNG draws every epoch.

    shuffle, off by default, draws a fresh pattern order per epoch
    (Fisher-Yates, n - 1 draws before the epoch's training draws).

    rng must be a DeterministicRng: the compiled path continues its
    SplitMix64 state directly (train_pattern, by contrast, accepts any
    object with a uniform() method).

    Stops early once a logged RMS falls below stop_below_rms, or when
    parameters go non-finite (TrainingLog.diverged).  progress, if
    given, is called as progress(epoch, rms) at each logged entry.
    """
    if epochs < 1:
        raise ConfigurationError("epochs must be >= 1")
    if log_every < 1:
        raise ConfigurationError("log_every must be >= 1")
    if len(dataset.pairs) == 0:
        raise DomainError("dataset must be non-empty")
    sizes = network.layer_sizes
    if dataset.input_dim != sizes[0] or dataset.target_dim != sizes[-1]:
        raise DimensionError(
            f"dataset is {dataset.input_dim}->{dataset.target_dim}, "
            f"network is {sizes[0]}->{sizes[-1]}"
        )

    st = _flat_state(network)
    X = dataset.inputs_matrix()
    T = dataset.targets_matrix()
    code = _kernels.ACTIVATION_CODES[network.activation]
    faithful = 1 if hyper.paper_faithful else 0
    state = rng.state

    def train_chunk(state, n_epochs, X_run, T_run):
        return _kernels.train_epochs(
            code, st["sizes"], st["w_off"], st["t_off"], st["W"], st["PW"],
            st["TH"], st["PTH"], st["outs"], st["errs"], st["dropped"],
            X_run, T_run, n_epochs, hyper.rate, hyper.learning_rate,
            hyper.momentum, hyper.dropout_prob, faithful, np.uint64(state))

    def eval_rms():
        return float(_kernels.rms_flat(
            code, st["sizes"], st["w_off"], st["t_off"], st["W"], st["TH"],
            st["outs"], st["dropped"], X, T))

    log = TrainingLog(network.activation, sizes, hyper, rng.seed, epochs,
                      log_every, network=network)
    log_points = sorted(set(range(0, epochs, log_every)) | {epochs - 1})
    log.final_epoch = epochs - 1

    def record(point, faithful_rms):
        """Append one entry; True means stop (diverged or under target)."""
        rms = float(faithful_rms) if faithful else eval_rms()
        log.entries.append((point, rms))
        if progress is not None:
            progress(point, rms)
        if not (math.isfinite(rms) and np.isfinite(st["W"]).all()
                and np.isfinite(st["TH"]).all()):
            log.diverged = True
            log.final_epoch = point
            return True
        if stop_below_rms is not None and rms < stop_below_rms:
            log.final_epoch = point
            return True
        return False

    if not shuffle:
        done = 0
        for point in log_points:
            state, faithful_rms = train_chunk(state, point + 1 - done, X, T)
            done = point + 1
            if record(point, faithful_rms):
                break
    else:
        draws = DeterministicRng(0)
        points = set(log_points)
        for epoch in range(epochs):
            draws.state = int(state)
            order = draw_permutation(len(dataset.pairs), draws)
            state = draws.state
            state, faithful_rms = train_chunk(state, 1, X[order], T[order])
            if epoch in points and record(epoch, faithful_rms):
                break

    _write_back(network, st)
    rng.state = int(state)
    return log
