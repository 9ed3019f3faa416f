import numpy as np
import pytest

from mlpforge import (
    Activation,
    DeterministicRng,
    DimensionError,
    DomainError,
    compute_gradients,
    finite_difference_gradients,
)
from mlpforge.cli import _preactivations
from conftest import make_net


def max_rel_err(analytic, numeric, floor=1e-8):
    worst = 0.0
    for a, b in zip(analytic, numeric):
        if abs(a) <= floor:
            continue
        worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
    return worst


def random_pattern(rng, net):
    x = [rng.uniform_signed() for _ in range(net.layer_sizes[0])]
    t = [rng.uniform() for _ in range(net.layer_sizes[-1])]
    return x, t


def test_zero_network_on_matched_target_has_zero_gradient():
    net = make_net(0, (1, 1, 1))
    net.set_params_flat(np.zeros(net.num_params()))
    grads = compute_gradients(net, [0.0], [0.5])
    assert net.feed_forward([0.0])[0] == 0.5
    np.testing.assert_array_equal(grads, np.zeros(net.num_params()))


@pytest.mark.parametrize("sizes", [(2, 3, 1), (3, 7, 1)])
@pytest.mark.parametrize("activation", [Activation.SIGMOID, Activation.TANH])
def test_analytic_matches_finite_differences(sizes, activation):
    draws = DeterministicRng(555)
    for trial in range(10):
        net = make_net(trial + 1, sizes, activation)
        x, t = random_pattern(draws, net)
        analytic = compute_gradients(net, x, t)
        numeric = finite_difference_gradients(net, x, t, 1e-5)
        assert max_rel_err(analytic, numeric) < 1e-4


def test_leaky_step_matches_away_from_kink():
    draws = DeterministicRng(808)
    checked = 0
    seed = 0
    while checked < 10:
        seed += 1
        net = make_net(seed, (2, 3, 1), Activation.LEAKY_STEP)
        x, t = random_pattern(draws, net)
        if any(abs(a) < 1e-3 for a in _preactivations(net, x)):
            continue
        analytic = compute_gradients(net, x, t)
        numeric = finite_difference_gradients(net, x, t, 1e-5)
        assert max_rel_err(analytic, numeric) < 1e-3
        checked += 1


def test_saturated_path_has_vanishing_gradient():
    # huge thresholds saturate the hidden sigmoid, so the input-side
    # weight cannot move the loss
    net = make_net(0, (1, 1, 1))
    net.set_params_flat(np.array([0.5, 0.5, 0.0, 40.0, 0.0]))
    numeric = finite_difference_gradients(net, [1.0], [0.9], 1e-5)
    assert abs(numeric[0]) < 1e-6  # weight into the saturated hidden neuron


def test_gradient_sign_opposes_delta_times_source():
    net = make_net(13, (2, 3, 1))
    x, t = [0.4, -0.2], [0.9]
    grads = compute_gradients(net, x, t)
    out = net.feed_forward(x)
    delta = (t[0] - out[0]) * Activation.SIGMOID.derivative(out[0])
    n_w0 = net.weights[0].size
    for s in range(3):
        g = grads[n_w0 + s]  # output-neuron weight from hidden neuron s
        ref = delta * net.outputs[1][s]
        if ref != 0.0:
            assert np.sign(g) == -np.sign(ref)


def test_halving_h_shrinks_error_quadratically():
    net = make_net(29, (2, 3, 1))
    x, t = [0.3, 0.7], [0.2]
    analytic = compute_gradients(net, x, t)
    err_h = np.max(np.abs(analytic - finite_difference_gradients(net, x, t, 1e-3)))
    err_h2 = np.max(np.abs(analytic - finite_difference_gradients(net, x, t, 5e-4)))
    assert err_h2 < err_h / 2.5  # ~4x for a second-order method

def test_network_restored_bit_exact():
    net = make_net(31, (2, 3, 1))
    before = net.params_flat()
    finite_difference_gradients(net, [0.1, 0.2], [0.5], 1e-5)
    np.testing.assert_array_equal(net.params_flat(), before)


def test_input_threshold_gradients_are_zero():
    net = make_net(37, (2, 3, 1))
    analytic = compute_gradients(net, [0.5, 0.5], [0.5])
    numeric = finite_difference_gradients(net, [0.5, 0.5], [0.5])
    n_weights = sum(w.size for w in net.weights)
    np.testing.assert_array_equal(analytic[n_weights:n_weights + 2], [0.0, 0.0])
    np.testing.assert_array_equal(numeric[n_weights:n_weights + 2], [0.0, 0.0])


def test_bad_arguments_rejected():
    net = make_net(1, (2, 3, 1))
    with pytest.raises(DimensionError):
        compute_gradients(net, [0.1, 0.2], [0.5, 0.5])
    with pytest.raises(DomainError):
        finite_difference_gradients(net, [0.1, 0.2], [0.5], h=0.0)
