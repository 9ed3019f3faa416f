import math

import numpy as np
import pytest

from mlpforge import (
    Activation,
    ConfigurationError,
    Dataset,
    DeterministicRng,
    DimensionError,
    DomainError,
    Hyperparams,
    Mode,
    build_network,
    logic_gate_dataset,
    rms_error,
    run_training,
    train_pattern,
)
from mlpforge.training import _update_incoming
from conftest import make_net


def clone_params(net):
    return [w.copy() for w in net.weights], [t.copy() for t in net.thresholds]


class TestUpdateRule:
    def test_worked_example_bit_exact(self):
        # single instrumented synapse: w=0.5, prev_w=0.4, delta=0.2,
        # source output 1.0, rate=0.5, lr=0.1, momentum=0.05
        net = make_net(0, (1, 1, 1))
        net.weights[1][0, 0] = 0.5
        net.prev_weights[1][0, 0] = 0.4
        net.outputs[1][0] = 1.0
        net.thresholds[2][0] = 0.3
        net.prev_thresholds[2][0] = 0.1
        _update_incoming(net, 2, 0, 0.2, 0.5, 0.1, 0.05)
        expected_w = 0.5 + 0.5 * 0.1 * 0.2 * 1.0 + 0.05 * (0.5 - 0.4)
        assert net.weights[1][0, 0] == expected_w
        assert net.weights[1][0, 0] == 0.515
        assert net.prev_weights[1][0, 0] == 0.5
        expected_t = 0.3 + 0.5 * 0.1 * 0.2 * -1.0 + 0.05 * (0.3 - 0.1)
        assert net.thresholds[2][0] == expected_t
        assert net.prev_thresholds[2][0] == 0.3

    def test_update_formula_on_random_states(self):
        rng = DeterministicRng(77)
        for _ in range(50):
            net = make_net(int(rng.next_u64() % 1000), (2, 3, 2))
            w_before = [w.copy() for w in net.weights]
            pw_before = [w.copy() for w in net.prev_weights]
            src = net.outputs[1]
            src[...] = [rng.uniform_signed() for _ in range(3)]
            delta = rng.uniform_signed()
            rate, lr, mom = 0.5, 0.1, 0.05
            _update_incoming(net, 2, 1, delta, rate, lr, mom)
            for s in range(3):
                expected = (w_before[1][1, s] + rate * lr * delta * src[s]
                            + mom * (w_before[1][1, s] - pw_before[1][1, s]))
                assert net.weights[1][1, s] == expected
                assert net.prev_weights[1][1, s] == w_before[1][1, s]

    def test_full_step_through_train_pattern(self):
        # leaky-step 1-1-1 chain arranged so the output delta is exactly
        # (0.7 - 0.5) * 1 and the synapse under test starts at w=0.5
        net = make_net(0, (1, 1, 1), Activation.LEAKY_STEP)
        net.set_params_flat(np.array([1.0, 0.5, 0.0, 0.0, 0.0]))
        net.prev_weights[1][0, 0] = 0.4
        hyper = Hyperparams(dropout_prob=0.0)
        train_pattern(net, [1.0], [0.7], hyper, DeterministicRng(1))
        delta = (0.7 - 0.5) * 1.0
        expected_w = 0.5 + 0.5 * 0.1 * delta * 1.0 + 0.05 * (0.5 - 0.4)
        assert net.errors[2][0] == delta
        assert net.weights[1][0, 0] == expected_w
        assert net.prev_weights[1][0, 0] == 0.5

    def test_zero_delta_leaves_only_momentum(self):
        net = make_net(4, (2, 2, 1), Activation.LEAKY_STEP)
        net.feed_forward([1.0, 0.5])
        target = [float(net.outputs[2][0])]  # delta == 0 exactly
        w_before = net.weights[1].copy()
        pw_before = net.prev_weights[1].copy()
        train_pattern(net, [1.0, 0.5], target, Hyperparams(dropout_prob=0.0),
                      DeterministicRng(0))
        assert net.errors[2][0] == 0.0
        for s in range(2):
            expected = w_before[0, s] + 0.05 * (w_before[0, s] - pw_before[0, s])
            assert net.weights[1][0, s] == expected

    def test_dimension_mismatch_rejected(self):
        net = make_net(3, (2, 2, 1))
        with pytest.raises(DimensionError):
            train_pattern(net, [1.0, 0.0], [1.0, 0.0], Hyperparams(),
                          DeterministicRng(0))
        with pytest.raises(DimensionError):
            train_pattern(net, [1.0], [1.0], Hyperparams(), DeterministicRng(0))


class TestDescent:
    @staticmethod
    def sq_error(net, x, t):
        out = net.feed_forward(x)
        return sum((float(o) - ti) ** 2 for o, ti in zip(out, t))

    def test_single_step_reduces_error(self):
        net = make_net(10, (2, 3, 1))
        x, t = [0.3, 0.8], [0.9]
        before = self.sq_error(net, x, t)
        hyper = Hyperparams(rate=0.1, learning_rate=0.1, momentum=0.0,
                            dropout_prob=0.0)
        train_pattern(net, x, t, hyper, DeterministicRng(0))
        assert self.sq_error(net, x, t) < before

    def test_never_increases_over_seeded_instances(self):
        hyper = Hyperparams(rate=0.1, learning_rate=0.1, momentum=0.0,
                            dropout_prob=0.0)
        draws = DeterministicRng(2024)
        for seed in range(100):
            net = make_net(seed, (2, 3, 1))
            x = [draws.uniform_signed(), draws.uniform_signed()]
            t = [draws.uniform()]
            before = self.sq_error(net, x, t)
            train_pattern(net, x, t, hyper, DeterministicRng(seed))
            assert self.sq_error(net, x, t) <= before


class TestHiddenDeltaUsesForwardWeights:
    def test_delta_matches_pre_update_weights(self):
        # after a couple of warm-up steps prev != current, so using the
        # wrong weight generation in the recursion would show up
        net = make_net(21, (2, 3, 1))
        hyper = Hyperparams(dropout_prob=0.0)
        rng = DeterministicRng(5)
        for _ in range(3):
            train_pattern(net, [1.0, 0.0], [1.0], hyper, rng)
        w_fwd = net.weights[1].copy()  # weights the next forward pass will use
        w_stale = net.prev_weights[1].copy()
        assert not np.array_equal(w_fwd, w_stale)
        train_pattern(net, [1.0, 0.0], [1.0], hyper, rng)
        deriv = Activation.SIGMOID.derivative
        for d in range(3):
            expected = w_fwd[0, d] * net.errors[2][0] * deriv(net.outputs[1][d])
            stale = w_stale[0, d] * net.errors[2][0] * deriv(net.outputs[1][d])
            assert math.isclose(net.errors[1][d], expected, rel_tol=1e-15)
            assert net.errors[1][d] != stale


class TestRmsError:
    def test_exact_fit_gives_zero(self):
        net = make_net(3, (2, 2, 1))
        ds = Dataset([([0.0, 0.0], [net.feed_forward([0.0, 0.0])[0]]),
                      ([1.0, 0.0], [net.feed_forward([1.0, 0.0])[0]])])
        assert rms_error(net, ds) == 0.0

    def test_single_pattern_half_off(self):
        net = make_net(3, (2, 2, 1))
        net.set_params_flat(np.zeros(net.num_params()))  # output always 0.5
        ds = Dataset([([0.0, 0.0], [1.0])])
        assert rms_error(net, ds) == 0.5

    def test_or_dataset_uses_denominator_four(self):
        net = make_net(3, (2, 2, 1))
        net.set_params_flat(np.zeros(net.num_params()))
        ds = logic_gate_dataset("or")
        sse = sum((0.5 - float(t[0])) ** 2 for _, t in ds.pairs)
        assert rms_error(net, ds) == math.sqrt(sse / 4)

    def test_reordering_changes_nothing_substantial(self):
        net = make_net(12, (2, 3, 1))
        ds = logic_gate_dataset("xor")
        reordered = Dataset(list(reversed(ds.pairs)))
        assert math.isclose(rms_error(net, ds), rms_error(net, reordered),
                            rel_tol=1e-12)

    def test_empty_dataset_rejected(self):
        with pytest.raises(DomainError):
            Dataset([])


def python_run_training(network, dataset, epochs, hyper, log_every, rng,
                        stop_below_rms=None, shuffle=False):
    """Reference epoch loop built only from train_pattern + rms_error."""
    from mlpforge.training import draw_permutation

    entries = []
    log_points = sorted(set(range(0, epochs, log_every)) | {epochs - 1})
    diverged = False
    for epoch in range(epochs):
        pairs = dataset.pairs
        if shuffle:
            pairs = [pairs[i] for i in draw_permutation(len(pairs), rng)]
        sse = 0.0
        for x, t in pairs:
            train_pattern(network, x, t, hyper, rng)
            if hyper.paper_faithful:
                out = network.feed_forward(x, Mode.TRAIN, rng,
                                           hyper.dropout_prob)
                for kk in range(len(t)):
                    d = out[kk] - t[kk]
                    sse += d * d
        if epoch in log_points:
            if hyper.paper_faithful:
                rms = math.sqrt(sse / len(pairs))
            else:
                rms = rms_error(network, dataset)
            entries.append((epoch, rms))
            if not math.isfinite(rms):
                diverged = True
                break
            if stop_below_rms is not None and rms < stop_below_rms:
                break
    return entries, diverged


class TestRunTraining:
    @pytest.mark.parametrize("activation", list(Activation))
    @pytest.mark.parametrize("faithful", [False, True])
    def test_kernel_path_matches_reference_bit_for_bit(self, activation, faithful):
        ds = Dataset([([0.0, 1.0], [1.0, 0.0]), ([1.0, 1.0], [0.0, 1.0]),
                      ([0.25, -0.5], [0.5, 0.5])])
        hyper = Hyperparams(dropout_prob=0.4, paper_faithful=faithful)

        fast = build_network(activation, [2, 3, 2], DeterministicRng(99))
        fast_rng = DeterministicRng(7)
        log = run_training(fast, ds, 30, hyper, 7, fast_rng)

        slow = build_network(activation, [2, 3, 2], DeterministicRng(99))
        slow_rng = DeterministicRng(7)
        entries, _ = python_run_training(slow, ds, 30, hyper, 7, slow_rng)

        assert log.entries == entries
        assert fast_rng.state == slow_rng.state
        np.testing.assert_array_equal(fast.params_flat(), slow.params_flat())
        for a, b in zip(fast.prev_weights, slow.prev_weights):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(fast.prev_thresholds, slow.prev_thresholds):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(fast.outputs, slow.outputs):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(fast.errors, slow.errors):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(fast.dropped, slow.dropped):
            np.testing.assert_array_equal(a, b)

    def test_shuffled_path_matches_reference_bit_for_bit(self):
        ds = Dataset([([0.0, 1.0], [1.0]), ([1.0, 1.0], [0.0]),
                      ([1.0, 0.0], [1.0]), ([0.0, 0.0], [0.0])])
        hyper = Hyperparams(dropout_prob=0.3)

        fast = build_network(Activation.SIGMOID, [2, 3, 1], DeterministicRng(5))
        fast_rng = DeterministicRng(8)
        log = run_training(fast, ds, 25, hyper, 6, fast_rng, shuffle=True)

        slow = build_network(Activation.SIGMOID, [2, 3, 1], DeterministicRng(5))
        slow_rng = DeterministicRng(8)
        entries, _ = python_run_training(slow, ds, 25, hyper, 6, slow_rng,
                                         shuffle=True)
        assert log.entries == entries
        assert fast_rng.state == slow_rng.state
        np.testing.assert_array_equal(fast.params_flat(), slow.params_flat())

    def test_shuffle_changes_training_trajectory(self):
        ds = logic_gate_dataset("or")
        results = []
        for shuffle in (False, True):
            net = make_net(3, (2, 2, 1))
            run_training(net, ds, 50, Hyperparams(), 50, DeterministicRng(3),
                         shuffle=shuffle)
            results.append(net.params_flat())
        assert not np.array_equal(results[0], results[1])

    def test_single_epoch_logs_epoch_zero_once(self):
        net = make_net(1, (2, 2, 1))
        log = run_training(net, logic_gate_dataset("or"), 1, Hyperparams(), 1,
                           DeterministicRng(1))
        assert [e for e, _ in log.entries] == [0]
        assert log.final_epoch == 0

    def test_final_epoch_always_logged(self):
        net = make_net(1, (2, 2, 1))
        log = run_training(net, logic_gate_dataset("or"), 10, Hyperparams(),
                           4, DeterministicRng(1))
        assert [e for e, _ in log.entries] == [0, 4, 8, 9]

    def test_rerun_is_bit_identical(self):
        results = []
        for _ in range(2):
            net = make_net(17, (2, 2, 1))
            log = run_training(net, logic_gate_dataset("or"), 500,
                               Hyperparams(), 100, DeterministicRng(17))
            results.append((tuple(log.entries), net.params_flat()))
        assert results[0][0] == results[1][0]
        np.testing.assert_array_equal(results[0][1], results[1][1])

    def test_logged_rms_matches_rms_error_recomputation(self):
        net = make_net(23, (2, 2, 1))
        ds = logic_gate_dataset("or")
        log = run_training(net, ds, 40, Hyperparams(), 40, DeterministicRng(23))
        # final entry is computed on the final parameters
        assert log.entries[-1][1] == rms_error(net, ds)

    def test_stop_below_rms_halts_at_first_crossing(self):
        net = make_net(31, (2, 2, 1))
        ds = logic_gate_dataset("or")
        probe = make_net(31, (2, 2, 1))
        full = run_training(probe, ds, 4000, Hyperparams(), 100,
                            DeterministicRng(31))
        threshold = full.entries[len(full.entries) // 2][1]
        log = run_training(net, ds, 4000, Hyperparams(), 100,
                           DeterministicRng(31), stop_below_rms=threshold)
        assert log.entries[-1][1] < threshold
        for _, rms in log.entries[:-1]:
            assert rms >= threshold
        assert log.final_epoch == log.entries[-1][0]
        assert len(log.entries) < len(full.entries)

    def test_divergence_detected_and_flagged(self):
        net = make_net(2, (3, 7, 1), Activation.LEAKY_STEP)
        ds = Dataset([([30.0, 40.0, -40.0], [90.0]),
                      ([-50.0, 20.0, 10.0], [-40.0])])
        hyper = Hyperparams(rate=100.0, learning_rate=10.0, dropout_prob=0.0)
        log = run_training(net, ds, 200, hyper, 10, DeterministicRng(2))
        assert log.diverged
        assert log.final_epoch == log.entries[-1][0]
        assert log.final_epoch < 199

    def test_progress_callback_sees_every_entry(self):
        seen = []
        net = make_net(3, (2, 2, 1))
        log = run_training(net, logic_gate_dataset("or"), 20, Hyperparams(),
                           5, DeterministicRng(3),
                           progress=lambda e, r: seen.append((e, r)))
        assert seen == log.entries

    def test_faithful_mode_consumes_extra_draws(self):
        ds = logic_gate_dataset("or")
        plain_rng = DeterministicRng(9)
        net = make_net(9, (2, 2, 1))
        run_training(net, ds, 10, Hyperparams(), 10, plain_rng)
        faithful_rng = DeterministicRng(9)
        net2 = make_net(9, (2, 2, 1))
        run_training(net2, ds, 10, Hyperparams(paper_faithful=True), 10,
                     faithful_rng)
        # default: 2 draws per pattern; faithful adds 2 more per pattern
        assert plain_rng.state != faithful_rng.state

    def test_validation_errors(self):
        net = make_net(3, (2, 2, 1))
        ds = logic_gate_dataset("or")
        with pytest.raises(ConfigurationError):
            run_training(net, ds, 0, Hyperparams(), 1, DeterministicRng(0))
        with pytest.raises(ConfigurationError):
            run_training(net, ds, 5, Hyperparams(), 0, DeterministicRng(0))
        bad = Dataset([([1.0, 2.0, 3.0], [1.0])])
        with pytest.raises(DimensionError):
            run_training(net, bad, 5, Hyperparams(), 1, DeterministicRng(0))


class TestHyperparams:
    def test_defaults_match_canonical_constants(self):
        hyper = Hyperparams()
        assert (hyper.rate, hyper.learning_rate, hyper.momentum,
                hyper.dropout_prob, hyper.paper_faithful) == (0.5, 0.1, 0.05,
                                                              0.3, False)

    def test_invariants_enforced(self):
        with pytest.raises(ConfigurationError):
            Hyperparams(learning_rate=0.0)
        with pytest.raises(ConfigurationError):
            Hyperparams(dropout_prob=1.5)
        with pytest.raises(ConfigurationError):
            Hyperparams(momentum=-0.1)
        with pytest.raises(ConfigurationError):
            Hyperparams(rate=float("nan"))
