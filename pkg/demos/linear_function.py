"""Approximate f(x1, x2, x3) = x1 + x2 - x3 with a 3-7-1 sigmoid network.

The inputs are drawn from [-60, 40) x [-40, 60) x [-50, 50), far outside
the sigmoid's useful range, so everything is min-max normalized into
[0, 1] first: one global bound pair for all input components and one
for the outputs.  Predictions map back through the inverse transform.

The hidden width follows the 2n+1 sizing rule for n = 3 inputs.
"""

import numpy as np

import mlpforge as mf

SEED = 1
COUNT = 200
EPOCHS = 10000

data_rng = mf.DeterministicRng(SEED)
dataset = mf.random_linear_dataset(COUNT, data_rng)
norm = mf.fit_normalizer(dataset)
print(f"fitted bounds: inputs [{norm.min_input:.3f}, {norm.max_input:.3f}], "
      f"outputs [{norm.min_output:.3f}, {norm.max_output:.3f}]")
scaled = mf.normalize(norm, dataset)

rng = mf.DeterministicRng(SEED)
width = mf.hidden_width(dataset.input_dim)
net = mf.build_network(mf.Activation.SIGMOID, [3, width, 1], rng)
log = mf.run_training(net, scaled, EPOCHS, mf.Hyperparams(), 2000, rng)

print("\nnormalized RMS trace:")
for epoch, rms in log.entries:
    print(f"  epoch {epoch:>5}  rms {rms:.6f}")

print("\nsample predictions (denormalized):")
for x, t in dataset.pairs[:8]:
    z = norm.normalize_input(x)
    out = net.feed_forward(z)
    pred = mf.denormalize_output(norm, out[0])
    print(f"  input ({x[0]:8.3f}, {x[1]:8.3f}, {x[2]:8.3f})"
          f"  computed {pred:9.3f}  expected {t[0]:9.3f}")

# Accuracy degrades toward the edges of the fitted input range: compare
# the patterns whose normalized coordinates sit closest to a range
# limit against those deepest inside.
margins, errors = [], []
span = norm.max_input - norm.min_input
for (x, t), (zx, _) in zip(dataset.pairs, scaled.pairs):
    z = (np.asarray(x) - norm.min_input) / span
    margins.append(float(np.min(np.minimum(z, 1.0 - z))))
    pred = mf.denormalize_output(norm, net.feed_forward(zx)[0])
    errors.append(abs(float(pred) - float(t[0])))
order = np.argsort(margins)
k = COUNT * 5 // 100
print(f"\nmean |error| for the {k} patterns nearest the range limits: "
      f"{np.mean([errors[i] for i in order[:k]]):.3f}")
print(f"mean |error| for the {k} patterns nearest the center:       "
      f"{np.mean([errors[i] for i in order[-k:]]):.3f}")
print("the closer an input sits to the fitted range limits, the worse "
      "the approximation.")
