"""Teach a tiny sigmoid network the Boolean OR function.

A 2-2-1 network (two inputs, two hidden neurons, one output) is enough
here even though the 2n+1 sizing rule would suggest five hidden
neurons, because the inputs only ever take the two polar values 0/1.

Training uses the canonical constants: rate 0.5, learning rate 0.1,
momentum 0.05, and 30% hidden-neuron dropout.  Evaluation runs with
dropout disabled, so the printed outputs are reproducible.
"""

import mlpforge as mf

SEED = 138
EPOCHS = 20000  # the canonical run uses 150000; this converges plenty

dataset = mf.logic_gate_dataset("or")
print("training pairs:")
for x, t in dataset:
    print(f"  {x.tolist()} -> {t.tolist()}")

rng = mf.DeterministicRng(SEED)
net = mf.build_network(mf.Activation.SIGMOID, [2, 2, 1], rng)
log = mf.run_training(net, dataset, EPOCHS, mf.Hyperparams(), 1000, rng)

print("\nerror trace (RMS over the four patterns, dropout off):")
for epoch, rms in log.entries[:5]:
    print(f"  epoch {epoch:>5}  rms {rms:.6f}")
print("  ...")
for epoch, rms in log.entries[-2:]:
    print(f"  epoch {epoch:>5}  rms {rms:.6f}")

print("\ntruth table after training:")
for x, t in dataset:
    out = net.feed_forward(x)
    print(f"  input {x.tolist()}  computed {out[0]:.5f}  expected {t[0]:.0f}")

# With dropout left on during evaluation (the historical behavior kept
# behind the paper-faithful switch) the same input gives changing
# answers, because hidden neurons vanish at random:
print("\n(1,1) evaluated five times with dropout still active:")
eval_rng = mf.DeterministicRng(7)
for _ in range(5):
    out = net.feed_forward([1.0, 1.0], mf.Mode.TRAIN, eval_rng, 0.3)
    print(f"  {out[0]:.5f}")
print("which is why evaluation defaults to dropout-free Eval mode.")
