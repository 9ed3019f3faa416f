"""Compiled inner loops for whole-run training.

Every function here mirrors the plain-Python reference in network.py /
training.py operation for operation: same summation order, same update
expressions, same SplitMix64 draws.  The test suite asserts bit-for-bit
equality between the two paths, so any edit to one side must be made to
the other.

All entry points carry explicit numba signatures: the RNG state must
stay uint64 end to end (a stray int64 would turn the bit mixing into
float math and silently change the stream).
"""

import math

import numpy as np
from numba import njit
from numba.types import Array, Tuple, boolean, float64, int64, uint64, void

from .activations import Activation

ACTIVATION_CODES = {
    Activation.TANH: 0,
    Activation.SIGMOID: 1,
    Activation.LEAKY_STEP: 2,
}

f8 = float64
i8 = int64
u8 = uint64
f8_1 = Array(float64, 1, "C")
f8_2 = Array(float64, 2, "C")
i8_1 = Array(int64, 1, "C")
b1_1 = Array(boolean, 1, "C")


@njit(Tuple((u8, f8))(u8), cache=True)
def next_uniform(state):
    # SplitMix64; keep every operand uint64
    state = u8(state + u8(0x9E3779B97F4A7C15))
    z = state
    z = u8(u8(z ^ u8(z >> u8(30))) * u8(0xBF58476D1CE4E5B9))
    z = u8(u8(z ^ u8(z >> u8(27))) * u8(0x94D049BB133111EB))
    z = u8(z ^ u8(z >> u8(31)))
    return state, u8(z >> u8(11)) * (2.0 ** -53)


@njit(f8(i8, f8), cache=True)
def gate(code, a):
    if code == 0:
        return math.tanh(a)
    if code == 1:
        return 1.0 / (1.0 + math.exp(-a))
    return a * 0.01 if a < 0.0 else a


@njit(f8(i8, f8), cache=True)
def gate_deriv(code, o):
    if code == 0:
        return 1.0 - o * o
    if code == 1:
        return o * (1.0 - o)
    return 1.0 if o > 0.0 else 0.01


@njit(u8(i8, i8_1, i8_1, i8_1, f8_1, f8_1, f8_1, b1_1, f8_1, i8, f8, u8),
      cache=True)
def forward(code, sizes, w_off, t_off, W, TH, outs, dropped, x, train, p, state):
    """One forward pass; train != 0 draws once per hidden neuron."""
    n_layers = sizes.shape[0]
    last = n_layers - 1
    for i in range(sizes[0]):
        outs[t_off[0] + i] = x[i]
        dropped[t_off[0] + i] = False
    for k in range(1, n_layers):
        n_src = sizes[k - 1]
        n_dst = sizes[k]
        src = t_off[k - 1]
        dst = t_off[k]
        wo = w_off[k - 1]
        hidden = k != last
        for d in range(n_dst):
            if train != 0 and hidden:
                state, u = next_uniform(state)
                if u < p:
                    dropped[dst + d] = True
                    outs[dst + d] = 0.0
                    continue
            dropped[dst + d] = False
            a = 0.0
            row = wo + d * n_src
            for s in range(n_src):
                a += W[row + s] * outs[src + s]
            a -= TH[dst + d]
            outs[dst + d] = gate(code, a)
    return state


@njit(void(i8_1, i8_1, i8_1, f8_1, f8_1, f8_1, f8_1, f8_1, i8, i8, f8, f8, f8, f8),
      cache=True)
def update_incoming(sizes, w_off, t_off, W, PW, TH, PTH, outs, k, d, delta,
                    rate, lr, mom):
    n_src = sizes[k - 1]
    row = w_off[k - 1] + d * n_src
    src = t_off[k - 1]
    for s in range(n_src):
        tmp = W[row + s]
        W[row + s] = tmp + rate * lr * delta * outs[src + s] + mom * (tmp - PW[row + s])
        PW[row + s] = tmp
    ti = t_off[k] + d
    tmp = TH[ti]
    TH[ti] = tmp + rate * lr * delta * -1.0 + mom * (tmp - PTH[ti])
    PTH[ti] = tmp


@njit(void(i8, i8_1, i8_1, i8_1, f8_1, f8_1, f8_1, f8_1, f8_1, f8_1, f8_1,
           f8, f8, f8), cache=True)
def backward_update(code, sizes, w_off, t_off, W, PW, TH, PTH, outs, errs,
                    target, rate, lr, mom):
    """Deltas plus immediate updates, output layer first then hidden in reverse."""
    last = sizes.shape[0] - 1
    for d in range(sizes[last]):
        o = outs[t_off[last] + d]
        delta = (target[d] - o) * gate_deriv(code, o)
        errs[t_off[last] + d] = delta
        update_incoming(sizes, w_off, t_off, W, PW, TH, PTH, outs, last, d,
                        delta, rate, lr, mom)
    for k in range(last - 1, 0, -1):
        n_dst = sizes[k + 1]
        wo = w_off[k]
        for d in range(sizes[k]):
            e = 0.0
            for j in range(n_dst):
                e += PW[wo + j * sizes[k] + d] * errs[t_off[k + 1] + j]
            o = outs[t_off[k] + d]
            e *= gate_deriv(code, o)
            errs[t_off[k] + d] = e
            update_incoming(sizes, w_off, t_off, W, PW, TH, PTH, outs, k, d,
                            e, rate, lr, mom)


@njit(f8(i8, i8_1, i8_1, i8_1, f8_1, f8_1, f8_1, b1_1, f8_2, f8_2), cache=True)
def rms_flat(code, sizes, w_off, t_off, W, TH, outs, dropped, X, T):
    """Eval-mode sqrt(SSE / N) over a dataset."""
    n = X.shape[0]
    m = T.shape[1]
    last = sizes.shape[0] - 1
    err = 0.0
    for i in range(n):
        forward(code, sizes, w_off, t_off, W, TH, outs, dropped, X[i], 0, 0.0,
                u8(0))
        for kk in range(m):
            d = outs[t_off[last] + kk] - T[i, kk]
            err += d * d
    return math.sqrt(err / n)


@njit(Tuple((u8, f8))(i8, i8_1, i8_1, i8_1, f8_1, f8_1, f8_1, f8_1, f8_1,
                      f8_1, b1_1, f8_2, f8_2, i8, f8, f8, f8, f8, i8, u8),
      cache=True)
def train_epochs(code, sizes, w_off, t_off, W, PW, TH, PTH, outs, errs,
                 dropped, X, T, n_epochs, rate, lr, mom, p, faithful, state):
    """Train n_epochs full passes in dataset order.

    With faithful != 0 every pattern gets a second Train-mode forward
    pass whose squared errors accumulate into a per-epoch RMS; the last
    epoch's value is returned (0.0 otherwise).
    """
    n = X.shape[0]
    m = T.shape[1]
    last = sizes.shape[0] - 1
    faithful_rms = 0.0
    for _ in range(n_epochs):
        sse = 0.0
        for i in range(n):
            state = forward(code, sizes, w_off, t_off, W, TH, outs, dropped,
                            X[i], 1, p, state)
            backward_update(code, sizes, w_off, t_off, W, PW, TH, PTH, outs,
                            errs, T[i], rate, lr, mom)
            if faithful != 0:
                state = forward(code, sizes, w_off, t_off, W, TH, outs,
                                dropped, X[i], 1, p, state)
                for kk in range(m):
                    d = outs[t_off[last] + kk] - T[i, kk]
                    sse += d * d
        if faithful != 0:
            faithful_rms = math.sqrt(sse / n)
    return state, faithful_rms
