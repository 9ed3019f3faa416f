"""Analytic gradients and the finite-difference oracle that checks them.

Both operate on the loss E = 1/2 * sum((target - output)^2) for a
single pattern, with dropout off and no parameter mutation.  Gradients
come back as one flat vector in the network's parameter order (all
weights, then all thresholds), so the two routes compare element-wise.
"""

import numpy as np

from .activations import _DERIV
from .errors import DimensionError, DomainError
from .network import Mode, Network


def _half_sse(network: Network, input_vector, target_vector) -> float:
    out = network.feed_forward(input_vector, Mode.EVAL)
    err = 0.0
    for kk in range(len(target_vector)):
        d = target_vector[kk] - out[kk]
        err += d * d
    return 0.5 * err


def compute_gradients(network: Network, input_vector, target_vector) -> np.ndarray:
    """dE/dparam via the delta recursion, evaluated with current weights."""
    sizes = network.layer_sizes
    last = len(sizes) - 1
    if len(target_vector) != sizes[last]:
        raise DimensionError(
            f"target has {len(target_vector)} components, layer expects {sizes[last]}"
        )
    network.feed_forward(input_vector, Mode.EVAL)
    deriv = _DERIV[network.activation]
    outs = network.outputs

    deltas = [np.zeros(n) for n in sizes]
    for d in range(sizes[last]):
        o = outs[last][d]
        deltas[last][d] = (target_vector[d] - o) * deriv(o)
    for k in range(last - 1, 0, -1):
        w_out = network.weights[k]
        for d in range(sizes[k]):
            e = 0.0
            for j in range(sizes[k + 1]):
                e += w_out[j, d] * deltas[k + 1][j]
            deltas[k][d] = e * deriv(outs[k][d])

    # dE/dw[d][s] = -delta_dest * source_output; dE/dtheta = +delta
    # (the threshold enters the pre-activation with a factor of -1)
    grad_w = []
    for k in range(last):
        g = np.empty((sizes[k + 1], sizes[k]))
        for d in range(sizes[k + 1]):
            for s in range(sizes[k]):
                g[d, s] = -deltas[k + 1][d] * outs[k][s]
        grad_w.append(g.ravel())
    grad_t = [np.zeros(sizes[0])] + [deltas[k] for k in range(1, last + 1)]
    return np.concatenate(grad_w + grad_t)


def finite_difference_gradients(network: Network, input_vector, target_vector,
                                h: float = 1e-5) -> np.ndarray:
    """Central-difference dE/dparam; restores the network bit-exactly."""
    if h <= 0:
        raise DomainError("h must be > 0")
    base = network.params_flat()
    grads = np.empty(base.size)
    work = base.copy()
    for i in range(base.size):
        work[i] = base[i] + h
        network.set_params_flat(work)
        e_plus = _half_sse(network, input_vector, target_vector)
        work[i] = base[i] - h
        network.set_params_flat(work)
        e_minus = _half_sse(network, input_vector, target_vector)
        work[i] = base[i]
        grads[i] = (e_plus - e_minus) / (2.0 * h)
    network.set_params_flat(base)
    return grads
