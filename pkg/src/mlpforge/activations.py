"""Activation gates and their output-space derivatives.

Each gate exposes f(activation) and f'(output): the derivative is
expressed in terms of the gate's own output, not the pre-activation, so
a forward pass already holds everything backprop needs.
"""

import math
from enum import Enum

from .errors import DomainError

LEAKY_CONSTANT = 0.01


class Activation(Enum):
    TANH = "tanh"
    SIGMOID = "sigmoid"
    LEAKY_STEP = "leaky_step"

    def calculate(self, activation: float) -> float:
        return gate_calculate(self, activation)

    def derivative(self, output: float) -> float:
        return gate_derivative(self, output)


def _tanh(x):
    return math.tanh(x)


def _sigmoid(x):
    # math.exp raises OverflowError where C exp would return +inf; the
    # saturated result is 1/(1+inf) = 0 either way
    try:
        return 1.0 / (1.0 + math.exp(-x))
    except OverflowError:
        return 0.0


def _leaky_step(x):
    return x * LEAKY_CONSTANT if x < 0 else x


def _tanh_deriv(o):
    return 1.0 - o * o


def _sigmoid_deriv(o):
    return o * (1.0 - o)


def _leaky_step_deriv(o):
    # output exactly 0 takes the leaky branch
    return 1.0 if o > 0 else LEAKY_CONSTANT


_CALC = {
    Activation.TANH: _tanh,
    Activation.SIGMOID: _sigmoid,
    Activation.LEAKY_STEP: _leaky_step,
}

_DERIV = {
    Activation.TANH: _tanh_deriv,
    Activation.SIGMOID: _sigmoid_deriv,
    Activation.LEAKY_STEP: _leaky_step_deriv,
}


def gate_calculate(kind: Activation, activation: float) -> float:
    """Apply the gate function to a finite pre-activation value."""
    if not math.isfinite(activation):
        raise DomainError(f"gate input must be finite, got {activation!r}")
    return _CALC[kind](activation)


def gate_derivative(kind: Activation, output: float) -> float:
    """Gate derivative at a point, given the gate's output there."""
    if not math.isfinite(output):
        raise DomainError(f"gate output must be finite, got {output!r}")
    return _DERIV[kind](output)
