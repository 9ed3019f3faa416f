"""mlpforge: a small, deterministic feed-forward network library.

Threshold neurons, three activation gates, per-pattern backprop with a
momentum term that reads pre-update weights, hidden-layer dropout, and
seeded SplitMix64 randomness so every run is exactly reproducible.
"""

from .activations import LEAKY_CONSTANT, Activation, gate_calculate, gate_derivative
from .data import (
    Dataset,
    Normalizer,
    PerFeatureNormalizer,
    denormalize_output,
    fit_normalizer,
    fit_normalizer_per_feature,
    load_csv,
    logic_gate_dataset,
    normalize,
    random_linear_dataset,
    save_csv,
)
from .errors import (
    ConfigurationError,
    CsvParseError,
    DegenerateSpanError,
    DimensionError,
    DomainError,
    ModelLoadError,
)
from .gradients import compute_gradients, finite_difference_gradients
from .modelio import load_model, save_model, write_training_log
from .network import Mode, Network, build_network, hidden_width
from .rng import DeterministicRng
from .training import Hyperparams, TrainingLog, rms_error, run_training, train_pattern

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "ConfigurationError",
    "CsvParseError",
    "Dataset",
    "DegenerateSpanError",
    "DeterministicRng",
    "DimensionError",
    "DomainError",
    "Hyperparams",
    "LEAKY_CONSTANT",
    "Mode",
    "ModelLoadError",
    "Network",
    "Normalizer",
    "PerFeatureNormalizer",
    "TrainingLog",
    "build_network",
    "compute_gradients",
    "denormalize_output",
    "finite_difference_gradients",
    "fit_normalizer",
    "fit_normalizer_per_feature",
    "gate_calculate",
    "gate_derivative",
    "hidden_width",
    "load_csv",
    "load_model",
    "logic_gate_dataset",
    "normalize",
    "random_linear_dataset",
    "rms_error",
    "run_training",
    "save_csv",
    "save_model",
    "train_pattern",
    "write_training_log",
]
