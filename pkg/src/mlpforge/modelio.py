"""Bit-exact persistence for networks, normalizers, and training logs.

Model files are versioned JSON with a fixed key order and nested arrays
in the same element order as the flat parameter vector.  Numbers are
written with the shortest decimal form that round-trips the underlying
64-bit float, so save -> load -> save is byte-identical.
"""

import json

import numpy as np

from .activations import Activation
from .data import Normalizer, PerFeatureNormalizer
from .errors import ModelLoadError
from .network import Network

MODEL_FORMAT_VERSION = 1
LOG_FORMAT_VERSION = 1


def _normalizer_doc(norm):
    if norm is None:
        return None
    if isinstance(norm, PerFeatureNormalizer):
        return {
            "min_input": norm.min_input.tolist(),
            "max_input": norm.max_input.tolist(),
            "min_output": norm.min_output.tolist(),
            "max_output": norm.max_output.tolist(),
        }
    return {
        "min_input": norm.min_input,
        "max_input": norm.max_input,
        "min_output": norm.min_output,
        "max_output": norm.max_output,
    }


def save_model(network: Network, normalizer=None) -> bytes:
    """Serialize a network (and optionally its fitted normalizer)."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "activation": network.activation.value,
        "layer_sizes": list(network.layer_sizes),
        "weights": [w.tolist() for w in network.weights],
        "prev_weights": [w.tolist() for w in network.prev_weights],
        "thresholds": [t.tolist() for t in network.thresholds],
        "prev_thresholds": [t.tolist() for t in network.prev_thresholds],
        "normalizer": _normalizer_doc(normalizer),
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _as_matrix(doc, key, index, shape):
    try:
        arr = np.asarray(doc[key][index], dtype=np.float64)
    except (TypeError, ValueError, KeyError, IndexError):
        raise ModelLoadError(f"field {key}[{index}] is missing or not numeric") from None
    if arr.shape != shape:
        raise ModelLoadError(f"field {key}[{index}] has shape {arr.shape}, expected {shape}")
    return arr


def _load_normalizer(doc):
    if doc is None:
        return None
    keys = ("min_input", "max_input", "min_output", "max_output")
    if not isinstance(doc, dict) or set(doc) != set(keys):
        raise ModelLoadError("normalizer must carry exactly the four bound values")
    values = [doc[k] for k in keys]
    if all(isinstance(v, (int, float)) for v in values):
        return Normalizer(*values)
    try:
        return PerFeatureNormalizer(*values)
    except (TypeError, ValueError):
        raise ModelLoadError("normalizer bounds are not numeric") from None


def load_model(data: bytes):
    """Reconstruct (network, normalizer-or-None) from save_model bytes.

    Transient state (outputs, errors, dropout mask) comes back zeroed.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelLoadError(f"not a valid model file: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelLoadError("model file must contain a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelLoadError(
            f"unsupported format_version {version!r}, expected {MODEL_FORMAT_VERSION}"
        )
    try:
        activation = Activation(doc.get("activation"))
    except ValueError:
        raise ModelLoadError(f"unknown activation {doc.get('activation')!r}") from None
    sizes = doc.get("layer_sizes")
    if (not isinstance(sizes, list) or len(sizes) < 3
            or not all(isinstance(n, int) and n >= 1 for n in sizes)):
        raise ModelLoadError(f"bad layer_sizes {sizes!r}")
    for key, expected in (("weights", len(sizes) - 1), ("prev_weights", len(sizes) - 1),
                          ("thresholds", len(sizes)), ("prev_thresholds", len(sizes))):
        if not isinstance(doc.get(key), list) or len(doc[key]) != expected:
            raise ModelLoadError(f"field {key} must hold {expected} arrays")
    weights = [_as_matrix(doc, "weights", k, (sizes[k + 1], sizes[k]))
               for k in range(len(sizes) - 1)]
    prev_weights = [_as_matrix(doc, "prev_weights", k, (sizes[k + 1], sizes[k]))
                    for k in range(len(sizes) - 1)]
    thresholds = [_as_matrix(doc, "thresholds", k, (sizes[k],))
                  for k in range(len(sizes))]
    prev_thresholds = [_as_matrix(doc, "prev_thresholds", k, (sizes[k],))
                       for k in range(len(sizes))]
    network = Network(activation, sizes, weights, prev_weights,
                      thresholds, prev_thresholds)
    return network, _load_normalizer(doc.get("normalizer"))


def write_training_log(log, path) -> None:
    """Write a log as line-oriented text: config header, then data rows.

    Header lines are key,value; each entry is a row epoch,<i>,rms,<err>
    with round-trip-exact decimal values.
    """
    lines = [
        f"format_version,{LOG_FORMAT_VERSION}",
        f"activation,{log.activation.value}",
        "layers," + " ".join(str(n) for n in log.layer_sizes),
        f"rate,{log.hyper.rate!r}",
        f"learning_rate,{log.hyper.learning_rate!r}",
        f"momentum,{log.hyper.momentum!r}",
        f"dropout,{log.hyper.dropout_prob!r}",
        f"paper_faithful,{str(log.hyper.paper_faithful).lower()}",
        f"seed,{log.seed}",
        f"epochs,{log.epochs}",
        f"log_every,{log.log_every}",
    ]
    for epoch, rms in log.entries:
        lines.append(f"epoch,{epoch},rms,{float(rms)!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
