"""Datasets, generators for the two stock experiments, and min-max scaling.

The normalizer deliberately keeps single global input and output bounds
(the extrema over every component of every vector), not per-feature
bounds; a per-feature variant exists for callers that want the more
conventional behavior.
"""

import numpy as np

from .errors import CsvParseError, DegenerateSpanError, DimensionError, DomainError

GATE_TABLES = {
    "or": (0.0, 1.0, 1.0, 1.0),
    "and": (0.0, 0.0, 0.0, 1.0),
    "xor": (0.0, 1.0, 1.0, 0.0),
}

_GATE_INPUTS = ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0))


class Dataset:
    """Ordered list of (input vector, target vector) pairs."""

    def __init__(self, pairs):
        if not pairs:
            raise DomainError("dataset must be non-empty")
        converted = []
        for x, t in pairs:
            converted.append((np.asarray(x, dtype=np.float64),
                              np.asarray(t, dtype=np.float64)))
        self.input_dim = converted[0][0].size
        self.target_dim = converted[0][1].size
        for i, (x, t) in enumerate(converted):
            if x.size != self.input_dim or t.size != self.target_dim:
                raise DimensionError(f"pair {i} does not match dataset dimensions")
        self.pairs = converted

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def inputs_matrix(self) -> np.ndarray:
        return np.stack([x for x, _ in self.pairs])

    def targets_matrix(self) -> np.ndarray:
        return np.stack([t for _, t in self.pairs])


def logic_gate_dataset(gate: str) -> Dataset:
    """The four canonical pairs of a two-input gate, in lexicographic order."""
    key = gate.lower()
    if key not in GATE_TABLES:
        raise DomainError(f"unknown gate {gate!r}; expected one of {sorted(GATE_TABLES)}")
    table = GATE_TABLES[key]
    return Dataset([(list(x), [y]) for x, y in zip(_GATE_INPUTS, table)])


def random_linear_dataset(count: int, rng) -> Dataset:
    """count pairs of ((x1, x2, x3), x1 + x2 - x3) with fixed draw ranges.

    Per pair the draws happen in order x1, x2, x3, with
    x1 in [-60, 40), x2 in [-40, 60), x3 in [-50, 50).
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    pairs = []
    for _ in range(count):
        x1 = rng.uniform() * 100 - 60
        x2 = rng.uniform() * 100 - 40
        x3 = rng.uniform() * 100 - 50
        pairs.append(([x1, x2, x3], [x1 + x2 - x3]))
    return Dataset(pairs)


class Normalizer:
    """Global scalar [0, 1] bounds: one min/max for all input components
    jointly and one for all output components jointly."""

    def __init__(self, min_input, max_input, min_output, max_output):
        self.min_input = float(min_input)
        self.max_input = float(max_input)
        self.min_output = float(min_output)
        self.max_output = float(max_output)

    def normalize_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        return (x - self.min_input) / (self.max_input - self.min_input)

    def normalize_output(self, y):
        y = np.asarray(y, dtype=np.float64)
        return (y - self.min_output) / (self.max_output - self.min_output)

    def denormalize_output(self, value):
        return value * (self.max_output - self.min_output) + self.min_output


class PerFeatureNormalizer:
    """Per-component bounds; off the default path, same interface."""

    def __init__(self, min_input, max_input, min_output, max_output):
        self.min_input = np.asarray(min_input, dtype=np.float64)
        self.max_input = np.asarray(max_input, dtype=np.float64)
        self.min_output = np.asarray(min_output, dtype=np.float64)
        self.max_output = np.asarray(max_output, dtype=np.float64)

    def normalize_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        return (x - self.min_input) / (self.max_input - self.min_input)

    def normalize_output(self, y):
        y = np.asarray(y, dtype=np.float64)
        return (y - self.min_output) / (self.max_output - self.min_output)

    def denormalize_output(self, value):
        return value * (self.max_output - self.min_output) + self.min_output


def fit_normalizer(dataset: Dataset) -> Normalizer:
    """Global extrema over all input components and all target components."""
    X = dataset.inputs_matrix()
    T = dataset.targets_matrix()
    min_input, max_input = float(X.min()), float(X.max())
    min_output, max_output = float(T.min()), float(T.max())
    if max_input <= min_input:
        raise DegenerateSpanError("input span is degenerate (max == min)")
    if max_output <= min_output:
        raise DegenerateSpanError("output span is degenerate (max == min)")
    return Normalizer(min_input, max_input, min_output, max_output)


def fit_normalizer_per_feature(dataset: Dataset) -> PerFeatureNormalizer:
    X = dataset.inputs_matrix()
    T = dataset.targets_matrix()
    mins_x, maxs_x = X.min(axis=0), X.max(axis=0)
    mins_t, maxs_t = T.min(axis=0), T.max(axis=0)
    if (maxs_x <= mins_x).any():
        raise DegenerateSpanError("an input feature span is degenerate")
    if (maxs_t <= mins_t).any():
        raise DegenerateSpanError("an output feature span is degenerate")
    return PerFeatureNormalizer(mins_x, maxs_x, mins_t, maxs_t)


def normalize(norm, dataset: Dataset) -> Dataset:
    """Scaled copy of the dataset; the original is left untouched.

    Components outside the fitted range map outside [0, 1]; no clamping.
    """
    return Dataset([(norm.normalize_input(x), norm.normalize_output(t))
                    for x, t in dataset.pairs])


def denormalize_output(norm, value):
    """Inverse of the output scaling: value * (max - min) + min."""
    return norm.denormalize_output(value)


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset as CSV with header x1..xn,y1..ym.

    Floats are rendered with the shortest representation that parses
    back to the same 64-bit value, so save -> load is exact.
    """
    n, m = dataset.input_dim, dataset.target_dim
    header = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(m)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for x, t in dataset.pairs:
            cells = [repr(float(v)) for v in x] + [repr(float(v)) for v in t]
            fh.write(",".join(cells) + "\n")


def load_csv(path) -> Dataset:
    """Read a dataset CSV; malformed content raises with the line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CsvParseError("line 1: missing header row")
    names = [c.strip() for c in lines[0].split(",")]
    n = 0
    while n < len(names) and names[n] == f"x{n + 1}":
        n += 1
    m = 0
    while n + m < len(names) and names[n + m] == f"y{m + 1}":
        m += 1
    if n == 0 or m == 0 or n + m != len(names):
        raise CsvParseError(f"line 1: expected header x1..xn,y1..ym, got {lines[0]!r}")
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != n + m:
            raise CsvParseError(
                f"line {lineno}: expected {n + m} columns, got {len(cells)}"
            )
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise CsvParseError(f"line {lineno}: non-numeric cell in {line!r}") from None
        if not all(np.isfinite(values)):
            raise CsvParseError(f"line {lineno}: non-finite value in {line!r}")
        pairs.append((values[:n], values[n:]))
    if not pairs:
        raise CsvParseError("line 2: no data rows")
    return Dataset(pairs)
