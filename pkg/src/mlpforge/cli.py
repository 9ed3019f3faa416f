"""Command-line harness: generate | train | eval | gradcheck.

Exit codes are a stable contract: 0 success, 1 I/O failure, 2 usage or
configuration error, 3 training diverged to non-finite parameters,
4 gradient check failure.

Seeding convention: the dataset stream is DeterministicRng(seed) in
every command, so `generate linear3:N --seed S` and training or
evaluating with `--dataset linear3:N --seed S` all see the same data.
Network initialization and dropout draws use the adjacent stream
DeterministicRng(seed + 1).
"""

import argparse
import math
import os
import sys

from .activations import Activation
from .data import (
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
from .network import Mode, build_network, hidden_width, validate_topology
from .rng import DeterministicRng
from .training import Hyperparams, run_training

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_GRADCHECK = 4

SEED_ENV_VAR = "MLPFORGE_SEED"
_MASK64 = (1 << 64) - 1

# Canonical experiment presets: every constant pinned so each experiment
# is a single command.
PRESETS = {
    "or-paper": {
        "activation": "sigmoid",
        "layers": "2,2,1",
        "epochs": 150000,
        "rate": 0.5,
        "learning_rate": 0.1,
        "momentum": 0.05,
        "dropout": 0.3,
        "dataset": "or",
        "normalize": "none",
        "log_every": 1000,
    },
    "linear3-paper": {
        "activation": "sigmoid",
        "layers": "3,7,1",
        "epochs": 100000,
        "rate": 0.5,
        "learning_rate": 0.1,
        "momentum": 0.05,
        "dropout": 0.3,
        "dataset": "linear3:1000",
        "normalize": "global",
        "log_every": 1000,
    },
}

_TRAIN_DEFAULTS = {
    "activation": "sigmoid",
    "layers": "auto",
    "epochs": 1000,
    "rate": 0.5,
    "learning_rate": 0.1,
    "momentum": 0.05,
    "dropout": 0.3,
    "dataset": None,
    "normalize": "none",
    "paper_faithful": False,
    "log_every": 1000,
    "stop_below_rms": None,
    "seed": None,
}

_CONFIG_PARSERS = {
    "activation": str,
    "layers": str,
    "epochs": int,
    "rate": float,
    "learning_rate": float,
    "momentum": float,
    "dropout": float,
    "dataset": str,
    "normalize": str,
    "paper_faithful": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
    "log_every": int,
    "stop_below_rms": float,
    "seed": int,
}


def _parse_seed(value) -> int:
    return int(value) & _MASK64


def _resolve_seed(explicit) -> int:
    if explicit is not None:
        return _parse_seed(explicit)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return _parse_seed(env)
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV_VAR}={env!r} is not an integer") from None
    return 0


def _data_rng(seed: int) -> DeterministicRng:
    return DeterministicRng(seed)


def _train_rng(seed: int) -> DeterministicRng:
    return DeterministicRng((seed + 1) & _MASK64)


def _resolve_dataset(spec: str, seed: int):
    if spec is None:
        raise ConfigurationError("no dataset given (use --dataset or a preset)")
    if spec in ("or", "and", "xor"):
        return logic_gate_dataset(spec)
    if spec.startswith("linear3:"):
        try:
            count = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad linear3 count in {spec!r}") from None
        return random_linear_dataset(count, _data_rng(seed))
    if spec.startswith("csv:"):
        return load_csv(spec.split(":", 1)[1])
    raise ConfigurationError(
        f"unknown dataset spec {spec!r}; expected or|and|xor, linear3:<count>, or csv:<path>"
    )


def _parse_activation(tag: str) -> Activation:
    try:
        return Activation(tag)
    except ValueError:
        choices = ", ".join(a.value for a in Activation)
        raise ConfigurationError(f"unknown activation {tag!r}; choose from {choices}") from None


def _parse_layers(text: str, dataset=None):
    if text == "auto":
        if dataset is None:
            raise ConfigurationError("layers=auto requires a dataset")
        return [dataset.input_dim, hidden_width(dataset.input_dim), dataset.target_dim]
    try:
        sizes = [int(part) for part in text.split(",")]
    except ValueError:
        raise ConfigurationError(f"bad layers {text!r}; expected e.g. 2,2,1") from None
    return list(validate_topology(sizes))


def _read_config_file(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_PARSERS:
                raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_PARSERS[key](value.strip())
            except ValueError:
                raise ConfigurationError(
                    f"{path}:{lineno}: bad value for {key}: {value.strip()!r}"
                ) from None
    return values


def _format_vector(vec) -> str:
    return ",".join(repr(float(v)) for v in vec)


def cmd_generate(args) -> int:
    seed = _resolve_seed(args.seed)
    dataset = _resolve_dataset(args.dataset, seed)
    save_csv(dataset, args.out)
    print(f"wrote {len(dataset)} pairs to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = dict(_TRAIN_DEFAULTS)
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ConfigurationError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        cfg.update(PRESETS[args.preset])
    if args.config is not None:
        cfg.update(_read_config_file(args.config))
    for key in _TRAIN_DEFAULTS:
        if key == "paper_faithful":
            continue  # store_true flag, merged below so it can't unset a preset
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if args.paper_faithful:
        cfg["paper_faithful"] = True

    seed = _resolve_seed(cfg["seed"])
    dataset = _resolve_dataset(cfg["dataset"], seed)
    layers = _parse_layers(cfg["layers"], dataset)
    if layers[0] != dataset.input_dim or layers[-1] != dataset.target_dim:
        raise ConfigurationError(
            f"layers {layers} do not match dataset "
            f"{dataset.input_dim}->{dataset.target_dim}"
        )
    activation = _parse_activation(cfg["activation"])
    hyper = Hyperparams(rate=cfg["rate"], learning_rate=cfg["learning_rate"],
                        momentum=cfg["momentum"], dropout_prob=cfg["dropout"],
                        paper_faithful=bool(cfg["paper_faithful"]))

    norm = None
    train_set = dataset
    if cfg["normalize"] == "global":
        norm = fit_normalizer(dataset)
        train_set = normalize(norm, dataset)
    elif cfg["normalize"] == "per_feature":
        norm = fit_normalizer_per_feature(dataset)
        train_set = normalize(norm, dataset)
    elif cfg["normalize"] != "none":
        raise ConfigurationError(
            f"unknown normalize mode {cfg['normalize']!r}; "
            "expected global, per_feature, or none"
        )

    rng = _train_rng(seed)
    network = build_network(activation, layers, rng)
    log = run_training(
        network, train_set, int(cfg["epochs"]), hyper, int(cfg["log_every"]), rng,
        stop_below_rms=cfg["stop_below_rms"],
        progress=lambda epoch, rms: print(f"epoch={epoch} rms={rms!r}"))
    # the log snapshot records the command seed, not the derived stream seed
    log.seed = seed

    if args.log is not None:
        write_training_log(log, args.log)
    if log.diverged:
        finite = [(e, r) for e, r in log.entries if math.isfinite(r)]
        if finite:
            print(f"diverged last_finite_epoch={finite[-1][0]} "
                  f"last_finite_rms={finite[-1][1]!r}")
        else:
            print("diverged last_finite_epoch=none")
        return EXIT_DIVERGED
    with open(args.out, "wb") as fh:
        fh.write(save_model(network, norm))
    print(f"model={args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    seed = _resolve_seed(args.seed)
    with open(args.model, "rb") as fh:
        network, norm = load_model(fh.read())
    dataset = _resolve_dataset(args.dataset, seed)
    if (dataset.input_dim != network.layer_sizes[0]
            or dataset.target_dim != network.layer_sizes[-1]):
        raise DimensionError(
            f"dataset is {dataset.input_dim}->{dataset.target_dim}, model is "
            f"{network.layer_sizes[0]}->{network.layer_sizes[-1]}"
        )
    if args.denormalize and norm is None:
        raise ConfigurationError(
            "--denormalize needs a model with embedded normalizer bounds"
        )
    rng = _train_rng(seed)
    mode = Mode.TRAIN if args.paper_faithful else Mode.EVAL
    sse = 0.0
    count = 0
    for x, t in dataset.pairs:
        fed = norm.normalize_input(x) if norm is not None else x
        out = network.feed_forward(fed, mode, rng, args.dropout)
        shown = norm.denormalize_output(out) if args.denormalize else out
        print(f"input={_format_vector(x)} computed={_format_vector(shown)} "
              f"expected={_format_vector(t)}")
        for kk in range(len(t)):
            d = float(shown[kk]) - float(t[kk])
            sse += d * d
            count += 1
    rms = math.sqrt(sse / len(dataset.pairs))
    print(f"rms={rms!r}")
    return EXIT_OK


def _preactivations(network, input_vector):
    """Eval-mode pre-activation values per non-input neuron."""
    sizes = network.layer_sizes
    outs = [list(map(float, input_vector))]
    from .activations import _CALC
    calc = _CALC[network.activation]
    acts = []
    for k in range(1, len(sizes)):
        w = network.weights[k - 1]
        layer_out = []
        for d in range(sizes[k]):
            a = 0.0
            for s in range(sizes[k - 1]):
                a += w[d, s] * outs[k - 1][s]
            a -= network.thresholds[k][d]
            acts.append(a)
            layer_out.append(calc(a))
        outs.append(layer_out)
    return acts


def cmd_gradcheck(args) -> int:
    if args.h is None or args.h <= 0:
        raise ConfigurationError("h must be > 0")
    activation = _parse_activation(args.activation)
    layers = _parse_layers(args.layers)
    seed = _resolve_seed(args.seed)
    rng = DeterministicRng(seed)

    network = None
    x = t = None
    for _ in range(200):
        candidate = build_network(activation, layers, rng)
        x = [rng.uniform_signed() for _ in range(layers[0])]
        t = [rng.uniform() for _ in range(layers[-1])]
        if activation is not Activation.LEAKY_STEP:
            network = candidate
            break
        # keep away from the gate kink so central differences are clean
        if all(abs(a) >= 1e-3 for a in _preactivations(candidate, x)):
            network = candidate
            break
    if network is None:
        raise ConfigurationError("could not find a kink-free instance for leaky_step")

    analytic = compute_gradients(network, x, t)
    numeric = finite_difference_gradients(network, x, t, args.h)
    max_rel = 0.0
    for a, b in zip(analytic, numeric):
        if abs(a) <= 1e-8:
            continue
        rel = float(abs(a - b) / max(abs(a), abs(b)))
        if rel > max_rel:
            max_rel = rel
    threshold = 1e-3 if activation is Activation.LEAKY_STEP else 1e-4
    print(f"max_rel_err={max_rel!r} threshold={threshold!r}")
    return EXIT_OK if max_rel < threshold else EXIT_GRADCHECK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlpforge",
        description="Deterministic feed-forward network training harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a dataset CSV")
    p_gen.add_argument("dataset", help="or|and|xor, linear3:<count>, or csv:<path>")
    p_gen.add_argument("--out", required=True, help="output CSV path")
    p_gen.add_argument("--seed", type=int, default=None,
                       help=f"dataset seed (default: ${SEED_ENV_VAR} or 0)")
    p_gen.set_defaults(func=cmd_generate)

    p_train = sub.add_parser("train", help="train a network and save model + log")
    p_train.add_argument("--preset", default=None,
                         help="named preset: " + ", ".join(sorted(PRESETS)))
    p_train.add_argument("--config", default=None,
                         help="key=value config file; flags override it")
    p_train.add_argument("--dataset", default=None,
                         help="or|and|xor, linear3:<count>, or csv:<path>")
    p_train.add_argument("--activation", default=None,
                         help="tanh | sigmoid | leaky_step")
    p_train.add_argument("--layers", default=None,
                         help="comma list like 2,2,1, or auto for 2n+1 hidden width")
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.add_argument("--rate", type=float, default=None)
    p_train.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p_train.add_argument("--momentum", type=float, default=None)
    p_train.add_argument("--dropout", type=float, default=None)
    p_train.add_argument("--normalize", default=None,
                         choices=["global", "per_feature", "none"])
    p_train.add_argument("--log-every", dest="log_every", type=int, default=None)
    p_train.add_argument("--stop-below-rms", dest="stop_below_rms", type=float,
                         default=None)
    p_train.add_argument("--paper-faithful", dest="paper_faithful",
                         action="store_true",
                         help="log dropout-perturbed error each epoch")
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--out", default="mlpforge_model.json",
                         help="model output path")
    p_train.add_argument("--log", default="mlpforge_training_log.csv",
                         help="training log output path")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    p_eval.add_argument("model", help="model file from train")
    p_eval.add_argument("--dataset", required=True,
                        help="or|and|xor, linear3:<count>, or csv:<path>")
    p_eval.add_argument("--denormalize", action="store_true",
                        help="print outputs mapped back through the model's bounds")
    p_eval.add_argument("--paper-faithful", dest="paper_faithful",
                        action="store_true",
                        help="evaluate with dropout active (non-reproducible outputs)")
    p_eval.add_argument("--dropout", type=float, default=0.3,
                        help="dropout probability for --paper-faithful")
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_grad = sub.add_parser("gradcheck",
                            help="compare analytic and finite-difference gradients")
    p_grad.add_argument("--layers", required=True, help="comma list like 2,3,1")
    p_grad.add_argument("--activation", default="sigmoid")
    p_grad.add_argument("--seed", type=int, default=None)
    p_grad.add_argument("--h", type=float, default=1e-5)
    p_grad.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, DegenerateSpanError,
            DimensionError, CsvParseError, ModelLoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed the pipe (e.g. | head); exit quietly, and
        # point stdout at devnull so the shutdown flush cannot re-raise
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
