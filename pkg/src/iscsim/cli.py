"""Command-line front end: experiment drivers, file I/O, CSV emission.

Every subcommand resolves its configuration from an optional flat
key=value config file plus flag overrides, writes a manifest echoing the
resolved configuration, and is fully deterministic given --seed.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 validation error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .datasets import as_uint8, blob_dataset
from .fault import STREAM_BITS, WORD_BITS, fault_sweep, sweep_csv
from .fsm import EXP, TANH, FsmConfig, fsm_transfer_curve, transfer_curve_csv
from .idx import IdxFormatError, read_idx_images, read_idx_labels
from .lfsr import Lfsr, expand_seeds
from .network import (NetworkConfig, StochasticEngine, calibrate_range,
                      fixed_point_infer, train_small_mlp)
from .ops import mul_bipolar, mul_unipolar, or_add, scaled_add
from .streams import BIPOLAR, UNIPOLAR, DomainError, b2s, decode
from .weights_io import WeightFileError, load_weights, save_weights

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit."""

    def error(self, message):
        raise UsageError(message)


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip() != ""]


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def read_config_file(path: Path) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment; blank lines ignored."""
    result: dict[str, str] = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        result[key.strip().replace("-", "_")] = value.strip()
    return result


def _apply_config(args: argparse.Namespace, parser: _Parser) -> argparse.Namespace:
    """Config file values fill in any option still at its default."""
    if not getattr(args, "config", None):
        return args
    path = Path(args.config)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    file_values = read_config_file(path)
    actions = {a.dest: a for a in parser._actions}
    for key, value in file_values.items():
        if key not in vars(args) or key not in actions:
            raise UsageError(f"unknown config key {key!r}")
        action = actions[key]
        if vars(args)[key] == action.default:
            if isinstance(action, argparse._StoreTrueAction):
                setattr(args, key, value.lower() in ("1", "true", "yes"))
            elif action.type is not None:
                setattr(args, key, action.type(value))
            else:
                setattr(args, key, value)
    return args


def write_manifest(out_dir: Path, subcommand: str,
                   args: argparse.Namespace) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"subcommand = {subcommand}"]
    for key in sorted(vars(args)):
        if key in ("func", "subcommand"):
            continue
        lines.append(f"{key} = {vars(args)[key]}")
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _load_inputs(args, in_dim: int, n_classes: int):
    """Image/label arrays from IDX files or the synthetic generator."""
    if args.images and args.labels:
        images = read_idx_images(Path(args.images))
        labels = read_idx_labels(Path(args.labels))
        if len(images) != len(labels):
            raise WeightFileError(
                f"image count {len(images)} != label count {len(labels)}")
        if images.shape[1] != in_dim:
            raise WeightFileError(
                f"image size {images.shape[1]} != network input {in_dim}")
        return images, labels
    if args.images or args.labels:
        raise UsageError("--images and --labels must be given together")
    data_seed = args.seed if args.synthetic_seed is None else args.synthetic_seed
    x, y = blob_dataset(n_classes, in_dim, args.synthetic_per_class, data_seed)
    return as_uint8(x), y


# ---------------------------------------------------------------- primitives

_PRIMITIVE_OPS = {
    "mul_unipolar": (mul_unipolar, UNIPOLAR, lambda a, b: a * b),
    "mul_bipolar": (mul_bipolar, BIPOLAR, lambda a, b: a * b),
    "scaled_add": (scaled_add, UNIPOLAR, lambda a, b: (a + b) / 2.0),
    "or_add": (or_add, UNIPOLAR, lambda a, b: a + b - a * b),
}


def cmd_primitives(args) -> int:
    out_dir = Path(args.out)
    write_manifest(out_dir, "primitives", args)
    ops = [args.op] if args.op else list(_PRIMITIVE_OPS)
    lengths = _parse_ints(args.lengths)
    width = args.lfsr_width
    rows = []
    for op_name in ops:
        if op_name not in _PRIMITIVE_OPS:
            raise UsageError(f"unknown op {op_name!r}; choose from "
                             f"{sorted(_PRIMITIVE_OPS)}")
        fn, fmt, exact = _PRIMITIVE_OPS[op_name]
        if args.a is not None and args.b is not None:
            grid_a = [args.a]
            grid_b = [args.b]
        else:
            base = np.linspace(0.0, 1.0, args.grid)
            grid_a = grid_b = (2 * base - 1 if fmt == BIPOLAR else base)
        for n in lengths:
            for seed_i in range(args.n_seeds):
                seeds = expand_seeds(args.seed + 1000 * seed_i, 3, width)
                for a in grid_a:
                    for b in grid_b:
                        sa = b2s(float(a), n, Lfsr(width, int(seeds[0])), fmt=fmt)
                        sb = b2s(float(b), n, Lfsr(width, int(seeds[1])), fmt=fmt)
                        if op_name == "scaled_add":
                            sel = b2s(0.5, n, Lfsr(width, int(seeds[2])))
                            emp = decode(fn(sa, sb, sel))
                        else:
                            emp = decode(fn(sa, sb))
                        want = exact(float(a), float(b))
                        rows.append((op_name, float(a), float(b), n, seed_i,
                                     want, emp, abs(emp - want)))
    with open(out_dir / "primitives.csv", "w") as fh:
        fh.write("op,a,b,length,seed,expected,empirical,abs_error\n")
        for op_name, a, b, n, s, want, emp, err in rows:
            fh.write(f"{op_name},{a:.10g},{b:.10g},{n},{s},"
                     f"{want:.10g},{emp:.10g},{err:.10g}\n")
    print(f"primitives: {len(rows)} rows -> {out_dir / 'primitives.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- fsm-curves

def cmd_fsm_curves(args) -> int:
    out_dir = Path(args.out)
    write_manifest(out_dir, "fsm-curves", args)
    m_list = _parse_ints(args.m_list)
    for m in m_list:
        if args.mode == TANH:
            cfg = FsmConfig(n_states=m * args.n, mode=TANH)
            grid = np.linspace(-m, m, args.points)
        else:
            cfg = FsmConfig(n_states=m * args.n, mode=EXP, gain=m * args.gain)
            grid = np.linspace(m / args.points, m, args.points)
        rows = fsm_transfer_curve(cfg, m, [float(s) for s in grid],
                                  args.length, args.seed + m,
                                  lfsr_width=args.lfsr_width)
        path = out_dir / f"fsm_curve_{args.mode}_m{m}.csv"
        with open(path, "w") as fh:
            transfer_curve_csv(rows, fh)
        print(f"fsm-curves: mode={args.mode} m={m} -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------- infer

def _engine_config(args) -> NetworkConfig:
    m_prime = tuple(_parse_ints(args.m_prime)) if args.m_prime else None
    return NetworkConfig(m_weight=args.m, stream_length=args.length,
                         m_prime=m_prime)


def cmd_infer(args) -> int:
    net = load_weights(Path(args.weights))
    if args.validate_only:
        dims = [net[0].in_dim] + [l.out_dim for l in net]
        print(f"weights file OK: dims {'-'.join(map(str, dims))}")
        return EXIT_OK
    out_dir = Path(args.out)
    write_manifest(out_dir, "infer", args)
    images, labels = _load_inputs(args, net[0].in_dim, net[-1].out_dim)
    if args.limit is not None:
        if args.limit <= 0:
            raise WeightFileError(f"--limit must be positive, got {args.limit}")
        images, labels = images[:args.limit], labels[:args.limit]
    if args.engine == "stochastic":
        engine = StochasticEngine(net, _engine_config(args), args.seed)
        predicted = [engine.infer(img).label for img in images]
    else:
        predicted = [int(np.argmax(fixed_point_infer(img, net)))
                     for img in images]
    wrong = sum(p != int(t) for p, t in zip(predicted, labels))
    err = wrong / len(labels)
    with open(out_dir / "predictions.csv", "w") as fh:
        fh.write("index,label,predicted\n")
        for i, (t, p) in enumerate(zip(labels, predicted)):
            fh.write(f"{i},{int(t)},{p}\n")
    report = (f"engine = {args.engine}\nimages = {len(labels)}\n"
              f"errors = {wrong}\nerror_rate = {err:.6f}\n")
    (out_dir / "report.txt").write_text(report)
    print(report, end="")
    return EXIT_OK


# ---------------------------------------------------------------- calibrate

def cmd_calibrate(args) -> int:
    net = load_weights(Path(args.weights))
    out_dir = Path(args.out)
    write_manifest(out_dir, "calibrate", args)
    if not 1 <= args.layer <= len(net) - 1:
        raise WeightFileError(
            f"--layer must name a hidden layer in 1..{len(net) - 1}")
    images, _ = _load_inputs(args, net[0].in_dim, net[-1].out_dim)
    sample = images[:args.samples]
    if len(sample) == 0:
        raise WeightFileError("no calibration samples available")
    m_prime = calibrate_range(net, args.layer - 1, sample,
                              _engine_config(args), args.seed,
                              coverage=args.coverage)
    (out_dir / "calibration.txt").write_text(
        f"layer = {args.layer}\nm_prime = {m_prime}\n")
    print(f"layer {args.layer}: m_prime = {m_prime}")
    return EXIT_OK


# ---------------------------------------------------------------- fault-sweep

def cmd_fault_sweep(args) -> int:
    net = load_weights(Path(args.weights))
    out_dir = Path(args.out)
    write_manifest(out_dir, "fault-sweep", args)
    images, labels = _load_inputs(args, net[0].in_dim, net[-1].out_dim)
    if args.limit is not None:
        images, labels = images[:args.limit], labels[:args.limit]
    rows = fault_sweep(net, _engine_config(args),
                       _parse_floats(args.p1), _parse_floats(args.p2),
                       _parse_ints(args.lengths), images, labels,
                       _parse_ints(args.sweep_seeds), engine=args.engine)
    path = out_dir / "fault_sweep.csv"
    with open(path, "w") as fh:
        sweep_csv(rows, fh)
    print(f"fault-sweep: {len(rows)} rows -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------- train-toy

def cmd_train_toy(args) -> int:
    out_dir = Path(args.out)
    write_manifest(out_dir, "train-toy", args)
    dims = _parse_ints(args.dims)
    if len(dims) < 2:
        raise UsageError("--dims needs at least input and output sizes")
    x, y = blob_dataset(dims[-1], dims[0], args.per_class, args.seed)
    split = int(0.8 * len(y))
    net = train_small_mlp(x[:split], y[:split], dims,
                          epochs=args.epochs, lr=args.lr, seed=args.seed)
    path = out_dir / args.weights_name
    save_weights(path, net)
    correct = sum(int(np.argmax(fixed_point_infer(xi, net))) == int(yi)
                  for xi, yi in zip(x[split:], y[split:]))
    acc = correct / max(1, len(y) - split)
    print(f"train-toy: dims {'-'.join(map(str, dims))} "
          f"holdout accuracy {acc:.3f} -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def _add_common(p: _Parser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.add_argument("--config", default=None)
    p.add_argument("--threads", type=int, default=1)


def _add_data_flags(p: _Parser) -> None:
    p.add_argument("--images", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--synthetic-per-class", type=int, default=20)
    p.add_argument("--synthetic-seed", type=int, default=None)


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="iscsim")
    sub = parser.add_subparsers(dest="subcommand")

    p = sub.add_parser("primitives", parents=[], add_help=True)
    _add_common(p)
    p.add_argument("--op", default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--lengths", default="1024")
    p.add_argument("--n-seeds", type=int, default=1)
    p.add_argument("--lfsr-width", type=int, default=16)
    p.set_defaults(func=cmd_primitives)

    p = sub.add_parser("fsm-curves")
    _add_common(p)
    p.add_argument("--mode", choices=(TANH, EXP), default=TANH)
    p.add_argument("--m-list", default="1,2,4,8")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--gain", type=int, default=1)
    p.add_argument("--points", type=int, default=17)
    p.add_argument("--length", type=int, default=4096)
    p.add_argument("--lfsr-width", type=int, default=16)
    p.set_defaults(func=cmd_fsm_curves)

    p = sub.add_parser("infer")
    _add_common(p)
    _add_data_flags(p)
    p.add_argument("--weights", required=True)
    p.add_argument("--engine", choices=("stochastic", "fixed"),
                   default="stochastic")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--length", type=int, default=256)
    p.add_argument("--m-prime", default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--validate-only", action="store_true")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("calibrate")
    _add_common(p)
    _add_data_flags(p)
    p.add_argument("--weights", required=True)
    p.add_argument("--layer", type=int, default=1)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--length", type=int, default=256)
    p.add_argument("--m-prime", default=None)
    p.add_argument("--coverage", type=float, default=0.95)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("fault-sweep")
    _add_common(p)
    _add_data_flags(p)
    p.add_argument("--weights", required=True)
    p.add_argument("--engine", choices=("stochastic", "fixed"),
                   default="stochastic")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--length", type=int, default=256)
    p.add_argument("--m-prime", default=None)
    p.add_argument("--p1", default="0,0.09")
    p.add_argument("--p2", default="0,0.16")
    p.add_argument("--lengths", default="256")
    p.add_argument("--sweep-seeds", default="0")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_fault_sweep)

    p = sub.add_parser("train-toy")
    _add_common(p)
    p.add_argument("--dims", default="16,8,8,4")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--lr", type=float, default=2.0)
    p.add_argument("--per-class", type=int, default=60)
    p.add_argument("--weights-name", default="toy-weights.json")
    p.set_defaults(func=cmd_train_toy)

    return parser, dict(sub.choices)


def main(argv: list[str] | None = None) -> int:
    parser, subparsers = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "subcommand", None):
            parser.print_usage()
            return EXIT_USAGE
        args = _apply_config(args, subparsers[args.subcommand])
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (WeightFileError, IdxFormatError, DomainError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
