"""Command-line entry point: ``phuihide <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 parse error, 4 invariant
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exceptions import ConfigError, InvariantError, ParseError, PhuiError
from .harness import (
    ALGORITHMS,
    SWEEP_AXES,
    RunConfig,
    SelectionMode,
    _prepare,
    run_pipeline,
    run_sanitizer,
    select_sensitive,
    sweep,
    sweep_csv,
)
from .io import FormatKind, generate_synthetic, parse_itemsets, read_dataset, save_dataset, write_itemsets
from .metrics import evaluate
from .mining import mine_phuis
from .model import Thresholds

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_INVARIANT = 0, 2, 3, 4


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _add_input(p):
    p.add_argument("--input", required=True, help="transaction file")
    p.add_argument("--format", choices=[k.value for k in FormatKind], default=FormatKind.QUANTITY.value)
    p.add_argument("--utable", help="utility table (quantity format only)")


def _add_thresholds(p):
    p.add_argument("--minutil", type=int, required=True)
    p.add_argument("--minper", type=int, default=1)
    p.add_argument("--maxper", type=int, required=True)
    p.add_argument("--minavg", type=_fraction, default=Fraction(1))
    p.add_argument("--maxavg", type=_fraction, required=True)


def _add_selection(p):
    p.add_argument("--sep", type=_fraction, default=Fraction(1, 20), help="fraction of mined PHUIs to hide")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in SelectionMode], default=SelectionMode.RANDOM.value)
    p.add_argument("--sensitive-file", help="explicit sensitive itemsets, one per line")


def _thresholds(args) -> Thresholds:
    return Thresholds(args.minutil, args.minper, args.maxper, args.minavg, args.maxavg)


def _config(args, **extra) -> RunConfig:
    return RunConfig(
        input=args.input,
        format=FormatKind(args.format),
        utable=args.utable,
        thresholds=_thresholds(args),
        sep=getattr(args, "sep", None),
        seed=getattr(args, "seed", 0),
        algorithm=getattr(args, "algo", "mu-map"),
        mode=SelectionMode(getattr(args, "mode", "random")),
        sensitive_file=getattr(args, "sensitive_file", None),
        **extra,
    )


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


def cmd_gen(args) -> int:
    data = generate_synthetic(
        args.seed, args.n_transactions, args.n_items, args.avg_len, args.max_qty, args.max_eu,
        args.periodicity_bias, stride=args.stride, planted_item=args.planted_item,
        min_qty=args.min_qty, min_eu=args.min_eu,
    )
    kind = FormatKind(args.format)
    if kind is FormatKind.QUANTITY and args.utable is None:
        raise ConfigError("the quantity format needs --utable for the utility table output")
    save_dataset(data, args.out, kind, args.utable)
    return EXIT_OK


def cmd_mine(args) -> int:
    data = read_dataset(args.input, args.format, args.utable)
    records = mine_phuis(data, _thresholds(args))
    _emit(json.dumps([r.as_dict() for r in records], indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    data = read_dataset(args.input, args.format, args.utable)
    records = mine_phuis(data, _thresholds(args))
    _emit(write_itemsets(select_sensitive(records, args.sep, args.seed, args.mode)), args.out)
    return EXIT_OK


def cmd_sanitize(args) -> int:
    config = _config(args)
    data, pi_before, spi, _ = _prepare(config)
    sanitized, report = run_sanitizer(config.algorithm, data, spi, config.thresholds, pi_before)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = FormatKind(args.format)
    name = "sanitized.txt" if kind is FormatKind.QUANTITY else "sanitized.spmf"
    utable = out / "utility_table.txt" if kind is FormatKind.QUANTITY else None
    save_dataset(sanitized, out / name, kind, utable)
    (out / "report.jsonl").write_text(report.to_jsonl(), encoding="utf-8")
    (out / "sensitive.txt").write_text(write_itemsets(spi), encoding="utf-8")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    th = _thresholds(args)
    original = read_dataset(args.input, args.format, args.utable)
    sanitized = read_dataset(args.sanitized, args.format, args.sanitized_utable or args.utable)
    spi = parse_itemsets(Path(args.sensitive_file).read_text(encoding="utf-8"))
    metrics = evaluate(original, sanitized, mine_phuis(original, th), spi, mine_phuis(sanitized, th))
    if args.out is None:
        sys.stdout.write(metrics.to_json())
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(metrics.to_json(), encoding="utf-8")
        (out / "metrics.csv").write_text(metrics.to_csv(), encoding="utf-8")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    art = run_pipeline(_config(args, out=args.out, verify=args.verify))
    sys.stdout.write(art.metrics.to_json())
    return EXIT_OK


def cmd_sweep(args) -> int:
    algos = tuple(a.strip() for a in args.algos.split(",") if a.strip())
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown or not algos:
        raise ConfigError(f"unknown algorithms: {unknown}")
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    parsed = [_fraction(v) if args.axis == "sep" else int(v) for v in values]
    rows = sweep(_config(args), args.axis, parsed, algos)
    _emit(sweep_csv(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phuihide", description="Mine and hide periodic high-utility itemsets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded synthetic database")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-transactions", type=int, default=1000)
    p.add_argument("--n-items", type=int, default=50)
    p.add_argument("--avg-len", type=float, default=5.0)
    p.add_argument("--max-qty", type=int, default=5)
    p.add_argument("--min-qty", type=int, default=1)
    p.add_argument("--max-eu", type=int, default=10)
    p.add_argument("--min-eu", type=int, default=1)
    p.add_argument("--periodicity-bias", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--planted-item", type=int, default=1)
    p.add_argument("--format", choices=[k.value for k in FormatKind], default=FormatKind.QUANTITY.value)
    p.add_argument("--utable", help="utility table output path (quantity format)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("mine", help="mine PHUIs to JSON")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("select", help="mine, then pick sensitive itemsets")
    _add_input(p)
    _add_thresholds(p)
    _add_selection(p)
    p.set_defaults(sensitive_file=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("sanitize", help="hide sensitive itemsets and write the sanitized database")
    _add_input(p)
    _add_thresholds(p)
    _add_selection(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="mu-map")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sanitize)

    p = sub.add_parser("evaluate", help="side-effect metrics between two databases")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--sanitized", required=True)
    p.add_argument("--sanitized-utable", help="defaults to --utable")
    p.add_argument("--sensitive-file", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="mine, select, sanitize, re-mine and evaluate")
    _add_input(p)
    _add_thresholds(p)
    _add_selection(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="mu-map")
    p.add_argument("--verify", action="store_true", help="rebuild the ledgers after every edit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("sweep", help="run every algorithm over a grid of one parameter")
    _add_input(p)
    _add_thresholds(p)
    _add_selection(p)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--values", required=True, help="comma-separated")
    p.add_argument("--algos", default=",".join(ALGORITHMS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        return _fail(exc, EXIT_INVARIANT)
    except ParseError as exc:
        return _fail(exc, EXIT_PARSE)
    except (PhuiError, ValueError, OSError, argparse.ArgumentTypeError) as exc:
        return _fail(exc, EXIT_CONFIG)


def _fail(exc, code: int) -> int:
    stage = getattr(exc, "stage", None)
    prefix = f"error ({stage})" if stage else "error"
    print(f"{prefix}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
