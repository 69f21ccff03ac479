"""Command-line harness: prices, deltas, convergence tables, path oracle.

Data goes to stdout, diagnostics to stderr.  Exit codes: 0 success,
2 domain error, 3 capacity limit.
"""

from __future__ import annotations

import argparse
import sys

from .combinatorics import brute_force_price
from .convergence import (
    DEFAULT_N_LIST,
    emit_rows,
    format_pretty,
    run_table,
)
from .errors import CapacityError, DomainError
from .fixed_strike import price_call_fixed
from .lattice import (
    delta_tree,
    price_call_exact,
    price_call_fast,
    price_put_exact,
    price_put_fast,
)
from .closed_form import bs_call, bs_delta, bs_put
from .params import ModelParams


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s0", type=float, default=80.0, help="spot price")
    p.add_argument("--r", type=float, default=0.08, help="risk-free rate (cc)")
    p.add_argument("--sigma", type=float, default=0.2, help="volatility")
    p.add_argument("--t", type=float, default=1.0, help="time to maturity (years)")


def _model(args: argparse.Namespace) -> ModelParams:
    return ModelParams(s0=args.s0, r=args.r, sigma=args.sigma, t=args.t)


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise DomainError(f"bad n list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lookback-lattice",
        description="Floating-strike lookback options on the binomial lattice",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="price a floating-strike lookback")
    _add_model_args(p_price)
    p_price.add_argument("--kind", choices=("call", "put"), default="call")
    p_price.add_argument("--n", type=int, required=True, help="number of periods")
    p_price.add_argument(
        "--method", choices=("fast", "exact"), default="fast",
        help="CDF-form evaluation or the reference double sum",
    )
    p_price.add_argument("--digits", type=int, default=4)

    p_delta = sub.add_parser("delta", help="first-period tree delta of the call")
    _add_model_args(p_delta)
    p_delta.add_argument("--n", type=int, required=True)
    p_delta.add_argument("--digits", type=int, default=4)

    p_table = sub.add_parser("table", help="convergence table against closed form")
    _add_model_args(p_table)
    p_table.add_argument(
        "--kind", choices=("call", "put", "call-r0", "delta"), default="call"
    )
    p_table.add_argument(
        "--n-list", type=str, default=",".join(str(n) for n in DEFAULT_N_LIST),
        help="comma-separated ascending period counts",
    )
    p_table.add_argument("--format", choices=("csv", "tsv", "pretty"), default="pretty")
    p_table.add_argument("--digits", type=int, default=4)

    p_fixed = sub.add_parser("fixed", help="fixed-strike lookback call")
    _add_model_args(p_fixed)
    p_fixed.add_argument("--strike", type=float, required=True)
    p_fixed.add_argument("--n", type=int, required=True)
    p_fixed.add_argument("--digits", type=int, default=4)

    p_oracle = sub.add_parser("oracle", help="exhaustive path-enumeration price")
    _add_model_args(p_oracle)
    p_oracle.add_argument(
        "--kind",
        choices=("floating-call", "floating-put", "fixed-call"),
        default="floating-call",
    )
    p_oracle.add_argument("--n", type=int, required=True)
    p_oracle.add_argument("--strike", type=float, default=None)
    p_oracle.add_argument("--digits", type=int, default=4)

    return parser


def _run(args: argparse.Namespace) -> None:
    d = args.digits
    if args.command == "price":
        model = _model(args)
        if args.kind == "call":
            fn = price_call_fast if args.method == "fast" else price_call_exact
            closed = bs_call(model)
        else:
            fn = price_put_fast if args.method == "fast" else price_put_exact
            closed = bs_put(model)
        print(f"{fn(model, args.n):.{d}f}")
        print(f"closed form: {closed:.{d}f}", file=sys.stderr)
    elif args.command == "delta":
        model = _model(args)
        print(f"{delta_tree(model, args.n):.{d}f}")
        print(f"closed form: {bs_delta(model):.{d}f}", file=sys.stderr)
    elif args.command == "table":
        model = _model(args)
        rows = run_table(args.kind, model, _parse_n_list(args.n_list))
        if args.format == "pretty":
            sys.stdout.write(format_pretty(args.kind, rows, d))
        else:
            sys.stdout.write(emit_rows(rows, sep="," if args.format == "csv" else "\t"))
    elif args.command == "fixed":
        model = _model(args)
        print(f"{price_call_fixed(model, args.strike, args.n):.{d}f}")
    elif args.command == "oracle":
        model = _model(args)
        value = brute_force_price(model, args.n, args.kind, strike=args.strike)
        print(f"{value:.{d}f}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
