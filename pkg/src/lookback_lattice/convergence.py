"""Convergence tables: lattice values against closed forms, scaled residuals.

Each row holds, for one n,

    scaled1 = (value_n - value_bs) * sqrt(n)          -> tends to pi1
    scaled2 = (value_n - value_bs - pi1/sqrt(n)) * n  -> tends to pi2

so a table printed next to the expansion coefficients makes the convergence
rate visible by inspection.  CSV output is full-precision and round-trips
exactly; the pretty format rounds for table-to-table eyeballing.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .closed_form import bs_call, bs_delta, bs_put
from .errors import DegenerateInputError, DomainError
from .expansion import (
    PriceExpansion,
    approx_price,
    call_expansion,
    delta_expansion,
    put_expansion,
)
from .lattice import delta_tree, price_call_fast, price_put_fast
from .params import ModelParams

TABLE_KINDS = ("call", "put", "call-r0", "delta")
DEFAULT_N_LIST = (1000, 5000, 10000, 50000, 100000)

CSV_COLUMNS = ("n", "value_n", "value_bs", "scaled1", "coeff1", "scaled2", "coeff2")


@dataclass(frozen=True, slots=True)
class ConvergenceRow:
    n: int
    value_n: float
    value_bs: float
    scaled1: float
    coeff1: float
    scaled2: float | None
    coeff2: float | None


def _evaluators(kind: str, model: ModelParams):
    if kind == "call":
        return price_call_fast, bs_call(model), call_expansion(model)
    if kind == "put":
        return price_put_fast, bs_put(model), put_expansion(model)
    if kind == "call-r0":
        if not model.is_zero_rate:
            raise DomainError("kind 'call-r0' requires a model with r == 0")
        return price_call_fast, bs_call(model), call_expansion(model)
    if kind == "delta":
        return delta_tree, bs_delta(model), delta_expansion(model)
    raise DomainError(f"kind must be one of {TABLE_KINDS}, got {kind!r}")


def make_row(n: int, value_n: float, value_bs: float, exp: PriceExpansion) -> ConvergenceRow:
    rn = math.sqrt(n)
    scaled1 = (value_n - value_bs) * rn
    if exp.pi2 is None:
        scaled2 = None
    else:
        scaled2 = (value_n - value_bs - exp.pi1 / rn) * n
    return ConvergenceRow(
        n=n,
        value_n=value_n,
        value_bs=value_bs,
        scaled1=scaled1,
        coeff1=exp.pi1,
        scaled2=scaled2,
        coeff2=exp.pi2,
    )


def run_table(
    kind: str, model: ModelParams, n_list: tuple[int, ...] = DEFAULT_N_LIST
) -> list[ConvergenceRow]:
    """One row per n; all rows computed before any is returned."""
    if not n_list:
        raise DomainError("n_list must be nonempty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("n_list must be strictly ascending")
    value_fn, value_bs, exp = _evaluators(kind, model)
    return [make_row(n, value_fn(model, n), value_bs, exp) for n in n_list]


def richardson(pairs: list[tuple[int, float]], order: float = 0.5) -> float:
    """Eliminate the n^(-order) error term across consecutive points:

        (n2^order * v2 - n1^order * v1) / (n2^order - n1^order);

    with more than two points the pass is applied to each consecutive pair
    and the most-refined (largest-n) combination is returned.
    """
    if len(pairs) < 2:
        raise DegenerateInputError(f"need >= 2 points, got {len(pairs)}")
    out = None
    for (n1, v1), (n2, v2) in zip(pairs, pairs[1:]):
        if n1 == n2:
            raise DegenerateInputError(f"duplicate n={n1} in extrapolation input")
        w1, w2 = float(n1) ** order, float(n2) ** order
        out = (w2 * v2 - w1 * v1) / (w2 - w1)
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _cell(x: float | int | None) -> str:
    return "" if x is None else repr(x)


def emit_rows(rows: list[ConvergenceRow], sep: str = ",") -> str:
    """Full-precision delimited output; parse_rows inverts it exactly."""
    lines = [sep.join(CSV_COLUMNS)]
    for r in rows:
        lines.append(
            sep.join(
                _cell(v)
                for v in (r.n, r.value_n, r.value_bs, r.scaled1, r.coeff1,
                          r.scaled2, r.coeff2)
            )
        )
    return "\n".join(lines) + "\n"


def parse_rows(text: str, sep: str = ",") -> list[ConvergenceRow]:
    lines = [ln for ln in io.StringIO(text).read().splitlines() if ln]
    if not lines or tuple(lines[0].split(sep)) != CSV_COLUMNS:
        raise DomainError("missing or malformed header row")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(sep)
        if len(cells) != len(CSV_COLUMNS):
            raise DomainError(f"row has {len(cells)} cells, expected {len(CSV_COLUMNS)}")
        rows.append(
            ConvergenceRow(
                n=int(cells[0]),
                value_n=float(cells[1]),
                value_bs=float(cells[2]),
                scaled1=float(cells[3]),
                coeff1=float(cells[4]),
                scaled2=float(cells[5]) if cells[5] else None,
                coeff2=float(cells[6]) if cells[6] else None,
            )
        )
    return rows


_PRETTY_SYMBOL = {"call": "C", "put": "P", "call-r0": "C", "delta": "delta"}


def format_pretty(kind: str, rows: list[ConvergenceRow], digits: int = 4) -> str:
    """Transposed layout: one labelled line per quantity, one column per n."""
    sym = _PRETTY_SYMBOL.get(kind, "V")
    labels = [
        "periods n",
        f"{sym}_n",
        f"{sym}_bs",
        f"({sym}_n - {sym}_bs)*sqrt(n)",
        f"{sym}1",
        f"({sym}_n - {sym}_bs - {sym}1/sqrt(n))*n",
        f"{sym}2",
    ]
    has_second = rows[0].scaled2 is not None

    def fmt(x: float | int | None) -> str:
        if x is None:
            return ""
        if isinstance(x, int):
            return str(x)
        return f"{x:.{digits}f}"

    columns = [
        [fmt(r.n), fmt(r.value_n), fmt(r.value_bs), fmt(r.scaled1),
         fmt(r.coeff1), fmt(r.scaled2), fmt(r.coeff2)]
        for r in rows
    ]
    n_lines = 7 if has_second else 5
    width = max(len(c) for col in columns for c in col)
    label_width = max(len(lb) for lb in labels)
    out = []
    for i in range(n_lines):
        cells = "  ".join(col[i].rjust(width) for col in columns)
        out.append(f"{labels[i]:<{label_width}}  {cells}")
    return "\n".join(out) + "\n"


def expansion_check(
    kind: str, model: ModelParams, n_list: tuple[int, ...]
) -> list[tuple[int, float]]:
    """Residuals value_n - approx(n) after removing all known coefficients;
    input for fit_residual_order."""
    value_fn, _, exp = _evaluators(kind, model)
    return [(n, value_fn(model, n) - approx_price(exp, n)) for n in n_list]
