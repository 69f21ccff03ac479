"""Floating-strike lookback options on the one-state-variable binomial lattice.

Exact double-sum pricing, O(1)-CDF fast pricing, zero-rate series, closed
forms, first-period tree delta, fixed-strike variant, and the convergence
expansion linking the lattice values to the closed forms.
"""

from .binomial_tail import (
    TailInputs,
    TailTerms,
    binom_cdf,
    binom_tail,
    norm_cdf,
    norm_pdf,
    tail_estimate,
    tail_normal_estimate,
    tail_terms,
)
from .closed_form import (
    BsInputs,
    bs_call,
    bs_call_zero_rate,
    bs_delta,
    bs_inputs,
    bs_put,
    bs_put_zero_rate,
)
from .combinatorics import (
    LevelPmf,
    PayoffKind,
    brute_force_delta,
    brute_force_node_value,
    brute_force_price,
    level_pmf_call,
    level_pmf_put,
    path_count,
)
from .convergence import (
    ConvergenceRow,
    emit_rows,
    format_pretty,
    parse_rows,
    richardson,
    run_table,
)
from .errors import (
    CapacityError,
    DegenerateInputError,
    DomainError,
    IntegerBarrierError,
)
from .expansion import (
    PriceExpansion,
    approx_price,
    call_expansion,
    delta_expansion,
    fit_residual_order,
    put_expansion,
)
from .fixed_strike import FixedStrikeSetup, fixed_strike_setup, price_call_fixed
from .lattice import (
    delta_tree,
    price_call_exact,
    price_call_fast,
    price_call_follmer_schied,
    price_put_exact,
    price_put_fast,
    price_put_follmer_schied,
    value_after_down,
    value_after_up,
)
from .params import LatticeParams, ModelParams, build_lattice, validate

__all__ = [
    "BsInputs",
    "CapacityError",
    "ConvergenceRow",
    "DegenerateInputError",
    "DomainError",
    "FixedStrikeSetup",
    "IntegerBarrierError",
    "LatticeParams",
    "LevelPmf",
    "ModelParams",
    "PayoffKind",
    "PriceExpansion",
    "TailInputs",
    "TailTerms",
    "approx_price",
    "binom_cdf",
    "binom_tail",
    "brute_force_delta",
    "brute_force_node_value",
    "brute_force_price",
    "bs_call",
    "bs_call_zero_rate",
    "bs_delta",
    "bs_inputs",
    "bs_put",
    "bs_put_zero_rate",
    "build_lattice",
    "call_expansion",
    "delta_expansion",
    "delta_tree",
    "emit_rows",
    "fit_residual_order",
    "fixed_strike_setup",
    "format_pretty",
    "level_pmf_call",
    "level_pmf_put",
    "norm_cdf",
    "norm_pdf",
    "parse_rows",
    "path_count",
    "price_call_exact",
    "price_call_fast",
    "price_call_fixed",
    "price_call_follmer_schied",
    "price_put_exact",
    "price_put_fast",
    "price_put_follmer_schied",
    "put_expansion",
    "richardson",
    "run_table",
    "tail_estimate",
    "tail_normal_estimate",
    "tail_terms",
    "validate",
    "value_after_down",
    "value_after_up",
]
