"""Convergence-expansion coefficients of the lattice prices and delta.

The n-period price of either floating-strike option admits

    price_n = price_bs + pi1 / sqrt(n) + pi2 / n + O(n^(-3/2))      (r != 0)

with constant coefficients

    call: pi1 = (sigma sqrt(T)/2) (C - S0)
          pi2 = (sigma^2 T/12) (C + 2 S0 [Phi(a1) - e^{-rT} Phi(a2) - 3/2])
                + S0 (sigma sqrt(T)/2) phi(a1)
    put:  pi1 = -(sigma sqrt(T)/2) (P + S0)
          pi2 = (sigma^2 T/12) (P + 2 S0 [Phi(a1) - e^{-rT}(Phi(a2) - 1) + 1/2])
                + S0 (sigma sqrt(T)/2) phi(a1)

(phi the standard normal density).  At r = 0 the sqrt-term coefficient has
the same form around the zero-rate closed forms and the 1/n coefficient is
not available (it would need a two-orders-deeper tail expansion).  The tree
delta satisfies

    delta_n = delta_bs - [ (sigma^2/2r) a1 Phi(-a1)
                           - e^{-rT} (1 - sigma^2/2r) a2 Phi(a2)
                           - phi(a1) ] / sqrt(n) + O(1/n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import (
    bs_call,
    bs_delta,
    bs_inputs,
    bs_put,
)
from .binomial_tail import norm_cdf, norm_pdf
from .errors import DegenerateInputError, DomainError
from .params import ModelParams


@dataclass(frozen=True, slots=True)
class PriceExpansion:
    """Leading expansion of a lattice quantity around its closed form."""

    kind: str           # "call" | "put" | "delta"
    pi0: float          # closed-form limit
    pi1: float          # coefficient of n^(-1/2)
    pi2: float | None   # coefficient of n^(-1); None for delta and at r = 0
    r_zero: bool = False


def call_expansion(model: ModelParams) -> PriceExpansion:
    c = bs_call(model)
    half_vol = model.sigma * math.sqrt(model.t) / 2.0
    pi1 = half_vol * (c - model.s0)
    if model.is_zero_rate:
        return PriceExpansion("call", c, pi1, None, r_zero=True)
    b = bs_inputs(model)
    pi2 = (
        model.sigma**2 * model.t / 12.0
        * (c + 2.0 * model.s0 * (norm_cdf(b.a1) - b.disc * norm_cdf(b.a2) - 1.5))
        + model.s0 * half_vol * norm_pdf(b.a1)
    )
    return PriceExpansion("call", c, pi1, pi2)


def put_expansion(model: ModelParams) -> PriceExpansion:
    p = bs_put(model)
    half_vol = model.sigma * math.sqrt(model.t) / 2.0
    pi1 = -half_vol * (p + model.s0)
    if model.is_zero_rate:
        return PriceExpansion("put", p, pi1, None, r_zero=True)
    b = bs_inputs(model)
    pi2 = (
        model.sigma**2 * model.t / 12.0
        * (p + 2.0 * model.s0
           * (norm_cdf(b.a1) - b.disc * (norm_cdf(b.a2) - 1.0) + 0.5))
        + model.s0 * half_vol * norm_pdf(b.a1)
    )
    return PriceExpansion("put", p, pi1, pi2)


def delta_expansion(model: ModelParams) -> PriceExpansion:
    if model.is_zero_rate:
        raise DomainError("the delta expansion requires r != 0")
    b = bs_inputs(model)
    pi1 = -(
        b.vr * b.a1 * norm_cdf(-b.a1)
        - b.disc * (1.0 - b.vr) * b.a2 * norm_cdf(b.a2)
        - norm_pdf(b.a1)
    )
    return PriceExpansion("delta", bs_delta(model), pi1, None)


def approx_price(expansion: PriceExpansion, n: int) -> float:
    """pi0 + pi1/sqrt(n) + pi2/n (pi2 treated as zero when absent)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    pi2 = expansion.pi2 or 0.0
    return expansion.pi0 + expansion.pi1 / math.sqrt(n) + pi2 / n


def fit_residual_order(series: list[tuple[int, float]]) -> float:
    """Least-squares slope of log|residual| against log n.

    A clean power law c*n^e returns e; the pricers' residuals after
    removing the known coefficients should fit at or below the advertised
    remainder order.
    """
    if len(series) < 4:
        raise DegenerateInputError(f"need >= 4 points, got {len(series)}")
    ns = np.array([float(n) for n, _ in series])
    res = np.array([abs(r) for _, r in series])
    if np.any(np.diff(ns) <= 0.0):
        raise DegenerateInputError("n values must be strictly increasing")
    if np.any(res == 0.0):
        raise DegenerateInputError("zero residual cannot enter a log fit")
    slope, _ = np.polyfit(np.log(ns), np.log(res), 1)
    return float(slope)
