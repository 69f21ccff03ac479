"""Black-Scholes closed forms for floating-strike lookbacks and their delta.

With a1 = (r/sigma + sigma/2) sqrt(T) and a2 = (r/sigma - sigma/2) sqrt(T),
the call price at emission (Goldman-Sosin-Gatto) is

    C = S0 (1 + s) Phi(a1) - S0 e^{-rT} (1 - s) Phi(a2) - S0 s,
    s = sigma^2 / (2r),

the put follows from P = C - S0 (1 - e^{-rT})(1 - s), and the delta is the
same bracket divided by S0 (the price is homogeneous of degree one in S0).

r = 0 is a separate code path, not an epsilon-limit: the sigma^2/(2r) poles
cancel analytically but not numerically.  The zero-rate call (Babbs' limit)
is

    C = S0 sigma sqrt(T/(2 pi)) e^{-sigma^2 T / 8}
        + S0 Phi(x/2) - S0 Phi(-x/2) (1 + sigma^2 T / 2),   x = sigma sqrt(T),

and the zero-rate put adds S0 sigma^2 T / 2 to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .binomial_tail import norm_cdf, norm_pdf
from .params import ModelParams


@dataclass(frozen=True, slots=True)
class BsInputs:
    """Shared pieces of the closed forms (r != 0)."""

    a1: float
    a2: float
    vr: float    # sigma^2 / (2 r)
    disc: float  # e^{-rT}


def bs_inputs(model: ModelParams) -> BsInputs:
    if model.r == 0.0:
        raise DomainError("sigma^2/(2r) is undefined at r = 0; use the r=0 forms")
    sq_t = math.sqrt(model.t)
    return BsInputs(
        a1=(model.r / model.sigma + model.sigma / 2.0) * sq_t,
        a2=(model.r / model.sigma - model.sigma / 2.0) * sq_t,
        vr=model.sigma**2 / (2.0 * model.r),
        disc=math.exp(-model.r * model.t),
    )


def _bracket(model: ModelParams) -> float:
    """(1+s)Phi(a1) - e^{-rT}(1-s)Phi(a2) - s; price/S0 and also the delta."""
    b = bs_inputs(model)
    return (
        (1.0 + b.vr) * norm_cdf(b.a1)
        - b.disc * (1.0 - b.vr) * norm_cdf(b.a2)
        - b.vr
    )


def bs_call(model: ModelParams) -> float:
    if model.is_zero_rate:
        return bs_call_zero_rate(model)
    return model.s0 * _bracket(model)


def bs_put(model: ModelParams) -> float:
    if model.is_zero_rate:
        return bs_put_zero_rate(model)
    b = bs_inputs(model)
    return bs_call(model) - model.s0 * (1.0 - b.disc) * (1.0 - b.vr)


def bs_call_zero_rate(model: ModelParams) -> float:
    x = model.sigma * math.sqrt(model.t)
    return model.s0 * (
        x / math.sqrt(2.0 * math.pi) * math.exp(-x * x / 8.0)
        + norm_cdf(x / 2.0)
        - norm_cdf(-x / 2.0) * (1.0 + x * x / 2.0)
    )


def bs_put_zero_rate(model: ModelParams) -> float:
    x2 = model.sigma**2 * model.t
    return bs_call_zero_rate(model) + model.s0 * x2 / 2.0


def bs_delta(model: ModelParams) -> float:
    """Sensitivity of the call to the spot; equals bs_call / S0 exactly."""
    return _bracket(model)
