"""Fixed-strike lookback call on the same one-state-variable lattice.

The option is decomposed at each step into banked gain plus a fresh option
on the moving strike K* = max(running max, K).  Every up-move out of the
barrier level converts one step of gain, so the price is a sum over the
first-passage times of level-0 (or fractional-level) visits weighted by the
level distribution of the max-tracking tree.

With S0 >= K the tree starts at level 0 and

    C = S0 p (u-1) e^{-rT} sum_{m=0}^{n-1} e^{rTm/n} P_m(0)  +  (S0-K) e^{-rT},

P_m(0) the level-0 mass after m steps.  With S0 < K the start level is
j0 = ln(K/S0)/(sigma sqrt(T/n)) (non-integer required); gains arise both
from level-0 up-moves after the strike has first been bumped and from
up-moves at the fractional level {j0} that bump it again:

    C = S0 p (u-1)      sum_{m=floor(j0)+1}^{n-1} e^{-rT(n-m)/n} T0(m)
      + S0 p (u-u^{j0 frac}) sum_{k=0}^{l2} e^{-rT(n-floor(j0)-2k)/n}
                               Lambda(0, k, floor(j0)+2k) (1-q)^k q^(floor(j0)+k),

where T0(m) truncates the level-0 mass at l1 = floor((m-1-floor(j0))/2)
(only paths that have already crossed the strike), l2 = floor((n-1-floor(j0))/2),
and the count Lambda(0, k, floor(j0)+2k) is the reflection count of walks
from floor(j0) to 0 that stay nonnegative -- exactly C(m',k)-C(m',k-1) at
m' = floor(j0)+2k.  All inner sums run over positive terms in log space.

No CDF reduction exists for this payoff, so evaluation is O(n^2) and capped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binomial_tail import log_binom_pmf, log_binom_pmf_vec
from .errors import CapacityError, DomainError, IntegerBarrierError
from .params import LatticeParams, ModelParams, build_lattice

FIXED_N_MAX = 5_000
_INTEGER_LEVEL_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class FixedStrikeSetup:
    """Start-level geometry of the fixed-strike tree."""

    strike: float
    j0: float
    j0_floor: int
    j0_frac: float


def fixed_strike_setup(model: ModelParams, strike: float, n: int) -> FixedStrikeSetup:
    if strike <= 0.0 or not math.isfinite(strike):
        raise DomainError(f"strike must be > 0, got {strike!r}")
    j0 = math.log(strike / model.s0) / (model.sigma * math.sqrt(model.t / n))
    floor = math.floor(j0)
    frac = j0 - floor
    if model.s0 < strike and min(frac, 1.0 - frac) < _INTEGER_LEVEL_TOL:
        raise IntegerBarrierError(
            f"strike sits on a lattice level (j0={j0!r}); perturb n"
        )
    return FixedStrikeSetup(strike=strike, j0=j0, j0_floor=floor, j0_frac=frac)


def _level0_mass(m: int, prob: float, upper: int) -> float:
    """sum_{k=0}^{upper} Lambda(0,k,m) prob^k (1-prob)^(m-k), positive terms."""
    if upper < 0:
        return 0.0
    if m == 0:
        return 1.0
    k = np.arange(0, min(upper, m // 2) + 1, dtype=np.float64)
    logs = (
        log_binom_pmf_vec(k, m, prob)
        + np.log(m - 2.0 * k + 1.0)
        - np.log(m - k + 1.0)
    )
    return float(np.exp(logs).sum())


def price_call_fixed(
    model: ModelParams, strike: float, n: int, *, n_max: int = FIXED_N_MAX
) -> float:
    """Price of the fixed-strike lookback call (max against K)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if n > n_max:
        raise CapacityError(f"O(n^2) evaluation capped at n_max={n_max}, got n={n}")
    setup = fixed_strike_setup(model, strike, n)
    lat = build_lattice(model, n)
    if model.s0 >= strike:
        return _price_from_level_zero(model, strike, lat)
    return model.s0 * _start_below_strike_value(setup, lat)


def _price_from_level_zero(model: ModelParams, strike: float, lat: LatticeParams) -> float:
    n, q = lat.n, lat.q
    rate_step = -math.log(lat.step_discount)  # r*T/n
    terms = [
        math.exp(rate_step * m) * _level0_mass(m, 1.0 - q, m // 2)
        for m in range(n)
    ]
    gain = model.s0 * lat.p * (lat.u - 1.0) * lat.total_discount * math.fsum(terms)
    return gain + (model.s0 - strike) * lat.total_discount


def _start_below_strike_value(setup: FixedStrikeSetup, lat: LatticeParams) -> float:
    n, q = lat.n, lat.q
    jf = setup.j0_floor
    rate_step = -math.log(lat.step_discount)
    # gains at level 0, strike already bumped at least once
    crossed = [
        math.exp(-rate_step * (n - m))
        * _level0_mass(m, 1.0 - q, (m - 1 - jf) // 2)
        for m in range(jf + 1, n)
    ]
    part1 = lat.p * (lat.u - 1.0) * math.fsum(crossed)
    # gains at the fractional level: first passage from jf after k down-moves
    l2 = (n - 1 - jf) // 2
    log_q, log_1mq = math.log(q), math.log1p(-q)
    bump = []
    for k in range(l2 + 1):
        m_prime = jf + 2 * k
        log_count_pmf = (
            log_binom_pmf(k, m_prime, 1.0 - q)
            + math.log(jf + 1.0)
            - math.log(jf + k + 1.0)
        ) if m_prime > 0 else 0.0
        bump.append(math.exp(log_count_pmf - rate_step * (n - jf - 2 * k)))
    part2 = lat.p * (lat.u - lat.u**setup.j0_frac) * math.fsum(bump)
    return part1 + part2
