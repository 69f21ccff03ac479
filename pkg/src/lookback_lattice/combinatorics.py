"""Level-path counts, the lattice level distributions, and a path oracle.

The single-state-variable tree tracks j, the gap in powers of u between the
current price and the running minimum (call) or maximum (put).  The number
of m-step level paths with exactly k up moves ending at level j is the
ballot-number difference

    Lambda(j, k, m) = C(m, k-j) - C(m, k-j-1)   (k > j),   1  (k = j),

zero for k < j or k > floor((m+j)/2).  The level distribution after m steps
weights these counts with q^k (1-q)^(m-k) for the call tree and with the
up/down roles swapped for the put tree.

The enumeration oracle prices by walking every one of the 2^n paths with
integer exponent arithmetic (level, running extremum), exponentiating once
per path, so it is trustworthy to near machine precision and anchors every
other pricer in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .binomial_tail import log_binom_pmf_vec
from .errors import CapacityError, DomainError
from .params import LatticeParams, ModelParams, build_lattice

ORACLE_N_MAX = 22


def path_count(j: int, k: int, m: int) -> int:
    """Exact number of m-step level paths with k ups ending at level j.

    Arbitrary-precision integers throughout, so no overflow cap applies;
    the level-distribution routines never call this for large m (they work
    in log space instead).
    """
    if m < 0 or j < 0 or j > m:
        raise DomainError(f"need 0 <= j <= m, got j={j!r}, m={m!r}")
    if k < j or k > (m + j) // 2:
        return 0
    if k == j:
        return 1
    return math.comb(m, k - j) - math.comb(m, k - j - 1)


@dataclass(frozen=True, slots=True)
class LevelPmf:
    """Distribution of the level after m steps; levels indexed 0..m."""

    m: int
    levels: np.ndarray

    def __post_init__(self) -> None:
        if len(self.levels) != self.m + 1:
            raise DomainError("levels must have length m + 1")


def _level_pmf(prob: float, m: int) -> np.ndarray:
    """Level distribution with up-weight ``prob``: entry j is

        sum_{k=j}^{floor((m+j)/2)} Lambda(j,k,m) prob^k (1-prob)^(m-k).

    Substituting i = k - j and Lambda = C(m,i)(m-2i+1)/(m-i+1) turns the
    entry into R^j * c[floor((m-j)/2)] with R = prob/(1-prob) and c the
    prefix sums of pmf(i; m, prob) * (m-2i+1)/(m-i+1) -- all terms
    positive, so the whole pmf costs O(m) with no cancellation.  The
    prefix accumulation runs in extended precision to keep the sum-to-one
    defect well under 1e-12 even at m = 1e4.
    """
    i = np.arange(0, m // 2 + 1, dtype=np.float64)
    log_terms = (
        log_binom_pmf_vec(i, m, prob)
        + np.log(m - 2.0 * i + 1.0)
        - np.log(m - i + 1.0)
    )
    c = np.cumsum(np.exp(log_terms.astype(np.longdouble)))
    with np.errstate(divide="ignore"):
        log_c = np.log(c.astype(np.float64))
    j = np.arange(0, m + 1)
    log_r = math.log(prob) - math.log1p(-prob)
    with np.errstate(invalid="ignore"):
        out = np.exp(j * log_r + log_c[(m - j) // 2])
    return np.where(np.isfinite(out), out, 0.0)


def level_pmf_call(lattice: LatticeParams, m: int) -> LevelPmf:
    """Distribution of levels above the running minimum after m steps."""
    if not 1 <= m <= lattice.n:
        raise DomainError(f"need 1 <= m <= n={lattice.n}, got m={m!r}")
    return LevelPmf(m=m, levels=_level_pmf(lattice.q, m))


def level_pmf_put(lattice: LatticeParams, m: int) -> LevelPmf:
    """Distribution of levels below the running maximum after m steps."""
    if not 1 <= m <= lattice.n:
        raise DomainError(f"need 1 <= m <= n={lattice.n}, got m={m!r}")
    return LevelPmf(m=m, levels=_level_pmf(1.0 - lattice.q, m))


def level_pmf_exact(prob: float, m: int) -> np.ndarray:
    """Reference O(m^2) evaluation with exact integer path counts.

    Independent of the prefix-sum route; intended for cross-validation at
    small and moderate m.
    """
    out = np.zeros(m + 1)
    for j in range(m + 1):
        acc = 0.0
        for k in range(j, (m + j) // 2 + 1):
            acc += path_count(j, k, m) * prob**k * (1.0 - prob) ** (m - k)
        out[j] = acc
    return out


# ---------------------------------------------------------------------------
# exhaustive path enumeration
# ---------------------------------------------------------------------------


class PayoffKind(Enum):
    FLOATING_CALL = "floating-call"
    FLOATING_PUT = "floating-put"
    FIXED_CALL = "fixed-call"


@dataclass(frozen=True)
class _PathTable:
    """Integer exponent summaries of all 2^n paths of n up/down moves."""

    n: int
    ups: np.ndarray        # number of up moves per path
    final_exp: np.ndarray  # ups - downs
    min_exp: np.ndarray    # running minimum of the exponent walk (<= 0)
    max_exp: np.ndarray    # running maximum of the exponent walk (>= 0)


_PATH_CACHE: dict[int, _PathTable] = {}


def _path_table(n: int) -> _PathTable:
    if n > ORACLE_N_MAX:
        raise CapacityError(
            f"path enumeration limited to n <= {ORACLE_N_MAX}, got n={n}"
        )
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    cached = _PATH_CACHE.get(n)
    if cached is not None:
        return cached
    ups, final_exp, min_exp, max_exp = [], [], [], []
    bits = np.arange(n, dtype=np.uint32)[None, :]
    for lo in range(0, 2**n, 2**16):
        masks = np.arange(lo, min(lo + 2**16, 2**n), dtype=np.uint32)
        steps = np.where((masks[:, None] >> bits) & 1, 1, -1).astype(np.int8)
        walk = np.cumsum(steps, axis=1, dtype=np.int32)
        ups.append(((walk[:, -1] + n) // 2).astype(np.int32))
        final_exp.append(walk[:, -1].copy())
        min_exp.append(np.minimum(np.min(walk, axis=1), 0).astype(np.int32))
        max_exp.append(np.maximum(np.max(walk, axis=1), 0).astype(np.int32))
    table = _PathTable(
        n=n,
        ups=np.concatenate(ups),
        final_exp=np.concatenate(final_exp),
        min_exp=np.concatenate(min_exp),
        max_exp=np.concatenate(max_exp),
    )
    _PATH_CACHE[n] = table
    return table


def _path_probs(table: _PathTable, p: float) -> np.ndarray:
    # p^ups (1-p)^(n-ups) via a (n+1)-entry table indexed by the up count
    k = np.arange(table.n + 1, dtype=np.float64)
    weights = np.exp(k * math.log(p) + (table.n - k) * math.log1p(-p))
    return weights[table.ups]


def _u_powers(u: float, n: int) -> np.ndarray:
    """u^e for e in [-n, n], indexed by e + n; one exp per exponent."""
    e = np.arange(-n, n + 1, dtype=np.float64)
    return np.exp(e * math.log(u))


def brute_force_price(
    model: ModelParams,
    n: int,
    payoff: PayoffKind | str,
    strike: float | None = None,
) -> float:
    """Discounted risk-neutral expectation over all 2^n paths.

    Payoffs are evaluated from integer exponents of u, so each path costs
    one table lookup per price component; partial sums are combined with
    exact (fsum) accumulation over deterministic chunks.
    """
    payoff = PayoffKind(payoff)
    lat = build_lattice(model, n)
    table = _path_table(n)
    probs = _path_probs(table, lat.p)
    pw = _u_powers(lat.u, n)

    if payoff is PayoffKind.FLOATING_CALL:
        values = pw[table.final_exp + n] - pw[table.min_exp + n]
    elif payoff is PayoffKind.FLOATING_PUT:
        values = pw[table.max_exp + n] - pw[table.final_exp + n]
    else:
        if strike is None or strike <= 0.0:
            raise DomainError("fixed-call payoff requires strike > 0")
        values = np.maximum(model.s0 * pw[table.max_exp + n] - strike, 0.0)

    terms = probs * values
    scale = 1.0 if payoff is PayoffKind.FIXED_CALL else model.s0
    chunks = [float(np.sum(chunk)) for chunk in np.array_split(terms, 64)]
    return lat.total_discount * scale * math.fsum(chunks)


def brute_force_node_value(model: ModelParams, n: int, first_move_up: bool) -> float:
    """Dimensionless call node value one step into the n-period tree.

    Enumerates the 2^(n-1) continuations after a forced first move and
    returns the node price divided by the node spot, i.e. the quantity the
    lattice recursion attaches to nodes (1,1) (up) and (0,1) (down).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    lat = build_lattice(model, n)
    first = 1 if first_move_up else -1
    if n == 1:
        # already at maturity: node value is the payoff over the node spot
        return 1.0 - lat.u ** (min(first, 0) - first)
    table = _path_table(n - 1)
    probs = _path_probs(table, lat.p)
    pw = _u_powers(lat.u, n)
    final_exp = first + table.final_exp
    min_exp = np.minimum(first + table.min_exp, 0)
    values = pw[final_exp + n] - pw[min_exp + n]
    disc = lat.step_discount ** (n - 1)
    chunks = [float(np.sum(chunk)) for chunk in np.array_split(probs * values, 64)]
    # node spot is S0 * u^first; divide it out to get the node value
    return disc * math.fsum(chunks) / lat.u**first


def brute_force_delta(model: ModelParams, n: int) -> float:
    """Tree delta from enumerated node prices across the first period."""
    if n < 2:
        raise DomainError(f"delta needs n >= 2, got {n!r}")
    lat = build_lattice(model, n)
    c_up = model.s0 * lat.u * brute_force_node_value(model, n, True)
    c_down = model.s0 * lat.d * brute_force_node_value(model, n, False)
    return (c_up - c_down) / (model.s0 * (lat.u - lat.d))
