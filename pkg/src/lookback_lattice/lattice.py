"""Lattice pricers for floating-strike lookbacks on the one-state-variable tree.

Reference route (exact): the literal double sum

    C_n = S0 * sum_j (1 - u^-j) sum_k Lambda(j,k,n) q^k (1-q)^(n-k),

evaluated per level in log space; O(n^2) terms, capped by ``n_max``.  The
put mirrors it with payoff (u^j - 1) and the up/down roles of q swapped.

Fast route (r != 0): the double sum collapses into a fixed combination of
binomial CDF values (geometric-series reduction).  The textbook grouping

    V(0,0) = Q(1-d)/Theta * phi_a - phi_b/(1-Q) + e^{-rT} phi_c/(1-Q d),
    Theta  = (1-Q)(1-Q d),     Q = q/(1-q),

is algebraically exact but numerically treacherous: 1/(1-Q) blows up when
2r is close to -sigma^2 (Q -> 1).  Because of the CDF reflection symmetry
B(n, 1-q, k) = 1 - B(n, q, n-k-1) and the pmf ratio at the half-point, the
1/(1-Q) part is identically 1, leaving the stable two-term form

    V(0,0) = 1 + (e^{-rT} phi_c - phi_a) / (1 - Q d),

whose only singular denominator vanishes exactly at r = 0.  The put and
the two first-period node values admit the same collapse.  At r = 0 the
geometric series with ratio Q*d == 1 degenerates to its term count and the
price becomes a single O(n) series over binomial pmf values.

Node values follow the convention value = node price / node spot, so the
root value times S0 is the price and the tree delta is

    delta_n = (u * V(1,1) - d * V(0,1)) / (u - d),

a time-T/n quantity used as the time-zero estimate.
"""

from __future__ import annotations

import math

import numpy as np

from dataclasses import dataclass

from .binomial_tail import (
    binom_cdf,
    binom_cdf_pair,
    binom_tail,
    log_binom_pmf_vec,
)
from .errors import CapacityError, DomainError
from .params import (
    LatticeParams,
    ModelParams,
    build_lattice,
    qd_ratio_minus_one,
    q_ratio_minus_one,
)

EXACT_N_MAX = 20_000

_ONE = np.longdouble(1.0)


@dataclass(frozen=True)
class _LatticeLD:
    """Lattice quantities in 80-bit extended precision.

    The CDF-form pricers divide O(eps)-level bracket combinations by
    1 - Q d = O(1/sqrt(n)); at n ~ 1e5 the reference tables' fourth
    decimals sit closer to their rounding boundaries than the float64
    noise floor of those brackets, so the whole fast path runs in
    longdouble and rounds once at the end.
    """

    n: int
    u: np.longdouble
    d: np.longdouble
    p: np.longdouble
    q: np.longdouble
    q_ratio: np.longdouble
    step_discount: np.longdouble
    total_discount: np.longdouble
    one_m_qd: np.longdouble   # 1 - Q d, exact-zero iff r == 0
    q_m_u: np.longdouble      # Q - u, exact-zero never (sigma > 0)


def _lattice_ld(model: ModelParams, n: int) -> _LatticeLD:
    t = np.longdouble(model.t)
    r = np.longdouble(model.r)
    sigma = np.longdouble(model.sigma)
    dt = t / n
    x = sigma * np.sqrt(dt)
    u = np.exp(x)
    d = _ONE / u
    two_sinh = 2.0 * np.sinh(x)
    r_dt = r * dt
    p = (np.expm1(r_dt) - np.expm1(-x)) / two_sinh
    step = np.exp(-r_dt)
    q = p * u * step
    one_m_q = _ONE - q
    # 2q - 1 = 2(2 sinh^2(x/2) - expm1(-r dt))/(u - d), cancellation-free
    sh_half = np.sinh(0.5 * x)
    two_q_m_1 = 2.0 * (2.0 * sh_half * sh_half - np.expm1(-r_dt)) / two_sinh
    q_m_u = two_q_m_1 / one_m_q - np.expm1(x)  # (Q-1) - (u-1)
    one_m_qd = -(_ONE + d) * np.expm1(r_dt) * step / (two_sinh * one_m_q)
    return _LatticeLD(
        n=n,
        u=u,
        d=d,
        p=p,
        q=q,
        q_ratio=q / one_m_q,
        step_discount=step,
        total_discount=np.exp(-r * t),
        one_m_qd=one_m_qd,
        q_m_u=q_m_u,
    )


def _check_capacity(n: int, n_max: int) -> None:
    if n > n_max:
        raise CapacityError(
            f"O(n^2) evaluation capped at n_max={n_max}, got n={n}"
        )
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")


def _log_level_sums(m: int, prob: float, upper_shift: int = 0) -> np.ndarray:
    """log of P_j = sum_{i=0}^{floor((m-j)/2)+shift} Lambda(j,i+j,m)-weighted
    terms, for j = 0..m, with up-weight ``prob``.

    Per-term identity Lambda(j,i+j,m) = C(m,i)(m-2i+1)/(m-i+1) keeps every
    summand positive; each level is summed independently (literal double
    sum, O(m^2) overall).
    """
    i = np.arange(0, m // 2 + 1, dtype=np.float64)
    base = (
        log_binom_pmf_vec(i, m, prob)
        + np.log(m - 2.0 * i + 1.0)
        - np.log(m - i + 1.0)
    )
    log_r = math.log(prob) - math.log1p(-prob)
    out = np.full(m + 1, -np.inf)
    for j in range(m + 1):
        upper = (m - j) // 2 + upper_shift
        if upper < 0:
            continue
        s = float(np.exp(base[: upper + 1] + j * log_r).sum())
        out[j] = math.log(s) if s > 0.0 else -math.inf
    return out


def _sum_weighted_levels(log_probs: np.ndarray, weight_exponent: float,
                         subtract_one: bool) -> float:
    """sum_j w_j exp(log_probs[j]) with w_j = u^(e*j) or u^(e*j) - 1.

    Individual products never exceed the O(1) total because the weighted
    terms are nonnegative pieces of a convergent value; fsum keeps the
    accumulation exact.
    """
    terms = []
    for j, lp in enumerate(log_probs):
        if lp == -math.inf:
            continue
        if subtract_one:
            terms.append(math.exp(lp) * math.expm1(j * weight_exponent))
        else:
            terms.append(math.exp(lp + j * weight_exponent))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# exact double-sum pricers
# ---------------------------------------------------------------------------


def price_call_exact(model: ModelParams, n: int, *, n_max: int = EXACT_N_MAX) -> float:
    """Reference price of the floating-strike call; works for any r."""
    _check_capacity(n, n_max)
    lat = build_lattice(model, n)
    x = math.log(lat.u)
    log_probs = _log_level_sums(n, lat.q)
    # payoff weight 1 - u^-j = -(u^-j - 1)
    return -model.s0 * _sum_weighted_levels(log_probs, -x, subtract_one=True)


def price_put_exact(model: ModelParams, n: int, *, n_max: int = EXACT_N_MAX) -> float:
    """Reference price of the floating-strike put; works for any r."""
    _check_capacity(n, n_max)
    lat = build_lattice(model, n)
    x = math.log(lat.u)
    log_probs = _log_level_sums(n, 1.0 - lat.q)
    return model.s0 * _sum_weighted_levels(log_probs, x, subtract_one=True)


# ---------------------------------------------------------------------------
# fast CDF-form pricers (r != 0) and zero-rate series
# ---------------------------------------------------------------------------


def _pair(n: int, p: float, k: int, c_hi: float, c_lo: float) -> float:
    """c_hi * B(n,p,k) - c_lo * B(n,p,k-1)."""
    return c_hi * binom_cdf(n, p, k) - c_lo * binom_cdf(n, p, k - 1)


def call_cdf_parts(lat: LatticeParams, m: int | None = None) -> tuple[float, float, float]:
    """The three CDF brackets of the call reduction over an m-step horizon
    (defaults to the full n): q-measure, mirrored-q, and p-measure parts.
    """
    m = lat.n if m is None else m
    h = m // 2
    q, Q = lat.q, lat.q_ratio
    part_q = _pair(m, q, h, 1.0, Q)
    part_mq = _pair(m, 1.0 - q, h, Q, 1.0)
    part_p = _pair(m, 1.0 - lat.p, h, Q * lat.d, lat.u)
    return part_q, part_mq, part_p


def value_v00_cdf_literal(lat: LatticeParams) -> float:
    """Textbook three-denominator grouping of the call value; kept for
    cross-validation, ill-conditioned when Q is numerically near 1.
    """
    part_q, part_mq, part_p = call_cdf_parts(lat)
    one_m_q = -q_ratio_minus_one(lat)
    one_m_qd = -qd_ratio_minus_one(lat)
    coeff = 1.0 / one_m_q - 1.0 / one_m_qd
    return coeff * part_q - part_mq / one_m_q + lat.total_discount * part_p / one_m_qd


def _value_v00_cdf(L: _LatticeLD) -> float:
    """Stable form: V(0,0) = 1 + (e^{-rT} part_p - part_q)/(1 - Q d)."""
    h = L.n // 2
    bq_lo, bq_hi = binom_cdf_pair(L.n, L.q, h)
    bp_lo, bp_hi = binom_cdf_pair(L.n, _ONE - L.p, h)
    part_q = bq_hi - L.q_ratio * bq_lo
    part_p = L.q_ratio * L.d * bp_hi - L.u * bp_lo
    return float(_ONE + (L.total_discount * part_p - part_q) / L.one_m_qd)


def put_cdf_parts(lat: LatticeParams) -> tuple[float, float, float]:
    """CDF brackets of the put reduction: mirrored-q, q-measure, p-measure."""
    n, h = lat.n, lat.n // 2
    q, Q = lat.q, lat.q_ratio
    part_mq = _pair(n, 1.0 - q, h, Q, 1.0)
    part_q = _pair(n, q, h, 1.0, Q)
    part_p = _pair(n, lat.p, h, lat.u, Q * lat.d)
    return part_mq, part_q, part_p


def value_w00_cdf_literal(lat: LatticeParams) -> float:
    """Textbook grouping of the put value (again Q ~ 1 fragile)."""
    part_mq, part_q, part_p = put_cdf_parts(lat)
    one_m_q = -q_ratio_minus_one(lat)
    q_m_u = q_ratio_minus_one(lat) - (lat.u - 1.0)
    theta = q_m_u * q_ratio_minus_one(lat)
    return (
        (lat.u - 1.0) / theta * part_mq
        - part_q / one_m_q
        + lat.total_discount * part_p / (-q_m_u)
    )


def _value_w00_cdf(L: _LatticeLD) -> float:
    """Stable form: W(0,0) = -1 + (part_mq - e^{-rT} part_p)/(Q - u)."""
    h = L.n // 2
    bm_lo, bm_hi = binom_cdf_pair(L.n, _ONE - L.q, h)
    bp_lo, bp_hi = binom_cdf_pair(L.n, L.p, h)
    part_mq = L.q_ratio * bm_hi - bm_lo
    part_p = L.u * bp_hi - L.q_ratio * L.d * bp_lo
    return float(-_ONE + (part_mq - L.total_discount * part_p) / L.q_m_u)


def _zero_rate_call_series(L: _LatticeLD) -> float:
    """O(n) value at r = 0, where Q = u and the second geometric series in
    the level reduction degenerates to its term count n - 2m + 1.
    """
    n, q, u = L.n, L.q, L.u
    big_m = n // 2
    m = np.arange(0, big_m + 1)
    w = np.exp(log_binom_pmf_vec(m, n, q))
    w_swap = np.exp(log_binom_pmf_vec(m, n, _ONE - q))
    mf = m.astype(np.longdouble)
    fused = w_swap - u * w + (n - 2.0 * mf) * (u - _ONE) * w
    total = fused[:-1].sum()
    # boundary term: the m = M inner geometric sum has no paired subtraction
    if n % 2 == 1:
        total += w[big_m] * L.q_ratio * (_ONE - L.d)
    return float(total)


def _zero_rate_put_series(L: _LatticeLD) -> float:
    """Put mirror of the zero-rate series (ratio R = 1/Q = d at r = 0)."""
    n, q, d = L.n, L.q, L.d
    big_m = n // 2
    m = np.arange(0, big_m + 1)
    v = np.exp(log_binom_pmf_vec(m, n, _ONE - q))
    v_swap = np.exp(log_binom_pmf_vec(m, n, q))
    mf = m.astype(np.longdouble)
    fused = (n - 2.0 * mf) * (_ONE - d) * v + d * v - v_swap
    total = fused[:-1].sum()
    if n % 2 == 1:
        total += v[big_m] * (_ONE - q) / q * (L.u - _ONE)
    return float(total)


def price_call_fast(model: ModelParams, n: int) -> float:
    """Floating-strike call in O(1) CDF evaluations (O(n) series at r = 0)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    build_lattice(model, n)  # domain checks
    L = _lattice_ld(model, n)
    if model.is_zero_rate:
        return model.s0 * _zero_rate_call_series(L)
    return model.s0 * _value_v00_cdf(L)


def price_put_fast(model: ModelParams, n: int) -> float:
    """Floating-strike put in O(1) CDF evaluations (O(n) series at r = 0)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    build_lattice(model, n)
    L = _lattice_ld(model, n)
    if model.is_zero_rate:
        return model.s0 * _zero_rate_put_series(L)
    return model.s0 * _value_w00_cdf(L)


# ---------------------------------------------------------------------------
# first-period node values and the tree delta
# ---------------------------------------------------------------------------


def value_after_down(model: ModelParams, n: int, method: str = "auto") -> float:
    """Node value V(0,1) one down-step in: same recursion as the root on an
    (n-1)-step horizon with the n-step lattice quantities.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    lat = build_lattice(model, n)
    method = _resolve_method(method, lat, n_min_cdf=2, n=n)
    if method == "exact":
        if n == 1:
            return 0.0
        x = math.log(lat.u)
        log_probs = _log_level_sums(n - 1, lat.q)
        return -_sum_weighted_levels(log_probs, -x, subtract_one=True)
    L = _lattice_ld(model, n)
    m, h = n - 1, (n - 1) // 2
    bq_lo, bq_hi = binom_cdf_pair(m, L.q, h)
    bp_lo, bp_hi = binom_cdf_pair(m, _ONE - L.p, h)
    part_q = bq_hi - L.q_ratio * bq_lo
    part_p = L.q_ratio * L.d * bp_hi - L.u * bp_lo
    # the p-measure part of an (n-1)-step horizon carries n-1 step discounts
    disc = np.exp(np.log(L.step_discount) * m)
    return float(_ONE + (disc * part_p - part_q) / L.one_m_qd)


def up_node_cdf_parts(lat: LatticeParams) -> tuple[float, ...]:
    """The five CDF brackets of the V(1,1) reduction (m = n - 1 horizon).

    The first two live on the survival side: with G(x) = P(X > x),

        s_q = G_q(l-1) - Q^-2 G_q(l+1),   s_p = G_p(l-1) - P^-2 G_p(l+1),

    l = floor((n-1)/2); the rest are the down-node brackets.
    """
    n = lat.n
    m, l4 = n - 1, (n - 1) // 2
    q, p, Q = lat.q, lat.p, lat.q_ratio
    P = lat.p_ratio
    s_q = binom_tail(m, q, l4) - binom_tail(m, q, l4 + 2) / (Q * Q)
    s_p = binom_tail(m, p, l4) - binom_tail(m, p, l4 + 2) / (P * P)
    h = m // 2
    part_q = _pair(m, q, h, 1.0, Q)
    part_mq = _pair(m, 1.0 - q, h, Q, 1.0)
    part_p = _pair(m, 1.0 - p, h, Q * lat.d, lat.u)
    return s_q, s_p, part_q, part_mq, part_p


def value_v11_cdf_literal(lat: LatticeParams) -> float:
    """Textbook five-bracket grouping of V(1,1); Q ~ 1 fragile."""
    s_q, s_p, part_q, part_mq, part_p = up_node_cdf_parts(lat)
    Q, qd = lat.q_ratio, lat.q_ratio * lat.d
    disc = lat.step_discount ** (lat.n - 1)
    one_m_q = -q_ratio_minus_one(lat)
    one_m_qd = -qd_ratio_minus_one(lat)
    coeff = 1.0 / one_m_q - 1.0 / one_m_qd
    return (
        s_q
        - (lat.p / lat.q) * lat.total_discount * s_p
        + coeff * part_q
        - part_mq / (Q * Q) / one_m_q
        + disc * part_p / (qd * qd) / one_m_qd
    )


def _value_v11_cdf(L: _LatticeLD) -> float:
    """Parity-correct stable grouping of the V(1,1) reduction.

    The changed-minimum remainder reduces to truncation offsets one level
    below the down-node ones; its 1/(Q-1) singular part collapses through
    the half-point pmf ratios into CDF/pmf terms that stay regular at
    Q = 1, leaving only the 1/(Qd - 1) denominators (r = 0 excluded).
    """
    n = L.n
    m, l4 = n - 1, (n - 1) // 2
    q, p, Q = L.q, L.p, L.q_ratio
    qd = Q * L.d
    h = m // 2  # == l4
    # Bin(m, q): F(h-1), F(h), pmf at h-1, h, h+1
    f_q_hm1, f_q_h, f_q_hp1 = np.exp(
        log_binom_pmf_vec(np.array([h - 1, h, h + 1]), m, q)
    )
    bq_lo, bq_hi = binom_cdf_pair(m, q, h)   # F(h-1), F(h)
    # survival bracket of the unchanged-minimum top levels
    s_tail_q = (_ONE - bq_lo) - (_ONE - bq_hi - f_q_hp1) / (Q * Q)
    bp_pair_lo, bp_pair_hi = binom_cdf_pair(m, p, l4)  # Bp(l4-1), Bp(l4)
    f_p_hp1 = np.exp(log_binom_pmf_vec(np.array([l4 + 1]), m, p))[0]
    P = p / (_ONE - p)
    s_tail_p = (_ONE - bp_pair_lo) - (_ONE - bp_pair_hi - f_p_hp1) / (P * P)
    part_top = s_tail_q - (p / q) * L.total_discount * s_tail_p
    # changed-minimum remainder: X_A at (I1, I2) = (h-1, h-2)
    x_a = bq_lo - Q * (bq_lo - f_q_hm1)
    surv_h = _ONE - bq_lo - f_q_h  # P(Y >= h+1)
    if m % 2 == 0:
        singular = bq_lo + surv_h / (Q * Q) - f_q_h * h / ((h + 1) * Q)
    else:
        singular = bq_lo + (surv_h - f_q_hp1) / (Q * Q)
    bP_lo, bP_hi = binom_cdf_pair(m, _ONE - p, h - 1)  # FP(h-2), FP(h-1)
    disc_m = np.exp(np.log(L.step_discount) * m)
    qd_m1 = -L.one_m_qd
    piece_c = -disc_m * (bP_hi - bP_lo / (Q * L.d * L.d)) / (qd * qd_m1)
    return float(part_top + singular + x_a / qd_m1 + piece_c)


def _value_v11_exact(lat: LatticeParams) -> float:
    """Three-part sum over the paths out of the first up-node: top two
    reachable levels, interior levels with the running minimum intact
    (reflection-count difference), and the changed-minimum remainder.
    """
    n = lat.n
    m, l4 = n - 1, (n - 1) // 2
    x = math.log(lat.u)
    q, Q = lat.q, lat.q_ratio
    k = np.arange(l4, m + 1, dtype=np.float64)
    pay = -np.expm1((n - 2.0 - 2.0 * k) * x)
    lp = log_binom_pmf_vec(k, m, q)
    top = float(np.sum(np.exp(lp) * pay))
    k2 = np.arange(l4, n - 2, dtype=np.float64)  # k = l4 .. n-3
    if len(k2):
        pay2 = -np.expm1((n - 2.0 - 2.0 * k2) * x)
        lp2 = log_binom_pmf_vec(k2 + 2.0, m, q)
        lost = float(np.sum(np.exp(lp2) * pay2)) / (Q * Q)
    else:
        lost = 0.0
    changed = 0.0
    if n >= 3:
        log_probs = _log_level_sums(m, q, upper_shift=-1)
        changed = -_sum_weighted_levels(
            log_probs[: n - 2], -x, subtract_one=True
        )
    return top - lost + changed


def value_after_up(model: ModelParams, n: int, method: str = "auto") -> float:
    """Node value V(1,1) one up-step in (minimum so far still the spot)."""
    if n < 2:
        raise DomainError(f"the up-node value needs n >= 2, got {n!r}")
    lat = build_lattice(model, n)
    method = _resolve_method(method, lat, n_min_cdf=2, n=n)
    if method == "exact":
        return _value_v11_exact(lat)
    return _value_v11_cdf(_lattice_ld(model, n))


def _resolve_method(method: str, lat: LatticeParams, *, n_min_cdf: int, n: int) -> str:
    if method not in ("auto", "exact", "cdf"):
        raise DomainError(f"method must be auto/exact/cdf, got {method!r}")
    if method == "cdf" and lat.is_zero_rate:
        raise DomainError("the CDF reduction is singular at r = 0; use exact")
    if method == "auto":
        return "exact" if (lat.is_zero_rate or n < n_min_cdf) else "cdf"
    return method


def delta_tree(model: ModelParams, n: int, method: str = "auto") -> float:
    """First-period difference-quotient delta,

        (u V(1,1) - d V(0,1)) / (u - d),

    evaluated at time T/n and used as the time-zero estimate.
    """
    if n < 2:
        raise DomainError(f"delta needs n >= 2, got {n!r}")
    lat = build_lattice(model, n)
    v_up = value_after_up(model, n, method)
    v_down = value_after_down(model, n, method)
    return (lat.u * v_up - lat.d * v_down) / (lat.u - lat.d)


# ---------------------------------------------------------------------------
# discounted-expectation forms (Foellmer-Schied style)
# ---------------------------------------------------------------------------


def price_call_follmer_schied(model: ModelParams, n: int, *, n_max: int = EXACT_N_MAX) -> float:
    """Equivalent call form S0*(1 - e^{-rT} sum_j d^j [p-measure level sum])."""
    _check_capacity(n, n_max)
    lat = build_lattice(model, n)
    x = math.log(lat.u)
    log_probs = _log_level_sums(n, 1.0 - lat.p)
    inner = _sum_weighted_levels(log_probs, -x, subtract_one=False)
    return model.s0 * (1.0 - lat.total_discount * inner)


def price_put_follmer_schied(model: ModelParams, n: int, *, n_max: int = EXACT_N_MAX) -> float:
    """Equivalent put form S0*(-1 + e^{-rT} sum_j u^j [p-measure level sum])."""
    _check_capacity(n, n_max)
    lat = build_lattice(model, n)
    x = math.log(lat.u)
    log_probs = _log_level_sums(n, lat.p)
    inner = _sum_weighted_levels(log_probs, x, subtract_one=False)
    return model.s0 * (-1.0 + lat.total_discount * inner)
