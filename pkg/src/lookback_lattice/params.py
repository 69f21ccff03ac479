"""Market inputs and per-step lattice quantities.

The n-period recombining tree uses

    u = exp(sigma*sqrt(T/n)),   d = 1/u,
    p = (exp(r*T/n) - d) / (u - d),
    q = p * u * exp(-r*T/n),

where p is the risk-neutral up probability and q the shifted probability
under which the level process (distance in powers of u from the running
extremum) is Markov.  A zero rate is detected exactly: r == 0.0 is the
algebraic boundary at which q/(1-q) * d == 1 and the geometric-series
reductions used by the fast pricers change form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True, slots=True)
class ModelParams:
    """Contract/market inputs: spot, cc rate, volatility, maturity."""

    s0: float
    r: float
    sigma: float
    t: float

    def __post_init__(self) -> None:
        for name in ("s0", "r", "sigma", "t"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.s0 <= 0.0:
            raise DomainError(f"s0 must be > 0, got {self.s0!r}")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma!r}")
        if self.t <= 0.0:
            raise DomainError(f"t must be > 0, got {self.t!r}")

    @property
    def is_zero_rate(self) -> bool:
        return self.r == 0.0


def validate(model: ModelParams) -> ModelParams:
    """Return the model unchanged; construction already enforces the domain.

    Provided so callers holding an instance built via dataclasses.replace or
    __new__ tricks can re-assert the invariants explicitly.
    """
    ModelParams(model.s0, model.r, model.sigma, model.t)
    return model


@dataclass(frozen=True, slots=True)
class LatticeParams:
    """All derived per-n quantities used by the pricers."""

    n: int
    u: float
    d: float
    p: float
    q: float
    q_ratio: float        # Q = q / (1 - q)
    step_discount: float  # exp(-r*T/n)
    total_discount: float  # exp(-r*T)
    is_zero_rate: bool

    @property
    def p_ratio(self) -> float:
        """P = p / (1 - p)."""
        return self.p / (1.0 - self.p)


def build_lattice(model: ModelParams, n: int) -> LatticeParams:
    """Derive the n-period lattice quantities from a validated model.

    p is formed from expm1 pieces so the numerator keeps full relative
    accuracy when r*T/n and sigma*sqrt(T/n) are both tiny (large n).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    dt = model.t / n
    x = model.sigma * math.sqrt(dt)
    u = math.exp(x)
    d = 1.0 / u
    # p = (exp(r dt) - d)/(u - d): numerator via expm1 pieces, denominator
    # as 2 sinh(x) -- the plain difference u - d loses ~3 digits at n ~ 1e5
    num = math.expm1(model.r * dt) - math.expm1(-x)
    den = 2.0 * math.sinh(x)
    p = num / den
    if not 0.0 < p < 1.0:
        raise DomainError(
            f"risk-neutral probability {p!r} outside (0,1); "
            f"need exp(r*T/n) strictly between d and u"
        )
    step_disc = math.exp(-model.r * dt)
    q = p * u * step_disc
    if not 0.0 < q < 1.0:
        raise DomainError(f"shifted probability {q!r} outside (0,1)")
    return LatticeParams(
        n=n,
        u=u,
        d=d,
        p=p,
        q=q,
        q_ratio=q / (1.0 - q),
        step_discount=step_disc,
        total_discount=math.exp(-model.r * model.t),
        is_zero_rate=model.is_zero_rate,
    )


def q_ratio_minus_one(lattice: LatticeParams) -> float:
    """Q - 1 without cancellation: Q - 1 = (2q - 1)/(1 - q) with
    2q - 1 = 2*(2 sinh^2(x/2) - expm1(-r dt))/(u - d), x = sigma*sqrt(dt).

    Vanishes only where cosh(x) = exp(-r dt), impossible for sigma > 0
    and r >= 0, and only asymptotically approached when 2r = -sigma^2.
    """
    x = math.log(lattice.u)
    sh = math.sinh(0.5 * x)
    r_dt = -math.log(lattice.step_discount)
    two_q_minus_1 = 2.0 * (2.0 * sh * sh - math.expm1(-r_dt)) / (lattice.u - lattice.d)
    return two_q_minus_1 / (1.0 - lattice.q)


def qd_ratio_minus_one(lattice: LatticeParams) -> float:
    """Q*d - 1 without cancellation: (1 + d)*expm1(r dt)*exp(-r dt)/((u-d)(1-q)).

    Exactly zero iff r == 0, matching the zero-rate branch of the pricers.
    """
    r_dt = -math.log(lattice.step_discount)
    num = (1.0 + lattice.d) * math.expm1(r_dt) * lattice.step_discount
    return num / ((lattice.u - lattice.d) * (1.0 - lattice.q))
