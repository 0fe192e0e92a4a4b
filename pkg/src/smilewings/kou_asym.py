"""Closed-form large-strike expansions for the Kou model.

The call price in the right wing behaves like

    C(k) ~ exp(-alpha_1*k - alpha_half*sqrt(k) - alpha_0) * k^(-3/4),

obtained from a saddle-point analysis of the Mellin price integral near the
mgf pole at lambda_plus.  The Gao-Lee transfer machinery turns that into a
four-term implied-vol expansion

    V(k) ~ beta_half*sqrt(k) + beta_0 + beta_log*log(k)/sqrt(k) + beta_minus_half/sqrt(k).

Note on the sqrt(k) exponent term: redoing the saddle-point computation, the
exponent of the call expansion carries alpha_half * k^(1/2) (the cgf at the
saddle contributes +xi^(1/2) k^(1/2) and so does k(1 - s_hat)).  Only that
reading makes beta_0 = gamma*alpha_half a constant under the transfer; the
consistency is covered by tests inverting the call expansion numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .models import KouParams


def psi(x: float) -> float:
    """Moment-formula slope map 2 - 4*(sqrt(x^2 + x) - x), on x > 0.

    Strictly decreasing from 2 (at 0+) to 0 (like 1/(2x) at infinity); the
    square-root wing slope of the smile is psi(critical moment - 1) ** 0.5.
    Evaluated as 2 - 4/(1 + sqrt(1 + 1/x)), which is exact and does not
    cancel at large x.
    """
    if not x > 0.0:
        raise DomainError(f"psi requires x > 0, got {x!r}")
    return 2.0 - 4.0 / (1.0 + math.sqrt(1.0 + 1.0 / x))


@dataclass(frozen=True)
class KouCoefficients:
    """Expansion coefficients for one Kou parameter set.

    ``alpha_*`` drive the call-price expansion, ``beta_*`` the implied-vol
    expansion; ``gamma`` is the transfer multiplier and ``xi`` the jump-pole
    strength lam * lambda_plus * p * T.
    """

    alpha_1: float
    alpha_half: float
    alpha_0: float
    beta_half: float
    beta_0: float
    beta_log: float
    beta_minus_half: float
    gamma: float
    xi: float


def kou_coefficients(params: KouParams) -> KouCoefficients:
    """All expansion coefficients in closed form.

    ``beta_half`` equals both -2*gamma*sqrt(alpha_1^2 + alpha_1) and
    sqrt(psi(alpha_1)); the stable product form below is algebraically
    identical to either.
    """
    lp, lm, p, lam, T = (
        params.lambda_plus,
        params.lambda_minus,
        params.p,
        params.lam,
        params.T,
    )
    sig2 = params.sigma ** 2
    a1 = lp - 1.0
    xi = lam * lp * p * T
    a_half = -2.0 * math.sqrt(xi)
    a0 = T * (
        -0.5 * sig2 * lp ** 2
        - params.b * lp
        - lam * lm * (1.0 - p) / (lm + lp)
        + lam
    ) - math.log(xi ** 0.25 / (2.0 * math.sqrt(math.pi) * lp * a1))

    # gamma = 1/sqrt(2 a1 + 2) - 1/sqrt(2 a1), written without cancellation.
    r0, r1 = math.sqrt(2.0 * a1), math.sqrt(2.0 * a1 + 2.0)
    gamma = -2.0 / (r0 * r1 * (r0 + r1))

    b_half = -2.0 * gamma * math.sqrt(a1 * a1 + a1)
    b0 = gamma * a_half
    b_log = 0.25 * gamma
    b_mhalf = (
        a0 + math.log((1.0 - 1.0 / math.sqrt(1.0 + 1.0 / a1)) / math.sqrt(4.0 * math.pi * a1))
    ) * gamma + (0.5 / r0 ** 3 - 0.5 / r1 ** 3) * a_half ** 2

    return KouCoefficients(
        alpha_1=a1,
        alpha_half=a_half,
        alpha_0=a0,
        beta_half=b_half,
        beta_0=b0,
        beta_log=b_log,
        beta_minus_half=b_mhalf,
        gamma=gamma,
        xi=xi,
    )


def kou_log_call_expansion(params: KouParams, k: float) -> float:
    """Log of the leading call-expansion term, -alpha_1*k - alpha_half*sqrt(k) - alpha_0 - (3/4)log k."""
    if not k > 0.0:
        raise DomainError(f"call expansion requires k > 0, got {k!r}")
    c = kou_coefficients(params)
    return -c.alpha_1 * k - c.alpha_half * math.sqrt(k) - c.alpha_0 - 0.75 * math.log(k)


def kou_call_expansion(params: KouParams, k: float) -> float:
    """Leading-order wing call price exp(-alpha_1*k - alpha_half*sqrt(k) - alpha_0) * k^(-3/4).

    Asymptotic as k -> infinity with relative error O(k^(-1/4)); evaluates at
    any k > 0 and leaves the validity judgment to the caller.
    """
    return math.exp(kou_log_call_expansion(params, k))


@dataclass(frozen=True)
class IVExpansion:
    """Partial sum of the implied-vol series with its truncation order.

    ``nonpositive`` flags partial sums that fell to <= 0 (possible at small k
    where the asymptotic series is meaningless).
    """

    value: float
    order: int
    nonpositive: bool


def kou_iv_expansion(params: KouParams, k: float, order: int = 4) -> IVExpansion:
    """Implied-vol expansion truncated after ``order`` terms (1 to 4).

    Order 1 is the square-root moment-formula limit sqrt(psi(lambda_plus-1))*sqrt(k);
    orders 2-4 add the constant, log(k)/sqrt(k) and 1/sqrt(k) corrections.
    """
    if not k > 0.0:
        raise DomainError(f"iv expansion requires k > 0, got {k!r}")
    if order not in (1, 2, 3, 4):
        raise DomainError(f"order must be 1..4, got {order!r}")
    c = kou_coefficients(params)
    rk = math.sqrt(k)
    value = c.beta_half * rk
    if order >= 2:
        value += c.beta_0
    if order >= 3:
        value += c.beta_log * math.log(k) / rk
    if order >= 4:
        value += c.beta_minus_half / rk
    return IVExpansion(value=value, order=order, nonpositive=value <= 0.0)
