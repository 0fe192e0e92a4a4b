"""Saddle-point asymptotics for the Merton model: call price, density, smile.

The mgf is entire, so the wing analysis runs through the real saddle point
s_hat(k) solving m'(s_hat, T) = k.  The refined call approximation is

    C(k, T) ~ delta^2 * e^{k (1 - s_hat)} M(s_hat, T) / (2 log k * sqrt(2 pi m''(s_hat, T))),

the density drops the payoff factor, and the smile follows through the
wing-transfer map applied to L = -log C.  Exponentials of the form
e^{k(1 - s_hat)} M(s_hat, T) are handled strictly as sums of logs: already at
k ~ 30 the price is far below the double-precision minimum while L remains a
perfectly ordinary number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bs_core import g_minus
from .errors import ConvergenceError, DomainError
from .exact_pricer import PriceQuote
from .models import CgfEval, MertonParams, merton_cgf

_E_E = math.exp(math.e)


@dataclass(frozen=True)
class SaddleResult:
    """Solved saddle location with the cgf evaluated there.

    ``residual`` is |m'(s_hat, T) - k|; the solver guarantees it below
    1e-10 * max(1, k).
    """

    s_hat: float
    cgf: CgfEval
    iterations: int
    residual: float


def merton_saddle(params: MertonParams, k: float) -> SaddleResult:
    """Solve m'(s_hat, T) = k by safeguarded Newton.

    Requires k > m'(0, T) so the saddle is strictly positive.  The iteration
    starts from the asymptotic location sqrt(2 log k)/delta - mu/delta^2 and
    keeps a geometrically grown bracket as a safety net; m' is strictly
    increasing, so the bracket shrinks monotonically.
    """
    if not math.isfinite(k):
        raise DomainError(f"k must be finite, got {k!r}")
    slope0 = merton_cgf(params, 0.0).d1
    if k <= slope0:
        raise DomainError(
            f"k={k!r} must exceed m'(0, T)={slope0!r} for a positive saddle"
        )
    tol = 1e-10 * max(1.0, abs(k))

    if k > math.e:
        guess = math.sqrt(2.0 * math.log(k)) / params.delta - params.mu / params.delta ** 2
    else:
        guess = 1.0
    lo = 0.0
    hi = max(guess, 1.0)
    while merton_cgf(params, hi).d1 < k:
        lo = hi
        hi *= 2.0

    s = min(max(guess, lo + 1e-12), hi)
    trace = []
    for it in range(1, 201):
        ev = merton_cgf(params, s)
        err = ev.d1 - k
        trace.append((s, err))
        if abs(err) <= tol:
            return SaddleResult(s_hat=s, cgf=ev, iterations=it, residual=abs(err))
        if err >= 0.0:
            hi = s
        else:
            lo = s
        s_new = s - err / ev.d2 if ev.d2 > 0.0 else 0.5 * (lo + hi)
        if not (lo < s_new < hi):
            s_new = 0.5 * (lo + hi)
        s = s_new
    raise ConvergenceError("saddle iteration cap exceeded", k=k, trace=trace[-10:])


def merton_call_expansion(params: MertonParams, k: float, explicit: bool = False) -> PriceQuote:
    """Leading-order wing call price from the saddle-point analysis.

    Returns a quote whose ``log_value`` is always finite; ``value`` underflows
    to 0 for large k.  With ``explicit=True`` the mgf and its curvature are
    re-substituted inline instead of taken from the cgf record - same algebra,
    kept as an independent code path for cross-checking.
    """
    if not k > 1.0:
        raise DomainError(f"call expansion requires k > 1, got {k!r}")
    sad = merton_saddle(params, k)
    s = sad.s_hat
    if explicit:
        de2 = params.delta ** 2
        w = 0.5 * de2 * s * s + params.mu * s
        ew = math.exp(w)
        m_val = params.T * (0.5 * params.sigma ** 2 * s * s + params.b * s
                            + params.lam * (ew - 1.0))
        g = de2 * s + params.mu
        m_dd = params.T * (params.sigma ** 2 + params.lam * (g * g + de2) * ew)
    else:
        m_val = sad.cgf.value
        m_dd = sad.cgf.d2
    log_c = (
        2.0 * math.log(params.delta)
        + k * (1.0 - s)
        + m_val
        - math.log(2.0 * math.log(k))
        - 0.5 * math.log(2.0 * math.pi * m_dd)
    )
    value = math.exp(log_c) if log_c > -745.0 else 0.0
    return PriceQuote(value=value, log_value=log_c, method="expansion", err_estimate=0.0)


def merton_density_expansion(params: MertonParams, x: float) -> PriceQuote:
    """Saddle-point density e^{-x s_hat} M(s_hat, T) / sqrt(2 pi m''(s_hat, T))."""
    sad = merton_saddle(params, x)
    log_f = -x * sad.s_hat + sad.cgf.value - 0.5 * math.log(2.0 * math.pi * sad.cgf.d2)
    value = math.exp(log_f) if log_f > -745.0 else 0.0
    return PriceQuote(value=value, log_value=log_f, method="expansion", err_estimate=0.0)


@dataclass(frozen=True)
class MertonIVTerms:
    """Ingredients of the two smile approximations at one strike.

    ``L`` is the absolute log call price from the refined expansion,
    ``first_order`` the square-root-regime leading term, and ``c`` the
    explicit second-order coefficient.
    """

    L: float
    first_order: float
    c: float


def second_order_coefficient(params: MertonParams) -> float:
    """c = 2^(-9/4) delta^(-1/2) (mu + delta^2) - 2^(-13/4) delta^(3/2)."""
    de = params.delta
    return 2.0 ** -2.25 * (params.mu + de * de) / math.sqrt(de) - 2.0 ** -3.25 * de ** 1.5


def merton_iv_terms(params: MertonParams, k: float) -> MertonIVTerms:
    """Assemble L and the explicit-expansion pieces at log-strike k."""
    if not k > 1.0:
        raise DomainError(f"smile asymptotics require k > 1, got {k!r}")
    L = -merton_call_expansion(params, k).log_value
    first = 2.0 ** -0.75 * math.sqrt(params.delta * k) * math.log(k) ** -0.25
    return MertonIVTerms(L=L, first_order=first, c=second_order_coefficient(params))


def merton_iv(params: MertonParams, k: float, mode: str = "semi_explicit") -> float:
    """Wing implied vol, either transfer-based or fully explicit.

    ``semi_explicit`` evaluates G_-(k, L - (3/2) log L + log(k / (4 sqrt pi)))
    with L taken from the refined call expansion (in log space, so no
    underflow).  ``explicit2`` returns the two-term closed form
    2^(-3/4) sqrt(delta k) (log k)^(-1/4) + c sqrt(k) (log k)^(-3/4).
    """
    terms = merton_iv_terms(params, k)
    if mode == "semi_explicit":
        L = terms.L
        if L <= 0.0:
            raise DomainError(f"expansion log-price is not in the wing regime at k={k!r}")
        u = L - 1.5 * math.log(L) + math.log(k / (4.0 * math.sqrt(math.pi)))
        if u <= 0.0:
            raise DomainError(
                f"transfer argument {u!r} <= 0: k={k!r} is below the asymptotic regime"
            )
        return g_minus(k, u)
    if mode == "explicit2":
        return terms.first_order + terms.c * math.sqrt(k) * math.log(k) ** -0.75
    raise DomainError(f"mode must be 'semi_explicit' or 'explicit2', got {mode!r}")


@dataclass(frozen=True)
class TailEstimate:
    """Local power-law exponent of the underlying's density, with the density."""

    exponent: float
    density: float
    log_density: float


def st_tail_exponent(params: MertonParams, k: float) -> TailEstimate:
    """Tail behaviour of the underlying price density at level k.

    The density of S_T decays like k^(-exponent) with
    exponent = (sqrt2 / delta) sqrt(log log k) - slowly heavier than any fixed
    power law would allow, yet lighter than all of them.  Only the jump-size
    standard deviation enters.  Also returns the density itself via the
    log-return expansion, f(k) = f_X(log k) / k.
    """
    if not k > _E_E:
        raise DomainError(f"tail exponent needs k > e^e, got {k!r}")
    expo = math.sqrt(2.0) / params.delta * math.sqrt(math.log(math.log(k)))
    quote = merton_density_expansion(params, math.log(k))
    log_density = quote.log_value - math.log(k)
    density = math.exp(log_density) if log_density > -745.0 else 0.0
    return TailEstimate(exponent=expo, density=density, log_density=log_density)


def merton_L_refined(params: MertonParams, k: float) -> float:
    """Two-term log call price (sqrt2/delta) k sqrt(log k) - ((mu + delta^2)/delta^2) k.

    Diagnostics only: the error term grows like k log log k / sqrt(log k), so
    this is never used in the pricing or transfer paths.
    """
    if not k > 1.0:
        raise DomainError(f"refined L requires k > 1, got {k!r}")
    de2 = params.delta ** 2
    return (math.sqrt(2.0) / params.delta * k * math.sqrt(math.log(k))
            - (params.mu + de2) / de2 * k)
