"""Black-Scholes call pricing and implied-vol inversion in dimensionless form.

Spot is normalized to 1 and rates are zero, so a call is described by the
log-strike ``k`` and the *total* volatility ``v`` (vol times sqrt of maturity).
The static-arbitrage band for the call price is ``(max(1 - e^k, 0), 1)``.

Deep-wing prices underflow double precision long before their logs become
uninformative, so the module also exposes a log-space price and a log-space
inversion built on the scaled complementary error function.
"""

from __future__ import annotations

import math

from scipy.special import erfcx, ndtr

from .errors import BoundaryError, ConvergenceError, DomainError, NoSolutionError

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
# erfcx(-x) ~ 2 exp(x^2) overflows once d1^2/2 > 709; beyond that the time
# value is far below one ulp of the intrinsic value anyway.
_D1_OVERFLOW = 37.0

_PRICE_TOL = 1e-12
_MAX_ITER = 200


def _validate_kv(k: float, v: float) -> None:
    if not math.isfinite(k):
        raise DomainError(f"log-strike must be finite, got {k!r}")
    if not math.isfinite(v) or v <= 0.0:
        raise DomainError(f"total volatility must be positive and finite, got {v!r}")


def d1_d2(k: float, v: float) -> tuple[float, float]:
    """Return (d1, d2) = (-k/v + v/2, -k/v - v/2)."""
    _validate_kv(k, v)
    return -k / v + 0.5 * v, -k / v - 0.5 * v


def bs_call(k: float, v: float) -> float:
    """Black-Scholes call price Phi(d1) - e^k Phi(d2) on unit spot.

    Parameters
    ----------
    k : float
        Log-strike.
    v : float
        Total (dimensionless) volatility, > 0.

    Strictly increasing in ``v`` and confined to the arbitrage band
    ``(max(1 - e^k, 0), 1)`` up to floating-point resolution.
    """
    d1, d2 = d1_d2(k, v)
    return float(ndtr(d1) - math.exp(k) * ndtr(d2))


def log_bs_call(k: float, v: float) -> float:
    """Natural log of the call price, stable deep into the out-of-the-money wing.

    Uses the identity e^k * phi(d2) = phi(d1) to factor the price as

        c = exp(-d1^2/2) * (erfcx(-d1/sqrt2) - erfcx(-d2/sqrt2)) / 2,

    which keeps full relative accuracy where the linear-space price underflows.
    For calls so deep in the money that the time value is below one ulp of the
    intrinsic value, returns log(1 - e^k).
    """
    d1, d2 = d1_d2(k, v)
    if d1 > _D1_OVERFLOW:
        return math.log1p(-math.exp(k))
    diff = erfcx(-d1 / _SQRT2) - erfcx(-d2 / _SQRT2)
    return -0.5 * d1 * d1 + math.log(0.5 * diff)


def _log_call_and_slope(k: float, v: float) -> tuple[float, float]:
    """(log c, d log c / dv); the slope is vega/price = phi(d1)/c."""
    d1, d2 = d1_d2(k, v)
    if d1 > _D1_OVERFLOW:
        return math.log1p(-math.exp(k)), 0.0
    diff = erfcx(-d1 / _SQRT2) - erfcx(-d2 / _SQRT2)
    log_c = -0.5 * d1 * d1 + math.log(0.5 * diff)
    slope = 2.0 / (diff * _SQRT_2PI)
    return log_c, slope


def vega(k: float, v: float) -> float:
    """dPrice/dv = phi(d1)."""
    d1, _ = d1_d2(k, v)
    return math.exp(-0.5 * d1 * d1) / _SQRT_2PI


def _check_band(k: float, price: float) -> float:
    """Validate the price against the arbitrage band; return the lower bound."""
    if not math.isfinite(price):
        raise DomainError(f"price must be finite, got {price!r}")
    lower = max(1.0 - math.exp(k), 0.0)
    if price < lower or price > 1.0:
        raise NoSolutionError(
            f"price {price!r} outside the arbitrage band ({lower!r}, 1) for k={k!r}"
        )
    eps = 8.0 * math.ulp(1.0)
    if price == lower or (lower > 0.0 and price - lower <= eps * lower):
        raise BoundaryError(f"price {price!r} is at the lower arbitrage bound {lower!r}")
    if price >= 1.0 or 1.0 - price <= eps:
        raise BoundaryError(f"price {price!r} is at the upper arbitrage bound 1")
    return lower


def implied_vol_from_log(k: float, log_price: float) -> float:
    """Invert the call price given as a natural log.

    Solves log c_BS(k, v) = log_price with a bisection-safeguarded Newton
    iteration on v.  Works in the far wing where the linear price is not
    representable; the caller guarantees the price is inside the band (for
    k <= 0 this means log_price > log(1 - e^k)).
    """
    if not math.isfinite(k) or not math.isfinite(log_price):
        raise DomainError("k and log_price must be finite")
    if log_price >= 0.0:
        raise NoSolutionError(f"log price {log_price!r} >= 0 means price >= 1")
    if k < 0.0 and log_price <= math.log1p(-math.exp(k)):
        raise NoSolutionError(f"log price {log_price!r} at or below intrinsic for k={k!r}")

    lo, hi = 1e-10, 1.0
    while log_bs_call(k, hi) < log_price:
        hi *= 2.0
        if hi > 1e6:
            raise ConvergenceError("could not bracket the implied vol", k=k, log_price=log_price)

    # Wing-transfer guess sqrt2*(sqrt(L+k) - sqrt(L)) is excellent for k > 0.
    if k > 0.0 and -log_price > 0.0:
        v = min(max(g_minus(k, -log_price), lo), hi)
    else:
        v = 0.5 * (lo + hi)

    for _ in range(_MAX_ITER):
        log_c, slope = _log_call_and_slope(k, v)
        err = log_c - log_price
        if err >= 0.0:
            hi = min(hi, v)
        else:
            lo = max(lo, v)
        if abs(err) <= 1e-13:
            return v
        if slope > 0.0:
            step = -err / slope
            v_new = v + step
        else:
            v_new = 0.5 * (lo + hi)
        if not (lo < v_new < hi):
            v_new = 0.5 * (lo + hi)
        if abs(v_new - v) <= 1e-16 * v:
            return v_new
        v = v_new
    raise ConvergenceError("implied vol iteration did not converge", k=k, log_price=log_price)


def implied_vol(k: float, price: float) -> float:
    """Total volatility v solving bs_call(k, v) = price.

    Parameters
    ----------
    k : float
        Log-strike.
    price : float
        Call price strictly inside the band ``(max(1 - e^k, 0), 1)``.

    Raises
    ------
    NoSolutionError
        If the price lies outside the band.
    BoundaryError
        If the price sits on (or within a few ulps of) a band edge, where no
        finite vol can reproduce it in double precision.

    The round trip |bs_call(k, implied_vol(k, price)) - price| is below 1e-12.
    """
    _check_band(k, price)
    v = implied_vol_from_log(k, math.log(price))
    # The log-space solve is relative; confirm the absolute contract.
    if abs(bs_call(k, v) - price) > _PRICE_TOL:
        raise ConvergenceError(
            "price tolerance not met after inversion",
            k=k, price=price, vol=v, achieved=abs(bs_call(k, v) - price),
        )
    return v


def g_minus(k: float, u: float) -> float:
    """Wing transfer map sqrt2 * (sqrt(u + k) - sqrt(u)).

    Maps an absolute log price level ``u`` and log-strike ``k`` to a total
    volatility; decreasing in ``u`` for fixed k > 0.  Evaluated as
    sqrt2 * k / (sqrt(u+k) + sqrt(u)) to avoid cancellation at large u.
    """
    if u <= 0.0 or u + k <= 0.0:
        raise DomainError(f"g_minus requires u > 0 and u + k > 0, got u={u!r}, k={k!r}")
    return _SQRT2 * k / (math.sqrt(u + k) + math.sqrt(u))
