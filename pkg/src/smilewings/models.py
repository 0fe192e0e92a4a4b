"""Parameter records and cumulant generating functions for the two jump diffusions.

The log-return is a Levy jump diffusion: Brownian part with volatility sigma and
drift b, plus a compound Poisson sum with intensity lam.  Jumps are double
exponential (Kou) or Gaussian (Merton).  The cgf ``m(s, T) = log E[exp(s X_T)]``
and its first three s-derivatives are returned in closed form; the quadrature
and saddle-point code needs them accurately near the Kou pole and at large
real arguments, where finite differences would be useless.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

from .errors import DomainError, EvaluationOverflowError, PoleProximityError

# Contours may approach the Kou mgf poles but never get closer than this.
POLE_GUARD = 1e-12
# exp() of a larger real argument is not representable in a double.
_EXP_MAX = 700.0


@dataclass(frozen=True)
class KouParams:
    """Double-exponential jump diffusion parameters.

    ``lambda_plus`` must exceed 1 so the underlying has a finite first moment
    (and the call wing a finite slope); up-jumps are Exp(lambda_plus) with
    probability ``p``, down-jumps Exp(lambda_minus) with probability ``1 - p``.
    """

    sigma: float
    b: float
    lam: float
    lambda_plus: float
    lambda_minus: float
    p: float
    T: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma!r}")
        if not math.isfinite(self.b):
            raise DomainError(f"b must be finite, got {self.b!r}")
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be > 0, got {self.lam!r}")
        if not self.lambda_plus > 1.0:
            raise DomainError(f"lambda_plus must be > 1, got {self.lambda_plus!r}")
        if not self.lambda_minus > 0.0:
            raise DomainError(f"lambda_minus must be > 0, got {self.lambda_minus!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must be in (0, 1), got {self.p!r}")
        if not self.T > 0.0:
            raise DomainError(f"T must be > 0, got {self.T!r}")


@dataclass(frozen=True)
class MertonParams:
    """Gaussian jump diffusion parameters: jumps are N(mu, delta^2)."""

    sigma: float
    b: float
    lam: float
    mu: float
    delta: float
    T: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma!r}")
        if not math.isfinite(self.b):
            raise DomainError(f"b must be finite, got {self.b!r}")
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be > 0, got {self.lam!r}")
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")
        if not self.delta > 0.0:
            raise DomainError(f"delta must be > 0, got {self.delta!r}")
        if not self.T > 0.0:
            raise DomainError(f"T must be > 0, got {self.T!r}")


@dataclass(frozen=True)
class CgfEval:
    """Value and first three derivatives of the cgf at one point.

    All four entries are real floats when the evaluation point was real, and
    complex otherwise.  At real points inside the domain ``d2 > 0`` (the cgf
    is strictly convex).
    """

    value: complex
    d1: complex
    d2: complex
    d3: complex


def _pack(s, value, d1, d2, d3) -> CgfEval:
    # Real inputs propagate through real arithmetic exactly; hand back floats.
    if isinstance(s, complex):
        return CgfEval(value, d1, d2, d3)
    return CgfEval(value.real, d1.real, d2.real, d3.real)


def kou_cgf(params: KouParams, s: complex | float) -> CgfEval:
    """Kou cgf T*(sigma^2 s^2/2 + b s + lam*(lp*p/(lp - s) + lm*(1-p)/(lm + s) - 1)).

    Analytic in the strip Re(s) in (-lambda_minus, lambda_plus); the rational
    jump terms are differentiated in closed form.

    Raises
    ------
    DomainError
        If Re(s) is outside the open strip.
    PoleProximityError
        If s is within 1e-12 of either pole.
    """
    lp, lm = params.lambda_plus, params.lambda_minus
    sc = complex(s)
    x = sc.real
    if not (-lm < x < lp):
        raise DomainError(
            f"Re(s)={x!r} outside the analyticity strip ({-lm!r}, {lp!r})"
        )
    up = lp - sc
    dn = lm + sc
    if abs(up) < POLE_GUARD or abs(dn) < POLE_GUARD:
        raise PoleProximityError(f"s={s!r} within {POLE_GUARD} of an mgf pole")

    T, lam, p = params.T, params.lam, params.p
    a_up = lp * p
    a_dn = lm * (1.0 - p)
    sig2 = params.sigma ** 2

    value = T * (0.5 * sig2 * sc * sc + params.b * sc + lam * (a_up / up + a_dn / dn - 1.0))
    d1 = T * (sig2 * sc + params.b + lam * (a_up / up ** 2 - a_dn / dn ** 2))
    d2 = T * (sig2 + 2.0 * lam * (a_up / up ** 3 + a_dn / dn ** 3))
    d3 = T * (6.0 * lam * (a_up / up ** 4 - a_dn / dn ** 4))
    return _pack(s, value, d1, d2, d3)


def merton_cgf(params: MertonParams, s: complex | float) -> CgfEval:
    """Merton cgf T*(sigma^2 s^2/2 + b s + lam*(exp(delta^2 s^2/2 + mu s) - 1)).

    Entire in s.  The inner exponent is checked against the double range so a
    huge real argument raises instead of silently overflowing.
    """
    sc = complex(s)
    de2 = params.delta ** 2
    w = 0.5 * de2 * sc * sc + params.mu * sc
    if w.real > _EXP_MAX:
        raise EvaluationOverflowError(
            f"jump mgf exponent {w.real!r} exceeds the double range at s={s!r}",
            exponent=w.real,
        )
    ew = cmath.exp(w)
    T, lam = params.T, params.lam
    sig2 = params.sigma ** 2
    g = de2 * sc + params.mu  # d/ds of the inner exponent

    value = T * (0.5 * sig2 * sc * sc + params.b * sc + lam * (ew - 1.0))
    d1 = T * (sig2 * sc + params.b + lam * g * ew)
    d2 = T * (sig2 + lam * (g * g + de2) * ew)
    d3 = T * (lam * (g ** 3 + 3.0 * de2 * g) * ew)
    return _pack(s, value, d1, d2, d3)


def cgf(params: KouParams | MertonParams, s: complex | float) -> CgfEval:
    """Dispatch to the model's cgf."""
    if isinstance(params, KouParams):
        return kou_cgf(params, s)
    if isinstance(params, MertonParams):
        return merton_cgf(params, s)
    raise TypeError(f"unsupported model parameters: {type(params).__name__}")


def risk_neutral_drift(params: KouParams | MertonParams) -> float:
    """Drift b making exp(X_t) a martingale, i.e. m(1, T) = 0.

    Closed form; independent of the b stored in ``params``.
    """
    if isinstance(params, KouParams):
        lp, lm, p = params.lambda_plus, params.lambda_minus, params.p
        jump_mean = lp * p / (lp - 1.0) + lm * (1.0 - p) / (lm + 1.0) - 1.0
        return -0.5 * params.sigma ** 2 - params.lam * jump_mean
    if isinstance(params, MertonParams):
        jump_mean = math.exp(0.5 * params.delta ** 2 + params.mu) - 1.0
        return -0.5 * params.sigma ** 2 - params.lam * jump_mean
    raise TypeError(f"unsupported model parameters: {type(params).__name__}")


def with_martingale_drift(params: KouParams | MertonParams):
    """Copy of ``params`` with b replaced by the martingale drift."""
    d = asdict(params)
    d["b"] = risk_neutral_drift(params)
    return type(params)(**d)


# --- JSON wire format -------------------------------------------------------
#
# Field names on the wire are fixed: sigma, b, lambda, lambda_plus,
# lambda_minus, p, mu, delta, T (model-appropriate subset).  "lambda" is a
# Python keyword, hence the lam <-> "lambda" mapping.  If "b" is omitted the
# martingale drift is substituted.

_KOU_FIELDS = {"sigma", "b", "lambda", "lambda_plus", "lambda_minus", "p", "T"}
_MERTON_FIELDS = {"sigma", "b", "lambda", "mu", "delta", "T"}


def params_to_dict(params: KouParams | MertonParams) -> dict:
    """Serialize to the JSON object layout."""
    d = asdict(params)
    d["lambda"] = d.pop("lam")
    return d


def _params_from_dict(obj: dict, fields: set[str], cls):
    if not isinstance(obj, dict):
        raise DomainError(f"parameter object must be a JSON object, got {type(obj).__name__}")
    unknown = set(obj) - fields
    if unknown:
        raise DomainError(f"unknown parameter fields: {sorted(unknown)}")
    missing = fields - set(obj) - {"b"}
    if missing:
        raise DomainError(f"missing parameter fields: {sorted(missing)}")
    d = {("lam" if key == "lambda" else key): float(val) for key, val in obj.items()}
    if "b" not in d:
        d["b"] = 0.0
        stub = cls(**d)
        d["b"] = risk_neutral_drift(stub)
    return cls(**d)


def kou_params_from_dict(obj: dict) -> KouParams:
    """Parse a Kou parameter JSON object; unknown fields are rejected."""
    return _params_from_dict(obj, _KOU_FIELDS, KouParams)


def merton_params_from_dict(obj: dict) -> MertonParams:
    """Parse a Merton parameter JSON object; unknown fields are rejected."""
    return _params_from_dict(obj, _MERTON_FIELDS, MertonParams)
