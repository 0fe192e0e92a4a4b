"""Monte Carlo oracle: exact-law simulation of the log-return at maturity.

The terminal log-return decomposes as b*T + sigma*sqrt(T)*Z + compound Poisson
sum, so it is drawn exactly - Poisson count, then i.i.d. jumps - with no path
discretization.  Any disagreement with the quadrature pricer therefore points
at the quadrature, not at simulation bias.

Randomness comes from numpy's Philox counter-based generator (recorded in the
result as "philox4x64"), consumed in a fixed chunked order so a (seed,
n_paths) pair reproduces estimates bit for bit regardless of platform
threading.  This is a moderate-strike oracle only: it cannot see events rarer
than ~1/n_paths, so deep-wing validation belongs to the quadrature pricer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .models import KouParams, MertonParams

_RNG_NAME = "philox4x64"
_CHUNK = 1 << 20


@dataclass(frozen=True)
class MCResult:
    """Estimate with its standard error and full reproducibility metadata.

    ``n_positive`` counts paths contributing a nonzero payoff (or falling in
    the window, for window estimators); 0 flags a degenerate estimate that
    must not be used for validation.
    """

    estimate: float
    std_error: float
    n_paths: int
    seed: int
    rng: str = _RNG_NAME
    n_positive: int = 0


def _chunk_sizes(n_paths: int):
    full, rest = divmod(n_paths, _CHUNK)
    return [_CHUNK] * full + ([rest] if rest else [])


def _draw_chunk(model, gen: np.random.Generator, size: int) -> np.ndarray:
    """One chunk of exact X_T samples; draw order is part of the wire format."""
    counts = gen.poisson(model.lam * model.T, size=size)
    z = gen.standard_normal(size)
    x = model.b * model.T + model.sigma * math.sqrt(model.T) * z
    total_jumps = int(counts.sum())
    if total_jumps > 0:
        if isinstance(model, KouParams):
            up = gen.random(total_jumps) < model.p
            mags = gen.standard_exponential(total_jumps)
            jumps = np.where(up, mags / model.lambda_plus, -mags / model.lambda_minus)
        else:
            jumps = model.mu + model.delta * gen.standard_normal(total_jumps)
        owner = np.repeat(np.arange(size), counts)
        x += np.bincount(owner, weights=jumps, minlength=size)
    return x


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def simulate_xt(model: KouParams | MertonParams, n_paths: int, seed: int) -> np.ndarray:
    """Exact i.i.d. sample of the terminal log-return X_T.

    Deterministic for fixed (model, n_paths, seed).
    """
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths!r}")
    gen = _generator(seed)
    parts = [_draw_chunk(model, gen, size) for size in _chunk_sizes(n_paths)]
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def _accumulate(model, n_paths: int, seed: int, stat):
    """Stream chunks through ``stat(x) -> (sum, sumsq, n_hits)`` and reduce."""
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths!r}")
    gen = _generator(seed)
    total = 0.0
    total_sq = 0.0
    hits = 0
    for size in _chunk_sizes(n_paths):
        x = _draw_chunk(model, gen, size)
        s, s2, h = stat(x)
        total += s
        total_sq += s2
        hits += h
    mean = total / n_paths
    if n_paths > 1:
        var = max(total_sq - n_paths * mean * mean, 0.0) / (n_paths - 1)
    else:
        var = 0.0
    return mean, math.sqrt(var / n_paths), hits


def mc_call(model: KouParams | MertonParams, k: float, n_paths: int, seed: int) -> MCResult:
    """Monte Carlo call price E[(e^{X_T} - e^k)^+] with standard error."""
    strike = math.exp(k)

    def stat(x):
        payoff = np.exp(x) - strike
        np.maximum(payoff, 0.0, out=payoff)
        return float(payoff.sum()), float((payoff * payoff).sum()), int((payoff > 0.0).sum())

    mean, se, hits = _accumulate(model, n_paths, seed, stat)
    return MCResult(estimate=mean, std_error=se, n_paths=n_paths, seed=seed,
                    n_positive=hits)


def mc_cdf_density(model: KouParams | MertonParams, x: float, h: float,
                   n_paths: int, seed: int) -> MCResult:
    """Kernel-free density estimate (F(x+h) - F(x-h)) / (2h) by window counting.

    The standard error is binomial; keep h well above the density's curvature
    scale times nothing and below its variation scale (h ~ 1e-3 works for the
    smooth densities here).
    """
    if not h > 0.0:
        raise DomainError(f"bandwidth must be > 0, got {h!r}")
    lo, hi = x - h, x + h

    def stat(xs):
        inside = int(((xs > lo) & (xs <= hi)).sum())
        return float(inside), float(inside), inside

    mean, _, hits = _accumulate(model, n_paths, seed, stat)
    p_hat = mean
    se = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n_paths) / (2.0 * h)
    return MCResult(estimate=p_hat / (2.0 * h), std_error=se, n_paths=n_paths,
                    seed=seed, n_positive=hits)
