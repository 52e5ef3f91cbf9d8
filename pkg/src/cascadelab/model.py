"""Closed-form model quantities and threshold analysis.

The market model: an item of unknown value V in {G, B}; agents arrive in
sequence, each observing a private binary signal that matches V with
probability p in (1/2, 1).  A fraction of arrivals are fake: with
probability eps an arrival always reports Y, with probability beta it
always reports N, and with probability 1 - eps - beta it is an ordinary
Bayesian agent.  Later agents see only the reported actions, not signals.

With q short for an ordinary agent following its signal, the chance that
one observation reads Y is

    a = p * (1 - beta) + eps * (1 - p)      given V = G,
    1 - b = 1 - p * (1 - eps) - beta * (1 - p)  given V = B.

Public belief moves on a log-likelihood scale measured in units of
log(alpha), alpha = p / (1 - p).  One Y observation shifts the scaled
statistic up by eta_y, one N shifts it down by eta_n:

    eta_y = log(a / (1 - b)) / log(alpha)
    eta_n = log(b / (1 - a)) / log(alpha)

Both weights live in (0, 1]; eta_y equals 1 exactly when eps = 0 (a Y is
only fully informative when it cannot come from a Y-fake), and
symmetrically eta_n = 1 exactly when beta = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParameterError

__all__ = [
    "ModelParams",
    "DerivedModel",
    "ThresholdPoint",
    "derive",
    "bayesian_threshold",
    "cascade_thresholds",
]


@dataclass(frozen=True)
class ModelParams:
    """Signal quality and fake-agent mix for one configuration.

    p: probability a private signal matches the true value, in (1/2, 1).
    eps: probability an arrival is a Y-type fake (always reports Y).
    beta: probability an arrival is an N-type fake (always reports N).
    fake_total: eps + beta, derived; must stay below 1.
    """

    p: float
    eps: float = 0.0
    beta: float = 0.0
    fake_total: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.5 < self.p < 1.0:
            raise ParameterError(
                f"signal quality p must lie strictly in (1/2, 1), got {self.p!r}"
            )
        if self.eps < 0.0:
            raise ParameterError(f"fake fraction eps must be >= 0, got {self.eps!r}")
        if self.beta < 0.0:
            raise ParameterError(f"fake fraction beta must be >= 0, got {self.beta!r}")
        if self.eps + self.beta >= 1.0:
            raise ParameterError(
                "fake fractions must satisfy eps + beta < 1, got "
                f"eps={self.eps!r} beta={self.beta!r}"
            )
        object.__setattr__(self, "fake_total", self.eps + self.beta)


@dataclass(frozen=True)
class DerivedModel:
    """Observation probabilities and walk weights implied by ModelParams.

    pf_g / pf_b are the per-step probabilities that an observation reads Y
    given V = G / V = B while no cascade has started: pf_g = a and
    pf_b = 1 - b.
    """

    a: float
    b: float
    alpha: float
    eta_y: float
    eta_n: float
    pf_g: float
    pf_b: float


@dataclass(frozen=True)
class ThresholdPoint:
    """One solution of r * eta_y - k * eta_n = 1 in eps, at fixed (p, beta)."""

    r: int
    k: int
    eps_value: float


def _observation_probs(p: float, eps: float, beta: float) -> tuple[float, float]:
    a = p * (1.0 - beta) + eps * (1.0 - p)
    b = p * (1.0 - eps) + beta * (1.0 - p)
    return a, b


def _weights(p: float, eps: float, beta: float) -> tuple[float, float]:
    a, b = _observation_probs(p, eps, beta)
    log_alpha = math.log(p / (1.0 - p))
    eta_y = math.log(a / (1.0 - b)) / log_alpha
    eta_n = math.log(b / (1.0 - a)) / log_alpha
    return eta_y, eta_n


def derive(params: ModelParams) -> DerivedModel:
    """Compute observation probabilities, alpha, and both walk weights."""
    p, eps, beta = params.p, params.eps, params.beta
    a, b = _observation_probs(p, eps, beta)
    eta_y, eta_n = _weights(p, eps, beta)
    return DerivedModel(
        a=a,
        b=b,
        alpha=p / (1.0 - p),
        eta_y=eta_y,
        eta_n=eta_n,
        pf_g=a,
        pf_b=1.0 - b,
    )


def _validate_pb(p: float, beta: float) -> None:
    if not 0.5 < p < 1.0:
        raise ParameterError(f"signal quality p must lie strictly in (1/2, 1), got {p!r}")
    if not 0.0 <= beta < 1.0:
        raise ParameterError(f"fake fraction beta must lie in [0, 1), got {beta!r}")


def bayesian_threshold(p: float, beta: float, r: int) -> float:
    """Smallest eps at which r consecutive Y observations no longer cascade.

    Solving r * eta_y(eps) = 1 in closed form gives, with x = alpha**(1/r),

        eps_r = (1 - beta) * (alpha - x) / (alpha * x - 1).

    r = 1 yields 0; the sequence increases with r and approaches 1 - beta.
    """
    _validate_pb(p, beta)
    if r < 1:
        raise ParameterError(f"run length r must be a positive integer, got {r!r}")
    alpha = p / (1.0 - p)
    x = alpha ** (1.0 / r)
    return (1.0 - beta) * (alpha - x) / (alpha * x - 1.0)


def _threshold_gap(p: float, beta: float, r: int, k: int, eps: float) -> float:
    eta_y, eta_n = _weights(p, eps, beta)
    return r * eta_y - k * eta_n - 1.0


_BISECT_TOL = 1e-12
_SCAN_POINTS = 512


def _solve_threshold(p: float, beta: float, r: int, k: int) -> list[float]:
    """All eps in [0, 1 - beta) where r * eta_y - k * eta_n crosses 1.

    The gap function is monotone decreasing in the regimes of interest, but
    a sign-change scan keeps the search honest if the difference of the two
    decreasing weights ever turns around.
    """
    hi = 1.0 - beta
    roots: list[float] = []

    g0 = _threshold_gap(p, beta, r, k, 0.0)
    if abs(g0) <= 1e-12:
        roots.append(0.0)

    xs = [hi * (1.0 - 1e-9) * i / (_SCAN_POINTS - 1) for i in range(_SCAN_POINTS)]
    gs = [_threshold_gap(p, beta, r, k, x) for x in xs]
    for i in range(_SCAN_POINTS - 1):
        lo_g, hi_g = gs[i], gs[i + 1]
        if lo_g == 0.0:
            continue  # endpoint roots handled above or by the previous bracket
        if lo_g * hi_g > 0.0:
            continue
        lo_x, hi_x = xs[i], xs[i + 1]
        while hi_x - lo_x > _BISECT_TOL:
            mid = 0.5 * (lo_x + hi_x)
            gm = _threshold_gap(p, beta, r, k, mid)
            if gm == 0.0:
                lo_x = hi_x = mid
                break
            if (gm > 0.0) == (lo_g > 0.0):
                lo_x = mid
            else:
                hi_x = mid
        roots.append(0.5 * (lo_x + hi_x))
    return roots


def cascade_thresholds(
    p: float, beta: float, r_max: int, k_max: int = 2
) -> list[ThresholdPoint]:
    """Threshold family: eps solving r * eta_y - k * eta_n = 1.

    k = 0 recovers the Bayesian thresholds of ``bayesian_threshold``;
    k >= 1 marks where a run of r Ys stops outweighing k interleaved Ns,
    which is where further, smaller discontinuities of the cascade
    probability sit.  Returns points sorted by eps.
    """
    _validate_pb(p, beta)
    if r_max < 1 or k_max < 0:
        raise ParameterError(f"need r_max >= 1 and k_max >= 0, got {r_max!r}, {k_max!r}")
    points: list[ThresholdPoint] = []
    for r in range(1, r_max + 1):
        for k in range(0, k_max + 1):
            for eps in _solve_threshold(p, beta, r, k):
                points.append(ThresholdPoint(r=r, k=k, eps_value=eps))
    return sorted(points, key=lambda t: (t.eps_value, t.r, t.k))
