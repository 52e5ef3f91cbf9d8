"""Random-walk engine over observation counts.

The public log-likelihood statistic after n_y Y-observations and n_n
N-observations is h = n_y * eta_y - n_n * eta_n (in units of log(alpha)).
While h stays in [-1, 1] an ordinary agent still follows its own signal;
once h leaves the band the next agent ignores its signal and a cascade is
locked in.  Pre-cascade, each observation is an independent step: up with
probability pf_g (V = G) or pf_b (V = B), down otherwise.  Everything in
this module is expressed through the walk; the agent engine in
``agents.py`` reproduces the same answers without ever mentioning h.

h is recomputed from the integer counts on every access, never
accumulated in floating point, so long walks cannot drift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import streams
from .errors import ParameterError, UndecidedRateError
from .model import DerivedModel, ModelParams, derive

__all__ = [
    "BOUNDARY_TOL",
    "DEFAULT_MAX_STEPS",
    "DEFAULT_DP_DEPTH",
    "WalkState",
    "CascadeOutcome",
    "MCEstimate",
    "ProbInterval",
    "classify",
    "step",
    "simulate",
    "mc_estimate",
    "exact_interval",
]

# Absorption uses a strict inequality with this buffer: exactly h = 1 means
# the next agent is indifferent and follows its signal, and grid points a
# hair past a threshold must not flip class through float noise.
BOUNDARY_TOL = 1e-9

DEFAULT_MAX_STEPS = 10**6
DEFAULT_DP_DEPTH = 10**4

_MAX_UNDECIDED_FRACTION = 0.01


@dataclass(frozen=True)
class WalkState:
    """Observation counts plus the step weights they are scored with."""

    n_y: int
    n_n: int
    eta_y: float
    eta_n: float

    @property
    def h(self) -> float:
        return self.n_y * self.eta_y - self.n_n * self.eta_n

    @classmethod
    def initial(cls, derived: DerivedModel) -> "WalkState":
        return cls(n_y=0, n_n=0, eta_y=derived.eta_y, eta_n=derived.eta_n)


@dataclass(frozen=True)
class CascadeOutcome:
    """kind is "Y", "N", or "undecided"; steps counts observations consumed."""

    kind: str
    steps: int


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo Y-cascade frequency over the decided trials."""

    p_hat: float
    std_err: float
    trials: int
    undecided: int
    seed: int


@dataclass(frozen=True)
class ProbInterval:
    """Certified bracket on the Y-cascade probability.

    y_lower counts mass already absorbed on the Y side, n_mass on the N
    side, pending whatever is still in flight; y_upper = y_lower + pending.
    """

    y_lower: float
    y_upper: float
    n_mass: float
    pending: float

    def __post_init__(self) -> None:
        if not (
            -1e-12 <= self.y_lower <= self.y_upper + 1e-12
            and abs(self.y_upper - (self.y_lower + self.pending)) <= 1e-9
        ):
            raise ValueError(f"inconsistent interval {self}")

    @property
    def width(self) -> float:
        return self.y_upper - self.y_lower


def classify(state: WalkState) -> str:
    """Absorption class of a state: "Y", "N", or "undecided"."""
    h = state.h
    if h > 1.0 + BOUNDARY_TOL:
        return "Y"
    if h < -1.0 - BOUNDARY_TOL:
        return "N"
    return "undecided"


def step(state: WalkState, obs: str) -> WalkState:
    """Apply one observation to an unabsorbed state."""
    if classify(state) != "undecided":
        raise ValueError("cannot step an absorbed walk state")
    if obs == "Y":
        return WalkState(state.n_y + 1, state.n_n, state.eta_y, state.eta_n)
    if obs == "N":
        return WalkState(state.n_y, state.n_n + 1, state.eta_y, state.eta_n)
    raise ValueError(f"observation must be 'Y' or 'N', got {obs!r}")


def _forward_prob(derived: DerivedModel, v: str) -> float:
    if v == "G":
        return derived.pf_g
    if v == "B":
        return derived.pf_b
    raise ParameterError(f"true value v must be 'G' or 'B', got {v!r}")


def simulate(
    derived: DerivedModel,
    v: str,
    rng,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> CascadeOutcome:
    """Run one walk trial; rng needs only a ``random()`` method."""
    q = _forward_prob(derived, v)
    state = WalkState.initial(derived)
    for n in range(1, max_steps + 1):
        state = step(state, "Y" if rng.random() < q else "N")
        kind = classify(state)
        if kind != "undecided":
            return CascadeOutcome(kind=kind, steps=n)
    return CascadeOutcome(kind="undecided", steps=max_steps)


def mc_estimate(
    params: ModelParams,
    v: str,
    trials: int,
    seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> MCEstimate:
    """Monte Carlo cascade frequency over per-trial counter-based streams.

    Trial t consumes uniform j of stream (seed, t) at its j-th step, so the
    result is a pure function of (params, v, trials, seed, max_steps)
    regardless of batching.  Trials that hit max_steps are dropped from the
    estimate; if more than 1% of them do, the estimate is refused.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials!r}")
    d = derive(params)
    q = _forward_prob(d, v)

    ids = np.arange(trials, dtype=np.uint64)
    keys = streams.trial_keys(seed, ids)
    n_y = np.zeros(trials, dtype=np.int64)
    n_n = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials)

    y_count = 0
    n_count = 0
    j = 0
    while active.size and j < max_steps:
        u = streams.uniforms_at(keys[active], j)
        up = u < q
        n_y[active] += up
        n_n[active] += ~up
        h = n_y[active] * d.eta_y - n_n[active] * d.eta_n
        absorbed_y = h > 1.0 + BOUNDARY_TOL
        absorbed_n = h < -1.0 - BOUNDARY_TOL
        y_count += int(absorbed_y.sum())
        n_count += int(absorbed_n.sum())
        active = active[~(absorbed_y | absorbed_n)]
        j += 1

    undecided = int(active.size)
    decided = trials - undecided
    if undecided > _MAX_UNDECIDED_FRACTION * trials:
        raise UndecidedRateError(
            f"{undecided} of {trials} trials undecided after {max_steps} steps"
        )
    p_hat = y_count / decided
    std_err = float(np.sqrt(p_hat * (1.0 - p_hat) / decided))
    return MCEstimate(
        p_hat=p_hat, std_err=std_err, trials=trials, undecided=undecided, seed=seed
    )


def exact_interval(
    params: ModelParams,
    v: str,
    depth: int = DEFAULT_DP_DEPTH,
) -> ProbInterval:
    """Exact dynamic program over the (n_y, n_n) lattice to a depth horizon.

    Level by level, unabsorbed mass splits q / (1 - q) onto the two child
    counts; children past a wall are banked on that side.  Unabsorbed
    states at one level form a contiguous window in n_y (h is monotone in
    n_y at fixed level), so each level is one vector operation.  Mass is
    conserved to float precision, giving a certified bracket.
    """
    if depth < 0:
        raise ParameterError(f"depth must be >= 0, got {depth!r}")
    d = derive(params)
    q = _forward_prob(d, v)

    y_mass = 0.0
    n_mass = 0.0
    mass = np.array([1.0])
    j_lo = 0  # n_y of the first window entry
    for level in range(1, depth + 1):
        new = np.empty(mass.size + 1)
        new[:-1] = mass * (1.0 - q)
        new[-1] = 0.0
        new[1:] += mass * q
        j = j_lo + np.arange(new.size)
        h = j * d.eta_y - (level - j) * d.eta_n
        absorbed_y = h > 1.0 + BOUNDARY_TOL
        absorbed_n = h < -1.0 - BOUNDARY_TOL
        y_mass += float(new[absorbed_y].sum())
        n_mass += float(new[absorbed_n].sum())
        keep = np.nonzero(~(absorbed_y | absorbed_n) & (new > 0.0))[0]
        if keep.size == 0:
            mass = np.empty(0)
            break
        mass = new[keep[0] : keep[-1] + 1]
        j_lo += int(keep[0])

    pending = float(mass.sum())
    return ProbInterval(
        y_lower=y_mass, y_upper=y_mass + pending, n_mass=n_mass, pending=pending
    )
