"""Sequential Bayesian agents over raw observation histories.

This engine never touches the walk statistic.  Each agent sees the full
ordered history of reported actions, runs the Bayesian recursion to get
the public likelihood ratio l = P(history | B) / P(history | G), folds in
its own signal, and picks the action with the higher posterior.  The
recursion is self-referential: the probability that observation n reads Y
depends on what a rational agent at position n would have done with
either signal, which is itself a posterior/decide evaluation over the
shorter prefix.  Agreement with the walk engine is a property the test
suite verifies exhaustively, not an assumption baked in here.

Once both signal branches give the same action, subsequent ordinary
agents copy it, so an observation carries the same likelihood under G and
B and l freezes: a cascade never unwinds.  Observations that are
impossible under both values (probability zero either way, e.g. an N
after a Y-cascade when beta = 0) are skipped as no-ops so that the
recursion stays total over all binary histories.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import streams
from .errors import ParameterError, UndecidedRateError
from .model import ModelParams, derive
from .walk import CascadeOutcome, MCEstimate, ProbInterval

__all__ = [
    "DECISION_TIE_TOL",
    "DEFAULT_MAX_AGENTS",
    "AgentBelief",
    "AgentDraw",
    "posterior",
    "decide",
    "observe",
    "simulate_agents",
    "mc_estimate",
    "exhaustive_oracle",
]

# An agent whose posterior is within this distance of 1/2 is indifferent
# and falls back to its own signal.
DECISION_TIE_TOL = 1e-12

DEFAULT_MAX_AGENTS = 10**4

_MAX_UNDECIDED_FRACTION = 0.01

ORDINARY = "ordinary"
Y_FAKE = "y_fake"
N_FAKE = "n_fake"


@dataclass(frozen=True)
class AgentBelief:
    """Posterior P(V = G | history, signal) with its two likelihood factors.

    posterior_g = 1 / (1 + private_lr * public_lr), where private_lr is
    P(signal | B) / P(signal | G) and public_lr the same ratio for the
    observed history.
    """

    posterior_g: float
    private_lr: float
    public_lr: float


@dataclass(frozen=True)
class AgentDraw:
    """One simulated arrival: its type, signal, action, and what was seen."""

    agent_type: str
    signal: str
    action: str
    observation: str


def _private_lr(p: float, signal: str) -> float:
    if signal == "H":
        return (1.0 - p) / p
    if signal == "L":
        return p / (1.0 - p)
    raise ParameterError(f"signal must be 'H' or 'L', got {signal!r}")


def _decide_from_posterior(posterior_g: float, signal: str) -> str:
    if posterior_g > 0.5 + DECISION_TIE_TOL:
        return "Y"
    if posterior_g < 0.5 - DECISION_TIE_TOL:
        return "N"
    return "Y" if signal == "H" else "N"


def _branch_actions(p: float, public_lr: float) -> tuple[str, str]:
    """Actions a rational agent would take with an H / an L signal."""
    post_h = 1.0 / (1.0 + _private_lr(p, "H") * public_lr)
    post_l = 1.0 / (1.0 + _private_lr(p, "L") * public_lr)
    return _decide_from_posterior(post_h, "H"), _decide_from_posterior(post_l, "L")


def _observation_lrs(
    params: ModelParams, act_h: str, act_l: str
) -> tuple[float, float]:
    """P(O = Y | V = G) and P(O = Y | V = B) at the current prefix."""
    p = params.p
    ordinary = 1.0 - params.fake_total
    ay_g = p * (act_h == "Y") + (1.0 - p) * (act_l == "Y")
    ay_b = (1.0 - p) * (act_h == "Y") + p * (act_l == "Y")
    return params.eps + ordinary * ay_g, params.eps + ordinary * ay_b


def public_lr(history, params: ModelParams) -> float:
    """Likelihood ratio P(history | B) / P(history | G) by forward recursion."""
    lr = 1.0
    for obs in history:
        act_h, act_l = _branch_actions(params.p, lr)
        y_g, y_b = _observation_lrs(params, act_h, act_l)
        if obs == "Y":
            num, den = y_b, y_g
        elif obs == "N":
            num, den = 1.0 - y_b, 1.0 - y_g
        else:
            raise ParameterError(f"observation must be 'Y' or 'N', got {obs!r}")
        if num == 0.0 and den == 0.0:
            continue  # impossible under both values; carries no likelihood
        lr *= num / den
    return lr


def posterior(history, signal: str, params: ModelParams) -> AgentBelief:
    """Belief of an agent holding ``signal`` after seeing ``history``."""
    pub = public_lr(history, params)
    priv = _private_lr(params.p, signal)
    return AgentBelief(
        posterior_g=1.0 / (1.0 + priv * pub), private_lr=priv, public_lr=pub
    )


def decide(belief: AgentBelief, signal: str) -> str:
    """Action of a rational agent: Y above 1/2, N below, signal at a tie."""
    if signal not in ("H", "L"):
        raise ParameterError(f"signal must be 'H' or 'L', got {signal!r}")
    return _decide_from_posterior(belief.posterior_g, signal)


def observe(action: str, agent_type: str) -> str:
    """Reported observation: fakes override the action, ordinary pass it on."""
    if action not in ("Y", "N"):
        raise ParameterError(f"action must be 'Y' or 'N', got {action!r}")
    if agent_type == Y_FAKE:
        return "Y"
    if agent_type == N_FAKE:
        return "N"
    if agent_type == ORDINARY:
        return action
    raise ParameterError(f"unknown agent type {agent_type!r}")


def _signal_high_prob(p: float, v: str) -> float:
    if v == "G":
        return p
    if v == "B":
        return 1.0 - p
    raise ParameterError(f"true value v must be 'G' or 'B', got {v!r}")


def simulate_agents(
    params: ModelParams,
    v: str,
    rng,
    max_agents: int = DEFAULT_MAX_AGENTS,
):
    """Simulate arrivals until a cascade locks in or max_agents is reached.

    Each agent consumes exactly two uniforms, type then signal (fakes draw
    a signal too, and ignore it), keeping stream layout independent of the
    realised types.  Returns (CascadeOutcome, trace); the outcome's step
    count is the number of observations on the books when the first agent
    position found both signal branches agreeing.
    """
    sh = _signal_high_prob(params.p, v)
    history: list[str] = []
    trace: list[AgentDraw] = []
    lr = 1.0
    for n in range(max_agents):
        act_h, act_l = _branch_actions(params.p, lr)
        if act_h == act_l:
            return CascadeOutcome(kind=act_h, steps=n), trace

        u_type = rng.random()
        u_signal = rng.random()
        if u_type < params.eps:
            agent_type = Y_FAKE
        elif u_type < params.fake_total:
            agent_type = N_FAKE
        else:
            agent_type = ORDINARY
        signal = "H" if u_signal < sh else "L"

        if agent_type == ORDINARY:
            action = act_h if signal == "H" else act_l
        elif agent_type == Y_FAKE:
            action = "Y"
        else:
            action = "N"
        obs = observe(action, agent_type)

        y_g, y_b = _observation_lrs(params, act_h, act_l)
        num, den = (y_b, y_g) if obs == "Y" else (1.0 - y_b, 1.0 - y_g)
        if not (num == 0.0 and den == 0.0):
            lr *= num / den

        history.append(obs)
        trace.append(
            AgentDraw(agent_type=agent_type, signal=signal, action=action, observation=obs)
        )
    return CascadeOutcome(kind="undecided", steps=max_agents), trace


def mc_estimate(
    params: ModelParams,
    v: str,
    trials: int,
    seed: int,
    max_agents: int = DEFAULT_MAX_AGENTS,
) -> MCEstimate:
    """Monte Carlo cascade frequency from the agent engine.

    Vectorised lockstep over the same per-trial streams and draw layout as
    ``simulate_agents`` with ``TrialStream(seed, t)``: uniforms 2n and
    2n + 1 of trial t are agent n's type and signal draws.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials!r}")
    p, eps, beta = params.p, params.eps, params.beta
    ordinary = 1.0 - params.fake_total
    sh = _signal_high_prob(p, v)
    priv_h = (1.0 - p) / p
    priv_l = p / (1.0 - p)

    ids = np.arange(trials, dtype=np.uint64)
    keys = streams.trial_keys(seed, ids)
    lr = np.ones(trials)
    active = np.arange(trials)

    y_count = 0
    n_count = 0
    for n in range(max_agents):
        if not active.size:
            break
        l = lr[active]
        post_h = 1.0 / (1.0 + priv_h * l)
        post_l = 1.0 / (1.0 + priv_l * l)
        act_h_y = ~(post_h < 0.5 - DECISION_TIE_TOL)  # tie: H-signal falls back to Y
        act_l_y = post_l > 0.5 + DECISION_TIE_TOL  # tie: L-signal falls back to N

        cascade = act_h_y == act_l_y
        y_count += int((cascade & act_h_y).sum())
        n_count += int((cascade & ~act_h_y).sum())
        stay = ~cascade
        active = active[stay]
        if not active.size:
            break
        l = l[stay]
        act_h_y = act_h_y[stay]
        act_l_y = act_l_y[stay]

        u_type = streams.uniforms_at(keys[active], 2 * n)
        u_signal = streams.uniforms_at(keys[active], 2 * n + 1)
        y_fake = u_type < eps
        n_fake = ~y_fake & (u_type < eps + beta)
        sig_high = u_signal < sh
        act_y = np.where(sig_high, act_h_y, act_l_y)
        obs_y = np.where(y_fake, True, np.where(n_fake, False, act_y))

        ay_g = p * act_h_y + (1.0 - p) * act_l_y
        ay_b = (1.0 - p) * act_h_y + p * act_l_y
        y_g = eps + ordinary * ay_g
        y_b = eps + ordinary * ay_b
        num = np.where(obs_y, y_b, 1.0 - y_b)
        den = np.where(obs_y, y_g, 1.0 - y_g)
        impossible = (num == 0.0) & (den == 0.0)
        ratio = np.where(impossible, 1.0, num / np.where(den == 0.0, 1.0, den))
        lr[active] = l * ratio

    undecided = int(active.size)
    decided = trials - undecided
    if undecided > _MAX_UNDECIDED_FRACTION * trials:
        raise UndecidedRateError(
            f"{undecided} of {trials} trials undecided after {max_agents} agents"
        )
    p_hat = y_count / decided
    std_err = float(np.sqrt(p_hat * (1.0 - p_hat) / decided))
    return MCEstimate(
        p_hat=p_hat, std_err=std_err, trials=trials, undecided=undecided, seed=seed
    )


_MAX_ORACLE_DEPTH = 25


def exhaustive_oracle(params: ModelParams, v: str, depth: int) -> ProbInterval:
    """Enumerate every observation history to ``depth``, no reduction used.

    Branch probabilities come from posterior/decide evaluations at each
    prefix, so this is an independent, exponential-cost check on the walk
    DP.  A prefix is banked the moment both signal branches agree; mass
    still undecided at the horizon is reported as pending.
    """
    if not 0 <= depth <= _MAX_ORACLE_DEPTH:
        raise ParameterError(
            f"oracle depth must lie in [0, {_MAX_ORACLE_DEPTH}], got {depth!r}"
        )
    sh = _signal_high_prob(params.p, v)  # validates v
    p = params.p
    totals = {"Y": 0.0, "N": 0.0}

    def walk_prefix(lr: float, mass: float, remaining: int) -> float:
        """Returns the pending mass under this prefix; banks absorbed mass."""
        if mass == 0.0:
            return 0.0
        act_h, act_l = _branch_actions(p, lr)
        if act_h == act_l:
            totals[act_h] += mass
            return 0.0
        if remaining == 0:
            return mass
        y_g, y_b = _observation_lrs(params, act_h, act_l)
        y_true = y_g if v == "G" else y_b
        pending = 0.0
        if y_true > 0.0:
            pending += walk_prefix(lr * (y_b / y_g), mass * y_true, remaining - 1)
        n_true = 1.0 - y_true
        if n_true > 0.0:
            num, den = 1.0 - y_b, 1.0 - y_g
            lr_n = lr if (num == 0.0 and den == 0.0) else lr * (num / den)
            pending += walk_prefix(lr_n, mass * n_true, remaining - 1)
        return pending

    pending = walk_prefix(1.0, 1.0, depth)
    return ProbInterval(
        y_lower=totals["Y"],
        y_upper=totals["Y"] + pending,
        n_mass=totals["N"],
        pending=pending,
    )
