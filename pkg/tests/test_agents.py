"""The agent engine must rediscover the walk's answers from raw Bayes."""
import pytest

from cascadelab.agents import (
    N_FAKE,
    ORDINARY,
    Y_FAKE,
    decide,
    exhaustive_oracle,
    mc_estimate,
    observe,
    posterior,
    public_lr,
    simulate_agents,
)
from cascadelab.errors import ParameterError, UndecidedRateError
from cascadelab.model import ModelParams, derive
from cascadelab.streams import TrialStream
from cascadelab.walk import exact_interval

BASE = ModelParams(0.7)
MIXED = ModelParams(0.7, 0.15, 0.1)


def test_empty_history_is_uninformative():
    assert public_lr("", BASE) == 1.0
    bel = posterior("", "H", BASE)
    # one H signal alone: P(G) = p
    assert bel.posterior_g == pytest.approx(0.7, abs=1e-12)
    assert decide(bel, "H") == "Y"


def test_first_agent_follows_its_signal():
    assert decide(posterior("", "H", MIXED), "H") == "Y"
    assert decide(posterior("", "L", MIXED), "L") == "N"


def test_single_observation_moves_belief_the_right_way():
    up = posterior("Y", "L", MIXED).posterior_g
    down = posterior("N", "L", MIXED).posterior_g
    flat = posterior("", "L", MIXED).posterior_g
    assert down < flat < up


def test_boundary_posterior_falls_back_to_signal():
    # one Y with no fakes puts an L-signal agent exactly at indifference
    bel = posterior("Y", "L", BASE)
    assert bel.posterior_g == pytest.approx(0.5, abs=1e-12)
    assert decide(bel, "L") == "N"
    assert decide(posterior("N", "H", BASE), "H") == "Y"


def test_two_matching_observations_lock_a_cascade():
    # after YY every later ordinary agent buys, whatever its signal
    for signal in ("H", "L"):
        assert decide(posterior("YY", signal, BASE), signal) == "Y"
        assert decide(posterior("NN", signal, BASE), signal) == "N"


def test_cascade_freezes_public_likelihood():
    locked = public_lr("YY", BASE)
    assert public_lr("YYN", BASE) == locked
    assert public_lr("YYNNNN", BASE) == locked


def test_observe_fakes_override_action():
    assert observe("N", Y_FAKE) == "Y"
    assert observe("Y", N_FAKE) == "N"
    assert observe("Y", ORDINARY) == "Y"
    with pytest.raises(ParameterError):
        observe("Y", "other")
    with pytest.raises(ParameterError):
        observe("maybe", ORDINARY)


def test_simulate_agents_trace_is_consistent():
    outcome, trace = simulate_agents(MIXED, "B", TrialStream(11, 0))
    assert outcome.kind in ("Y", "N")
    assert outcome.steps == len(trace)
    for draw in trace:
        if draw.agent_type == Y_FAKE:
            assert draw.observation == "Y"
        elif draw.agent_type == N_FAKE:
            assert draw.observation == "N"
        else:
            assert draw.observation == draw.action
    # replaying the recorded observations reproduces the cascade call
    for signal in ("H", "L"):
        bel = posterior([d.observation for d in trace], signal, MIXED)
        assert decide(bel, signal) == outcome.kind


def test_simulate_agents_returns_undecided_at_cap():
    outcome, trace = simulate_agents(MIXED, "B", TrialStream(11, 0), max_agents=1)
    assert outcome.kind == "undecided"
    assert len(trace) == 1


def test_mc_estimate_matches_scalar_replay_exactly():
    trials = 300
    est = mc_estimate(MIXED, "B", trials=trials, seed=7)
    outcomes = [
        simulate_agents(MIXED, "B", TrialStream(7, t))[0] for t in range(trials)
    ]
    y = sum(o.kind == "Y" for o in outcomes)
    decided = sum(o.kind != "undecided" for o in outcomes)
    assert est.undecided == trials - decided
    assert est.p_hat == y / decided


def test_mc_estimate_frozen_baseline():
    est = mc_estimate(BASE, "B", trials=100_000, seed=43)
    assert est.p_hat == 0.15469
    assert est.undecided == 0


def test_mc_estimate_refuses_mostly_undecided_runs():
    with pytest.raises(UndecidedRateError):
        mc_estimate(MIXED, "B", trials=200, seed=0, max_agents=1)


def test_oracle_frozen_point():
    iv = exhaustive_oracle(MIXED, "B", 12)
    assert iv.y_lower == pytest.approx(0.25532061606645584, abs=1e-15)
    assert iv.y_upper == pytest.approx(0.25744228530675173, abs=1e-15)
    assert iv.n_mass == pytest.approx(0.7425577146932483, abs=1e-15)
    assert iv.pending == pytest.approx(0.002121669240295887, abs=1e-15)


def test_oracle_agrees_with_walk_dp():
    # independent recursions, same truth; exponential vs banded
    for params in (BASE, MIXED, ModelParams(0.6, 0.2, 0.0)):
        for v in ("G", "B"):
            orc = exhaustive_oracle(params, v, 12)
            dp = exact_interval(params, v, depth=12)
            assert orc.y_lower == pytest.approx(dp.y_lower, abs=1e-12)
            assert orc.y_upper == pytest.approx(dp.y_upper, abs=1e-12)
            assert orc.n_mass == pytest.approx(dp.n_mass, abs=1e-12)


def test_oracle_depth_capped():
    with pytest.raises(ParameterError):
        exhaustive_oracle(BASE, "B", 26)
    with pytest.raises(ParameterError):
        exhaustive_oracle(BASE, "B", -1)
