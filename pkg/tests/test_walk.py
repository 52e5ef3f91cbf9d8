import math

import pytest

from cascadelab.errors import ParameterError, UndecidedRateError
from cascadelab.model import ModelParams, derive
from cascadelab.streams import TrialStream
from cascadelab.walk import (
    CascadeOutcome,
    ProbInterval,
    WalkState,
    classify,
    exact_interval,
    mc_estimate,
    simulate,
    step,
)

BASE = ModelParams(0.7)  # no fakes: the classic gambler's-ruin configuration


def test_initial_state_is_centred():
    s = WalkState.initial(derive(BASE))
    assert (s.n_y, s.n_n) == (0, 0)
    assert s.h == 0.0


def test_step_moves_counts_not_floats():
    d = derive(ModelParams(0.7, 0.15, 0.1))
    s = WalkState.initial(d)
    s = step(step(s, "Y"), "N")
    assert (s.n_y, s.n_n) == (1, 1)
    assert s.h == pytest.approx(d.eta_y - d.eta_n, abs=0)


def test_step_rejects_garbage_and_absorbed_states():
    d = derive(BASE)
    with pytest.raises(ValueError):
        step(WalkState.initial(d), "X")
    absorbed = WalkState(n_y=2, n_n=0, eta_y=d.eta_y, eta_n=d.eta_n)
    assert classify(absorbed) == "Y"
    with pytest.raises(ValueError):
        step(absorbed, "Y")


def test_classify_boundary_is_follow_signal_territory():
    # h exactly at the wall is not a cascade; the next agent follows its signal
    s = WalkState(n_y=1, n_n=0, eta_y=1.0, eta_n=1.0)
    assert s.h == 1.0
    assert classify(s) == "undecided"
    assert classify(WalkState(0, 1, 1.0, 1.0)) == "undecided"
    assert classify(WalkState(0, 2, 1.0, 1.0)) == "N"


def test_prob_interval_rejects_inconsistency():
    with pytest.raises(ValueError):
        ProbInterval(y_lower=0.5, y_upper=0.4, n_mass=0.0, pending=0.0)
    with pytest.raises(ValueError):
        ProbInterval(y_lower=0.1, y_upper=0.3, n_mass=0.0, pending=0.1)


def test_exact_interval_matches_ruin_probability():
    # closed form q^2 / (1 - 2 q (1 - q)) for the no-fakes walk
    iv_b = exact_interval(BASE, "B", depth=200)
    assert iv_b.y_lower == 0.15517241379310345
    assert iv_b.y_upper == 0.15517241379310345
    assert iv_b.width < 1e-9
    iv_g = exact_interval(BASE, "G", depth=200)
    assert iv_g.y_lower == 0.8448275862068967
    assert iv_g.n_mass == pytest.approx(1.0 - iv_g.y_lower, abs=1e-12)


def test_exact_interval_frozen_shallow_horizon():
    iv = exact_interval(BASE, "B", depth=10)
    assert iv.y_lower == pytest.approx(0.1531444464, abs=1e-12)
    assert iv.y_upper == pytest.approx(0.1662135696, abs=1e-12)
    assert iv.n_mass == pytest.approx(0.8337864304, abs=1e-12)
    assert iv.pending == pytest.approx(0.0130691232, abs=1e-12)


def test_exact_interval_conserves_mass_and_tightens():
    params = ModelParams(0.7, 0.15, 0.1)
    prev_width = None
    for depth in (5, 20, 80, 320):
        iv = exact_interval(params, "B", depth=depth)
        assert iv.y_lower + iv.n_mass + iv.pending == pytest.approx(1.0, abs=1e-12)
        if prev_width is not None:
            assert iv.width <= prev_width + 1e-15
        prev_width = iv.width


def test_exact_interval_nests_across_depth():
    params = ModelParams(0.7, 0.2, 0.0)
    shallow = exact_interval(params, "B", depth=12)
    deep = exact_interval(params, "B", depth=600)
    assert shallow.y_lower <= deep.y_lower + 1e-15
    assert deep.y_upper <= shallow.y_upper + 1e-15


def test_simulate_is_deterministic_per_stream():
    d = derive(BASE)
    one = simulate(d, "B", TrialStream(5, 0))
    two = simulate(d, "B", TrialStream(5, 0))
    assert one == two
    assert one.kind in ("Y", "N") and one.steps >= 2


def test_simulate_respects_max_steps():
    out = simulate(derive(BASE), "B", TrialStream(5, 0), max_steps=1)
    assert out == CascadeOutcome(kind="undecided", steps=1)


def test_mc_estimate_frozen_baseline():
    est = mc_estimate(BASE, "B", trials=100_000, seed=42)
    assert est.p_hat == 0.1543
    assert est.std_err == pytest.approx(0.001142328805554688, abs=1e-15)
    assert est.undecided == 0
    assert (est.trials, est.seed) == (100_000, 42)


def test_mc_estimate_equals_scalar_replay():
    # the vectorised lanes must reproduce one-at-a-time simulation exactly
    params = ModelParams(0.7, 0.15, 0.1)
    est = mc_estimate(params, "B", trials=400, seed=7)
    d = derive(params)
    outcomes = [simulate(d, "B", TrialStream(7, t)) for t in range(400)]
    y = sum(o.kind == "Y" for o in outcomes)
    decided = sum(o.kind != "undecided" for o in outcomes)
    assert decided == 400 - est.undecided
    assert est.p_hat == y / decided


def test_mc_estimate_refuses_mostly_undecided_runs():
    with pytest.raises(UndecidedRateError):
        mc_estimate(BASE, "B", trials=500, seed=0, max_steps=2)


def test_mc_estimate_rejects_bad_input():
    with pytest.raises(ParameterError):
        mc_estimate(BASE, "B", trials=0, seed=0)
    with pytest.raises(ParameterError):
        mc_estimate(BASE, "X", trials=10, seed=0)
    with pytest.raises(ParameterError):
        exact_interval(BASE, "B", depth=-1)
