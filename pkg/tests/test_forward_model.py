import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skillplay.forward_model import ForwardModel

STATES = (0, 90, 180, 270)


def fresh_model(behaviours=("void", "rotate90")):
    return ForwardModel("grasp_book", "slide", STATES, behaviours=behaviours,
                        h_init_env=1.0, reward_env=10.0)


def test_fresh_model_uniform_prediction():
    model = fresh_model()
    probs = model.predict(0, "void")
    assert set(probs) == set(STATES)
    for p in probs.values():
        assert p == pytest.approx(0.25)


def test_ensure_pair_clips_counts():
    model = fresh_model(behaviours=())
    assert model.network.edge_count() == 0
    model.ensure_pair_clips("push")
    assert len(model.pair_clip) == 4
    assert model.network.edge_count() == 16
    assert all(w == 1.0 for _, _, w in model.network.edges())


def test_ensure_pair_clips_idempotent():
    model = fresh_model()
    before = model.network.edge_count()
    model.ensure_pair_clips("void")
    assert model.network.edge_count() == before


def test_single_observation_frozen_distribution():
    # weights become (11, 1, 1, 1): 11/14 on the observed edge
    model = fresh_model()
    model.observe_transition(0, "rotate90", 90)
    probs = model.predict(0, "rotate90")
    assert probs[90] == pytest.approx(0.7857142857142857)
    for s in (0, 180, 270):
        assert probs[s] == pytest.approx(1.0 / 14.0)


def test_ten_consistent_observations_frozen():
    model = fresh_model()
    for _ in range(10):
        model.observe_transition(0, "rotate90", 90)
    assert model.predict(0, "rotate90")[90] == pytest.approx(0.9711538461538461)


def test_observe_unknown_state_rejected():
    model = fresh_model()
    with pytest.raises(ValueError, match="unknown state"):
        model.observe_transition(0, "rotate90", 45)
    with pytest.raises(ValueError, match="unknown"):
        model.observe_transition(45, "rotate90", 0)


def test_predict_unknown_behaviour_rejected():
    model = fresh_model()
    with pytest.raises(ValueError, match="unknown"):
        model.predict(0, "sprint")


def test_observed_edge_never_decreases():
    model = fresh_model()
    last = model.edge_weight(90, "void", 90)
    for _ in range(25):
        model.observe_transition(90, "void", 90)
        now = model.edge_weight(90, "void", 90)
        assert now >= last
        last = now


def test_mode_matches_deterministic_truth_and_sharpens():
    model = fresh_model()
    prev = 0.0
    for n in range(1, 30):
        model.observe_transition(180, "rotate90", 270)
        probs = model.predict(180, "rotate90")
        assert max(probs, key=probs.get) == 270
        assert probs[270] > prev
        prev = probs[270]


@given(st.lists(st.sampled_from(STATES), min_size=1, max_size=40))
@settings(max_examples=60, deadline=None)
def test_predict_rows_normalized(observations):
    model = fresh_model()
    for s in observations:
        model.observe_transition(0, "void", s)
    assert sum(model.predict(0, "void").values()) == pytest.approx(1.0, abs=1e-9)


def test_transition_stats_deterministic_and_uniform_bounds():
    model = fresh_model()
    conf, succ = model.transition_stats(0, "void")
    assert conf == pytest.approx(0.0)
    assert succ == 0  # uniform row resolves to the earliest declared state
    for _ in range(200):
        model.observe_transition(0, "void", 0)
    conf, succ = model.transition_stats(0, "void")
    assert succ == 0
    assert conf > 0.9


def test_transition_stats_single_state_rejected():
    model = ForwardModel("skill", "no_sensing", (0,), behaviours=("void",))
    with pytest.raises(ValueError, match="degenerate state space"):
        model.transition_stats(0, "void")


def test_set_edge_weight_refreshes_stats():
    model = fresh_model()
    model.set_edge_weight(0, "void", 90, 50.0)
    conf, succ = model.transition_stats(0, "void")
    assert succ == 90
    assert conf > 0.5
