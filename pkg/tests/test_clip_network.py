import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skillplay.clip_network import ClipNetwork


def make_star(weights):
    """One hub clip connected to len(weights) children."""
    net = ClipNetwork()
    hub = net.add_clip("hub")
    kids = []
    for i, w in enumerate(weights):
        kid = net.add_clip(f"kid{i}")
        net.connect(hub, kid, w)
        kids.append(kid)
    return net, hub, kids


def test_add_clip_returns_distinct_ids():
    net = ClipNetwork()
    a = net.add_clip("a")
    b = net.add_clip("b")
    assert a != b


def test_add_clip_id_usable_in_connect():
    net = ClipNetwork()
    a = net.add_clip()
    b = net.add_clip()
    net.connect(a, b, 1.0)
    assert net.weight(a, b) == 1.0


def test_thousand_adds_distinct():
    net = ClipNetwork()
    ids = [net.add_clip(i) for i in range(1000)]
    assert len(set(ids)) == 1000


def test_connect_single_edge_normalizes_to_one():
    net, hub, kids = make_star([200.0])
    assert net.transition_probabilities(hub) == {kids[0]: 1.0}


def test_connect_zero_weight_rejected():
    net = ClipNetwork()
    a, b = net.add_clip(), net.add_clip()
    with pytest.raises(ValueError, match="nonpositive weight"):
        net.connect(a, b, 0.0)


def test_connect_unknown_clip_rejected():
    net = ClipNetwork()
    a = net.add_clip()
    with pytest.raises(ValueError, match="missing clip"):
        net.connect(a, 99, 1.0)


def test_connect_proportions():
    net, hub, kids = make_star([1.0, 3.0])
    probs = net.transition_probabilities(hub)
    assert probs[kids[1]] == pytest.approx(0.75)


def test_connect_overwrite_last_write_wins():
    net, hub, kids = make_star([5.0])
    net.connect(hub, kids[0], 2.5)
    assert net.weight(hub, kids[0]) == 2.5


def test_probabilities_uniform_weights():
    net, hub, kids = make_star([1.0] * 4)
    probs = net.transition_probabilities(hub)
    for k in kids:
        assert probs[k] == pytest.approx(0.25)


def test_probabilities_frozen_normalization():
    # direct normalization: 200/700, 200/700, 300/700
    net, hub, kids = make_star([200.0, 200.0, 300.0])
    probs = net.transition_probabilities(hub)
    assert probs[kids[0]] == pytest.approx(0.2857142857142857)
    assert probs[kids[1]] == pytest.approx(0.2857142857142857)
    assert probs[kids[2]] == pytest.approx(0.42857142857142855)


def test_probabilities_terminal_clip_rejected():
    net = ClipNetwork()
    a = net.add_clip()
    with pytest.raises(ValueError, match="terminal clip"):
        net.transition_probabilities(a)


def test_sample_single_child_ignores_rng():
    net, hub, kids = make_star([0.5])
    rng = np.random.default_rng(0)
    assert all(net.sample_next(hub, rng) == kids[0] for _ in range(10))


def test_sample_terminal_clip_rejected():
    net = ClipNetwork()
    a = net.add_clip()
    with pytest.raises(ValueError, match="terminal clip"):
        net.sample_next(a, np.random.default_rng(0))


def test_sample_overwhelming_weight_frequency():
    net, hub, kids = make_star([1.0, 1e12])
    rng = np.random.default_rng(42)
    draws = 100_000
    hits = sum(net.sample_next(hub, rng) == kids[1] for _ in range(draws))
    assert hits / draws > 0.999


def test_sample_deterministic_for_fixed_seed():
    net, hub, _ = make_star([1.0, 2.0, 3.0])
    rng1, rng2 = np.random.default_rng(7), np.random.default_rng(7)
    run1 = [net.sample_next(hub, rng1) for _ in range(50)]
    run2 = [net.sample_next(hub, rng2) for _ in range(50)]
    assert run1 == run2


def test_sample_frequencies_match_probabilities():
    net, hub, kids = make_star([2.0, 5.0, 3.0])
    probs = net.transition_probabilities(hub)
    rng = np.random.default_rng(3)
    draws = 100_000
    counts = {k: 0 for k in kids}
    for _ in range(draws):
        counts[net.sample_next(hub, rng)] += 1
    for k in kids:
        p = probs[k]
        se = math.sqrt(p * (1 - p) / draws)
        assert abs(counts[k] / draws - p) < 3 * se


def test_reinforce_success_reward():
    net, hub, kids = make_star([200.0])
    net.reinforce_path([hub, kids[0]], 1000.0, 0.0)
    assert net.weight(hub, kids[0]) == 1200.0


def test_reinforce_punishment():
    net, hub, kids = make_star([200.0])
    net.reinforce_path([hub, kids[0]], -30.0, 0.0)
    assert net.weight(hub, kids[0]) == 170.0


def test_reinforce_floor():
    net, hub, kids = make_star([10.0])
    net.reinforce_path([hub, kids[0]], -30.0, 0.0)
    assert net.weight(hub, kids[0]) == 1.0


def test_reinforce_broken_path_rejected():
    net, hub, kids = make_star([1.0])
    other = net.add_clip()
    with pytest.raises(ValueError, match="broken path"):
        net.reinforce_path([hub, other], 10.0)


def test_reinforce_off_path_untouched_without_forgetting():
    net, hub, kids = make_star([200.0, 300.0])
    net.reinforce_path([hub, kids[0]], 1000.0, 0.0)
    assert net.weight(hub, kids[1]) == 300.0


def test_forgetting_one_collapses_all_weights():
    net, hub, kids = make_star([200.0, 300.0, 7.0])
    net.reinforce_path([hub, kids[0]], 0.0, 1.0)
    for k in kids:
        assert net.weight(hub, k) == 1.0


def test_forgetting_applies_to_off_path_edges():
    net, hub, kids = make_star([201.0, 101.0])
    net.reinforce_path([hub, kids[0]], 0.0, 0.5)
    assert net.weight(hub, kids[0]) == pytest.approx(101.0)
    assert net.weight(hub, kids[1]) == pytest.approx(51.0)


def test_sub_unit_weight_lifted_by_any_update():
    # the floor applies to every weight the sweep touches
    net, hub, kids = make_star([0.5, 200.0])
    extra = net.add_clip()
    net.connect(kids[1], extra, 0.25)
    net.reinforce_path([hub, kids[1]], 1000.0, 0.0)
    assert net.weight(hub, kids[0]) == 1.0
    assert net.weight(kids[1], extra) == 1.0


def test_reinforce_duplicate_edge_rewarded_once():
    net, hub, kids = make_star([200.0])
    net.reinforce_edges([(hub, kids[0]), (hub, kids[0])], 1000.0)
    assert net.weight(hub, kids[0]) == 1200.0


@given(
    h=st.floats(min_value=1.0, max_value=1e7),
    reward=st.floats(min_value=-1e6, max_value=1e6),
    forgetting=st.floats(min_value=0.0, max_value=1.0),
)
@settings(max_examples=200, deadline=None)
def test_update_rule_floor_property(h, reward, forgetting):
    net, hub, kids = make_star([h])
    net.reinforce_path([hub, kids[0]], reward, forgetting)
    updated = net.weight(hub, kids[0])
    assert updated >= 1.0
    assert updated == pytest.approx(max(1.0, h - forgetting * (h - 1.0) + reward))


@given(h=st.floats(min_value=1.0, max_value=1e7))
@settings(max_examples=100, deadline=None)
def test_update_zero_reward_zero_forgetting_is_identity(h):
    net, hub, kids = make_star([h])
    net.reinforce_path([hub, kids[0]], 0.0, 0.0)
    assert net.weight(hub, kids[0]) == h


@given(
    weights=st.lists(st.floats(min_value=1.0, max_value=1e6), min_size=1, max_size=8),
    reward=st.floats(min_value=-1e5, max_value=1e5),
)
@settings(max_examples=100, deadline=None)
def test_rows_always_normalize(weights, reward):
    net, hub, kids = make_star(weights)
    net.reinforce_path([hub, kids[0]], reward, 0.0)
    assert sum(net.transition_probabilities(hub).values()) == pytest.approx(1.0, abs=1e-9)
