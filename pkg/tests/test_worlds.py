import math

import numpy as np
import pytest

from skillplay.worlds import (
    WorldInstance,
    calibrate_sensing_accuracy,
    dump_world,
    intended_result,
    load_world,
    make_book_world,
    make_tower_world,
)


def instance(spec, seed=0, state=None):
    return WorldInstance(spec, np.random.default_rng(seed), initial_state=state)


# -- book world -------------------------------------------------------------


def test_book_behaviour_count_matches_nominal():
    assert len(make_book_world(0).behaviours) == 5
    assert len(make_book_world(3).behaviours) == 8


def test_book_reduced_rotations_for_composition():
    spec = make_book_world(0, rotations=(90,))
    assert set(spec.behaviours) == {"void", "rotate90", "flip"}


def test_book_rotation_convention():
    spec = make_book_world(0, controller_success=1.0)
    world = instance(spec, state=270)
    world.apply_behaviour("rotate90")
    assert world.latent == 0
    world.reset(180)
    world.apply_behaviour("rotate180")
    assert world.latent == 0
    world.reset(90)
    world.apply_behaviour("rotate270")
    assert world.latent == 0


def test_book_flip_and_distractors_keep_orientation():
    spec = make_book_world(2, controller_success=1.0)
    world = instance(spec, state=180)
    for b in ("flip", "distract0", "distract1", "void"):
        world.apply_behaviour(b)
        assert world.latent == 180


def test_book_success_predicate_home_state_only():
    spec = make_book_world(0)
    world = instance(spec, state=0)
    assert world.preparation_success("grasp_book")
    world.reset(90)
    assert not world.preparation_success("grasp_book")


def test_book_slide_confusion_rows_sum_to_one():
    spec = make_book_world(0)
    for state in spec.states:
        assert sum(spec.sensing["slide"].confusion[state].values()) == pytest.approx(1.0, abs=1e-9)


# -- tower world --------------------------------------------------------------


def test_tower_remove_one_decrements_with_floor():
    spec = make_tower_world(controller_success=1.0)
    world = instance(spec, state=1)
    world.apply_behaviour("remove_one")
    assert world.latent == 0
    world.apply_behaviour("remove_one")
    assert world.latent == 0


def test_tower_height_three_needs_three_removals():
    spec = make_tower_world()
    # no single behaviour's table reaches 0 from 3
    for name, b in spec.behaviours.items():
        assert b.table[3] != 0, name
    assert intended_result(spec, 3, ["remove_one"] * 3) == 0


def test_tower_success_at_zero_height():
    spec = make_tower_world()
    world = instance(spec, state=0)
    assert world.preparation_success("clear_tower")


def test_tower_knock_over_scrambles():
    spec = make_tower_world()
    world = instance(spec, seed=5, state=3)
    seen = set()
    for _ in range(200):
        world.reset(3)
        world.apply_behaviour("knock_over")
        seen.add(world.latent)
    assert seen == {0, 1, 2, 3}


# -- behaviour execution ------------------------------------------------------


def test_apply_deterministic_when_always_successful():
    spec = make_book_world(0, controller_success=1.0)
    world = instance(spec, state=90)
    world.apply_behaviour("rotate90")
    assert world.latent == 180


def test_apply_always_failing_behaviour_uniform():
    spec = make_book_world(0, controller_success=0.0)
    world = instance(spec, seed=11, state=0)
    draws = 100_000
    counts = {s: 0 for s in spec.states}
    for _ in range(draws):
        world.latent = 0
        world.apply_behaviour("rotate90")
        counts[world.latent] += 1
    p = 1.0 / len(spec.states)
    se = math.sqrt(p * (1 - p) / draws)
    for s in spec.states:
        assert abs(counts[s] / draws - p) < 3 * se


def test_apply_compound_sequence():
    spec = make_book_world(0, controller_success=1.0)
    world = instance(spec, state=0)
    world.apply_behaviour(("rotate90", "rotate90"))
    assert world.latent == 180


def test_intended_result_composed_rotations_reach_home():
    spec = make_book_world(0, rotations=(90,))
    assert intended_result(spec, 180, ("rotate90", "rotate90")) == 0
    assert intended_result(spec, 90, ("rotate90", "rotate90", "rotate90")) == 0


def test_apply_unknown_behaviour_rejected():
    world = instance(make_book_world(0))
    with pytest.raises(ValueError, match="unknown behaviour"):
        world.apply_behaviour("levitate")


def test_intended_result_ignores_failures():
    spec = make_book_world(0, controller_success=0.0)
    assert intended_result(spec, 270, ("rotate90",)) == 0


# -- sensing -------------------------------------------------------------------


def test_sense_never_changes_latent():
    spec = make_book_world(0)
    world = instance(spec, seed=2, state=180)
    for _ in range(100):
        world.sense("slide")
        world.sense("press")
        world.sense("no_sensing")
        assert world.latent == 180


def test_sense_identity_confusion_always_true_state():
    spec = make_book_world(0, slide_accuracy=1.0)
    world = instance(spec, seed=1, state=270)
    assert all(world.sense("slide") == 270 for _ in range(50))


def test_sense_diagonal_frequency():
    spec = make_book_world(0, slide_accuracy=0.95)
    world = instance(spec, seed=9, state=90)
    draws = 100_000
    hits = sum(world.sense("slide") == 90 for _ in range(draws))
    assert abs(hits / draws - 0.95) < 0.007


def test_sense_uniform_confusion_frequencies():
    spec = make_book_world(0)
    world = instance(spec, seed=4, state=0)
    draws = 40_000
    counts = {s: 0 for s in spec.states}
    for _ in range(draws):
        counts[world.sense("poke")] += 1
    for s in spec.states:
        assert counts[s] / draws == pytest.approx(0.25, abs=0.01)


def test_sense_unknown_channel_rejected():
    world = instance(make_book_world(0))
    with pytest.raises(ValueError, match="unknown sensing"):
        world.sense("smell")


# -- calibration ---------------------------------------------------------------


def test_calibrate_diagonal():
    spec = make_book_world(0, slide_accuracy=0.95)
    assert calibrate_sensing_accuracy(spec, "slide") == pytest.approx(0.95)


def test_calibrate_uniform_rows():
    spec = make_book_world(0)
    assert calibrate_sensing_accuracy(spec, "press") == pytest.approx(0.25)


def test_calibrate_no_sensing_fixed():
    spec = make_book_world(0)
    assert calibrate_sensing_accuracy(spec, "no_sensing") == 0.5


# -- success evaluation ----------------------------------------------------------


def test_evaluate_success_home_state_no_failure():
    spec = make_book_world(0, controller_success=1.0)
    world = instance(spec, state=0)
    assert world.evaluate_success("grasp_book")


def test_evaluate_success_wrong_state_false_regardless():
    spec = make_book_world(0)
    world = instance(spec, seed=3, state=90)
    assert not any(world.evaluate_success("grasp_book") for _ in range(1000))


def test_evaluate_success_reliability_frequency():
    spec = make_book_world(0)
    world = instance(spec, seed=8, state=0)
    draws = 100_000
    hits = sum(world.evaluate_success("grasp_book") for _ in range(draws))
    assert abs(hits / draws - 0.95) < 0.007


# -- reproducibility partition -----------------------------------------------


def test_world_draws_use_own_stream_only():
    spec = make_book_world(0)
    w1 = instance(spec, seed=21, state=0)
    w2 = instance(spec, seed=21, state=0)
    trace1 = [(w1.sense("slide"), w1.apply_behaviour("rotate90"), w1.latent) for _ in range(50)]
    trace2 = [(w2.sense("slide"), w2.apply_behaviour("rotate90"), w2.latent) for _ in range(50)]
    assert trace1 == trace2


def test_reset_uniform_draws_cover_states():
    spec = make_book_world(0)
    world = instance(spec, seed=13)
    seen = {world.reset() or world.latent for _ in range(100)}
    assert seen == set(spec.states)


# -- file round trip -----------------------------------------------------------


def test_world_json_round_trip(tmp_path):
    spec = make_book_world(2)
    path = tmp_path / "book.json"
    dump_world(spec, path)
    loaded = load_world(path)
    assert loaded.states == spec.states
    assert set(loaded.behaviours) == set(spec.behaviours)
    for name in spec.behaviours:
        assert loaded.behaviours[name].table == spec.behaviours[name].table
        assert loaded.behaviours[name].success_rate == spec.behaviours[name].success_rate
    for name in spec.sensing:
        assert loaded.sensing[name].percepts == spec.sensing[name].percepts
        for state in spec.states:
            for p, v in spec.sensing[name].confusion[state].items():
                assert loaded.sensing[name].confusion[state][p] == pytest.approx(v)
    assert loaded.skills["grasp_book"].success_states == spec.skills["grasp_book"].success_states


def test_loaded_world_runs(tmp_path):
    path = tmp_path / "tower.json"
    dump_world(make_tower_world(), path)
    spec = load_world(path)
    world = instance(spec, seed=1, state=1)
    world.apply_behaviour("remove_one")
    assert world.latent in spec.states
