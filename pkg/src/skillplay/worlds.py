"""Simulated ground-truth environments.

A world has a small set of latent states, behaviours with deterministic
intended transitions plus a controller failure model (on failure the next
latent state is uniform random), and sensing channels that emit perceptual
labels through a confusion matrix.  Sensing never mutates the latent state.

World definitions are plain data and can be loaded from JSON so new worlds
need no code changes; see `load_world` for the schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

GRASP_OUTCOMES = ("grasped", "ungrasped", "neutral")
GRASP_REQUIREMENTS = ("grasped", "ungrasped", "none")

_ROW_TOL = 1e-9


@dataclass(frozen=True)
class BehaviourDef:
    """Intended latent transition plus controller reliability."""

    table: dict
    success_rate: float
    grasp_outcome: str = "neutral"


@dataclass(frozen=True)
class SensingDef:
    """Confusion rows mapping each latent state to a percept distribution."""

    percepts: tuple
    confusion: dict
    grasp_requirement: str = "none"
    fixed_accuracy: float | None = None


@dataclass(frozen=True)
class SkillDef:
    """Success predicate over latent states plus the basic controller's
    reliability (drawn when the basic behaviour is executed)."""

    success_states: frozenset
    basic_success_rate: float = 0.95
    needs_grasped: bool = False


@dataclass(frozen=True)
class WorldSpec:
    name: str
    states: tuple
    behaviours: dict
    sensing: dict
    skills: dict

    def __post_init__(self):
        for name, b in self.behaviours.items():
            missing = [s for s in self.states if s not in b.table]
            if missing:
                raise ValueError(f"behaviour {name!r} table not total, missing {missing}")
            if not 0.0 <= b.success_rate <= 1.0:
                raise ValueError(f"behaviour {name!r} success_rate out of range")
            if b.grasp_outcome not in GRASP_OUTCOMES:
                raise ValueError(f"behaviour {name!r} bad grasp_outcome {b.grasp_outcome!r}")
        for name, s in self.sensing.items():
            if s.grasp_requirement not in GRASP_REQUIREMENTS:
                raise ValueError(f"sensing {name!r} bad grasp_requirement {s.grasp_requirement!r}")
            for state in self.states:
                row = s.confusion.get(state)
                if row is None:
                    raise ValueError(f"sensing {name!r} missing confusion row for {state!r}")
                if abs(sum(row.values()) - 1.0) > _ROW_TOL:
                    raise ValueError(f"sensing {name!r} row for {state!r} does not sum to 1")
                unknown = [p for p in row if p not in s.percepts]
                if unknown:
                    raise ValueError(f"sensing {name!r} row for {state!r} has unknown percepts {unknown}")


def intended_result(spec: WorldSpec, state, sequence):
    """Latent state a behaviour sequence would produce from `state` if every
    controller worked as intended (pure table lookup, no failure draws)."""
    for name in sequence:
        b = spec.behaviours.get(name)
        if b is None:
            raise ValueError(f"unknown behaviour {name!r}")
        state = b.table[state]
    return state


def calibrate_sensing_accuracy(spec: WorldSpec, sensing: str) -> float:
    """Expected classification accuracy of a sensing channel.

    Computed analytically as the mean diagonal of the confusion matrix
    (percept label equal to the latent state counts as correct), emulating
    the cross-validated classifier score.  Channels with a `fixed_accuracy`
    report that instead.
    """
    s = spec.sensing[sensing]
    if s.fixed_accuracy is not None:
        return s.fixed_accuracy
    diag = [s.confusion[state].get(state, 0.0) for state in spec.states]
    return float(sum(diag) / len(diag))


class WorldInstance:
    """One agent's mutable world: a latent state and a private rng stream.

    All stochastic draws of the environment consume this instance's rng
    only, so agent-side and world-side randomness never interleave.
    """

    def __init__(self, spec: WorldSpec, rng: np.random.Generator, initial_state=None):
        self.spec = spec
        self.rng = rng
        self._state_index = {s: i for i, s in enumerate(spec.states)}
        self.latent = spec.states[0] if initial_state is None else initial_state
        if self.latent not in self._state_index:
            raise ValueError(f"unknown initial state {initial_state!r}")

    def reset(self, state=None) -> None:
        """Set the latent state, or draw it uniformly when none is given."""
        if state is None:
            self.latent = self.spec.states[self.rng.integers(len(self.spec.states))]
        else:
            if state not in self._state_index:
                raise ValueError(f"unknown state {state!r}")
            self.latent = state

    def apply_behaviour(self, behaviour) -> None:
        """Execute a behaviour name or a sequence of names.

        Each atomic step succeeds with its own success_rate and then follows
        its transition table; on failure the latent state is redrawn
        uniformly.  Sequences apply the failure model per step.
        """
        if isinstance(behaviour, (list, tuple)):
            for step in behaviour:
                self.apply_behaviour(step)
            return
        spec = self.spec.behaviours.get(behaviour)
        if spec is None:
            raise ValueError(f"unknown behaviour {behaviour!r}")
        if self.rng.random() < spec.success_rate:
            self.latent = spec.table[self.latent]
        else:
            self.latent = self.spec.states[self.rng.integers(len(self.spec.states))]

    def sense(self, sensing: str):
        """Sample a percept from the confusion row of the current latent
        state.  The latent state is never changed by sensing."""
        s = self.spec.sensing.get(sensing)
        if s is None:
            raise ValueError(f"unknown sensing action {sensing!r}")
        row = s.confusion[self.latent]
        point = self.rng.random()
        acc = 0.0
        last = None
        for percept in s.percepts:
            p = row.get(percept, 0.0)
            if p <= 0.0:
                continue
            last = percept
            acc += p
            if point < acc:
                return percept
        return last

    def preparation_success(self, skill: str) -> bool:
        """Whether the current latent state lies in the skill's domain of
        applicability (no controller draw)."""
        return self.latent in self.spec.skills[skill].success_states

    def evaluate_success(self, skill: str) -> bool:
        """Draw the basic behaviour's reliability, then test the predicate."""
        sk = self.spec.skills[skill]
        drawn = self.rng.random() < sk.basic_success_rate
        return drawn and self.latent in sk.success_states


def make_book_world(
    num_distractors: int = 0,
    rotations: tuple = (90, 180, 270),
    slide_accuracy: float = 0.95,
    controller_success: float = 0.95,
) -> WorldSpec:
    """Book-manipulation world: four orientations, rotations that fix them.

    The object sits at 0, 90, 180 or 270 degrees; the grasping skill applies
    at 0.  rotate-k maps an orientation phi to (phi + k) mod 360, so rotate90
    solves the 270-degree pose.  `flip` and every distractor leave the
    orientation unchanged, which makes them interchangeable with `void` in
    the home pose and useless elsewhere.  Sensing: `slide` discriminates the
    orientation (diagonal `slide_accuracy`, remainder spread over the other
    labels), `press` and `poke` are uninformative, and `no_sensing` has a
    single percept with a fixed calibration accuracy of 0.5.

    Pass `rotations=(90,)` for the reduced behaviour set used when compound
    behaviours must be invented instead of being given.
    """
    if num_distractors < 0:
        raise ValueError("num_distractors must be >= 0")
    states = (0, 90, 180, 270)

    def rotation_table(k):
        return {phi: (phi + k) % 360 for phi in states}

    identity = {phi: phi for phi in states}
    behaviours = {"void": BehaviourDef(identity, controller_success)}
    for k in rotations:
        behaviours[f"rotate{k}"] = BehaviourDef(rotation_table(k), controller_success)
    behaviours["flip"] = BehaviourDef(dict(identity), controller_success)
    for i in range(num_distractors):
        behaviours[f"distract{i}"] = BehaviourDef(dict(identity), controller_success)

    off = (1.0 - slide_accuracy) / (len(states) - 1)
    slide_rows = {
        t: {p: (slide_accuracy if p == t else off) for p in states} for t in states
    }
    uniform_rows = {t: {p: 1.0 / len(states) for p in states} for t in states}
    no_sensing_rows = {t: {0: 1.0} for t in states}
    sensing = {
        "slide": SensingDef(states, slide_rows),
        "press": SensingDef(states, {t: dict(r) for t, r in uniform_rows.items()}),
        "poke": SensingDef(states, {t: dict(r) for t, r in uniform_rows.items()}),
        "no_sensing": SensingDef((0,), no_sensing_rows, fixed_accuracy=0.5),
    }
    skills = {
        "grasp_book": SkillDef(frozenset({0}), basic_success_rate=controller_success)
    }
    return WorldSpec("book", states, behaviours, sensing, skills)


def make_tower_world(controller_success: float = 0.95, poke_accuracy: float = 0.95) -> WorldSpec:
    """Tower-disassembly world: latent state is the stack height 0..3.

    `remove_one` lowers the height by one (floor 0); `knock_over` is
    destructive, modelled as a controller that always fails and therefore
    scrambles the height uniformly.  The disassembly skill applies at
    height 0 only, so height 3 is out of reach of any single behaviour and
    needs an invented three-removal compound.  `poke` discriminates the
    height; `no_sensing` is the uninformative fallback.
    """
    states = (0, 1, 2, 3)
    behaviours = {
        "void": BehaviourDef({h: h for h in states}, controller_success),
        "remove_one": BehaviourDef({h: max(0, h - 1) for h in states}, controller_success),
        "knock_over": BehaviourDef({h: h for h in states}, 0.0),
    }
    off = (1.0 - poke_accuracy) / (len(states) - 1)
    poke_rows = {t: {p: (poke_accuracy if p == t else off) for p in states} for t in states}
    sensing = {
        "poke": SensingDef(states, poke_rows),
        "no_sensing": SensingDef((0,), {t: {0: 1.0} for t in states}, fixed_accuracy=0.5),
    }
    skills = {
        "clear_tower": SkillDef(frozenset({0}), basic_success_rate=controller_success)
    }
    return WorldSpec("tower", states, behaviours, sensing, skills)


def _coerce_state(raw, states):
    """Map a JSON key (always a string) back onto a declared state value."""
    for s in states:
        if raw == s or str(s) == raw:
            return s
    raise ValueError(f"unknown state key {raw!r}")


def load_world(path) -> WorldSpec:
    """Load a WorldSpec from a JSON file.

    Schema (JSON object keys are strings; numeric states are matched by
    their string form):

        {
          "name": "book",
          "states": [0, 90, 180, 270],
          "behaviours": {
            "void": {"table": {"0": 0, "90": 90, ...},
                      "success_rate": 0.95, "grasp_outcome": "neutral"},
            ...
          },
          "sensing": {
            "slide": {"percepts": [0, 90, 180, 270],
                       "confusion": {"0": {"0": 0.95, "90": 0.0167, ...}, ...},
                       "grasp_requirement": "none",
                       "fixed_accuracy": null},
            ...
          },
          "skills": {
            "grasp_book": {"success_states": [0],
                            "basic_success_rate": 0.95,
                            "needs_grasped": false}
          }
        }
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    states = tuple(raw["states"])
    behaviours = {}
    for name, b in raw["behaviours"].items():
        table = {
            _coerce_state(k, states): _coerce_state(str(v), states)
            for k, v in b["table"].items()
        }
        behaviours[name] = BehaviourDef(
            table, float(b["success_rate"]), b.get("grasp_outcome", "neutral")
        )
    sensing = {}
    for name, s in raw["sensing"].items():
        percepts = tuple(s["percepts"])
        confusion = {}
        for k, row in s["confusion"].items():
            state = _coerce_state(k, states)
            confusion[state] = {
                _coerce_state(pk, percepts): float(pv) for pk, pv in row.items()
            }
        sensing[name] = SensingDef(
            percepts,
            confusion,
            s.get("grasp_requirement", "none"),
            s.get("fixed_accuracy"),
        )
    skills = {}
    for name, sk in raw["skills"].items():
        skills[name] = SkillDef(
            frozenset(sk["success_states"]),
            float(sk.get("basic_success_rate", 0.95)),
            bool(sk.get("needs_grasped", False)),
        )
    return WorldSpec(raw["name"], states, behaviours, sensing, skills)


def dump_world(spec: WorldSpec, path) -> None:
    """Write a WorldSpec in the `load_world` JSON schema."""
    raw = {
        "name": spec.name,
        "states": list(spec.states),
        "behaviours": {
            name: {
                "table": {str(k): v for k, v in b.table.items()},
                "success_rate": b.success_rate,
                "grasp_outcome": b.grasp_outcome,
            }
            for name, b in spec.behaviours.items()
        },
        "sensing": {
            name: {
                "percepts": list(s.percepts),
                "confusion": {
                    str(k): {str(pk): pv for pk, pv in row.items()}
                    for k, row in s.confusion.items()
                },
                "grasp_requirement": s.grasp_requirement,
                "fixed_accuracy": s.fixed_accuracy,
            }
            for name, s in spec.sensing.items()
        },
        "skills": {
            name: {
                "success_states": sorted(sk.success_states, key=str),
                "basic_success_rate": sk.basic_success_rate,
                "needs_grasped": sk.needs_grasped,
            }
            for name, sk in spec.skills.items()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(raw, fh, indent=2, sort_keys=True)
        fh.write("\n")
