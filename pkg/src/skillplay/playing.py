"""Layered playing network: skills select sensing actions, estimated
perceptual states select preparatory behaviours.

Weighted hops exist between the skill layer and the sensing layer, and
between the state layer and the behaviour layer.  The sensing-to-state hop
is performed by the world's classifier emulation, not by a weighted edge,
so it is never created or rewarded here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .clip_network import ClipNetwork

BEHAVIOUR_KINDS = ("atomic", "void", "skill", "compound")


@dataclass(frozen=True)
class Behaviour:
    """A preparatory behaviour clip.

    Compound behaviours carry the sequence of constituent behaviour names;
    skill-kind behaviours are trained skills promoted into the behaviour
    set.  `grasp_outcome` describes the state of the gripper after
    execution and gates whether re-sensing is physically possible.
    """

    name: str
    kind: str = "atomic"
    sequence: tuple = ()
    grasp_outcome: str = "neutral"

    def __post_init__(self):
        if self.kind not in BEHAVIOUR_KINDS:
            raise ValueError(f"unknown behaviour kind {self.kind!r}")
        if self.kind == "compound" and len(self.sequence) < 2:
            raise ValueError("compound behaviours need a sequence of length >= 2")
        if self.kind != "compound" and self.sequence:
            raise ValueError("only compound behaviours carry a sequence")


@dataclass(frozen=True)
class SensingInfo:
    """What the agent needs to wire up one sensing channel."""

    states: tuple
    accuracy: float
    grasp_requirement: str = "none"


@dataclass
class Skill:
    """A basic behaviour plus the bookkeeping for promotion."""

    name: str
    basic_behaviour: str
    needs_grasped: bool = False
    grasp_outcome: str = "neutral"
    rewards: object = None  # deque(maxlen=well_trained_window), set at registration


def grasp_compatible(outcome: str, requirement: str) -> bool:
    """Whether re-sensing is possible after a behaviour with this grasp
    outcome under a sensing channel with this grasp requirement."""
    return outcome == "neutral" or requirement == "none" or outcome == requirement


class PlayingNet:
    """Clip network plus the layer indices of the playing architecture."""

    def __init__(self):
        self.network = ClipNetwork()
        self.behaviours: dict[str, Behaviour] = {}
        self.behaviour_clip: dict[str, int] = {}
        self.behaviour_of_clip: dict[int, str] = {}
        self.skill_clip: dict[str, int] = {}
        self.sensing_clip: dict[str, int] = {}
        self.sensing_of_clip: dict[int, str] = {}
        self.sensing_requirement: dict[str, str] = {}
        self.state_clip: dict[tuple, int] = {}  # (skill, sensing, state) -> clip
        self.skill_sensing: dict[str, list[str]] = {}
        self.skill_states: dict[tuple, tuple] = {}  # (skill, sensing) -> states
        self.skill_behaviours: dict[str, list[str]] = {}
        self.skill_void: dict[str, str] = {}
        self.compound_name: dict[tuple, str] = {}  # sequence -> behaviour name

    # -- structure -----------------------------------------------------

    def add_skill(self, skill_name: str) -> int:
        if skill_name in self.skill_clip:
            raise ValueError(f"skill {skill_name!r} already registered")
        clip = self.network.add_clip(("skill", skill_name))
        self.skill_clip[skill_name] = clip
        self.skill_sensing[skill_name] = []
        self.skill_behaviours[skill_name] = []
        return clip

    def add_sensing(self, skill_name: str, sensing: str, states: tuple,
                    discrimination: float, grasp_requirement: str = "none") -> None:
        """Attach a sensing channel to a skill with the given selection
        weight, creating the per-(skill, sensing) state clips."""
        if sensing not in self.sensing_clip:
            clip = self.network.add_clip(("sensing", sensing))
            self.sensing_clip[sensing] = clip
            self.sensing_of_clip[clip] = sensing
            self.sensing_requirement[sensing] = grasp_requirement
        self.network.connect(self.skill_clip[skill_name], self.sensing_clip[sensing],
                             discrimination)
        self.skill_sensing[skill_name].append(sensing)
        self.skill_states[(skill_name, sensing)] = tuple(states)
        for state in states:
            key = (skill_name, sensing, state)
            if key in self.state_clip:
                raise ValueError(f"duplicate state {key!r}")
            self.state_clip[key] = self.network.add_clip(("state",) + key)

    def add_behaviour_to_skill(self, skill_name: str, behaviour: Behaviour,
                               default_weight: float,
                               origin: tuple | None = None,
                               origin_weight: float | None = None) -> None:
        """Give every state of the skill an edge to the behaviour.

        `origin` is an optional (sensing, state) pair whose edge gets
        `origin_weight` instead of the default.
        """
        existing = self.behaviours.get(behaviour.name)
        if existing is not None and existing != behaviour:
            raise ValueError(f"behaviour name {behaviour.name!r} already bound differently")
        if existing is None:
            clip = self.network.add_clip(("behaviour", behaviour.name))
            self.behaviours[behaviour.name] = behaviour
            self.behaviour_clip[behaviour.name] = clip
            self.behaviour_of_clip[clip] = behaviour.name
            if behaviour.kind == "compound":
                self.compound_name[behaviour.sequence] = behaviour.name
        if behaviour.name in self.skill_behaviours[skill_name]:
            raise ValueError(f"behaviour {behaviour.name!r} already attached to {skill_name!r}")
        b_clip = self.behaviour_clip[behaviour.name]
        for sensing in self.skill_sensing[skill_name]:
            for state in self.skill_states[(skill_name, sensing)]:
                w = default_weight
                if origin is not None and origin == (sensing, state):
                    w = origin_weight
                self.network.connect(self.state_clip[(skill_name, sensing, state)], b_clip, w)
        self.skill_behaviours[skill_name].append(behaviour.name)
        if behaviour.kind == "void":
            self.skill_void[skill_name] = behaviour.name

    # -- rows ----------------------------------------------------------

    def sensing_row(self, skill_name: str) -> dict[str, float]:
        probs = self.network.transition_probabilities(self.skill_clip[skill_name])
        return {self.sensing_of_clip[c]: p for c, p in probs.items()}

    def policy_row(self, skill_name: str, sensing: str, state) -> dict[str, float]:
        clip = self.state_clip[(skill_name, sensing, state)]
        probs = self.network.transition_probabilities(clip)
        return {self.behaviour_of_clip[c]: p for c, p in probs.items()}

    def policy_weights(self, skill_name: str, sensing: str, state) -> dict[str, float]:
        clip = self.state_clip[(skill_name, sensing, state)]
        net = self.network
        return {
            name: net.weight(clip, self.behaviour_clip[name])
            for name in self.skill_behaviours[skill_name]
        }
