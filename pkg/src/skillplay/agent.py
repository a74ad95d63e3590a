"""The playing agent: owns the playing net, one forward model per
(skill, sensing channel), and the rollout pipeline that ties sensing,
boredom, creativity, behaviour execution and reward collection together.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import creativity, introspection
from .forward_model import ForwardModel
from .params import Params
from .playing import Behaviour, PlayingNet, SensingInfo, Skill, grasp_compatible
from .worlds import WorldInstance, WorldSpec, calibrate_sensing_accuracy, intended_result

SUCCESS_METRICS = ("intended_preparation", "achieved_preparation", "achieved_with_basic")


@dataclass(frozen=True)
class RolloutRecord:
    """Everything observable about one rollout."""

    skill: str
    sensing: str
    estimated_state: object
    post_preparation_state: object
    behaviour: str
    success: bool
    reward: float
    bored: bool
    creative_added: bool


class Agent:
    """One playing agent (single-threaded; replicas are independent)."""

    def __init__(self, params: Params, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self.net = PlayingNet()
        self.models: dict[tuple, ForwardModel] = {}
        self.skills: dict[str, Skill] = {}

    # -- registration ----------------------------------------------------

    def register_skill(self, skill: Skill, sensing: dict[str, SensingInfo],
                       behaviours: list[Behaviour]) -> None:
        """Wire a skill into the playing net and create its forward models.

        Sensing-selection edges start at exp(stretching * accuracy) so
        discriminative channels are preferred from the first rollout;
        behaviour edges start uniform.  Skills whose basic behaviour needs
        the object grasped only get sensing channels that require a grasp.
        """
        p = self.params
        voids = [b for b in behaviours if b.kind == "void"]
        if len(voids) != 1:
            raise ValueError("missing void behaviour (exactly one required)")
        if skill.needs_grasped:
            sensing = {
                name: info for name, info in sensing.items()
                if info.grasp_requirement == "grasped"
            }
            if not sensing:
                raise ValueError("no grasp-compatible sensing channel available")
        self.net.add_skill(skill.name)
        for name, info in sensing.items():
            discrimination = float(np.exp(p.stretching * info.accuracy))
            self.net.add_sensing(skill.name, name, info.states, discrimination,
                                 info.grasp_requirement)
        for behaviour in behaviours:
            self.net.add_behaviour_to_skill(skill.name, behaviour, p.h_init)
        for name, info in sensing.items():
            self.models[(skill.name, name)] = ForwardModel(
                skill.name, name, info.states,
                behaviours=[b.name for b in behaviours],
                h_init_env=p.h_init_env, reward_env=p.reward_env,
                forgetting=p.forgetting,
            )
        skill.rewards = deque(maxlen=p.well_trained_window)
        self.skills[skill.name] = skill

    def register_skill_from_world(self, skill_name: str, world: WorldSpec) -> None:
        """Convenience wiring: channels, accuracies and behaviours straight
        from a world definition."""
        spec = world.skills[skill_name]
        sensing = {
            name: SensingInfo(
                states=s.percepts,
                accuracy=calibrate_sensing_accuracy(world, name),
                grasp_requirement=s.grasp_requirement,
            )
            for name, s in world.sensing.items()
        }
        behaviours = [
            Behaviour(name=n, kind="void" if n == "void" else "atomic",
                      grasp_outcome=b.grasp_outcome)
            for n, b in world.behaviours.items()
        ]
        skill = Skill(name=skill_name, basic_behaviour=f"basic:{skill_name}",
                      needs_grasped=spec.needs_grasped)
        self.register_skill(skill, sensing, behaviours)

    # -- execution ---------------------------------------------------------

    def flatten_behaviour(self, name: str) -> tuple:
        """Resolve a behaviour to the world-level action sequence."""
        b = self.net.behaviours[name]
        if b.kind == "compound":
            out = []
            for part in b.sequence:
                out.extend(self.flatten_behaviour(part))
            return tuple(out)
        if b.kind == "skill":
            raise ValueError(
                f"skill-backed behaviour {name!r} has no executable form in simulated worlds"
            )
        return (name,)

    def execute_rollout(self, skill_name: str, world: WorldInstance,
                        active_learning: bool = False, creativity_on: bool = False,
                        success_metric: str = "intended_preparation") -> RolloutRecord:
        """One full rollout: sense, maybe prepare a more interesting state,
        maybe invent a behaviour, prepare, re-sense for the model, collect
        the reward and reinforce the walked edges.

        `success_metric` picks what the success flag (and hence the reward)
        measures:

        * ``intended_preparation`` - the chosen preparation's intended
          effect lands in the skill's domain of applicability.  Controller
          glitches still perturb the world and the model observations, but
          the curve tracks policy quality and converges toward 1.
        * ``achieved_preparation`` - the latent state actually reached lies
          in the domain of applicability, so the 5% controller failures cap
          the curve.
        * ``achieved_with_basic`` - additionally draws the basic
          controller's own reliability.
        """
        if skill_name not in self.skills:
            raise ValueError(f"unregistered skill {skill_name!r}")
        if success_metric not in SUCCESS_METRICS:
            raise ValueError(f"unknown success_metric {success_metric!r}")
        p = self.params
        net = self.net
        boredom_allowed = active_learning
        bored = False
        while True:
            sensing = self._sample_sensing(skill_name)
            estimate = world.sense(sensing)
            if boredom_allowed:
                boredom_allowed = False  # at most one restart per rollout
                policy_entropy = introspection.normalized_policy_entropy(
                    net, skill_name, sensing, estimate)
                threshold = introspection.boredom_probability(
                    policy_entropy, p.boredom_immunity)
                if self.rng.random() < threshold:
                    plan = introspection.plan_desirable_transition(
                        net, self.models[(skill_name, sensing)], estimate, p)
                    if plan is not None:
                        for step in plan[0]:
                            world.apply_behaviour(self.flatten_behaviour(step))
                        bored = True
                        continue  # restart sensing with boredom spent
            break
        creative_added = False
        if creativity_on:
            model = self.models[(skill_name, sensing)]
            targets = creativity.find_target_states(net, skill_name, sensing)
            if estimate not in targets:
                proposal = creativity.propose_compound(net, model, estimate, p)
                if proposal is not None:
                    accept = creativity.acceptance_probability(
                        proposal.curiosity, p.squash_scale, p.squash_shift)
                    if self.rng.random() < accept:
                        added = creativity.insert_compound_playing(net, proposal, p.h_init)
                        if added is not None:
                            skill_models = {
                                s: self.models[(skill_name, s)]
                                for s in net.skill_sensing[skill_name]
                            }
                            creativity.insert_compound_env(
                                skill_models, proposal, added, p.h_init_env)
                            creative_added = True
        behaviour = self._sample_behaviour(skill_name, sensing, estimate)
        flat = self.flatten_behaviour(behaviour)
        latent_before = world.latent
        world.apply_behaviour(flat)
        post_state = None
        outcome = net.behaviours[behaviour].grasp_outcome
        if grasp_compatible(outcome, net.sensing_requirement[sensing]):
            post_state = world.sense(sensing)
            self.models[(skill_name, sensing)].observe_transition(
                estimate, behaviour, post_state)
        if success_metric == "intended_preparation":
            reached = intended_result(world.spec, latent_before, flat)
            success = reached in world.spec.skills[skill_name].success_states
        elif success_metric == "achieved_preparation":
            success = world.preparation_success(skill_name)
        else:
            success = world.evaluate_success(skill_name)
        reward = p.reward_success if success else p.reward_failure
        net.network.reinforce_edges(
            [
                (net.skill_clip[skill_name], net.sensing_clip[sensing]),
                (net.state_clip[(skill_name, sensing, estimate)],
                 net.behaviour_clip[behaviour]),
            ],
            reward, p.forgetting,
        )
        self.skills[skill_name].rewards.append(reward)
        return RolloutRecord(
            skill=skill_name, sensing=sensing, estimated_state=estimate,
            post_preparation_state=post_state, behaviour=behaviour,
            success=success, reward=reward, bored=bored,
            creative_added=creative_added,
        )

    def _sample_sensing(self, skill_name: str) -> str:
        clip = self.net.network.sample_next(self.net.skill_clip[skill_name], self.rng)
        return self.net.sensing_of_clip[clip]

    def _sample_behaviour(self, skill_name: str, sensing: str, state) -> str:
        state_clip = self.net.state_clip[(skill_name, sensing, state)]
        clip = self.net.network.sample_next(state_clip, self.rng)
        return self.net.behaviour_of_clip[clip]

    # -- promotion ---------------------------------------------------------

    def is_well_trained(self, skill_name: str) -> bool:
        """Full reward window with a mean at or above the promotion bar."""
        rewards = self.skills[skill_name].rewards
        if rewards is None or len(rewards) < rewards.maxlen:
            return False
        return sum(rewards) / len(rewards) >= self.params.well_trained_reward

    def promote_to_behaviour(self, skill_name: str, targets) -> None:
        """Offer a trained skill as a preparatory behaviour to other skills:
        uniform playing-net edges plus fresh uniform forward-model rows."""
        targets = list(targets)
        skill = self.skills[skill_name]
        for target in targets:
            if target == skill_name:
                raise ValueError(f"self-reference: cannot promote {skill_name!r} into itself")
            if target not in self.skills:
                raise ValueError(f"unregistered skill {target!r}")
        behaviour = Behaviour(name=skill_name, kind="skill",
                              grasp_outcome=skill.grasp_outcome)
        for target in targets:
            self.net.add_behaviour_to_skill(target, behaviour, self.params.h_init)
            for sensing in self.net.skill_sensing[target]:
                self.models[(target, sensing)].ensure_pair_clips(skill_name)
