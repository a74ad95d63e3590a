"""Creative behaviour generation: propose compound behaviours that steer
the environment into states the agent already masters, score them by
curiosity, and insert accepted ones into the playing net and the forward
models.

A state is a *target* when its most probable behaviour is the do-nothing
one: reaching it means no further preparation is required.  A candidate
compound is a behaviour sequence whose greedy chain through the forward
model ends in a target; its curiosity is the chain confidence times the
target's void probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .forward_model import ForwardModel
from .introspection import greedy_chain_cells
from .playing import Behaviour, PlayingNet


@dataclass(frozen=True)
class CompoundProposal:
    skill: str
    sensing: str         # channel whose model produced the chain
    path: tuple          # behaviour names, length >= 2
    origin: object       # state the compound was invented in
    target: object       # expected end state of the greedy chain
    curiosity: float

    def __post_init__(self):
        if len(self.path) < 2:
            raise ValueError("compound proposals need at least 2 behaviours")
        if not 0.0 <= self.curiosity <= 1.0:
            raise ValueError(f"curiosity out of range: {self.curiosity!r}")


def find_target_states(net: PlayingNet, skill: str, sensing: str) -> dict:
    """States whose strongest behaviour edge is the void behaviour, mapped
    to the void edge's probability.  Ties involving void count."""
    void = net.skill_void[skill]
    targets = {}
    for state in net.skill_states[(skill, sensing)]:
        weights = net.policy_weights(skill, sensing, state)
        void_w = weights[void]
        if void_w == max(weights.values()):
            targets[state] = void_w / sum(weights.values())
    return targets


def propose_compound(net: PlayingNet, model: ForwardModel, state, params):
    """Best compound candidate from `state`, or None when no behaviour
    sequence of length 2..max_path_length-1 greedily reaches a target.

    The caller is expected to skip states that are themselves targets.
    Ties prefer shorter sequences, then lexicographic order.
    """
    if model.n_states < 2:
        return None
    behaviours = net.skill_behaviours[model.skill]
    if not behaviours:
        return None
    max_len = params.max_path_length - 1
    if max_len < 2:
        return None
    targets = find_target_states(net, model.skill, model.sensing)
    if not targets:
        return None
    per_length = greedy_chain_cells(model, state, behaviours, max_len)
    best = None  # (-curiosity, length, path, end)
    zero_fallback = None  # shortest/lex-min chain into a target when all curiosity is 0
    for k, cells in enumerate(per_length, start=1):
        if k < 2:
            continue
        for end, (prod, path) in cells.items():
            p_void = targets.get(end)
            if p_void is None:
                continue
            curiosity = prod * p_void
            if curiosity > 0.0:
                cand = (-curiosity, k, path, end)
                if best is None or cand < best:
                    best = cand
        if best is None and zero_fallback is None:
            lex = _lex_min_path_into(model, state, behaviours, k, targets)
            if lex is not None:
                zero_fallback = (0.0, k) + lex
    if best is None:
        if zero_fallback is None:
            return None
        best = zero_fallback
    neg_cu, _, path, end = best
    names = tuple(behaviours[i] for i in path)
    return CompoundProposal(model.skill, model.sensing, names, state, end, -min(neg_cu, 0.0))


def _lex_min_path_into(model, start, behaviours, length, targets):
    """Lexicographically smallest behaviour sequence of exactly `length`
    whose greedy chain ends in one of `targets`, ignoring confidence.
    Returns (path, end) or None."""
    cells = {}
    for i in range(len(behaviours)):
        end = model.transition_stats(start, behaviours[i])[1]
        path = cells.get(end)
        if path is None or (i,) < path:
            cells[end] = (i,)
    for _ in range(length - 1):
        nxt = {}
        for end, path in cells.items():
            for i in range(len(behaviours)):
                target = model.transition_stats(end, behaviours[i])[1]
                cand = path + (i,)
                prev = nxt.get(target)
                if prev is None or cand < prev:
                    nxt[target] = cand
        cells = nxt
    hits = [(path, end) for end, path in cells.items() if end in targets]
    if not hits:
        return None
    return min(hits)


def acceptance_probability(curiosity: float, scale: float, shift: float) -> float:
    """Logistic squashing of the curiosity score into an insertion
    probability."""
    return 1.0 / (1.0 + math.exp(-(scale * curiosity + shift)))


def insert_compound_playing(net: PlayingNet, proposal: CompoundProposal, h_init: float):
    """Add the proposal as a new behaviour of its skill.

    The edge from the origin state carries h_init * (1 + curiosity); every
    other state of every sensing channel of the skill gets plain h_init.
    Returns the new behaviour name, or None when the exact sequence already
    exists for the skill (duplicates are not re-added).
    """
    existing = net.compound_name.get(proposal.path)
    if existing is not None and existing in net.skill_behaviours[proposal.skill]:
        return None
    if existing is not None:
        behaviour = net.behaviours[existing]
    else:
        name = "compound(" + ",".join(proposal.path) + ")"
        behaviour = Behaviour(name=name, kind="compound", sequence=proposal.path)
    net.add_behaviour_to_skill(
        proposal.skill, behaviour, h_init,
        origin=(proposal.sensing, proposal.origin),
        origin_weight=h_init * (1.0 + proposal.curiosity),
    )
    return behaviour.name


def insert_compound_env(models: dict, proposal: CompoundProposal, behaviour_name: str,
                        h_init_env: float) -> None:
    """Insert the new behaviour into every forward model of the skill.

    All models get uniform (state, behaviour) rows at h_init_env.  Only the
    model of the sensing channel the proposal was generated under gets one
    distinguished edge: origin -> expected target, weighted by the smallest
    edge weight along the proposal's greedy chain (a chain is only as strong
    as its weakest link).  That weight is read before the new rows exist.
    """
    current = models[proposal.sensing]
    h_min = _chain_min_weight(current, proposal)
    for model in models.values():
        model.ensure_pair_clips(behaviour_name)
    current.set_edge_weight(proposal.origin, behaviour_name, proposal.target, h_min)


def _chain_min_weight(model: ForwardModel, proposal: CompoundProposal) -> float:
    h_min = math.inf
    state = proposal.origin
    for b in proposal.path:
        nxt = model.transition_stats(state, b)[1]
        h_min = min(h_min, model.edge_weight(state, b, nxt))
        state = nxt
    return h_min
