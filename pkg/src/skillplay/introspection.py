"""Boredom and active learning: policy-entropy confidence, transition
confidence over the forward model, greedy successors, and planning of the
most desirable preparatory transition.

Planning scores every behaviour sequence of bounded length by
(interestingness of the reached state) x (confidence of reaching it) plus a
cost bonus, and returns the maximizer.  The search is organized as a
dynamic program over greedy-chain endpoints, which returns exactly the same
winner (including tie-breaks) as enumerating all sequences in order of
length and then lexicographically, without touching the exponential
candidate space.
"""

from __future__ import annotations

import math

from .forward_model import ForwardModel
from .playing import PlayingNet


def normalized_entropy(probs) -> float:
    """Base-2 Shannon entropy of a distribution divided by its maximum
    log2(n); zero probabilities contribute nothing."""
    probs = list(probs)
    if len(probs) < 2:
        raise ValueError("degenerate distribution: need at least 2 outcomes")
    h = 0.0
    for p in probs:
        if p > 0.0:
            h -= p * math.log2(p)
    return min(1.0, max(0.0, h / math.log2(len(probs))))


def normalized_policy_entropy(net: PlayingNet, skill: str, sensing: str, state) -> float:
    """How undecided the behaviour policy is in one perceptual state."""
    row = net.policy_row(skill, sensing, state)
    if len(row) < 2:
        raise ValueError("degenerate behaviour set: need at least 2 behaviours")
    return normalized_entropy(row.values())


def boredom_probability(policy_entropy: float, immunity: float) -> float:
    """Probability of rejecting a rollout in a state with this policy
    entropy; high immunity protects undecided states from boredom."""
    if not 0.0 <= policy_entropy <= 1.0:
        raise ValueError(f"entropy out of range: {policy_entropy!r}")
    if not 0.0 <= immunity <= 1.0:
        raise ValueError(f"immunity out of range: {immunity!r}")
    return 1.0 - immunity * policy_entropy


def single_transition_confidence(model: ForwardModel, state, behaviour: str) -> float:
    """One minus the normalized entropy of the predicted next-state
    distribution: 1 for a deterministic prediction, 0 for uniform."""
    return model.transition_stats(state, behaviour)[0]


def successor(model: ForwardModel, state, behaviour: str):
    """Most probable next state; ties resolve to the earliest declared state."""
    return model.transition_stats(state, behaviour)[1]


def chain_states(model: ForwardModel, state, path) -> list:
    """States visited by following greedy successors along `path`,
    starting after the first behaviour (length == len(path))."""
    states = []
    current = state
    for b in path:
        current = successor(model, current, b)
        states.append(current)
    return states


def path_confidence(model: ForwardModel, state, path) -> float:
    """Product of single-step confidences along the greedy chain."""
    if not path:
        raise ValueError("empty behaviour path")
    conf = 1.0
    current = state
    for b in path:
        step_conf, current = model.transition_stats(current, b)
        conf *= step_conf
    return conf


def candidate_sequence_count(num_behaviours: int, max_path_length: int) -> int:
    """Number of behaviour sequences a planner of this size considers."""
    return sum(num_behaviours ** k for k in range(1, max_path_length))


def greedy_chain_cells(model: ForwardModel, start, behaviours, max_len: int):
    """Best greedy chains from `start`, per (length, end state).

    Yields per length k (1..max_len) a dict end_state -> (product, path)
    where product is the maximal confidence product over length-k chains
    ending there and path is the lexicographically smallest maximizer
    (indices into `behaviours`).  Used by both the transition planner and
    the compound proposer.
    """
    step = {}
    for i, b in enumerate(behaviours):
        conf, nxt = model.transition_stats(start, b)
        step[(start, i)] = (conf, nxt)
    cells = {}
    for i, b in enumerate(behaviours):
        conf, nxt = step[(start, i)]
        prev = cells.get(nxt)
        cand = (conf, (i,))
        if prev is None or cand[0] > prev[0] or (cand[0] == prev[0] and cand[1] < prev[1]):
            cells[nxt] = cand
    out = [dict(cells)]
    for _ in range(max_len - 1):
        nxt_cells = {}
        for end, (prod, path) in cells.items():
            for i, b in enumerate(behaviours):
                key = (end, i)
                stats = step.get(key)
                if stats is None:
                    stats = model.transition_stats(end, b)
                    step[key] = stats
                conf, target = stats
                cand = (prod * conf, path + (i,))
                prev = nxt_cells.get(target)
                if prev is None or cand[0] > prev[0] or (cand[0] == prev[0] and cand[1] < prev[1]):
                    nxt_cells[target] = cand
        cells = nxt_cells
        out.append(dict(cells))
    return out


def plan_desirable_transition(net: PlayingNet, model: ForwardModel, state, params):
    """Pick the behaviour sequence maximizing
    interestingness(end) * confidence(path) + balancing / length.

    Considers all sequences of length 1 to max_path_length - 1; ties prefer
    shorter paths, then the lexicographically smallest sequence.  Returns
    (path, expected end state), or None when the state space is too small
    to plan over.
    """
    if model.n_states < 2:
        return None
    behaviours = net.skill_behaviours[model.skill]
    if not behaviours:
        return None
    max_len = params.max_path_length - 1
    interest = {
        s: normalized_policy_entropy(net, model.skill, model.sensing, s)
        for s in model.states
    }
    per_length = greedy_chain_cells(model, state, behaviours, max_len)
    # Candidates with a positive interest*confidence score; any sequence
    # whose score contribution is zero collapses to the single-step
    # fallback below, which matches plain enumeration exactly.
    best = None  # (-score, length, path, end)
    for k, cells in enumerate(per_length, start=1):
        for end, (prod, path) in cells.items():
            gain = interest[end] * prod
            if gain <= 0.0:
                continue
            cand = (-(gain + params.balancing / k), k, path, end)
            if best is None or cand < best:
                best = cand
    fallback_conf, fallback_end = model.transition_stats(state, behaviours[0])
    fallback = (-(params.balancing / 1.0), 1, (0,), fallback_end)
    if best is None or fallback < best:
        best = fallback
    _, _, path, end = best
    return tuple(behaviours[i] for i in path), end
