"""Forward environment model: learned distribution over perceptual-state
transitions, one model per (skill, sensing action).

The model is its own clip network.  Percept clips are (state, behaviour)
pairs, target clips are the states of the same sensing action; every pair
clip keeps an edge to every state.  Training reinforces the edge of each
observed transition with a small positive reward, so the predicted
distribution sharpens monotonically around what actually happens.
"""

from __future__ import annotations

import math

from .clip_network import ClipNetwork


class ForwardModel:
    def __init__(self, skill: str, sensing: str, states, behaviours=(),
                 h_init_env: float = 1.0, reward_env: float = 10.0,
                 forgetting: float = 0.0):
        if not states:
            raise ValueError("a forward model needs at least one state")
        self.skill = skill
        self.sensing = sensing
        self.states = tuple(states)
        self.h_init_env = float(h_init_env)
        self.reward_env = float(reward_env)
        self.forgetting = float(forgetting)
        self.network = ClipNetwork()
        self.state_clip = {s: self.network.add_clip(("state", s)) for s in self.states}
        self._state_of_clip = {c: s for s, c in self.state_clip.items()}
        self.pair_clip: dict[tuple, int] = {}  # (state, behaviour name) -> clip
        # per-pair (confidence, successor) memo; rebuilt when a row changes
        self._stats: dict[tuple, tuple] = {}
        for b in behaviours:
            self.ensure_pair_clips(b)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def ensure_pair_clips(self, behaviour: str) -> None:
        """Create (state, behaviour) percept clips with uniform rows for all
        states.  Idempotent."""
        for state in self.states:
            key = (state, behaviour)
            if key in self.pair_clip:
                continue
            clip = self.network.add_clip(("pair",) + key)
            self.pair_clip[key] = clip
            for target in self.states:
                self.network.connect(clip, self.state_clip[target], self.h_init_env)

    def _pair(self, state, behaviour: str) -> int:
        clip = self.pair_clip.get((state, behaviour))
        if clip is None:
            raise ValueError(f"unknown state or behaviour: ({state!r}, {behaviour!r})")
        return clip

    def observe_transition(self, state, behaviour: str, next_state) -> None:
        """Reinforce the observed (state, behaviour) -> next_state edge."""
        src = self._pair(state, behaviour)
        if next_state not in self.state_clip:
            raise ValueError(f"unknown state {next_state!r}")
        self.network.reinforce_edges(
            [(src, self.state_clip[next_state])], self.reward_env, self.forgetting
        )
        if self.forgetting == 0.0:
            self._stats.pop((state, behaviour), None)
        else:
            self._stats.clear()  # forgetting rescales every row

    def predict(self, state, behaviour: str) -> dict:
        """Normalized next-state distribution in declared state order."""
        src = self._pair(state, behaviour)
        probs = self.network.transition_probabilities(src)
        return {self._state_of_clip[c]: p for c, p in probs.items()}

    def edge_weight(self, state, behaviour: str, next_state) -> float:
        return self.network.weight(self._pair(state, behaviour), self.state_clip[next_state])

    def set_edge_weight(self, state, behaviour: str, next_state, weight: float) -> None:
        self.network.connect(self._pair(state, behaviour), self.state_clip[next_state], weight)
        self._stats.pop((state, behaviour), None)

    def transition_stats(self, state, behaviour: str) -> tuple:
        """(confidence, successor) of one row, memoized.

        Confidence is 1 minus the normalized base-2 entropy of the predicted
        distribution; the successor is the most probable next state, ties
        resolved by declared state order.  Requires at least two states.
        """
        key = (state, behaviour)
        cached = self._stats.get(key)
        if cached is not None:
            return cached
        if self.n_states < 2:
            raise ValueError("degenerate state space: need at least 2 states")
        src = self._pair(state, behaviour)
        net = self.network
        weights = [net.weight(src, self.state_clip[t]) for t in self.states]
        total = sum(weights)
        entropy = 0.0
        best_i = 0
        best_w = weights[0]
        for i, w in enumerate(weights):
            p = w / total
            if p > 0.0:
                entropy -= p * math.log2(p)
            if w > best_w:
                best_w = w
                best_i = i
        confidence = 1.0 - entropy / math.log2(self.n_states)
        # clamp float dust so callers can rely on [0, 1]
        confidence = min(1.0, max(0.0, confidence))
        stats = (confidence, self.states[best_i])
        self._stats[key] = stats
        return stats
