"""Weighted clip network: the memory substrate shared by the playing agent
and its environment models.

A network is a directed graph of *clips* with strictly positive transition
weights.  Action selection is a random walk: from a clip, the next hop is
sampled proportionally to the outgoing weights.  Learning rescales weights
with a reward rule that floors every updated weight at 1, so no transition
ever becomes impossible.
"""

from __future__ import annotations

import numpy as np


class ClipNetwork:
    """Directed graph of clips with positive edge weights.

    Clip ids are consecutive integers, assigned at insertion and never
    reused.  Sampling walks a cumulative distribution over children in
    ascending clip-id order with half-open intervals, so a fixed random
    stream always reproduces the same walk.
    """

    def __init__(self):
        self._labels: list[object] = []
        self._edges: list[dict[int, float]] = []
        # children sorted by id, rebuilt lazily after connect()
        self._sorted_children: list[tuple[int, ...] | None] = []
        # True while every stored weight is >= 1; lets the update rule skip
        # the full-network sweep when forgetting is off (the sweep is the
        # identity on weights >= 1 in that case).
        self._all_weights_ge_one = True

    def __len__(self) -> int:
        return len(self._labels)

    def add_clip(self, label=None) -> int:
        """Add a clip and return its fresh id."""
        self._labels.append(label)
        self._edges.append({})
        self._sorted_children.append(())
        return len(self._labels) - 1

    def label(self, clip: int):
        self._check_clip(clip)
        return self._labels[clip]

    def _check_clip(self, clip: int) -> None:
        if not 0 <= clip < len(self._labels):
            raise ValueError(f"missing clip: {clip}")

    def connect(self, src: int, dst: int, weight: float) -> None:
        """Set the edge src -> dst to `weight` (> 0). Last write wins."""
        self._check_clip(src)
        self._check_clip(dst)
        if not weight > 0.0:
            raise ValueError(f"nonpositive weight: {weight!r} on {src}->{dst}")
        row = self._edges[src]
        if dst not in row:
            self._sorted_children[src] = None
        row[dst] = float(weight)
        if weight < 1.0:
            self._all_weights_ge_one = False

    def weight(self, src: int, dst: int) -> float:
        self._check_clip(src)
        self._check_clip(dst)
        try:
            return self._edges[src][dst]
        except KeyError:
            raise ValueError(f"missing edge: {src}->{dst}") from None

    def has_edge(self, src: int, dst: int) -> bool:
        return 0 <= src < len(self._edges) and dst in self._edges[src]

    def children(self, src: int) -> tuple[int, ...]:
        """Outgoing neighbours of src in ascending clip-id order."""
        self._check_clip(src)
        cached = self._sorted_children[src]
        if cached is None:
            cached = tuple(sorted(self._edges[src]))
            self._sorted_children[src] = cached
        return cached

    def out_degree(self, src: int) -> int:
        self._check_clip(src)
        return len(self._edges[src])

    def transition_probabilities(self, src: int) -> dict[int, float]:
        """Outgoing weights normalized to probabilities, keyed by child id
        in ascending order.  Raises on a terminal clip."""
        kids = self.children(src)
        if not kids:
            raise ValueError(f"terminal clip: {src}")
        row = self._edges[src]
        total = sum(row[k] for k in kids)
        return {k: row[k] / total for k in kids}

    def sample_next(self, src: int, rng: np.random.Generator) -> int:
        """Sample a child of src proportionally to the edge weights."""
        kids = self.children(src)
        if not kids:
            raise ValueError(f"terminal clip: {src}")
        if len(kids) == 1:
            return kids[0]
        row = self._edges[src]
        total = sum(row[k] for k in kids)
        point = rng.random() * total
        acc = 0.0
        for k in kids:
            acc += row[k]
            if point < acc:
                return k
        return kids[-1]  # guard against float round-off at the top end

    def reinforce_path(self, path, reward: float, forgetting: float = 0.0) -> None:
        """Reward the walk `path` (a clip sequence); every network weight is
        subject to forgetting and the >= 1 floor."""
        edges = list(zip(path, path[1:]))
        if not edges:
            raise ValueError("broken path: path must contain at least one edge")
        self.reinforce_edges(edges, reward, forgetting)

    def reinforce_edges(self, edges, reward: float, forgetting: float = 0.0) -> None:
        """Apply the weight update to the whole network, rewarding `edges`.

        Every weight h becomes max(1, h - forgetting*(h-1) + r) where r is
        `reward` on the listed edges and 0 elsewhere.  The edge list is a
        set: an edge appearing twice is rewarded once.
        """
        if not 0.0 <= forgetting <= 1.0:
            raise ValueError(f"forgetting must be in [0, 1], got {forgetting!r}")
        rewarded = set()
        for src, dst in edges:
            self._check_clip(src)
            if dst not in self._edges[src]:
                raise ValueError(f"broken path: missing edge {src}->{dst}")
            rewarded.add((src, dst))
        if forgetting == 0.0 and self._all_weights_ge_one:
            # off-edge updates are the identity here; touch only the walk
            for src, dst in rewarded:
                row = self._edges[src]
                row[dst] = max(1.0, row[dst] + reward)
            return
        for src, row in enumerate(self._edges):
            for dst, h in row.items():
                r = reward if (src, dst) in rewarded else 0.0
                row[dst] = max(1.0, h - forgetting * (h - 1.0) + r)
        self._all_weights_ge_one = True

    def edge_count(self) -> int:
        return sum(len(row) for row in self._edges)

    def edges(self):
        """Iterate (src, dst, weight) over all edges."""
        for src, row in enumerate(self._edges):
            for dst, h in row.items():
                yield src, dst, h
