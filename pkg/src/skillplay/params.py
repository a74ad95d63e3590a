"""Free parameters of the learning system, with the default values used
throughout the simulated experiments."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class Params:
    """Agent-side learning parameters.

    The defaults are the canonical experiment configuration; tests pin them,
    so change them via `replace()` in experiment configs rather than here.
    """

    reward_success: float = 1000.0
    reward_failure: float = -30.0
    forgetting: float = 0.0            # weight decay toward 1 per update
    reward_env: float = 10.0           # reward for an observed model transition
    h_init: float = 200.0              # initial playing-net edge weight
    h_init_env: float = 1.0            # initial environment-model edge weight
    stretching: float = 25.0           # sharpness of the discrimination score
    boredom_immunity: float = 0.8      # scales how strongly entropy suppresses boredom
    squash_scale: float = 0.1          # curiosity multiplier inside the acceptance sigmoid
    squash_shift: float = 0.95         # offset inside the acceptance sigmoid
    balancing: float = 0.1             # weight of the path-cost bonus when planning
    max_path_length: int = 4           # plans/compounds use strictly fewer behaviours
    well_trained_window: int = 20      # rollouts averaged for the promotion test
    well_trained_reward: float = 897.0 # mean reward required for promotion

    def __post_init__(self):
        if not 0.0 <= self.forgetting <= 1.0:
            raise ValueError("forgetting must be in [0, 1]")
        if not 0.0 <= self.boredom_immunity <= 1.0:
            raise ValueError("boredom_immunity must be in [0, 1]")
        if self.max_path_length < 2:
            raise ValueError("max_path_length must be at least 2")
        if self.well_trained_window < 1:
            raise ValueError("well_trained_window must be positive")


def params_from_dict(overrides: dict) -> Params:
    """Build Params from a flat override mapping; unknown keys are an error."""
    known = {f.name for f in fields(Params)}
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    return Params(**overrides)
