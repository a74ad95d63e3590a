"""Skill learning by simulated autonomous playing.

Agents select sensing actions and preparatory behaviours through weighted
clip networks, learn forward environment models as a by-product of playing,
use boredom to prepare states still worth visiting, and compose new
preparatory behaviours out of existing ones.
"""

from .agent import Agent, RolloutRecord
from .clip_network import ClipNetwork
from .creativity import CompoundProposal
from .forward_model import ForwardModel
from .harness import ExperimentConfig, RunResult, SuccessCurve, run_experiment, run_grid
from .params import Params
from .playing import Behaviour, PlayingNet, SensingInfo, Skill
from .worlds import (
    WorldInstance,
    WorldSpec,
    load_world,
    make_book_world,
    make_tower_world,
)

__all__ = [
    "Agent",
    "Behaviour",
    "ClipNetwork",
    "CompoundProposal",
    "ExperimentConfig",
    "ForwardModel",
    "Params",
    "PlayingNet",
    "RolloutRecord",
    "RunResult",
    "SensingInfo",
    "Skill",
    "SuccessCurve",
    "WorldInstance",
    "WorldSpec",
    "load_world",
    "make_book_world",
    "make_tower_world",
    "run_experiment",
    "run_grid",
]

__version__ = "0.1.0"
