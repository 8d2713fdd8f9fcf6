"""Benchmark domain simulators, the instance generator and the instance file format."""

from relgrl.envs.base import (
    DEFAULT_HORIZON,
    Environment,
    InstanceSpec,
    Simulator,
    StepResult,
    episode_rng,
    generate_instance,
    get_simulator,
    known_domains,
    register_simulator,
    reset,
    rollout,
    sample_state_space,
    step,
)
from relgrl.envs.sysadmin import Sysadmin
from relgrl.envs.academic import AcademicAdvising
from relgrl.envs.life import GameOfLife
from relgrl.envs.wildfire import Wildfire
from relgrl.envs.instance_format import InstanceParseError, format_instance, load_instance, parse_instance

__all__ = [
    "DEFAULT_HORIZON",
    "AcademicAdvising",
    "Environment",
    "GameOfLife",
    "InstanceParseError",
    "InstanceSpec",
    "Simulator",
    "StepResult",
    "Sysadmin",
    "Wildfire",
    "episode_rng",
    "format_instance",
    "generate_instance",
    "get_simulator",
    "known_domains",
    "load_instance",
    "parse_instance",
    "register_simulator",
    "reset",
    "rollout",
    "sample_state_space",
    "step",
]
