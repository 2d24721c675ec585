"""Connected unlabeled multi-agent pathfinding: PULL, a search-based refiner, bounds and tools."""

from .core import (
    Configuration, Instance, InvalidInstanceError, Plan, PlannerError,
    ValidationReport, validate_plan,
)
from .graph import Graph, load_map, parse_map
from .instances import gen_grid3, gen_random, gen_tight, load_instance, save_instance
from .lowerbound import instance_lb
from .pull import plan, pull_step, single_step

__all__ = [
    "Configuration", "Graph", "Instance", "InvalidInstanceError", "Plan", "PlannerError",
    "ValidationReport", "gen_grid3", "gen_random", "gen_tight", "instance_lb",
    "load_instance", "load_map", "parse_map", "plan", "pull_step", "save_instance",
    "single_step", "validate_plan",
]
__version__ = "0.1.0"
