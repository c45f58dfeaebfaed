"""Planar multiple gravity-assist trajectory model and combinatorial planner.

The package builds complete, scheduled multi-swing-by trajectories from a
discrete plan (sequence of bodies plus a type of transfer per leg), searches
the space of plans with an ant-colony strategy, and ships exhaustive and
random-search baselines plus a command line interface around packaged case
studies.
"""

from .ephem import Body, BodyCatalog, packaged_catalog
from .errors import (
    InfeasiblePlan,
    MalformedSolution,
    MgaError,
    SpaceTooLarge,
)
from .legs import LegParams, Objective, Plan, evaluate_plan, reconstruct
from .planner import (
    LegSets,
    ProblemSpec,
    SearchConfig,
    decode,
    encode,
    search,
    sequence_code,
)
from .baselines import enumerate_all, random_search
from .config import load_config

__version__ = "0.1.0"

__all__ = [
    "Body",
    "BodyCatalog",
    "packaged_catalog",
    "MgaError",
    "InfeasiblePlan",
    "MalformedSolution",
    "SpaceTooLarge",
    "LegParams",
    "Plan",
    "Objective",
    "evaluate_plan",
    "reconstruct",
    "LegSets",
    "ProblemSpec",
    "SearchConfig",
    "search",
    "decode",
    "encode",
    "sequence_code",
    "enumerate_all",
    "random_search",
    "load_config",
    "__version__",
]
