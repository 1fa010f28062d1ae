"""Car position diagrams: a small modelling language for traffic scenarios,
with exhaustive scenario enumeration through a bounded propositional encoding."""

from .analyze import (
    AllOf,
    DistanceBound,
    ForbidCollision,
    Occupancy,
    RequireCollision,
    binomial_prediction,
    collision_pairs,
    detect_collisions,
    parse_filter,
)
from .core import (
    BoxDecl,
    BoxId,
    Configuration,
    Guard,
    GuardKind,
    Model,
    ModelError,
    Scenario,
    SyncGroup,
    Transition,
    validate_model,
)
from .dsl import ParseFailure, parse, serialize
from .enumeration import EnumOptions, count_scenarios, enumerate_scenarios, iter_scenarios
from .models import bench, load, load_builtin
from .oracle import oracle_count, oracle_enumerate
from .positions import resolve_positions

__version__ = "0.1.0"
