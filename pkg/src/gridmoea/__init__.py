"""Multi-objective evolutionary optimization with a bounded grid archive.

The package pairs a real-coded NSGA-II engine with a storage-only archive of
non-dominated solutions organized in a fixed-spacing objective-space grid,
plus benchmark problems, front-quality metrics, and a batch experiment CLI.
"""

from .archive import (
    Cell,
    GridArchive,
    GridArchiveConfig,
    UpdateOutcome,
    cell_index,
)
from .core import ProblemSpec, Solution, dominates, identical, total_violation
from .estimator import NSGA2
from .metrics import (
    ReferenceFront,
    build_reference_front,
    generational_distance,
    is_mutually_nondominating,
    load_reference_front,
)
from .nsga2 import (
    ArchiveFullError,
    EngineParams,
    RunResult,
    crowded_tournament,
    crowding_distance,
    evolve,
    fast_nondominated_sort,
    polynomial_mutation,
    sbx_crossover,
)
from .problems import get_problem, problem_names, with_delay

__version__ = "0.1.0"

__all__ = [
    "ArchiveFullError",
    "Cell",
    "EngineParams",
    "GridArchive",
    "GridArchiveConfig",
    "NSGA2",
    "ProblemSpec",
    "ReferenceFront",
    "RunResult",
    "Solution",
    "UpdateOutcome",
    "build_reference_front",
    "cell_index",
    "crowded_tournament",
    "crowding_distance",
    "dominates",
    "evolve",
    "fast_nondominated_sort",
    "generational_distance",
    "get_problem",
    "identical",
    "is_mutually_nondominating",
    "load_reference_front",
    "polynomial_mutation",
    "problem_names",
    "sbx_crossover",
    "total_violation",
    "with_delay",
    "__version__",
]
