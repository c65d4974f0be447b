"""Scikit-learn style front end for the NSGA-II engine.

``NSGA2`` follows the estimator conventions (constructor stores parameters
verbatim, ``fit`` returns ``self``, fitted state lives in trailing-underscore
attributes, ``get_params``/``set_params`` come from ``BaseEstimator``), so it
can be cloned, grid-searched over, and composed like any other estimator.
It is fit on a :class:`~gridmoea.core.ProblemSpec` rather than a data matrix.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .archive import GridArchiveConfig
from .core import ProblemSpec, Solution
from .nsga2 import EngineParams, evolve

__all__ = ["NSGA2"]


class NSGA2(BaseEstimator):
    """Real-coded NSGA-II, optionally with an attached grid archive.

    Parameters
    ----------
    pop_size : even int >= 4
        Population size.
    generations : int >= 1
        Number of generations to run.
    crossover_prob, crossover_eta : float
        SBX rate and distribution index.
    mutation_prob : float or None
        Per-variable polynomial-mutation rate; None means ``1 / n_var``.
    mutation_eta : float
        Polynomial-mutation distribution index.
    archive : GridArchiveConfig or None
        When set, every new parent population is streamed into a grid
        archive of non-dominated solutions (storage only; the archive never
        influences the evolution).
    archive_full : "warn" or "error"
        What to do when the archive cannot make room for a candidate.
    seed : int
        Seed for both the engine stream and the archive's private stream.
    record_populations : bool
        Keep a per-generation copy of the decision matrix in
        ``populations_``.

    Attributes
    ----------
    population_ : list of Solution
        Final population with ranks and crowding distances.
    front_ : list of Solution
        Non-dominated (rank-0) members of the final population.
    archive_ : GridArchive or None
        The filled archive when one was configured.
    trace_ : list of GenerationTrace
        Per-generation statistics.
    result_ : RunResult
        The full engine output.
    """

    def __init__(
        self,
        pop_size: int = 60,
        generations: int = 100,
        crossover_prob: float = 0.8,
        mutation_prob: float | None = None,
        crossover_eta: float = 10.0,
        mutation_eta: float = 10.0,
        archive: GridArchiveConfig | None = None,
        archive_full: str = "warn",
        seed: int = 0,
        record_populations: bool = False,
    ):
        self.pop_size = pop_size
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.crossover_eta = crossover_eta
        self.mutation_eta = mutation_eta
        self.archive = archive
        self.archive_full = archive_full
        self.seed = seed
        self.record_populations = record_populations

    def _engine_params(self) -> EngineParams:
        return EngineParams(
            pop_size=self.pop_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            crossover_eta=self.crossover_eta,
            mutation_eta=self.mutation_eta,
            seed=self.seed,
        )

    def fit(self, problem: ProblemSpec, y=None) -> "NSGA2":
        """Run the optimizer on ``problem`` (``y`` is ignored; it exists for
        estimator-API compatibility)."""
        if not isinstance(problem, ProblemSpec):
            raise TypeError(f"fit expects a ProblemSpec, got {type(problem).__name__}")
        result = evolve(
            problem,
            self._engine_params(),
            self.archive,
            archive_full=self.archive_full,
            record_populations=self.record_populations,
        )
        self.problem_name_ = problem.name
        self.result_ = result
        self.population_ = result.population
        self.front_ = [s for s in result.population if s.rank == 0]
        self.archive_ = result.archive
        self.trace_ = result.trace
        self.populations_ = result.populations
        return self

    def archive_solutions(self) -> list[Solution]:
        """Stored archive solutions (empty list when no archive was set)."""
        self._check_fitted()
        return self.archive_.extract_solutions() if self.archive_ else []

    def front_objectives(self) -> np.ndarray:
        """Objective matrix of the final non-dominated population members."""
        self._check_fitted()
        return np.array([s.f for s in self.front_])

    def _check_fitted(self) -> None:
        if not hasattr(self, "result_"):
            raise RuntimeError("this NSGA2 instance is not fitted yet; call fit first")
