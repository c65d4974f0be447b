"""Real-coded NSGA-II engine with an optional attached grid archive.

The archive is storage only: it receives every member of each new parent
population but never feeds back into selection, and it draws randomness
from its own stream, so a run's population trajectory is identical with
the archive enabled or disabled.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .archive import ArchiveStats, GridArchive, GridArchiveConfig, UpdateOutcome
from .core import ProblemSpec, Solution

__all__ = [
    "EngineParams",
    "GenerationTrace",
    "RunResult",
    "ArchiveFullError",
    "fast_nondominated_sort",
    "crowding_distance",
    "crowded_tournament",
    "sbx_crossover",
    "polynomial_mutation",
    "evolve",
]

log = logging.getLogger(__name__)


class ArchiveFullError(RuntimeError):
    """Raised in strict mode when the archive cannot accept a candidate."""


@dataclass(frozen=True)
class EngineParams:
    """NSGA-II settings. ``mutation_prob=None`` resolves to 1/n_var at run
    time. Defaults for the rates and distribution indices are the usual
    benchmark settings (crossover 0.8, eta 10 for both operators)."""

    pop_size: int = 60
    generations: int = 100
    crossover_prob: float = 0.8
    mutation_prob: float | None = None
    crossover_eta: float = 10.0
    mutation_eta: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pop_size < 4 or self.pop_size % 2:
            raise ValueError("pop_size must be an even integer >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be in [0, 1]")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if self.crossover_eta <= 0 or self.mutation_eta <= 0:
            raise ValueError("distribution indices must be > 0")


@dataclass
class GenerationTrace:
    """Per-generation bookkeeping emitted by :func:`evolve`."""

    generation: int
    front_size: int
    archive_size: int
    archive_stats: ArchiveStats | None
    packs: int
    archive_full_events: int
    eval_seconds: float
    archive_seconds: float
    gen_seconds: float = 0.0


@dataclass
class RunResult:
    population: list[Solution]
    archive: GridArchive | None
    trace: list[GenerationTrace]
    eval_seconds: float
    archive_seconds: float
    total_seconds: float
    setup_seconds: float = 0.0  # everything before the generation loop
    populations: list[np.ndarray] = field(default_factory=list)

    def elapsed_at(self, generation: int) -> float:
        """Wall clock from the start of the run to the end of ``generation``.

        Generations run strictly incrementally, so this equals the runtime a
        shorter run with the same settings would have taken.
        """
        if not 1 <= generation <= len(self.trace):
            raise ValueError(f"generation must be in [1, {len(self.trace)}]")
        return self.setup_seconds + sum(
            t.gen_seconds for t in self.trace[:generation]
        )


# -- sorting and selection -------------------------------------------------


def _domination_matrix(F: np.ndarray, CV: np.ndarray) -> np.ndarray:
    obj_dom = np.all(F[:, None, :] <= F[None, :, :], axis=2) & np.any(
        F[:, None, :] < F[None, :, :], axis=2
    )
    if CV.size == 0:
        np.fill_diagonal(obj_dom, False)
        return obj_dom
    tv = CV.sum(axis=1)
    feas = tv == 0.0
    out = (feas[:, None] & feas[None, :]) & obj_dom
    out |= feas[:, None] & ~feas[None, :]
    out |= (~feas[:, None] & ~feas[None, :]) & (tv[:, None] < tv[None, :])
    np.fill_diagonal(out, False)
    return out


def _sort_fronts(F: np.ndarray, CV: np.ndarray) -> list[np.ndarray]:
    """Indices grouped into fronts: front 0 is the non-dominated set, front k
    the non-dominated set once fronts < k are removed."""
    dom = _domination_matrix(F, CV)
    dominators = dom.sum(axis=0).astype(np.int64)
    fronts: list[np.ndarray] = []
    front = np.flatnonzero(dominators == 0)
    while front.size:
        fronts.append(front)
        dominators[front] = -1
        dominators = dominators - dom[front].sum(axis=0)
        front = np.flatnonzero(dominators == 0)
    return fronts


def fast_nondominated_sort(pop: list[Solution]) -> list[list[int]]:
    """Sort ``pop`` into fronts and assign each solution's ``rank``.

    Returns the fronts as lists of indices into ``pop``; every index appears
    in exactly one front.
    """
    if not pop:
        return []
    F = np.array([s.f for s in pop])
    CV = np.array([s.cv for s in pop])
    fronts = _sort_fronts(F, CV)
    for k, front in enumerate(fronts):
        for i in front:
            pop[i].rank = k
    return [list(map(int, front)) for front in fronts]


def _crowding(F: np.ndarray) -> np.ndarray:
    """Crowding distances for one mutually non-dominating front."""
    n, m = F.shape
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for k in range(m):
        order = np.argsort(F[:, k], kind="stable")
        fk = F[order, k]
        span = fk[-1] - fk[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (fk[2:] - fk[:-2]) / span
    return dist


def crowding_distance(front: list[Solution]) -> np.ndarray:
    """Assign crowding distances within one front (boundary solutions get
    +inf; an objective with zero spread contributes nothing)."""
    if not front:
        return np.empty(0)
    values = _crowding(np.array([s.f for s in front]))
    for s, d in zip(front, values):
        s.crowding = float(d)
    return values


def crowded_tournament(a: Solution, b: Solution) -> Solution:
    """Binary tournament on (rank, crowding); ``a`` wins exact ties."""
    if b.rank < a.rank or (b.rank == a.rank and b.crowding > a.crowding):
        return b
    return a


# -- variation operators -----------------------------------------------------


def sbx_spread_factor(u: np.ndarray, eta: float) -> np.ndarray:
    """Map uniform draws in [0, 1) to SBX spread factors with index ``eta``."""
    u = np.asarray(u, dtype=float)
    return np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )


def mutation_delta(u: np.ndarray, eta: float) -> np.ndarray:
    """Map uniform draws in [0, 1) to polynomial perturbations in [-1, 1]."""
    u = np.asarray(u, dtype=float)
    return np.where(
        u < 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0,
        1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0)),
    )


def _sbx_batch(
    P1: np.ndarray,
    P2: np.ndarray,
    prob: float,
    eta: float,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise SBX over row-aligned parent matrices.

    Draw counts are fixed per call (one gate draw per pair, one spread draw
    per variable) so the stream consumed is independent of outcomes.
    """
    n_pairs, n_var = P1.shape
    gate = rng.random(n_pairs) < prob
    beta = sbx_spread_factor(rng.random((n_pairs, n_var)), eta)
    mean = 0.5 * (P1 + P2)
    diff = 0.5 * (P1 - P2)
    C1 = np.where(gate[:, None], mean + beta * diff, P1)
    C2 = np.where(gate[:, None], mean - beta * diff, P2)
    np.clip(C1, lower, upper, out=C1)
    np.clip(C2, lower, upper, out=C2)
    return C1, C2


def sbx_crossover(
    p1: np.ndarray,
    p2: np.ndarray,
    prob: float,
    eta: float,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover of one parent pair; children are clipped to
    the box. With probability ``1 - prob`` the parents are returned as-is."""
    C1, C2 = _sbx_batch(
        np.asarray(p1, dtype=float)[None, :],
        np.asarray(p2, dtype=float)[None, :],
        prob,
        eta,
        np.asarray(lower),
        np.asarray(upper),
        rng,
    )
    return C1[0], C2[0]


def _mutate_batch(
    X: np.ndarray,
    prob: float,
    eta: float,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    gate = rng.random(X.shape) < prob
    delta = mutation_delta(rng.random(X.shape), eta)
    out = np.where(gate, X + delta * (upper - lower), X)
    np.clip(out, lower, upper, out=out)
    return out


def polynomial_mutation(
    x: np.ndarray,
    prob: float,
    eta: float,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Polynomial mutation: each variable is perturbed with probability
    ``prob`` by a polynomial step scaled to its box width, then clipped."""
    return _mutate_batch(
        np.asarray(x, dtype=float)[None, :],
        prob,
        eta,
        np.asarray(lower),
        np.asarray(upper),
        rng,
    )[0]


# -- the generational loop ---------------------------------------------------


def _tournament_indices(
    rank: np.ndarray, crowd: np.ndarray, picks: np.ndarray
) -> np.ndarray:
    """Winners of binary tournaments; first contestant wins exact ties."""
    a, b = picks[:, 0], picks[:, 1]
    b_better = (rank[b] < rank[a]) | ((rank[b] == rank[a]) & (crowd[b] > crowd[a]))
    return np.where(b_better, b, a)


def _environmental_selection(
    F: np.ndarray, CV: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pick ``n`` of the merged population by (rank, crowding).

    Returns (selected indices, their ranks, their crowding distances). The
    last admitted front is truncated by descending crowding distance, ties
    broken by lower index.
    """
    fronts = _sort_fronts(F, CV)
    chosen: list[int] = []
    ranks = np.empty(F.shape[0], dtype=int)
    crowd = np.empty(F.shape[0])
    for k, front in enumerate(fronts):
        ranks[front] = k
        crowd[front] = _crowding(F[front])
        if len(chosen) + front.size <= n:
            chosen.extend(int(i) for i in front)
            if len(chosen) == n:
                break
        else:
            room = n - len(chosen)
            order = sorted(front, key=lambda i: (-crowd[i], i))
            chosen.extend(int(i) for i in order[:room])
            break
    sel = np.array(chosen)
    return sel, ranks[sel], crowd[sel]


def evolve(
    problem: ProblemSpec,
    params: EngineParams,
    archive_config: GridArchiveConfig | None = None,
    *,
    archive_full: str = "warn",
    record_populations: bool = False,
) -> RunResult:
    """Run NSGA-II on ``problem``, optionally streaming each new parent
    population into a grid archive.

    Per generation: binary-tournament selection and SBX produce ``pop_size``
    children, children are mutated and evaluated, parents and children are
    merged, non-dominated sorting plus crowding-based truncation selects the
    next parents, and (when configured) the archive is offered every member
    of that new parent population. Without ``archive_config`` no archive
    work happens at all.

    ``archive_full`` chooses the policy when the archive rejects a candidate
    for lack of room: "warn" logs once and keeps going, "error" raises
    :class:`ArchiveFullError`.
    """
    if archive_full not in ("warn", "error"):
        raise ValueError("archive_full must be 'warn' or 'error'")
    if archive_config is not None and archive_config.n_obj != problem.n_obj:
        raise ValueError(
            f"archive expects {archive_config.n_obj} objectives, "
            f"problem '{problem.name}' has {problem.n_obj}"
        )

    t_start = time.perf_counter()
    root = np.random.SeedSequence(params.seed)
    engine_ss, archive_ss = root.spawn(2)
    rng = np.random.default_rng(engine_ss)
    archive = None
    if archive_config is not None:
        archive = GridArchive(archive_config, seed=archive_ss)

    n = params.pop_size
    n_var = problem.n_var
    lower, upper = problem.lower, problem.upper
    p_m = params.mutation_prob if params.mutation_prob is not None else 1.0 / n_var

    X = lower + (upper - lower) * rng.random((n, n_var))
    t0 = time.perf_counter()
    F, CV = problem.evaluate_many(X)
    eval_total = time.perf_counter() - t0

    sel, rank, crowd = _environmental_selection(F, CV, n)
    X, F, CV = X[sel], F[sel], CV[sel]

    trace: list[GenerationTrace] = []
    populations: list[np.ndarray] = []
    archive_total = 0.0
    warned_full = False
    setup_seconds = time.perf_counter() - t_start

    for gen in range(1, params.generations + 1):
        t_gen = time.perf_counter()
        picks = rng.integers(0, n, size=(n // 2, 4))
        p1 = _tournament_indices(rank, crowd, picks[:, :2])
        p2 = _tournament_indices(rank, crowd, picks[:, 2:])
        C1, C2 = _sbx_batch(
            X[p1], X[p2], params.crossover_prob, params.crossover_eta, lower, upper, rng
        )
        children = np.vstack([C1, C2])
        children = _mutate_batch(children, p_m, params.mutation_eta, lower, upper, rng)

        t0 = time.perf_counter()
        F_child, CV_child = problem.evaluate_many(children)
        eval_gen = time.perf_counter() - t0
        eval_total += eval_gen

        XM = np.vstack([X, children])
        FM = np.vstack([F, F_child])
        CVM = np.vstack([CV, CV_child])
        sel, rank, crowd = _environmental_selection(FM, CVM, n)
        X, F, CV = XM[sel], FM[sel], CVM[sel]

        archive_gen = 0.0
        packs_before = archive.pack_count if archive else 0
        full_events = 0
        if archive is not None:
            t0 = time.perf_counter()
            for i in range(n):
                sol = Solution(
                    x=X[i].copy(),
                    f=F[i].copy(),
                    cv=CV[i].copy(),
                    rank=int(rank[i]),
                    crowding=float(crowd[i]),
                )
                outcome = archive.update(sol)
                if outcome is UpdateOutcome.ARCHIVE_FULL:
                    full_events += 1
            archive_gen = time.perf_counter() - t0
            archive_total += archive_gen
            if full_events:
                if archive_full == "error":
                    raise ArchiveFullError(
                        f"archive full at generation {gen}: no room for a new cell "
                        f"(max_cells={archive.config.max_cells}) and nothing to pack"
                    )
                if not warned_full:
                    log.warning(
                        "archive full at generation %d; candidates needing new "
                        "cells are dropped from the archive from here on",
                        gen,
                    )
                    warned_full = True

        if record_populations:
            populations.append(X.copy())

        trace.append(
            GenerationTrace(
                generation=gen,
                front_size=int((rank == 0).sum()),
                archive_size=len(archive) if archive else 0,
                archive_stats=archive.stats() if archive else None,
                packs=(archive.pack_count - packs_before) if archive else 0,
                archive_full_events=full_events,
                eval_seconds=eval_gen,
                archive_seconds=archive_gen,
                gen_seconds=time.perf_counter() - t_gen,
            )
        )

    population = [
        Solution(
            x=X[i].copy(),
            f=F[i].copy(),
            cv=CV[i].copy(),
            rank=int(rank[i]),
            crowding=float(crowd[i]),
        )
        for i in range(n)
    ]
    return RunResult(
        population=population,
        archive=archive,
        trace=trace,
        eval_seconds=eval_total,
        archive_seconds=archive_total,
        total_seconds=time.perf_counter() - t_start,
        setup_seconds=setup_seconds,
        populations=populations,
    )
