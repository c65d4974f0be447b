"""Front-quality measures and a grid-based reference-front builder.

The reference front is the non-dominated subset of a dense evaluation grid
over the decision box (infeasible grid points discarded) and serves as the
ground truth for generational-distance comparisons. Fronts are cached on
disk keyed by problem name, grid resolution, and problem version.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .core import ProblemSpec, Solution, domination_matrix

__all__ = [
    "ReferenceFront",
    "nondominated_mask",
    "build_reference_front",
    "load_reference_front",
    "generational_distance",
    "is_mutually_nondominating",
]

GRID_EVAL_CAP = 4_000_000


@dataclass(frozen=True)
class ReferenceFront:
    """Objective-space points approximating the true Pareto front, plus the
    decision-grid resolution they came from."""

    points: np.ndarray
    grid_per_dim: int
    problem: str = ""


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of ``F`` that no other row weakly dominates.

    Duplicate rows are kept once. Runs in passes: each surviving row removes
    every row it weakly dominates, so only mutually non-dominating rows
    survive.
    """
    F = np.asarray(F, dtype=float)
    n = F.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    # Sorting by objective sum first makes strong dominators act early.
    order = np.argsort(F.sum(axis=1), kind="stable")
    Fs = F[order]
    surviving = np.arange(n)
    i = 0
    while i < Fs.shape[0]:
        better_somewhere = np.any(Fs < Fs[i], axis=1)
        better_somewhere[i] = True
        surviving = surviving[better_somewhere]
        Fs = Fs[better_somewhere]
        i = int(better_somewhere[:i].sum()) + 1
    mask = np.zeros(n, dtype=bool)
    mask[order[surviving]] = True
    return mask


def build_reference_front(
    problem: ProblemSpec, grid_per_dim: int, eval_cap: int = GRID_EVAL_CAP
) -> ReferenceFront:
    """Evaluate the full ``grid_per_dim``-per-axis decision grid, drop
    infeasible points, and keep the non-dominated objective vectors."""
    if grid_per_dim < 2:
        raise ValueError("grid_per_dim must be >= 2")
    n_points = grid_per_dim**problem.n_var
    if n_points > eval_cap:
        raise ValueError(
            f"grid of {n_points} points exceeds the evaluation cap of {eval_cap}"
        )
    axes = [
        np.linspace(problem.lower[i], problem.upper[i], grid_per_dim)
        for i in range(problem.n_var)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.column_stack([m.ravel() for m in mesh])
    F, CV = problem.evaluate_many(X)
    if CV.size:
        F = F[CV.sum(axis=1) == 0.0]
    if F.shape[0] == 0:
        raise ValueError(f"no feasible grid points for problem '{problem.name}'")
    front = F[nondominated_mask(F)]
    return ReferenceFront(points=front, grid_per_dim=grid_per_dim, problem=problem.name)


def _cache_path(cache_dir: Path, problem: str, grid: int, version: str) -> Path:
    key = hashlib.sha256(
        json.dumps([problem, grid, version]).encode()
    ).hexdigest()[:12]
    return cache_dir / f"ref_{problem}_g{grid}_{key}.npz"


def load_reference_front(
    problem: ProblemSpec,
    grid_per_dim: int,
    cache_dir: str | Path | None = None,
    version: str = "1",
) -> ReferenceFront:
    """Like :func:`build_reference_front` but cached on disk when
    ``cache_dir`` is given."""
    if cache_dir is None:
        return build_reference_front(problem, grid_per_dim)
    cache_dir = Path(cache_dir)
    path = _cache_path(cache_dir, problem.name, grid_per_dim, version)
    if path.exists():
        data = np.load(path)
        return ReferenceFront(
            points=data["points"], grid_per_dim=grid_per_dim, problem=problem.name
        )
    front = build_reference_front(problem, grid_per_dim)
    cache_dir.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(path, points=front.points)
    return front


def _front_matrix(front) -> np.ndarray:
    if isinstance(front, ReferenceFront):
        return front.points
    if len(front) and isinstance(front[0], Solution):
        return np.array([s.f for s in front])
    return np.asarray(front, dtype=float)


def generational_distance(front, reference: ReferenceFront) -> float:
    """Mean Euclidean distance from each front point to its nearest
    reference point. ``front`` may be Solutions or an objective matrix."""
    F = _front_matrix(front)
    if F.size == 0:
        raise ValueError("front must be non-empty")
    R = _front_matrix(reference)
    if R.size == 0:
        raise ValueError("reference front must be non-empty")
    dist, _ = cKDTree(R).query(F)
    return float(np.mean(dist))


def is_mutually_nondominating(solutions: list[Solution]) -> bool:
    """True when no solution in the set dominates another."""
    if len(solutions) < 2:
        return True
    F = np.array([s.f for s in solutions])
    CV = np.array([s.cv for s in solutions])
    return not domination_matrix(F, CV).any()
