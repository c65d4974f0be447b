"""Solution representation and dominance semantics shared by the whole package.

All objectives are minimized. Constraint handling follows the
feasibility-first rule: a feasible solution beats any infeasible one, two
infeasible solutions are compared by total violation, and two feasible
solutions are compared by plain Pareto dominance.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Solution",
    "ProblemSpec",
    "dominates",
    "identical",
    "total_violation",
    "domination_matrix",
]


def _as_vector(value, name: str, size: int | None = None) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise ValueError(f"{name} must have length {size}, got {arr.shape[0]}")
    return arr


@dataclass(eq=False)
class Solution:
    """One evaluated point: decision vector ``x``, objectives ``f`` (minimized),
    constraint violations ``cv`` (all >= 0, zero means satisfied), plus the
    rank / crowding bookkeeping assigned during selection."""

    x: np.ndarray
    f: np.ndarray
    cv: np.ndarray = field(default_factory=lambda: np.empty(0))
    rank: int = 0
    crowding: float = 0.0

    def __post_init__(self) -> None:
        self.x = _as_vector(self.x, "x")
        self.f = _as_vector(self.f, "f")
        self.cv = _as_vector(self.cv, "cv")
        if self.cv.size and self.cv.min() < 0.0:
            raise ValueError("constraint violations must be >= 0")

    @property
    def feasible(self) -> bool:
        return bool(self.cv.size == 0 or self.cv.sum() == 0.0)

    def copy(self) -> "Solution":
        return Solution(
            x=self.x.copy(),
            f=self.f.copy(),
            cv=self.cv.copy(),
            rank=self.rank,
            crowding=self.crowding,
        )


@dataclass(eq=False)
class ProblemSpec:
    """Contract for an optimization problem.

    ``evaluate`` maps one decision vector to ``(f, cv)`` and must be
    deterministic: the same ``x`` always yields the same values.
    ``evaluate_batch``, when given, maps an ``(n, n_var)`` matrix to
    ``(F, CV)`` matrices and must agree with ``evaluate`` row by row.
    """

    name: str
    n_var: int
    n_obj: int
    n_con: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    evaluate_batch: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None

    def __post_init__(self) -> None:
        if self.n_var < 1:
            raise ValueError("n_var must be >= 1")
        if self.n_obj < 2:
            raise ValueError("n_obj must be >= 2")
        if self.n_con < 0:
            raise ValueError("n_con must be >= 0")
        self.lower = _as_vector(self.lower, "lower", self.n_var)
        self.upper = _as_vector(self.upper, "upper", self.n_var)
        if not np.all(self.lower < self.upper):
            raise ValueError("lower bounds must be strictly below upper bounds")

    def evaluate_many(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate a batch of rows, via ``evaluate_batch`` when available."""
        X = np.asarray(X, dtype=float)
        if self.evaluate_batch is not None:
            F, CV = self.evaluate_batch(X)
        else:
            F = np.empty((X.shape[0], self.n_obj))
            CV = np.empty((X.shape[0], self.n_con))
            for i, row in enumerate(X):
                F[i], CV[i] = self.evaluate(row)
        if not np.all(np.isfinite(F)):
            raise ValueError(f"problem '{self.name}' produced non-finite objectives")
        return F, CV


def total_violation(sol: Solution) -> float:
    """Unweighted sum of constraint violations; 0 means feasible."""
    return float(sol.cv.sum()) if sol.cv.size else 0.0


def _check_pair(a: Solution, b: Solution) -> None:
    if a.f.shape != b.f.shape or a.x.shape != b.x.shape or a.cv.shape != b.cv.shape:
        raise ValueError(
            "solutions belong to different problems: "
            f"x {a.x.shape} vs {b.x.shape}, f {a.f.shape} vs {b.f.shape}, "
            f"cv {a.cv.shape} vs {b.cv.shape}"
        )


def dominates(a: Solution, b: Solution) -> bool:
    """Constrained domination of ``a`` over ``b``.

    A feasible solution dominates an infeasible one; among infeasible
    solutions the smaller total violation dominates; among feasible
    solutions ``a`` dominates iff it is no worse in every objective and
    strictly better in at least one.
    """
    _check_pair(a, b)
    fa, fb = a.feasible, b.feasible
    if fa and not fb:
        return True
    if fb and not fa:
        return False
    if not fa and not fb:
        return total_violation(a) < total_violation(b)
    return bool(np.all(a.f <= b.f) and np.any(a.f < b.f))


def identical(a: Solution, b: Solution, eps: float = 1e-12) -> bool:
    """True when ``a`` and ``b`` agree componentwise within ``eps`` in both
    decision and objective space."""
    _check_pair(a, b)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return bool(
        np.max(np.abs(a.f - b.f), initial=0.0) <= eps
        and np.max(np.abs(a.x - b.x), initial=0.0) <= eps
    )


def domination_matrix(F: np.ndarray, CV: np.ndarray | None = None) -> np.ndarray:
    """Pairwise constrained-domination matrix: ``out[i, j]`` is True when row
    ``i`` dominates row ``j``. Semantics match :func:`dominates` exactly.
    """
    F = np.asarray(F, dtype=float)
    n = F.shape[0]
    obj_dom = np.all(F[:, None, :] <= F[None, :, :], axis=2) & np.any(
        F[:, None, :] < F[None, :, :], axis=2
    )
    if CV is None or CV.size == 0:
        return obj_dom
    tv = np.asarray(CV, dtype=float).sum(axis=1)
    feas = tv == 0.0
    both_feas = feas[:, None] & feas[None, :]
    out = both_feas & obj_dom
    out |= feas[:, None] & ~feas[None, :]
    infeas_pair = ~feas[:, None] & ~feas[None, :]
    out |= infeas_pair & (tv[:, None] < tv[None, :])
    np.fill_diagonal(out, False)
    return out
