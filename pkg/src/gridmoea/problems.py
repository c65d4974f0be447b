"""Benchmark problems: the Viennet three-objective problem, the constrained
CTP1 problem, a bi-objective one-variable toy, and a wall-clock delay wrapper
that stands in for expensive simulator-backed evaluators.

All evaluators are pure and deterministic; objectives are minimized.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import ProblemSpec

__all__ = [
    "CTP1_A",
    "CTP1_B",
    "vnt_problem",
    "ctp1_problem",
    "schaffer_problem",
    "with_delay",
    "get_problem",
    "problem_names",
    "CatalogEntry",
    "CATALOG",
]


def _check_box(x: np.ndarray, lower: np.ndarray, upper: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != lower.shape:
        raise ValueError(f"{name}: expected {lower.shape[0]} variables, got {x.shape}")
    if np.any(x < lower) or np.any(x > upper):
        raise ValueError(f"{name}: x={x} outside box [{lower}, {upper}]")
    return x


# -- Viennet (2 variables, 3 objectives, unconstrained) ----------------------

_VNT_LO = np.array([-3.0, -3.0])
_VNT_HI = np.array([3.0, 3.0])


def _vnt_f(x1, x2):
    r = x1 * x1 + x2 * x2
    f1 = 0.5 * r + np.sin(r)
    f2 = (3.0 * x1 - 2.0 * x2 + 4.0) ** 2 / 8.0 + (x1 - x2 + 1.0) ** 2 / 27.0 + 15.0
    f3 = 1.0 / (r + 1.0) - 1.1 * np.exp(-r)
    return f1, f2, f3


def _vnt_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = _check_box(x, _VNT_LO, _VNT_HI, "vnt")
    return np.array(_vnt_f(x[0], x[1])), np.empty(0)


def _vnt_batch(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f1, f2, f3 = _vnt_f(X[:, 0], X[:, 1])
    return np.column_stack([f1, f2, f3]), np.empty((X.shape[0], 0))


def vnt_problem() -> ProblemSpec:
    return ProblemSpec(
        name="vnt",
        n_var=2,
        n_obj=3,
        n_con=0,
        lower=_VNT_LO,
        upper=_VNT_HI,
        evaluate=_vnt_eval,
        evaluate_batch=_vnt_batch,
    )


# -- CTP1 (2 variables, 2 objectives, 2 constraints) -------------------------


def _ctp_constraint_params(n_con: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Constraint coefficients (a_j, b_j) for the CTP1 family, built by the
    standard halving recursion starting from a = b = 1."""
    a, b = [1.0], [1.0]
    delta = 1.0 / (n_con + 1)
    x = delta
    for _ in range(n_con):
        y = a[-1] * math.exp(-b[-1] * x)
        a.append(0.5 * (a[-1] + y))
        b.append(-math.log(y / a[-1]) / x)
        x += delta
    return tuple(a[1:]), tuple(b[1:])


CTP1_A, CTP1_B = _ctp_constraint_params(2)

_CTP1_LO = np.array([0.0, 0.0])
_CTP1_HI = np.array([1.0, 1.0])


def _ctp1_f(x1, x2):
    g = 1.0 + x2
    f1 = x1
    f2 = g * np.exp(-f1 / g)
    return f1, f2


def _ctp1_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = _check_box(x, _CTP1_LO, _CTP1_HI, "ctp1")
    f1, f2 = _ctp1_f(x[0], x[1])
    cv = np.array(
        [max(0.0, a * math.exp(-b * f1) - f2) for a, b in zip(CTP1_A, CTP1_B)]
    )
    return np.array([f1, f2]), cv


def _ctp1_batch(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f1, f2 = _ctp1_f(X[:, 0], X[:, 1])
    cv = np.column_stack(
        [np.maximum(0.0, a * np.exp(-b * f1) - f2) for a, b in zip(CTP1_A, CTP1_B)]
    )
    return np.column_stack([f1, f2]), cv


def ctp1_problem() -> ProblemSpec:
    return ProblemSpec(
        name="ctp1",
        n_var=2,
        n_obj=2,
        n_con=2,
        lower=_CTP1_LO,
        upper=_CTP1_HI,
        evaluate=_ctp1_eval,
        evaluate_batch=_ctp1_batch,
    )


# -- Schaffer's one-variable toy ----------------------------------------------

_SCH_LO = np.array([-5.0])
_SCH_HI = np.array([5.0])


def _schaffer_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = _check_box(x, _SCH_LO, _SCH_HI, "schaffer")
    return np.array([x[0] ** 2, (x[0] - 2.0) ** 2]), np.empty(0)


def _schaffer_batch(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = X[:, 0]
    return np.column_stack([v**2, (v - 2.0) ** 2]), np.empty((X.shape[0], 0))


def schaffer_problem() -> ProblemSpec:
    return ProblemSpec(
        name="schaffer",
        n_var=1,
        n_obj=2,
        n_con=0,
        lower=_SCH_LO,
        upper=_SCH_HI,
        evaluate=_schaffer_eval,
        evaluate_batch=_schaffer_batch,
    )


# -- delay wrapper -------------------------------------------------------------


def with_delay(inner: ProblemSpec, delay_ms: float) -> ProblemSpec:
    """Wrap ``inner`` so every evaluation also burns at least ``delay_ms`` of
    wall clock, emulating a simulator-backed objective function. Results are
    identical to the inner problem's."""
    if delay_ms < 0:
        raise ValueError("delay_ms must be >= 0")
    if delay_ms == 0:
        return inner
    delay_s = delay_ms / 1000.0

    def evaluate(x):
        out = inner.evaluate(x)
        time.sleep(delay_s)
        return out

    def evaluate_batch(X):
        F, CV = inner.evaluate_many(X)
        time.sleep(delay_s * X.shape[0])
        return F, CV

    return ProblemSpec(
        name=f"{inner.name}+{delay_ms:g}ms",
        n_var=inner.n_var,
        n_obj=inner.n_obj,
        n_con=inner.n_con,
        lower=inner.lower,
        upper=inner.upper,
        evaluate=evaluate,
        evaluate_batch=evaluate_batch,
    )


# -- catalog -------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    factory: object
    reference_grid: int  # default decision-grid resolution for the reference front
    version: str = "1"


CATALOG: dict[str, CatalogEntry] = {
    "vnt": CatalogEntry("vnt", vnt_problem, 501),
    "ctp1": CatalogEntry("ctp1", ctp1_problem, 501),
    "schaffer": CatalogEntry("schaffer", schaffer_problem, 501),
}


def problem_names() -> list[str]:
    return sorted(CATALOG)


def get_problem(name: str, delay_ms: float = 0.0) -> ProblemSpec:
    """Look up a catalog problem by name, optionally delay-wrapped."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown problem '{name}'; available: {', '.join(problem_names())}"
        ) from None
    problem = entry.factory()
    return with_delay(problem, delay_ms) if delay_ms else problem
