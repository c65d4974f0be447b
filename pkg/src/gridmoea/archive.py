"""Bounded grid archive of non-dominated solutions.

Objective space is partitioned into cells of fixed per-objective width
anchored at a fixed reference point; a cell is addressed by the floor of
``(f - reference) / spacing`` per objective, so the grid needs no outer
boundary and never has to be re-gridded as new extremes appear. The archive
holds at most ``max_cells`` cells of at most ``cell_capacity`` solutions
each, giving a hard ``max_cells * cell_capacity`` memory bound.

Cells that lose their last solution stay in the cell list as vacant entries
until a ``pack`` removes them to make room for a new cell.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import Solution

__all__ = [
    "GridArchiveConfig",
    "Cell",
    "UpdateOutcome",
    "GridArchive",
    "cell_index",
]


@dataclass(frozen=True)
class GridArchiveConfig:
    """Grid geometry and capacity limits.

    ``reference`` and ``spacing`` have one entry per objective; ``spacing``
    entries must be strictly positive. ``duplicate_eps`` is the componentwise
    tolerance under which a candidate is considered a duplicate of a stored
    solution (compared in both decision and objective space).
    """

    reference: tuple[float, ...]
    spacing: tuple[float, ...]
    max_cells: int
    cell_capacity: int
    duplicate_eps: float = 1e-12

    def __post_init__(self) -> None:
        object.__setattr__(self, "reference", tuple(float(v) for v in self.reference))
        object.__setattr__(self, "spacing", tuple(float(v) for v in self.spacing))
        if len(self.reference) != len(self.spacing):
            raise ValueError("reference and spacing must have the same length")
        if len(self.spacing) == 0:
            raise ValueError("spacing must be non-empty")
        if any(d <= 0 for d in self.spacing):
            raise ValueError("spacing entries must be > 0")
        if self.max_cells < 1:
            raise ValueError("max_cells must be >= 1")
        if self.cell_capacity < 1:
            raise ValueError("cell_capacity must be >= 1")
        if self.duplicate_eps < 0:
            raise ValueError("duplicate_eps must be >= 0")

    @property
    def n_obj(self) -> int:
        return len(self.spacing)


def cell_index(f: np.ndarray, config: GridArchiveConfig) -> tuple[int, ...]:
    """Cell address of objective vector ``f``: floor((f_k - ref_k) / spacing_k).

    Indices are signed and unbounded; the grid extends in every direction
    from the reference point.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (config.n_obj,):
        raise ValueError(f"f must have shape ({config.n_obj},), got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("f must be finite")
    idx = np.floor((f - np.asarray(config.reference)) / np.asarray(config.spacing))
    return tuple(int(v) for v in idx)


@dataclass(eq=False)
class Cell:
    """One grid cell: its address and the solutions currently stored in it.

    A cell with no slots is vacant but stays listed until packed away.
    """

    index: tuple[int, ...]
    slots: list[Solution] = field(default_factory=list)

    @property
    def occupied(self) -> bool:
        return len(self.slots) > 0


class UpdateOutcome(enum.Enum):
    REJECTED_INFEASIBLE = "rejected_infeasible"
    REJECTED_DOMINATED = "rejected_dominated"
    REJECTED_IDENTICAL = "rejected_identical"
    INSERTED = "inserted"
    INSERTED_WITH_EVICTION = "inserted_with_eviction"
    INSERTED_AFTER_PACK = "inserted_after_pack"
    ARCHIVE_FULL = "archive_full"

    @property
    def inserted(self) -> bool:
        return self in (
            UpdateOutcome.INSERTED,
            UpdateOutcome.INSERTED_WITH_EVICTION,
            UpdateOutcome.INSERTED_AFTER_PACK,
        )


@dataclass(frozen=True)
class ArchiveStats:
    filled: int
    empty: int
    total: int


class GridArchive:
    """Capacity-bounded store of mutually non-dominating feasible solutions.

    ``update`` screens a candidate against everything stored (dominance,
    then duplicates), removes stored solutions the candidate dominates, and
    files the candidate into its cell: evicting a random occupant when the
    cell is full, creating a new cell while room remains, packing vacant
    cells away when the cell list is full, and reporting ``ARCHIVE_FULL``
    (with the archive left untouched) when not even packing can help.

    Eviction randomness comes from the archive's own seeded generator, so a
    given (config, seed, candidate stream) always reproduces the same state.
    Mutating calls must not run concurrently with anything else.
    """

    def __init__(self, config: GridArchiveConfig, seed: int | np.random.SeedSequence = 0):
        self.config = config
        self.cells: list[Cell] = []
        self.pack_log: list[dict] = []
        self._by_index: dict[tuple[int, ...], Cell] = {}
        self._rng = np.random.default_rng(seed)
        self._ref = np.asarray(config.reference)
        self._delta = np.asarray(config.spacing)
        self._updates = 0
        # Flat mirrors of the stored solutions for vectorized screening; _F
        # is transposed (one row per objective) so the per-candidate
        # reductions run along contiguous memory.
        self._F = np.empty((config.n_obj, 0))
        self._X: np.ndarray | None = None
        self._n = 0
        self._alive = np.empty(0, dtype=bool)
        self._sols: list[Solution | None] = []
        self._cell_of: list[Cell | None] = []
        self._row_of: dict[int, int] = {}
        self._dead = 0

    # -- read-only views -------------------------------------------------

    def __len__(self) -> int:
        return self._n - self._dead

    def stats(self) -> ArchiveStats:
        filled = sum(1 for c in self.cells if c.occupied)
        total = len(self.cells)
        return ArchiveStats(filled=filled, empty=total - filled, total=total)

    def extract_solutions(self) -> list[Solution]:
        """All stored solutions, concatenated cell by cell in list order."""
        out: list[Solution] = []
        for cell in self.cells:
            out.extend(cell.slots)
        return out

    def cell_index(self, f: np.ndarray) -> tuple[int, ...]:
        return cell_index(f, self.config)

    @property
    def pack_count(self) -> int:
        return len(self.pack_log)

    # -- mutation --------------------------------------------------------

    def update(self, candidate: Solution) -> UpdateOutcome:
        """Offer ``candidate`` to the archive and report what happened.

        Every outcome except ``ARCHIVE_FULL`` leaves the archive invariants
        intact; ``ARCHIVE_FULL`` leaves the archive exactly as it was before
        the call.
        """
        f = candidate.f
        if f.shape != (self.config.n_obj,):
            raise ValueError(
                f"candidate has {f.shape[0]} objectives, archive expects {self.config.n_obj}"
            )
        if not np.all(np.isfinite(f)):
            raise ValueError("candidate objectives must be finite")
        self._updates += 1
        if candidate.cv.size and candidate.cv.sum() > 0.0:
            return UpdateOutcome.REJECTED_INFEASIBLE

        doomed: np.ndarray
        if self._n:
            # One difference pass feeds all three screens: a stored solution
            # dominates the candidate iff max(diff) <= 0 with min(diff) < 0,
            # matches it in f iff |diff| stays within eps, and is dominated
            # by it iff min(diff) >= 0 with max(diff) > 0.
            alive = self._alive[: self._n]
            diff = self._F[:, : self._n] - f[:, None]
            mx = diff.max(axis=0)
            mn = diff.min(axis=0)
            if bool(((mx <= 0.0) & (mn < 0.0) & alive).any()):
                return UpdateOutcome.REJECTED_DOMINATED
            eps = self.config.duplicate_eps
            f_same = np.flatnonzero((mx <= eps) & (mn >= -eps) & alive)
            for row in f_same:
                if np.abs(self._X[row] - candidate.x).max() <= eps:
                    return UpdateOutcome.REJECTED_IDENTICAL
            doomed = np.flatnonzero((mn >= 0.0) & (mx > 0.0) & alive)
        else:
            doomed = np.empty(0, dtype=int)

        idx = cell_index(f, self.config)
        cell = self._by_index.get(idx)

        if cell is None and len(self.cells) == self.config.max_cells:
            # Creating a cell needs packing; check that a vacant cell would
            # exist once the dominated solutions are gone, *before* touching
            # anything, so ARCHIVE_FULL can leave the state untouched.
            losses: dict[int, int] = {}
            for row in doomed:
                key = id(self._cell_of[row])
                losses[key] = losses.get(key, 0) + 1
            vacant_after = any(
                len(c.slots) == losses.get(id(c), 0) for c in self.cells
            )
            if not vacant_after:
                return UpdateOutcome.ARCHIVE_FULL

        for row in doomed:
            self._remove_row(int(row))

        if cell is not None:
            evicted = False
            if len(cell.slots) >= self.config.cell_capacity:
                victim = cell.slots[int(self._rng.integers(len(cell.slots)))]
                self._remove_row(self._row_of[id(victim)])
                evicted = True
            self._store(cell, candidate)
            return (
                UpdateOutcome.INSERTED_WITH_EVICTION if evicted else UpdateOutcome.INSERTED
            )

        if len(self.cells) < self.config.max_cells:
            self._append_cell(idx, candidate)
            return UpdateOutcome.INSERTED

        self.pack()
        self._append_cell(idx, candidate)
        return UpdateOutcome.INSERTED_AFTER_PACK

    def pack(self) -> int:
        """Remove vacant cells, keeping occupied cells in their current order.

        Returns the number of cells removed.
        """
        vacant = [c for c in self.cells if not c.occupied]
        if vacant:
            for c in vacant:
                del self._by_index[c.index]
            self.cells = [c for c in self.cells if c.occupied]
            self.pack_log.append(
                {
                    "update": self._updates,
                    "removed": len(vacant),
                    "empty_after": self.stats().empty,
                }
            )
        return len(vacant)

    # -- internals ---------------------------------------------------------

    def _append_cell(self, idx: tuple[int, ...], candidate: Solution) -> None:
        cell = Cell(index=idx)
        self.cells.append(cell)
        self._by_index[idx] = cell
        self._store(cell, candidate)

    def _store(self, cell: Cell, sol: Solution) -> None:
        cell.slots.append(sol)
        if self._X is None:
            self._X = np.empty((0, sol.x.shape[0]))
        if self._n == self._F.shape[1]:
            grow = max(64, 2 * self._F.shape[1])
            self._F = np.hstack([self._F, np.empty((self._F.shape[0], grow))])
            self._X = np.vstack([self._X, np.empty((grow, self._X.shape[1]))])
            self._alive = np.concatenate([self._alive, np.empty(grow, dtype=bool)])
        row = self._n
        self._F[:, row] = sol.f
        self._X[row] = sol.x
        self._alive[row] = True
        self._sols.append(sol)
        self._cell_of.append(cell)
        self._row_of[id(sol)] = row
        self._n += 1

    def _remove_row(self, row: int) -> None:
        sol = self._sols[row]
        cell = self._cell_of[row]
        cell.slots.remove(sol)
        self._alive[row] = False
        self._sols[row] = None
        self._cell_of[row] = None
        del self._row_of[id(sol)]
        self._dead += 1
        if self._dead > 256 and self._dead * 2 > self._n:
            self._compact()

    def _compact(self) -> None:
        keep = self._alive[: self._n]
        self._F = self._F[:, : self._n][:, keep].copy()
        self._X = self._X[: self._n][keep].copy()
        self._sols = [s for s in self._sols if s is not None]
        self._cell_of = [c for c in self._cell_of if c is not None]
        self._n = len(self._sols)
        self._dead = 0
        self._alive = np.ones(self._n, dtype=bool)
        self._row_of = {id(s): i for i, s in enumerate(self._sols)}
