"""Batch experiment front end: JSON-configured seeded runs, CSV artifact
emission (fronts, archive contents, per-generation cell traces), aggregate
JSON reports, and side-by-side timing of runs with and without the archive.

All artifacts except the optional timing block are byte-reproducible for a
fixed config: rerunning the same config into a fresh directory produces an
identical tree. Timings are wall clock and therefore only emitted when
``trace_timings`` is enabled.
"""

import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .archive import GridArchiveConfig
from .core import Solution
from .metrics import generational_distance, load_reference_front
from .nsga2 import EngineParams, RunResult, evolve
from .problems import get_problem

__all__ = [
    "RunConfig",
    "RunReport",
    "TimingTable",
    "ConfigError",
    "run",
    "compare_timing",
    "emit_cell_trace",
]


class ConfigError(ValueError):
    """Invalid or unparsable run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """One experiment definition. Every field has a default; ``archive`` is
    either None (plain NSGA-II) or a dict with the GridArchiveConfig fields.
    """

    problem: str = "vnt"
    delay_ms: float = 0.0
    pop_size: int = 60
    generations: int = 100
    crossover_prob: float = 0.8
    mutation_prob: float | None = None
    crossover_eta: float = 10.0
    mutation_eta: float = 10.0
    seed: int = 0
    repetitions: int = 1
    out_dir: str = "results"
    archive: dict | None = None
    archive_full: str = "warn"
    trace_fronts: bool = True
    trace_cells: bool = True
    trace_timings: bool = False
    reference_grid: int | None = None
    cache_dir: str | None = None
    timing_generations: tuple[int, ...] = (100, 200, 300, 400)
    timing_repeats: int = 1

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.delay_ms < 0:
            raise ConfigError("delay_ms must be >= 0")
        if self.archive_full not in ("warn", "error"):
            raise ConfigError("archive_full must be 'warn' or 'error'")
        if any(g < 1 for g in self.timing_generations):
            raise ConfigError("timing_generations entries must be >= 1")
        if self.timing_repeats < 1:
            raise ConfigError("timing_repeats must be >= 1")
        object.__setattr__(self, "timing_generations", tuple(self.timing_generations))

    # -- (de)serialization --------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["timing_generations"] = list(self.timing_generations)
        return data

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    # -- derived pieces -----------------------------------------------------

    def engine_params(self, seed: int | None = None) -> EngineParams:
        return EngineParams(
            pop_size=self.pop_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            crossover_eta=self.crossover_eta,
            mutation_eta=self.mutation_eta,
            seed=self.seed if seed is None else seed,
        )

    def archive_config(self) -> GridArchiveConfig | None:
        if self.archive is None:
            return None
        try:
            return GridArchiveConfig(**self.archive)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid archive block: {exc}") from exc

    def without_archive(self) -> "RunConfig":
        return dataclasses.replace(self, archive=None)


@dataclass
class RunReport:
    config: RunConfig
    out_dir: Path
    repetitions: list[dict]
    aggregate: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "repetitions": self.repetitions,
            "aggregate": self.aggregate,
        }


# -- CSV emission -------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def _solution_header(n_var: int, n_obj: int, n_con: int, cell: bool) -> list[str]:
    head = []
    if cell:
        head += [f"cell_{k+1}" for k in range(n_obj)]
    head += [f"x_{i+1}" for i in range(n_var)]
    head += [f"f_{k+1}" for k in range(n_obj)]
    head += [f"cv_{j+1}" for j in range(n_con)]
    return head


def _write_front_csv(path: Path, solutions: list[Solution], n_var, n_obj, n_con) -> None:
    lines = [",".join(_solution_header(n_var, n_obj, n_con, cell=False))]
    for s in solutions:
        row = [_fmt(v) for v in s.x] + [_fmt(v) for v in s.f] + [_fmt(v) for v in s.cv]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _write_archive_csv(path: Path, archive, n_var, n_obj, n_con) -> None:
    lines = [",".join(_solution_header(n_var, n_obj, n_con, cell=True))]
    for cell in archive.cells:
        for s in cell.slots:
            row = [str(int(i)) for i in cell.index]
            row += [_fmt(v) for v in s.x] + [_fmt(v) for v in s.f] + [_fmt(v) for v in s.cv]
            lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def emit_cell_trace(result: RunResult, path: str | Path) -> None:
    """Write the per-generation cell-occupancy trace of an archived run.

    Columns: generation, filled, empty, total, packed_this_gen. Raises when
    the run had no archive attached.
    """
    if result.archive is None:
        raise ValueError("run was executed without an archive; no cell trace exists")
    lines = ["generation,filled,empty,total,packed_this_gen"]
    for row in result.trace:
        st = row.archive_stats
        lines.append(
            f"{row.generation},{st.filled},{st.empty},{st.total},{int(row.packs > 0)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


# -- run ------------------------------------------------------------------------


def run(config: RunConfig, out_dir: str | Path | None = None) -> RunReport:
    """Execute ``config.repetitions`` seeded runs (seed of repetition ``i`` is
    ``seed + i``), write the requested artifacts, and return the report.

    The report (``report.json``) references artifact files by path relative
    to the output directory.
    """
    try:
        problem = get_problem(config.problem, config.delay_ms)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    archive_config = config.archive_config()
    if archive_config is not None and archive_config.n_obj != problem.n_obj:
        raise ConfigError(
            f"archive spacing has {archive_config.n_obj} entries, "
            f"problem '{config.problem}' has {problem.n_obj} objectives"
        )

    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config.to_file(out / "config.json")

    reference = None
    if config.reference_grid is not None:
        reference = load_reference_front(
            problem, config.reference_grid, cache_dir=config.cache_dir
        )

    reps: list[dict] = []
    for i in range(config.repetitions):
        seed = config.seed + i
        rep_dir = out / f"rep_{i:03d}"
        rep_dir.mkdir(parents=True, exist_ok=True)
        result = evolve(
            problem,
            config.engine_params(seed),
            archive_config,
            archive_full=config.archive_full,
        )
        front = [s for s in result.population if s.rank == 0]
        files: dict[str, str] = {}
        if config.trace_fronts:
            _write_front_csv(
                rep_dir / "final_front.csv", front, problem.n_var, problem.n_obj, problem.n_con
            )
            files["final_front"] = f"rep_{i:03d}/final_front.csv"
            if result.archive is not None:
                _write_archive_csv(
                    rep_dir / "archive_front.csv",
                    result.archive,
                    problem.n_var,
                    problem.n_obj,
                    problem.n_con,
                )
                files["archive_front"] = f"rep_{i:03d}/archive_front.csv"
        if config.trace_cells and result.archive is not None:
            emit_cell_trace(result, rep_dir / "cell_trace.csv")
            files["cell_trace"] = f"rep_{i:03d}/cell_trace.csv"

        rep: dict = {
            "index": i,
            "seed": seed,
            "files": files,
            "population_front_size": len(front),
            "archive_size": len(result.archive) if result.archive else 0,
        }
        if reference is not None:
            rep["front_gd"] = generational_distance(front, reference)
            if result.archive is not None and len(result.archive):
                rep["archive_gd"] = generational_distance(
                    result.archive.extract_solutions(), reference
                )
        if config.trace_timings:
            engine_s = result.total_seconds - result.eval_seconds - result.archive_seconds
            rep["timing_seconds"] = {
                "evaluation": result.eval_seconds,
                "archive": result.archive_seconds,
                "engine": engine_s,
                "total": result.total_seconds,
            }
        reps.append(rep)

    aggregate = {
        "repetitions": config.repetitions,
        "median_population_front_size": float(
            np.median([r["population_front_size"] for r in reps])
        ),
        "median_archive_size": float(np.median([r["archive_size"] for r in reps])),
    }
    if reference is not None:
        aggregate["median_front_gd"] = float(np.median([r["front_gd"] for r in reps]))
        gds = [r["archive_gd"] for r in reps if "archive_gd" in r]
        if gds:
            aggregate["median_archive_gd"] = float(np.median(gds))

    report = RunReport(config=config, out_dir=out, repetitions=reps, aggregate=aggregate)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return report


# -- timing comparison ------------------------------------------------------------


@dataclass
class TimingTable:
    """Wall-clock seconds for archived vs plain runs at several run lengths."""

    rows: list[dict]

    def to_csv(self) -> str:
        lines = ["generations,plain_seconds,archived_seconds,ratio"]
        for r in self.rows:
            lines.append(
                f"{r['generations']},{r['plain_seconds']!r},{r['archived_seconds']!r},{r['ratio']!r}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"{'gens':>6} {'plain [s]':>12} {'archived [s]':>13} {'ratio':>8}"]
        for r in self.rows:
            lines.append(
                f"{r['generations']:>6} {r['plain_seconds']:>12.4f} "
                f"{r['archived_seconds']:>13.4f} {r['ratio']:>8.3f}"
            )
        return "\n".join(lines) + "\n"


def _prefix_times(problem, params, archive_config, archive_full, gens) -> list[float]:
    """Wall clock to reach each generation count in ``gens``, from one run.

    The generation loop is strictly incremental (later generations never
    revisit earlier work), so the elapsed time at generation G of a long run
    equals the runtime of a G-generation run. Reading all rows off a single
    run keeps each figure an average over many generations instead of one
    noisy point measurement.
    """
    result = evolve(problem, params, archive_config, archive_full=archive_full)
    return [result.elapsed_at(g) for g in gens]


def compare_timing(
    config_archived: RunConfig, config_plain: RunConfig | None = None
) -> TimingTable:
    """Measure the archived and plain configurations side by side.

    The two configs must differ only in the archive block (the plain one is
    derived automatically when omitted). One row per entry of
    ``timing_generations``; each figure is the median over
    ``timing_repeats`` interleaved runs of the wall clock needed to reach
    that generation.
    """
    if config_archived.archive is None:
        raise ConfigError("compare_timing needs a config with an archive block")
    if config_plain is None:
        config_plain = config_archived.without_archive()
    if config_plain.archive is not None:
        raise ConfigError("the plain config must not have an archive block")
    if config_plain != config_archived.without_archive():
        raise ConfigError("configs must differ only in the archive block")

    try:
        problem = get_problem(config_archived.problem, config_archived.delay_ms)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    archive_config = config_archived.archive_config()
    if archive_config.n_obj != problem.n_obj:
        raise ConfigError(
            f"archive spacing has {archive_config.n_obj} entries, "
            f"problem '{config_archived.problem}' has {problem.n_obj} objectives"
        )

    gens = sorted(config_archived.timing_generations)
    params = dataclasses.replace(
        config_archived.engine_params(), generations=max(gens)
    )
    plain_times = []
    archived_times = []
    for _ in range(config_archived.timing_repeats):
        plain_times.append(
            _prefix_times(problem, params, None, config_plain.archive_full, gens)
        )
        archived_times.append(
            _prefix_times(
                problem, params, archive_config, config_archived.archive_full, gens
            )
        )
    plain = np.median(plain_times, axis=0)
    archived = np.median(archived_times, axis=0)
    rows = [
        {
            "generations": g,
            "plain_seconds": float(p),
            "archived_seconds": float(a),
            "ratio": float(a / p),
        }
        for g, p, a in zip(gens, plain, archived)
    ]
    return TimingTable(rows=rows)
