"""Benchmark sweep over instances, offload fractions and solvers.

A sweep visits every (instance, hq fraction, solver, repetition) cell in
that order.  Deterministic solvers run once per (instance, hq); BPSO and GA
run ``repetitions`` times with seeds ``seed_base + rep``.  Rows are
appended to the CSV as soon as each cell finishes.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

import pandas as pd
import yaml

from .errors import InvalidInputError
from .exact import MAX_NODES, exact_solve, exact_solve_bnb
from .graphio import read_graph
from .instances import InstanceSpec, generate_instance, preset, table5_specs
from .metaheuristics import BpsoConfig, GaConfig, bpso_solve, ga_solve, greedy_solve
from .model import CostParams, SbaGraph, density_percent, hq_from_fraction

log = logging.getLogger(__name__)

DEFAULT_FRACTIONS = tuple(round(0.1 * k, 1) for k in range(1, 10))
STOCHASTIC = {"bpso", "ga"}


@dataclass
class SolverEntry:
    name: str
    config: dict[str, Any] = field(default_factory=dict)


@dataclass
class SweepConfig:
    instances: list[dict[str, Any]]
    hq_fractions: list[float] = field(default_factory=lambda: list(DEFAULT_FRACTIONS))
    alpha: float = 40.0
    beta1: float = 20.0
    beta2: float = 10.0
    solvers: list[SolverEntry] = field(default_factory=lambda: [
        SolverEntry("exact"), SolverEntry("bpso"), SolverEntry("ga"), SolverEntry("greedy")])
    repetitions: int = 10
    seed_base: int = 0
    max_nodes: int = MAX_NODES
    output: str | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise InvalidInputError("repetitions must be >= 1")
        for f in self.hq_fractions:
            if not 0 <= f <= 1:
                raise InvalidInputError(f"hq fraction {f} outside [0, 1]")
        for entry in self.solvers:
            if entry.name not in SOLVERS:
                raise InvalidInputError(f"unknown solver {entry.name!r}; choose from {sorted(SOLVERS)}")

    @classmethod
    def default(cls) -> "SweepConfig":
        return cls(instances=[{"preset": s.name} for s in table5_specs()])

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepConfig":
        doc = dict(doc)
        params = doc.pop("params", {}) or {}
        solvers = doc.pop("solvers", None)
        if doc.get("instances") in (None, "presets", "default"):
            doc["instances"] = [{"preset": s.name} for s in table5_specs()]
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        if solvers is not None:
            doc["solvers"] = [
                SolverEntry(s) if isinstance(s, str) else SolverEntry(s["name"], dict(s.get("config") or {}))
                for s in solvers
            ]
        for key in ("alpha", "beta1", "beta2"):
            if key in params:
                doc[key] = float(params[key])
        return cls(**doc)

    @classmethod
    def load(cls, source: str | Path) -> "SweepConfig":
        """``source`` is a YAML file path or the literal ``default``."""
        if str(source) == "default":
            return cls.default()
        path = Path(source)
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
        config = cls.from_dict(doc)
        # relative instance files resolve against the config file
        for inst in config.instances:
            if "file" in inst and not Path(inst["file"]).is_absolute():
                inst["file"] = str(path.parent / inst["file"])
        return config

    def cell_count(self) -> int:
        per_hq = sum(self.repetitions if s.name in STOCHASTIC else 1 for s in self.solvers)
        return len(self.instances) * len(self.hq_fractions) * per_hq


@dataclass
class BenchmarkRow:
    instance: str
    n: int
    edges: int
    density: float
    hq_fraction: float
    hq_absolute: float
    solver: str
    seed: int | None
    total: float
    hosting: float
    public_comm: float
    hybrid_comm: float
    gap_to_optimal: float | None
    wall_time: float
    evaluations: int
    feasible: bool
    error: str = ""


CSV_COLUMNS = [f.name for f in dataclasses.fields(BenchmarkRow)]
_INT = {"n", "edges", "seed", "evaluations"}
_FLOAT = {"density", "hq_fraction", "hq_absolute", "total", "hosting", "public_comm",
          "hybrid_comm", "gap_to_optimal", "wall_time"}


def _run_exact(graph, params, cfg, seed, max_nodes):
    return exact_solve(graph, params, max_nodes=max_nodes)


def _run_bnb(graph, params, cfg, seed, max_nodes):
    return exact_solve_bnb(graph, params, max_nodes=max_nodes)


def _run_bpso(graph, params, cfg, seed, max_nodes):
    return bpso_solve(graph, params, BpsoConfig(**{**cfg, "seed": seed}))


def _run_ga(graph, params, cfg, seed, max_nodes):
    return ga_solve(graph, params, GaConfig(**{**cfg, "seed": seed}))


def _run_greedy(graph, params, cfg, seed, max_nodes):
    return greedy_solve(graph, params)


SOLVERS = {
    "exact": _run_exact,
    "exact_bnb": _run_bnb,
    "bpso": _run_bpso,
    "ga": _run_ga,
    "greedy": _run_greedy,
}


def load_instance(source: dict[str, Any]) -> tuple[str, SbaGraph]:
    if "preset" in source:
        spec = preset(source["preset"])
        if "seed" in source:
            spec = spec.with_seed(int(source["seed"]))
        return source.get("name", spec.name), generate_instance(spec)
    if "file" in source:
        path = Path(source["file"])
        return source.get("name", path.stem), read_graph(path)
    if "spec" in source:
        spec = InstanceSpec(**source["spec"])
        return spec.name, generate_instance(spec)
    raise InvalidInputError(f"instance entry needs 'preset', 'file' or 'spec': {source!r}")


def _gap(total: float, optimum: float | None) -> float | None:
    if optimum is None:
        return None
    if optimum == 0:
        return 0.0 if total == 0 else math.inf
    return total / optimum - 1.0


def iter_sweep(config: SweepConfig) -> Iterator[BenchmarkRow]:
    params0 = CostParams(config.alpha, config.beta1, config.beta2)
    for source in config.instances:
        try:
            name, graph = load_instance(source)
        except Exception as exc:
            name = str(source.get("name") or source.get("preset") or source.get("file") or source)
            log.warning("instance %s failed to load: %s", name, exc)
            for frac in config.hq_fractions:
                for entry in config.solvers:
                    for seed in _seeds(entry.name, config):
                        yield _failed(name, None, frac, entry.name, seed, f"load failed: {exc}")
            continue
        for frac in config.hq_fractions:
            hq = hq_from_fraction(graph, frac)
            params = params0.with_hq(hq)
            optimum = None
            rows: list[BenchmarkRow] = []
            for entry in config.solvers:
                for seed in _seeds(entry.name, config):
                    try:
                        result = SOLVERS[entry.name](graph, params, entry.config, seed, config.max_nodes)
                    except Exception as exc:
                        log.warning("%s/%s/%s failed: %s", name, frac, entry.name, exc)
                        row = _failed(name, graph, frac, entry.name, seed, str(exc), hq)
                    else:
                        if entry.name in ("exact", "exact_bnb") and result.feasible and optimum is None:
                            optimum = result.total
                        row = BenchmarkRow(
                            instance=name, n=graph.n, edges=len(graph.edges),
                            density=_density(graph), hq_fraction=frac, hq_absolute=hq,
                            solver=entry.name, seed=seed, total=result.total,
                            hosting=result.breakdown.hosting, public_comm=result.breakdown.public_comm,
                            hybrid_comm=result.breakdown.hybrid_comm, gap_to_optimal=None,
                            wall_time=result.wall_time, evaluations=result.evaluations,
                            feasible=result.feasible,
                        )
                    rows.append(row)
            for row in rows:
                if not row.error:
                    row.gap_to_optimal = _gap(row.total, optimum)
                yield row


def _seeds(solver: str, config: SweepConfig) -> list[int | None]:
    if solver in STOCHASTIC:
        return [config.seed_base + rep for rep in range(config.repetitions)]
    return [None]


def _density(graph: SbaGraph) -> float:
    return density_percent(graph) if graph.n >= 2 else 0.0


def _failed(name, graph, frac, solver, seed, reason, hq=math.nan) -> BenchmarkRow:
    nan = math.nan
    return BenchmarkRow(
        instance=name, n=graph.n if graph else 0, edges=len(graph.edges) if graph else 0,
        density=_density(graph) if graph else nan, hq_fraction=frac, hq_absolute=hq,
        solver=solver, seed=seed, total=nan, hosting=nan, public_comm=nan, hybrid_comm=nan,
        gap_to_optimal=None, wall_time=nan, evaluations=0, feasible=False, error=reason or "failed",
    )


def _encode(row: BenchmarkRow) -> list[str]:
    out = []
    for key in CSV_COLUMNS:
        value = getattr(row, key)
        if value is None:
            out.append("")
        elif isinstance(value, bool):
            out.append("true" if value else "false")
        elif isinstance(value, float):
            out.append(repr(value))
        else:
            out.append(str(value))
    return out


def _decode(record: dict[str, str]) -> BenchmarkRow:
    values: dict[str, Any] = {}
    for key in CSV_COLUMNS:
        raw = record[key]
        if key in _INT:
            values[key] = int(raw) if raw != "" else None
        elif key in _FLOAT:
            values[key] = float(raw) if raw != "" else None
        elif key == "feasible":
            values[key] = raw == "true"
        else:
            values[key] = raw
    return BenchmarkRow(**values)


class CsvWriter:
    """Incremental CSV output; every row is flushed once written."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            self._fh = open(self.path, "w", newline="")
        except OSError as exc:
            raise OSError(f"cannot write {self.path}: {exc}") from exc
        self._writer = csv.writer(self._fh)
        self._writer.writerow(CSV_COLUMNS)
        self._fh.flush()

    def write(self, row: BenchmarkRow):
        self._writer.writerow(_encode(row))
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def run_sweep(config: SweepConfig, output: str | Path | None = None) -> list[BenchmarkRow]:
    """Run every cell of ``config``; rows also stream to ``output`` (or ``config.output``)."""
    output = output or config.output
    rows = []
    writer = CsvWriter(output) if output else None
    try:
        # gaps need the exact optimum, so rows of one (instance, hq) are written together
        for row in iter_sweep(config):
            rows.append(row)
            if writer:
                writer.write(row)
    finally:
        if writer:
            writer.close()
    return rows


def emit_csv(rows, path):
    with CsvWriter(path) as writer:
        for row in rows:
            writer.write(row)


def read_csv(path) -> list[BenchmarkRow]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise InvalidInputError(f"{path}: unexpected header {reader.fieldnames}")
        return [_decode(record) for record in reader]


@dataclass
class Summary:
    cells: pd.DataFrame
    solvers: pd.DataFrame


def summarize(rows) -> Summary:
    """Per-cell medians and per-solver aggregates.

    ``time_ratio`` is the mean, over (instance, hq) cells, of the solver's
    median wall time divided by the exact solver's wall time in that cell.
    """
    rows = [r for r in rows if not r.error]
    if not rows:
        raise InvalidInputError("nothing to summarize: no successful rows")
    df = pd.DataFrame([dataclasses.asdict(r) for r in rows])
    df["gap_to_optimal"] = df["gap_to_optimal"].astype(float)
    keys = ["instance", "hq_fraction", "solver"]
    cells = (
        df.groupby(keys, sort=False)
        .agg(median_total=("total", "median"), min_total=("total", "min"), max_total=("total", "max"),
             median_wall_time=("wall_time", "median"), median_gap=("gap_to_optimal", "median"),
             runs=("total", "size"))
        .reset_index()
    )
    exact_time = cells[cells.solver == "exact"].set_index(["instance", "hq_fraction"])["median_wall_time"]
    ratio = cells.join(exact_time.rename("exact_time"), on=["instance", "hq_fraction"])
    ratio = ratio["median_wall_time"] / ratio["exact_time"]
    cells = cells.assign(time_ratio=ratio)
    per_solver = cells.groupby("solver", sort=False).agg(
        median_wall_time=("median_wall_time", "median"), time_ratio=("time_ratio", "mean"),
        cells=("runs", "size"), runs=("runs", "sum"))
    mean_gap = df.groupby("solver", sort=False)["gap_to_optimal"].mean().rename("mean_gap")
    solvers = per_solver.join(mean_gap)[["mean_gap", "median_wall_time", "time_ratio", "cells", "runs"]]
    solvers = solvers.reset_index()
    return Summary(cells, solvers)


def emit_plot_data(summary: Summary, directory) -> list[Path]:
    """Write ``<instance>_cost.dat`` and ``<instance>_time.dat`` per instance.

    Each file holds one whitespace-separated two-column series per solver
    (``<solver>_hq``, ``<solver>_cost`` or ``<solver>_time``), one line
    per hq fraction.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {directory}: {exc}") from exc
    written = []
    cells = summary.cells
    for instance, group in cells.groupby("instance", sort=False):
        for kind, column in (("cost", "median_total"), ("time", "median_wall_time")):
            table = group.pivot(index="hq_fraction", columns="solver", values=column).sort_index()
            header, columns = [], []
            for solver in table.columns:
                header += [f"{solver}_hq", f"{solver}_{kind}"]
                columns += [table.index.to_numpy(), table[solver].to_numpy()]
            lines = ["# " + " ".join(header)]
            for values in zip(*columns):
                lines.append(" ".join(repr(float(v)) for v in values))
            path = directory / f"{instance}_{kind}.dat"
            try:
                path.write_text("\n".join(lines) + "\n")
            except OSError as exc:
                raise OSError(f"cannot write {path}: {exc}") from exc
            written.append(path)
    return written


def format_summary(summary: Summary) -> str:
    with pd.option_context("display.width", 120, "display.max_columns", 20):
        return summary.solvers.to_string(index=False, float_format=lambda v: f"{v:.6g}")
