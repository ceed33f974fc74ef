"""Training runs and parameter sweeps, with their on-disk outputs.

A training run directory holds::

    manifest.json          resolved config, enough to rerun bit-identically
    fitness.csv            generation,best_fitness,mean_fitness,solved
    fitness.svg            best/mean fitness per generation
    best.chromosome        winning chromosome if solved, else the best seen
    checkpoints/gen_NNNN.chromosome
"""

from __future__ import annotations

import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .config import ExperimentConfig, dumps_document, parse_config
from .evolution import CSV_HEADER, GenerationStats, evolve, generations_to_solve
from .network import Chromosome, save_chromosome
from .render import line_chart_svg
from .simulation import make_evaluator

log = logging.getLogger(__name__)

SUMMARY_HEADER = "axis_value,seed,generations_to_solve,max_fitness,solved"


@dataclass
class TrainResult:
    history: list[GenerationStats]
    best: Chromosome
    best_fitness: float

    @property
    def solved(self) -> bool:
        return any(s.solved for s in self.history)

    @property
    def generations_to_solve(self) -> Optional[int]:
        return generations_to_solve(self.history)


def run_training(cfg: ExperimentConfig, out: Optional[str | Path] = None, threads: int = 1,
                 checkpoints: bool = True) -> TrainResult:
    """Evolve a controller for ``cfg``; write the run directory when ``out`` is given."""
    evaluator = make_evaluator(cfg.tracks, cfg.vehicle, cfg.sensor, cfg.episode)
    evaluator.check(cfg.network)
    out_dir = Path(out) if out is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "manifest.json").write_text(dumps_document(cfg.manifest(__version__)))
        if checkpoints:
            (out_dir / "checkpoints").mkdir(exist_ok=True)
        csv = open(out_dir / "fitness.csv", "w")
        csv.write(CSV_HEADER + "\n")
    else:
        csv = None

    def record(stats: GenerationStats) -> None:
        if csv is not None:
            csv.write(stats.csv_row() + "\n")
            csv.flush()
            if checkpoints:
                save_chromosome(stats.winner or stats.best_individual,
                                out_dir / "checkpoints" / f"gen_{stats.generation:04d}.chromosome")

    try:
        history = evolve(cfg.evolution, cfg.network, evaluator, threads=threads, on_generation=record)
    finally:
        if csv is not None:
            csv.close()

    winners = [s for s in history if s.winner is not None]
    if winners:
        best, best_fit = winners[0].winner, winners[0].winner_fitness
    else:
        top = max(history, key=lambda s: s.best_fitness)
        best, best_fit = top.best_individual, top.best_fitness
    result = TrainResult(history, best, best_fit)
    if out_dir is not None:
        save_chromosome(best, out_dir / "best.chromosome")
        gens = [s.generation for s in history]
        (out_dir / "fitness.svg").write_text(line_chart_svg(
            gens, {"best": [s.best_fitness for s in history],
                   "mean": [s.mean_fitness for s in history]},
            title=f"{cfg.name}: fitness per generation", xlabel="generation", ylabel="fitness",
        ))
    return result


# --- sweeps ------------------------------------------------------------------

class Axis(str, Enum):
    BEAM_COUNT = "beams"
    SENSOR_KIND = "sensor"
    SELECTION = "selection"
    SYMMETRY = "symmetry"


@dataclass(frozen=True)
class SweepSpec:
    axis: Axis
    values: tuple
    repetitions: int = 1

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        object.__setattr__(self, "values", tuple(_coerce(self.axis, v) for v in self.values))


def _coerce(axis: Axis, v: Any):
    if axis is Axis.BEAM_COUNT:
        return int(v)
    if axis is Axis.SYMMETRY:
        if isinstance(v, str):
            if v.lower() in ("true", "1", "yes", "symmetric"):
                return True
            if v.lower() in ("false", "0", "no", "unconstrained"):
                return False
            raise ValueError(f"not a symmetry flag: {v!r}")
        return bool(v)
    return str(v)


def apply_axis(doc: dict, axis: Axis, value) -> dict:
    """Config document with the sweep axis set to ``value``."""
    doc = json.loads(json.dumps(doc))
    if axis is Axis.BEAM_COUNT:
        sensor = doc.setdefault("sensor", {})
        old = int(sensor.get("beams", 25))
        sensor["beams"] = value
        net = doc.setdefault("network", {})
        # a hidden layer as wide as the input keeps following the input width
        if "layer_sizes" in net:
            sizes = list(net["layer_sizes"])
            if len(sizes) > 2 and sizes[1] == sizes[0]:
                sizes[1] = value
            sizes[0] = value
            net["layer_sizes"] = sizes
        elif net.get("hidden") == [old]:
            net["hidden"] = [value]
    elif axis is Axis.SENSOR_KIND:
        sensor = doc.setdefault("sensor", {})
        for k in ("fov_deg", "max_range", "noise_mean", "noise_std"):
            sensor.pop(k, None)
        sensor["kind"] = value
    elif axis is Axis.SELECTION:
        doc.setdefault("evolution", {})["selection"] = value
    elif axis is Axis.SYMMETRY:
        doc.setdefault("network", {})["symmetric"] = value
    return doc


@dataclass
class SweepRow:
    axis_value: Any
    seed: int
    generations_to_solve: Optional[int]
    max_fitness: Optional[float]
    solved: bool
    error: Optional[str] = None
    history: Optional[list[GenerationStats]] = None

    def csv_row(self) -> str:
        v = self.axis_value
        v = str(v).lower() if isinstance(v, bool) else str(v)
        g = "" if self.generations_to_solve is None else str(self.generations_to_solve)
        f = "" if self.max_fitness is None else repr(self.max_fitness)
        return f"{v},{self.seed},{g},{f},{int(self.solved)}"


def _one_row(doc: dict, base: str, axis: Axis, value, seed: int, out: Optional[str],
             threads: int) -> SweepRow:
    try:
        cfg = parse_config(doc, Path(base), seed=seed)
        res = run_training(cfg, out, threads=threads)
        return SweepRow(value, seed, res.generations_to_solve,
                        max(s.best_fitness for s in res.history), res.solved, history=res.history)
    except Exception as exc:  # recorded per row; the sweep carries on
        log.warning("sweep row %s=%s seed %d failed: %s", axis.value, value, seed, exc)
        return SweepRow(value, seed, None, None, False, error=f"{type(exc).__name__}: {exc}")


def run_sweep(doc: dict, spec: SweepSpec, out: Optional[str | Path] = None,
              base: str | Path = ".", threads: int = 1, parallel: int = 1) -> list[SweepRow]:
    """Train once per (value, repetition). Repetition r uses seed ``doc.seed + r``."""
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]
    base_seed = int(doc.get("seed", 0))
    out_dir = Path(out) if out is not None else None
    jobs = []
    for value in spec.values:
        vdoc = apply_axis(doc, spec.axis, value)
        for r in range(spec.repetitions):
            seed = base_seed + r
            row_out = None
            if out_dir is not None:
                row_out = str(out_dir / f"{spec.axis.value}={_label(value)}" / f"seed{seed}")
            jobs.append((vdoc, str(base), spec.axis, value, seed, row_out, threads))
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_one_row, *zip(*jobs)))
    else:
        rows = [_one_row(*j) for j in jobs]
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "summary.csv").write_text(
            SUMMARY_HEADER + "\n" + "".join(r.csv_row() + "\n" for r in rows))
        errors = [f"{r.axis_value},{r.seed}: {r.error}" for r in rows if r.error]
        if errors:
            (out_dir / "errors.txt").write_text("\n".join(errors) + "\n")
    return rows


def _label(v) -> str:
    return str(v).lower() if isinstance(v, bool) else str(v)


@dataclass(frozen=True)
class GroupSummary:
    value: Any
    runs: int
    solved: int
    median_generations: float  # inf when at least half the runs never solved

    @property
    def solve_rate(self) -> float:
        return self.solved / self.runs if self.runs else 0.0


def summarize(rows: Sequence[SweepRow]) -> list[GroupSummary]:
    """Per axis value: solve count and median generations-to-solve (unsolved counts as inf)."""
    groups: dict[Any, list[SweepRow]] = {}
    for r in rows:
        groups.setdefault(r.axis_value, []).append(r)
    out = []
    for v, rs in groups.items():
        gens = [float("inf") if r.generations_to_solve is None else float(r.generations_to_solve)
                for r in rs]
        out.append(GroupSummary(v, len(rs), sum(r.solved for r in rs), statistics.median(gens)))
    return out


def format_summary(groups: Sequence[GroupSummary], axis: Axis) -> str:
    lines = [f"{axis.value:>12}  runs  solved  median_generations"]
    for g in groups:
        lines.append(f"{_label(g.value):>12}  {g.runs:4d}  {g.solved:6d}  {g.median_generations:g}")
    return "\n".join(lines)
